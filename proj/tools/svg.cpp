#include "svg.hpp"

#include <algorithm>
#include <cstdio>
#include <vector>

namespace hupa::cli {

namespace {

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    std::string s = buf;
    if (s == "-0.000") s = "0.000";
    return s;
}

class Canvas {
  public:
    Canvas(const BoxDomain& box, double scale) : lx_(box.length(0)), ly_(box.length(1)), s_(scale) {
        const std::string w = fmt(lx_ * s_), h = fmt(ly_ * s_);
        out_ = "<?xml version=\"1.0\" encoding=\"UTF-8\" standalone=\"no\"?>\n"
               "<!DOCTYPE svg PUBLIC \"-//W3C//DTD SVG 1.1//EN\" "
               "\"http://www.w3.org/Graphics/SVG/1.1/DTD/svg11.dtd\">\n"
               "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
               w + "\" height=\"" + h + "\" viewBox=\"0 0 " + w + " " + h + "\">\n";
        out_ += "<defs><clipPath id=\"box\"><rect x=\"0\" y=\"0\" width=\"" + w + "\" height=\"" + h +
                "\"/></clipPath></defs>\n";
    }

    std::string x(double v) const { return fmt(v * s_); }
    std::string y(double v) const { return fmt((ly_ - v) * s_); }

    std::string subpath(const std::vector<Vec>& loop, double dx = 0.0, double dy = 0.0) const {
        if (loop.empty()) return {};
        std::string d = "M" + x(loop[0][0] + dx) + "," + y(loop[0][1] + dy);
        for (std::size_t k = 1; k < loop.size(); ++k) d += " L" + x(loop[k][0] + dx) + "," + y(loop[k][1] + dy);
        return d + " Z";
    }

    void path(const std::string& d, const char* style) { out_ += "<path d=\"" + d + "\" " + style + "/>\n"; }

    void circle(const Vec& c, double r, const char* style) {
        out_ += "<circle cx=\"" + x(c[0]) + "\" cy=\"" + y(c[1]) + "\" r=\"" + fmt(r * s_) + "\" " + style + "/>\n";
    }

    void raw(const std::string& s) { out_ += s; }

    std::string finish() {
        out_ += "<rect x=\"0\" y=\"0\" width=\"" + fmt(lx_ * s_) + "\" height=\"" + fmt(ly_ * s_) +
                "\" fill=\"none\" stroke=\"black\" stroke-width=\"1\"/>\n</svg>\n";
        return std::move(out_);
    }

  private:
    double lx_, ly_, s_;
    std::string out_;
};

}  // namespace

std::string render_pattern_svg(const PointPattern& pattern, double scale, double point_radius) {
    Canvas c(pattern.box(), scale);
    for (const Vec& p : pattern.points()) c.circle(p, point_radius, "fill=\"black\"");
    return c.finish();
}

std::string render_voronoi_svg(const Tessellation& tess, double scale) {
    Canvas c(tess.box(), scale);
    c.raw("<g clip-path=\"url(#box)\">\n");
    // a cell straddling the seam gets one subpath per periodic image that touches the box
    for (const VoronoiCell& cell : tess.cells()) {
        double xmin = cell.loop[0][0], xmax = xmin, ymin = cell.loop[0][1], ymax = ymin;
        for (const Vec& v : cell.loop) {
            xmin = std::min(xmin, v[0]);
            xmax = std::max(xmax, v[0]);
            ymin = std::min(ymin, v[1]);
            ymax = std::max(ymax, v[1]);
        }
        const double lx = tess.box().length(0), ly = tess.box().length(1);
        std::string d;
        for (int sx = -1; sx <= 1; ++sx) {
            for (int sy = -1; sy <= 1; ++sy) {
                if (xmax + sx * lx <= 0.0 || xmin + sx * lx >= lx || ymax + sy * ly <= 0.0 || ymin + sy * ly >= ly)
                    continue;
                d += (d.empty() ? "" : " ") + c.subpath(cell.loop, sx * lx, sy * ly);
            }
        }
        c.path(d, "fill=\"none\" stroke=\"black\" stroke-width=\"0.5\"");
    }
    c.raw("</g>\n");
    for (const Vec& p : tess.points()) c.circle(p, 0.08, "fill=\"red\"");
    return c.finish();
}

std::string render_delaunay_svg(const Triangulation& tri, double scale) {
    Canvas c(tri.box(), scale);
    c.raw("<g clip-path=\"url(#box)\">\n");
    for (const Triangle& t : tri.triangles())
        c.path(c.subpath({tri.position(t, 0), tri.position(t, 1), tri.position(t, 2)}),
               "fill=\"none\" stroke=\"black\" stroke-width=\"0.5\"");
    c.raw("</g>\n");
    for (const Vec& p : tri.points()) c.circle(p, 0.08, "fill=\"red\"");
    return c.finish();
}

}  // namespace hupa::cli
