#include "hupa/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "hupa/neighbor_grid.hpp"

namespace hupa {

BoxDomain::BoxDomain(std::span<const double> lengths) {
    if (lengths.size() < 2 || lengths.size() > 3)
        throw InvalidArgument("box dimension must be 2 or 3, got " + std::to_string(lengths.size()));
    dim_ = static_cast<int>(lengths.size());
    for (int i = 0; i < dim_; ++i) {
        if (!(lengths[i] > 0.0) || !std::isfinite(lengths[i]))
            throw InvalidArgument("box length on axis " + std::to_string(i) + " must be positive and finite");
        lengths_[i] = lengths[i];
    }
}

double BoxDomain::volume() const noexcept {
    double v = 1.0;
    for (int i = 0; i < dim_; ++i) v *= lengths_[i];
    return v;
}

double BoxDomain::min_length() const noexcept {
    double m = lengths_[0];
    for (int i = 1; i < dim_; ++i) m = std::min(m, lengths_[i]);
    return m;
}

double BoxDomain::half_diagonal() const noexcept {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i) s += 0.25 * lengths_[i] * lengths_[i];
    return std::sqrt(s);
}

PointPattern::PointPattern(BoxDomain box, std::vector<Vec> points, std::optional<double> hard_radius,
                           std::string provenance)
    : box_(box), points_(std::move(points)), hard_radius_(hard_radius), provenance_(std::move(provenance)) {
    if (hard_radius_ && !(*hard_radius_ >= 0.0)) throw InvalidArgument("hard radius must be nonnegative");
    for (std::size_t n = 0; n < points_.size(); ++n) {
        for (int i = 0; i < box_.dim(); ++i) {
            const double c = points_[n][i];
            if (!(c >= 0.0 && c < box_.length(i)))
                throw InvalidArgument("point " + std::to_string(n) + " lies outside the box on axis " +
                                      std::to_string(i));
        }
        for (int i = box_.dim(); i < 3; ++i) points_[n][i] = 0.0;
    }
    for (char& c : provenance_)
        if (c == '\n' || c == '\r') c = ' ';
}

Vec wrap_point(const Vec& p, const BoxDomain& box) noexcept {
    Vec out{0.0, 0.0, 0.0};
    for (int i = 0; i < box.dim(); ++i) {
        const double L = box.length(i);
        double c = std::fmod(p[i], L);
        if (c < 0.0) c += L;
        if (c >= L) c = 0.0;  // -tiny + L rounds up to L
        out[i] = c;
    }
    return out;
}

Vec min_image(const Vec& p, const Vec& q, const BoxDomain& box) noexcept {
    Vec d{0.0, 0.0, 0.0};
    for (int i = 0; i < box.dim(); ++i) d[i] = std::remainder(q[i] - p[i], box.length(i));
    return d;
}

double periodic_distance_sq(const Vec& p, const Vec& q, const BoxDomain& box) noexcept {
    const Vec d = min_image(p, q, box);
    return d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
}

double periodic_distance(const Vec& p, const Vec& q, const BoxDomain& box) noexcept {
    return std::sqrt(periodic_distance_sq(p, q, box));
}

std::size_t hard_core_violations(const PointPattern& pattern, double radius, double tol) {
    const double min_d = 2.0 * radius - tol;
    std::size_t bad = 0;
    const auto& pts = pattern.points();
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            if (periodic_distance(pts[i], pts[j], pattern.box()) < min_d) ++bad;
    return bad;
}

double mean_nearest_neighbor_distance(const PointPattern& pattern) {
    if (pattern.size() < 2) throw DegenerateInput("nearest-neighbour spacing needs at least 2 points");
    const NeighborGrid grid(pattern, std::pow(pattern.box().volume() / pattern.size(), 1.0 / pattern.dim()));
    double sum = 0.0;
    for (std::size_t i = 0; i < pattern.size(); ++i) sum += std::sqrt(grid.nearest_other_sq(i));
    return sum / static_cast<double>(pattern.size());
}

std::string format_decimal(double v) {
    if (v == 0.0) return "0.0000000000000000";
    const int exponent = static_cast<int>(std::floor(std::log10(std::fabs(v))));
    const int precision = std::max(0, 16 - exponent);
    char buf[512];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, precision);
    return std::string(buf, res.ptr);
}

namespace {

constexpr const char* kMagic = "#hupa-pattern v1";

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& tok, std::size_t line, const char* what) {
    double v = 0.0;
    const char* first = tok.data();
    const char* last = tok.data() + tok.size();
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec == std::errc::result_out_of_range)
        throw ParseError(std::string(what) + " '" + tok + "' is outside the representable range",
                         ParseError::Where::line, line);
    if (ec != std::errc{} || ptr != last || !std::isfinite(v))
        throw ParseError(std::string("malformed ") + what + " '" + tok + "'", ParseError::Where::line, line);
    return v;
}

}  // namespace

std::string format_pattern(const PointPattern& pattern) {
    std::string out;
    out.reserve(64 + pattern.size() * 48);
    out += kMagic;
    out += "\ndim=" + std::to_string(pattern.dim()) + " lengths=";
    for (int i = 0; i < pattern.dim(); ++i) {
        if (i) out += ',';
        out += format_decimal(pattern.box().length(i));
    }
    out += " hard_radius=";
    out += pattern.hard_radius() ? format_decimal(*pattern.hard_radius()) : std::string("none");
    out += "\nprovenance=" + pattern.provenance() + "\n";
    for (const Vec& p : pattern.points()) {
        for (int i = 0; i < pattern.dim(); ++i) {
            if (i) out += ' ';
            out += format_decimal(p[i]);
        }
        out += '\n';
    }
    return out;
}

std::string format_pattern_csv(const PointPattern& pattern) {
    std::string out = pattern.dim() == 2 ? "x,y\n" : "x,y,z\n";
    for (const Vec& p : pattern.points()) {
        for (int i = 0; i < pattern.dim(); ++i) {
            if (i) out += ',';
            out += format_decimal(p[i]);
        }
        out += '\n';
    }
    return out;
}

PointPattern parse_pattern(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;

    auto next_line = [&](const char* what) {
        if (!std::getline(in, line)) throw ParseError(std::string("missing ") + what, ParseError::Where::line, lineno + 1);
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
    };

    next_line("magic line");
    if (line != kMagic) throw ParseError("expected '" + std::string(kMagic) + "'", ParseError::Where::line, lineno);

    next_line("geometry header");
    int dim = 0;
    std::vector<double> lengths;
    std::optional<double> hard_radius;
    bool seen_dim = false, seen_lengths = false, seen_radius = false;
    for (const std::string& field : split(line, ' ')) {
        if (field.empty()) continue;
        const auto eq = field.find('=');
        if (eq == std::string::npos) throw ParseError("malformed header field '" + field + "'", ParseError::Where::line, lineno);
        const std::string key = field.substr(0, eq), value = field.substr(eq + 1);
        if (key == "dim") {
            if (value != "2" && value != "3") throw ParseError("dim must be 2 or 3", ParseError::Where::line, lineno);
            dim = value[0] - '0';
            seen_dim = true;
        } else if (key == "lengths") {
            for (const std::string& tok : split(value, ',')) lengths.push_back(parse_double(tok, lineno, "box length"));
            seen_lengths = true;
        } else if (key == "hard_radius") {
            if (value != "none") hard_radius = parse_double(value, lineno, "hard radius");
            seen_radius = true;
        } else {
            throw ParseError("unknown header key '" + key + "'", ParseError::Where::line, lineno);
        }
    }
    if (!seen_dim || !seen_lengths || !seen_radius)
        throw ParseError("header must declare dim, lengths and hard_radius", ParseError::Where::line, lineno);
    if (static_cast<int>(lengths.size()) != dim)
        throw ParseError("dim=" + std::to_string(dim) + " but " + std::to_string(lengths.size()) + " lengths given",
                         ParseError::Where::line, lineno);
    std::optional<BoxDomain> box;
    try {
        box.emplace(std::span<const double>(lengths));
        if (hard_radius && *hard_radius < 0.0) throw InvalidArgument("hard radius must be nonnegative");
    } catch (const InvalidArgument& e) {
        throw ParseError(e.what(), ParseError::Where::line, lineno);
    }

    next_line("provenance line");
    if (line.rfind("provenance=", 0) != 0) throw ParseError("expected 'provenance='", ParseError::Where::line, lineno);
    std::string provenance = line.substr(11);

    std::vector<Vec> points;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> toks;
        for (auto& t : split(line, ' '))
            if (!t.empty()) toks.push_back(std::move(t));
        if (static_cast<int>(toks.size()) != dim)
            throw ParseError("dimension mismatch: row has " + std::to_string(toks.size()) + " components, header declares dim=" +
                                 std::to_string(dim),
                             ParseError::Where::line, lineno);
        Vec p{0.0, 0.0, 0.0};
        for (int i = 0; i < dim; ++i) p[i] = parse_double(toks[i], lineno, "coordinate");
        points.push_back(wrap_point(p, *box));
    }
    return PointPattern(*box, std::move(points), hard_radius, std::move(provenance));
}

PointPattern load_pattern(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open pattern file '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_pattern(ss.str());
}

void save_pattern(const PointPattern& pattern, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write pattern file '" + path.string() + "'");
    out << format_pattern(pattern);
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace hupa
