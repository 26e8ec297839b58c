#include "hupa/tessellation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <unordered_map>

#include "hupa/predicates.hpp"

namespace hupa {

namespace {

using geom::ImagePoint;
using geom::Period;

constexpr std::uint32_t kNoTri = std::numeric_limits<std::uint32_t>::max();

/// Rank of every point in lexicographic (x, y) order; throws on duplicates.
std::vector<std::uint32_t> lexicographic_rank(const std::vector<Vec>& pts) {
    std::vector<std::uint32_t> order(pts.size());
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        return std::tie(pts[a][0], pts[a][1], a) < std::tie(pts[b][0], pts[b][1], b);
    });
    std::vector<std::uint32_t> rank(pts.size());
    for (std::size_t r = 0; r < order.size(); ++r) {
        if (r > 0 && pts[order[r]][0] == pts[order[r - 1]][0] && pts[order[r]][1] == pts[order[r - 1]][1])
            throw TessellationError("duplicate points " + std::to_string(order[r - 1]) + " and " +
                                    std::to_string(order[r]));
        rank[order[r]] = static_cast<std::uint32_t>(r);
    }
    return rank;
}

struct Node {
    ImagePoint p;
    std::uint32_t index;  // pattern index; super vertices use kNoTri
    std::uint64_t priority;
};

struct Tri {
    std::array<std::uint32_t, 3> v;
    std::array<std::uint32_t, 3> nb;  // neighbour across the edge opposite v[i]
    bool alive;
};

/// Bowyer-Watson over a fixed node set with exact, symbolically perturbed predicates.
class BowyerWatson {
  public:
    BowyerWatson(std::vector<Node> nodes, Period period) : nodes_(std::move(nodes)), period_(period) {}

    void run(const std::vector<std::uint32_t>& insertion_order, std::array<std::uint32_t, 3> super) {
        tris_.push_back({{super[0], super[1], super[2]}, {kNoTri, kNoTri, kNoTri}, true});
        last_ = 0;
        in_cavity_.assign(1, 0);
        for (std::uint32_t n : insertion_order) insert(n);
    }

    const std::vector<Tri>& triangles() const noexcept { return tris_; }

  private:
    int orient(std::uint32_t a, std::uint32_t b, std::uint32_t c) const {
        return geom::orient2d(nodes_[a].p, nodes_[b].p, nodes_[c].p, period_);
    }

    bool in_circle(const Tri& t, std::uint32_t d) const {
        const auto& [a, b, c] = t.v;
        return geom::incircle_perturbed(nodes_[a].p, nodes_[b].p, nodes_[c].p, nodes_[d].p,
                                        {nodes_[a].priority, nodes_[b].priority, nodes_[c].priority,
                                         nodes_[d].priority},
                                        period_) > 0;
    }

    std::uint32_t locate(std::uint32_t p) const {
        std::uint32_t t = last_;
        std::size_t steps = 0;
        int rot = 0;
        for (;;) {
            const Tri& tri = tris_[t];
            bool moved = false;
            for (int k = 0; k < 3; ++k) {
                const int i = (k + rot) % 3;
                const std::uint32_t a = tri.v[(i + 1) % 3], b = tri.v[(i + 2) % 3];
                if (orient(a, b, p) < 0) {
                    if (tri.nb[i] == kNoTri) throw TessellationError("point location left the super triangle");
                    t = tri.nb[i];
                    moved = true;
                    break;
                }
            }
            if (!moved) return t;
            rot = (rot + 1) % 3;
            if (++steps > 4 * tris_.size() + 64) throw TessellationError("point location did not terminate");
        }
    }

    void insert(std::uint32_t p) {
        const std::uint32_t start = locate(p);
        for (std::uint32_t v : tris_[start].v)
            if (v < nodes_.size() && nodes_[v].p.x == nodes_[p].p.x && nodes_[v].p.y == nodes_[p].p.y &&
                nodes_[v].p.sx == nodes_[p].p.sx && nodes_[v].p.sy == nodes_[p].p.sy)
                throw TessellationError("duplicate point encountered during insertion");

        cavity_.clear();
        stack_.clear();
        ++epoch_;
        stack_.push_back(start);
        in_cavity_[start] = epoch_;
        while (!stack_.empty()) {
            const std::uint32_t t = stack_.back();
            stack_.pop_back();
            cavity_.push_back(t);
            for (std::uint32_t n : tris_[t].nb) {
                if (n == kNoTri || in_cavity_[n] == epoch_ || visited_not_[n] == epoch_) continue;
                if (in_circle(tris_[n], p)) {
                    in_cavity_[n] = epoch_;
                    stack_.push_back(n);
                } else {
                    visited_not_[n] = epoch_;
                }
            }
        }

        // Boundary edges (a, b) of the cavity, counterclockwise, with the outside neighbour.
        boundary_.clear();
        for (std::uint32_t t : cavity_) {
            const Tri& tri = tris_[t];
            for (int i = 0; i < 3; ++i) {
                const std::uint32_t n = tri.nb[i];
                if (n != kNoTri && in_cavity_[n] == epoch_) continue;
                boundary_.push_back({tri.v[(i + 1) % 3], tri.v[(i + 2) % 3], n});
            }
        }
        for (std::uint32_t t : cavity_) {
            tris_[t].alive = false;
            free_.push_back(t);
        }

        by_start_.clear();
        by_end_.clear();
        std::vector<std::uint32_t> created;
        created.reserve(boundary_.size());
        for (const auto& e : boundary_) {
            std::uint32_t id;
            if (!free_.empty()) {
                id = free_.back();
                free_.pop_back();
            } else {
                id = static_cast<std::uint32_t>(tris_.size());
                tris_.push_back({});
                in_cavity_.push_back(0);
                visited_not_.push_back(0);
            }
            // v = (a, b, p): nb[2] is across (a, b).
            tris_[id] = {{e.a, e.b, p}, {kNoTri, kNoTri, e.outside}, true};
            if (e.outside != kNoTri) {
                Tri& o = tris_[e.outside];
                for (int i = 0; i < 3; ++i)
                    if (o.v[(i + 1) % 3] == e.b && o.v[(i + 2) % 3] == e.a) o.nb[i] = id;
            }
            by_start_[e.a] = id;
            by_end_[e.b] = id;
            created.push_back(id);
        }
        for (std::uint32_t id : created) {
            Tri& t = tris_[id];
            // nb[0] is across (b, p): the new triangle starting at b.
            t.nb[0] = by_start_.at(t.v[1]);
            // nb[1] is across (p, a): the new triangle ending at a.
            t.nb[1] = by_end_.at(t.v[0]);
        }
        last_ = created.front();
    }

    std::vector<Node> nodes_;
    Period period_;
    std::vector<Tri> tris_;
    std::vector<std::uint32_t> free_;
    std::vector<std::uint32_t> in_cavity_, visited_not_{0}, cavity_, stack_;
    std::uint32_t epoch_ = 0;
    std::uint32_t last_ = 0;
    struct EdgeRec {
        std::uint32_t a, b, outside;
    };
    std::vector<EdgeRec> boundary_;
    std::unordered_map<std::uint32_t, std::uint32_t> by_start_, by_end_;
};

struct TileCopy {
    std::uint32_t index;
    Shift shift;
};

/// Attempts the periodic construction with image points inside [-margin, L + margin].
std::optional<std::vector<Triangle>> try_periodic_delaunay(const PointPattern& pattern,
                                                           const std::vector<std::uint32_t>& rank, double margin) {
    const BoxDomain& box = pattern.box();
    const double lx = box.length(0), ly = box.length(1);
    const Period period{lx, ly};

    std::vector<Node> nodes;
    std::vector<TileCopy> copies;
    for (std::uint32_t i = 0; i < pattern.size(); ++i) {
        const Vec& p = pattern[i];
        for (int sy = -1; sy <= 1; ++sy)
            for (int sx = -1; sx <= 1; ++sx) {
                const double x = p[0] + sx * lx, y = p[1] + sy * ly;
                if (x < -margin || x > lx + margin || y < -margin || y > ly + margin) continue;
                const std::uint64_t copy = static_cast<std::uint64_t>((sy + 1) * 3 + (sx + 1));
                nodes.push_back({{p[0], p[1], sx, sy}, i, (static_cast<std::uint64_t>(rank[i]) + 1) * 16 + copy});
                copies.push_back({i, {sx, sy}});
            }
    }
    const auto n_real = static_cast<std::uint32_t>(nodes.size());

    // Spatially coherent insertion order: snake through a coarse grid.
    const double cell = std::max(std::sqrt(box.volume() / pattern.size()) * 2.0, 1e-300);
    std::vector<std::uint32_t> order(n_real);
    std::iota(order.begin(), order.end(), 0u);
    auto key = [&](std::uint32_t n) {
        const double x = nodes[n].p.x + nodes[n].p.sx * lx, y = nodes[n].p.y + nodes[n].p.sy * ly;
        const auto row = static_cast<long>(std::floor((y + margin) / cell));
        const auto col = static_cast<long>(std::floor((x + margin) / cell));
        return std::make_tuple(row, (row % 2) ? -col : col, nodes[n].priority);
    };
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) { return key(a) < key(b); });

    // Super triangle far outside the tiled region.
    const double cx = lx / 2, cy = ly / 2, span = 64.0 * (std::max(lx, ly) + margin);
    nodes.push_back({{cx - 2 * span, cy - span, 0, 0}, kNoTri, 0});
    nodes.push_back({{cx + 2 * span, cy - span, 0, 0}, kNoTri, 1});
    nodes.push_back({{cx, cy + 2 * span, 0, 0}, kNoTri, 2});

    BowyerWatson bw(nodes, period);
    bw.run(order, {n_real, n_real + 1, n_real + 2});

    std::vector<Triangle> kept;
    double area_sum = 0.0;
    const double lo_x = -margin, hi_x = lx + margin, lo_y = -margin, hi_y = ly + margin;
    for (const Tri& t : bw.triangles()) {
        if (!t.alive || t.v[0] >= n_real || t.v[1] >= n_real || t.v[2] >= n_real) continue;
        int anchor = 0;
        for (int k = 1; k < 3; ++k)
            if (rank[copies[t.v[k]].index] < rank[copies[t.v[anchor]].index]) anchor = k;
        if (copies[t.v[anchor]].shift != Shift{0, 0}) continue;

        Triangle out;
        for (int k = 0; k < 3; ++k) {
            const TileCopy& c = copies[t.v[(anchor + k) % 3]];
            out.vertex[k] = c.index;
            out.shift[k] = c.shift;
        }
        if (out.vertex[0] == out.vertex[1] || out.vertex[1] == out.vertex[2] || out.vertex[0] == out.vertex[2])
            return std::nullopt;

        std::array<Vec, 3> q;
        for (int k = 0; k < 3; ++k) {
            const Vec& p = pattern[out.vertex[k]];
            q[k] = {p[0] + out.shift[k][0] * lx, p[1] + out.shift[k][1] * ly, 0.0};
        }
        const double bx = q[1][0] - q[0][0], by = q[1][1] - q[0][1];
        const double ccx = q[2][0] - q[0][0], ccy = q[2][1] - q[0][1];
        const double d = 2.0 * (bx * ccy - by * ccx);
        const double b2 = bx * bx + by * by, c2 = ccx * ccx + ccy * ccy;
        const double ux = (ccy * b2 - by * c2) / d, uy = (bx * c2 - ccx * b2) / d;
        const double r = std::sqrt(ux * ux + uy * uy);
        const double ox = q[0][0] + ux, oy = q[0][1] + uy;
        if (!(ox - r >= lo_x && ox + r <= hi_x && oy - r >= lo_y && oy + r <= hi_y)) return std::nullopt;
        out.area = 0.5 * (bx * ccy - by * ccx);
        area_sum += out.area;
        kept.push_back(out);
    }
    if (kept.size() != 2 * pattern.size()) return std::nullopt;
    if (std::fabs(area_sum - box.volume()) > 1e-9 * box.volume()) return std::nullopt;
    return kept;
}

}  // namespace

Triangulation::Triangulation(BoxDomain box, std::vector<Vec> points, std::vector<Triangle> triangles)
    : box_(box), points_(std::move(points)), triangles_(std::move(triangles)) {}

Vec Triangulation::position(const Triangle& t, int k) const noexcept {
    const Vec& p = points_[t.vertex[k]];
    return {p[0] + t.shift[k][0] * box_.length(0), p[1] + t.shift[k][1] * box_.length(1), 0.0};
}

std::vector<std::pair<std::pair<std::uint32_t, std::uint32_t>, Shift>> Triangulation::edges() const {
    std::set<std::pair<std::pair<std::uint32_t, std::uint32_t>, Shift>> set;
    for (const Triangle& t : triangles_) {
        for (int k = 0; k < 3; ++k) {
            std::uint32_t i = t.vertex[k], j = t.vertex[(k + 1) % 3];
            Shift si = t.shift[k], sj = t.shift[(k + 1) % 3];
            if (i > j || (i == j && sj < si)) {
                std::swap(i, j);
                std::swap(si, sj);
            }
            set.insert({{i, j}, Shift{sj[0] - si[0], sj[1] - si[1]}});
        }
    }
    return {set.begin(), set.end()};
}

std::size_t Triangulation::edge_count() const { return edges().size(); }

long Triangulation::euler_characteristic() const {
    return static_cast<long>(vertex_count()) - static_cast<long>(edge_count()) + static_cast<long>(face_count());
}

Triangulation delaunay(const PointPattern& pattern) {
    if (pattern.dim() != 2) throw InvalidArgument("tessellations are 2D only");
    if (pattern.size() < 3) throw InvalidArgument("Delaunay triangulation needs at least 3 points");
    const auto rank = lexicographic_rank(pattern.points());
    const double spacing = std::sqrt(pattern.box().volume() / pattern.size());
    const double full = pattern.box().min_length();
    std::optional<std::vector<Triangle>> tris;
    const double first_margin = std::min(full, 8.0 * spacing);
    tris = try_periodic_delaunay(pattern, rank, first_margin);
    if (!tris && first_margin < full) tris = try_periodic_delaunay(pattern, rank, full);
    if (!tris)
        throw TessellationError(
            "pattern too sparse for the periodic 3x3 construction: a triangle would span more than one period");
    std::sort(tris->begin(), tris->end(), [](const Triangle& a, const Triangle& b) {
        return std::tie(a.vertex, a.shift) < std::tie(b.vertex, b.shift);
    });
    return Triangulation(pattern.box(), pattern.points(), std::move(*tris));
}

std::pair<Vec, double> circumcircle(const Triangulation& tri, const Triangle& t) {
    const Vec a = tri.position(t, 0), b = tri.position(t, 1), c = tri.position(t, 2);
    const double bx = b[0] - a[0], by = b[1] - a[1], cx = c[0] - a[0], cy = c[1] - a[1];
    const double d = 2.0 * (bx * cy - by * cx);
    const double b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
    const double ux = (cy * b2 - by * c2) / d, uy = (bx * c2 - cx * b2) / d;
    return {{a[0] + ux, a[1] + uy, 0.0}, std::sqrt(ux * ux + uy * uy)};
}

std::size_t empty_circle_violations(const Triangulation& tri, double rel_tol) {
    const BoxDomain& box = tri.box();
    const double lx = box.length(0), ly = box.length(1);
    std::size_t bad = 0;
    for (const Triangle& t : tri.triangles()) {
        const auto [center, r] = circumcircle(tri, t);
        const double limit = r * (1.0 - rel_tol);
        const int kx = static_cast<int>(std::ceil(r / lx)) + 1, ky = static_cast<int>(std::ceil(r / ly)) + 1;
        bool violated = false;
        for (std::uint32_t j = 0; j < tri.points().size() && !violated; ++j) {
            const Vec& p = tri.points()[j];
            for (int sy = -ky; sy <= ky && !violated; ++sy)
                for (int sx = -kx; sx <= kx && !violated; ++sx) {
                    bool member = false;
                    for (int k = 0; k < 3; ++k)
                        member |= t.vertex[k] == j && t.shift[k] == Shift{sx, sy};
                    if (member) continue;
                    const double dx = p[0] + sx * lx - center[0], dy = p[1] + sy * ly - center[1];
                    if (std::abs(dx) > limit || std::abs(dy) > limit) continue;
                    if (std::sqrt(dx * dx + dy * dy) < limit) violated = true;
                }
        }
        if (violated) ++bad;
    }
    return bad;
}

Tessellation::Tessellation(BoxDomain box, std::vector<Vec> points, std::vector<Vec> vertices,
                           std::vector<VoronoiCell> cells)
    : box_(box), points_(std::move(points)), vertices_(std::move(vertices)), cells_(std::move(cells)) {}

namespace {

double polygon_area(const std::vector<Vec>& loop) {
    double a = 0.0;
    for (std::size_t k = 0; k < loop.size(); ++k) {
        const Vec& p = loop[k];
        const Vec& q = loop[(k + 1) % loop.size()];
        a += p[0] * q[1] - q[0] * p[1];
    }
    return 0.5 * a;
}

Shift shift_between(const Vec& unwrapped, const Vec& wrapped, const BoxDomain& box) {
    return {static_cast<int>(std::lround((unwrapped[0] - wrapped[0]) / box.length(0))),
            static_cast<int>(std::lround((unwrapped[1] - wrapped[1]) / box.length(1)))};
}

Tessellation dual_voronoi(const PointPattern& pattern, const Triangulation& tri) {
    const BoxDomain& box = pattern.box();
    const double lx = box.length(0), ly = box.length(1);
    const double tol = 1e-10 * std::sqrt(box.volume() / pattern.size());

    struct Other {
        std::uint32_t index;
        Shift shift;
        bool operator==(const Other&) const = default;
    };
    struct Incident {
        std::uint32_t tri;
        Vec pos;  // circumcenter in the generator's frame
        double angle;
        std::array<Other, 2> others;
    };
    std::vector<std::vector<Incident>> incident(pattern.size());
    std::vector<Vec> centers(tri.face_count());
    for (std::uint32_t t = 0; t < tri.face_count(); ++t) {
        const Triangle& T = tri.triangles()[t];
        const Vec c = circumcircle(tri, T).first;
        centers[t] = c;
        for (int k = 0; k < 3; ++k) {
            const Shift s = T.shift[k];
            const Vec pos{c[0] - s[0] * lx, c[1] - s[1] * ly, 0.0};
            const Vec& g = pattern[T.vertex[k]];
            Incident inc{t, pos, std::atan2(pos[1] - g[1], pos[0] - g[0]), {}};
            for (int m = 1; m <= 2; ++m) {
                const int o = (k + m) % 3;
                inc.others[m - 1] = {T.vertex[o], {T.shift[o][0] - s[0], T.shift[o][1] - s[1]}};
            }
            incident[T.vertex[k]].push_back(inc);
        }
    }

    // Union coincident circumcenters (cocircular input) so merged vertices share one id.
    std::vector<std::uint32_t> parent(tri.face_count());
    std::iota(parent.begin(), parent.end(), 0u);
    auto find = [&](std::uint32_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (auto& list : incident) {
        std::sort(list.begin(), list.end(), [](const Incident& a, const Incident& b) {
            return std::tie(a.angle, a.tri) < std::tie(b.angle, b.tri);
        });
        for (std::size_t k = 0; k < list.size(); ++k) {
            const Incident& a = list[k];
            const Incident& b = list[(k + 1) % list.size()];
            if (std::hypot(a.pos[0] - b.pos[0], a.pos[1] - b.pos[1]) <= tol) {
                const std::uint32_t ra = find(a.tri), rb = find(b.tri);
                if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
            }
        }
    }
    std::vector<std::uint32_t> compact(tri.face_count(), kNoTri);
    std::vector<Vec> vertices;
    for (std::uint32_t t = 0; t < tri.face_count(); ++t) {
        const std::uint32_t r = find(t);
        if (compact[r] == kNoTri) {
            compact[r] = static_cast<std::uint32_t>(vertices.size());
            vertices.push_back(wrap_point(centers[r], box));
        }
    }

    std::vector<VoronoiCell> cells(pattern.size());
    for (std::uint32_t i = 0; i < pattern.size(); ++i) {
        const auto& list = incident[i];
        VoronoiCell& cell = cells[i];
        cell.generator = i;
        const std::size_t m = list.size();
        // Start at an entry that begins a new group so groups are not split across the wrap.
        std::size_t first = 0;
        for (std::size_t k = 0; k < m; ++k) {
            const Incident& prev = list[(k + m - 1) % m];
            if (find(prev.tri) != find(list[k].tri)) {
                first = k;
                break;
            }
        }
        std::set<std::uint32_t> nbrs;
        for (std::size_t s = 0; s < m; ++s) {
            const Incident& cur = list[(first + s) % m];
            const Incident& prev = list[(first + s + m - 1) % m];
            if (s > 0 && find(prev.tri) == find(cur.tri)) continue;
            const std::uint32_t id = compact[find(cur.tri)];
            cell.loop.push_back(cur.pos);
            cell.vertex_id.push_back(id);
            cell.vertex_shift.push_back(shift_between(cur.pos, vertices[id], box));
            if (m > 1 && find(prev.tri) != find(cur.tri)) {
                // The Voronoi edge from prev to cur is dual to their shared Delaunay edge.
                for (const Other& a : prev.others)
                    for (const Other& b : cur.others)
                        if (a == b) nbrs.insert(a.index);
            }
        }
        cell.neighbors.assign(nbrs.begin(), nbrs.end());
        cell.area = polygon_area(cell.loop);
    }
    return Tessellation(box, pattern.points(), std::move(vertices), std::move(cells));
}

struct ClipVertex {
    double x, y;
    std::uint32_t edge_label;  // label of the edge from this vertex to the next
};

std::vector<ClipVertex> clip(const std::vector<ClipVertex>& poly, double nx, double ny, double c,
                             std::uint32_t label) {
    std::vector<ClipVertex> out;
    const std::size_t n = poly.size();
    for (std::size_t k = 0; k < n; ++k) {
        const ClipVertex& a = poly[k];
        const ClipVertex& b = poly[(k + 1) % n];
        const double fa = nx * a.x + ny * a.y - c, fb = nx * b.x + ny * b.y - c;
        const bool ina = fa <= 0.0, inb = fb <= 0.0;
        if (ina) out.push_back(a);
        if (ina != inb) {
            const double t = fa / (fa - fb);
            const ClipVertex x{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y), 0};
            if (ina) {
                // Leaving: the new edge runs along the clipping line.
                out.push_back({x.x, x.y, label});
            } else {
                // Entering: the remainder of edge a->b keeps its label.
                out.push_back({x.x, x.y, a.edge_label});
            }
        }
    }
    return out;
}

}  // namespace

Tessellation voronoi_by_clipping(const PointPattern& pattern) {
    if (pattern.dim() != 2) throw InvalidArgument("tessellations are 2D only");
    if (pattern.empty()) throw InvalidArgument("Voronoi tessellation needs at least 1 point");
    lexicographic_rank(pattern.points());  // duplicate check
    const BoxDomain& box = pattern.box();
    const double lx = box.length(0), ly = box.length(1);
    const double diag = 2.0 * box.half_diagonal();
    const int kx = static_cast<int>(std::ceil(diag / lx + 0.5)), ky = static_cast<int>(std::ceil(diag / ly + 0.5));
    const double tol = 1e-10 * std::sqrt(box.volume() / pattern.size());

    std::vector<Vec> vertices;
    std::vector<VoronoiCell> cells(pattern.size());
    struct Candidate {
        double d2;
        double dx, dy;
        std::uint32_t j;
    };
    std::vector<Candidate> cand;
    for (std::uint32_t i = 0; i < pattern.size(); ++i) {
        const Vec& g = pattern[i];
        cand.clear();
        for (std::uint32_t j = 0; j < pattern.size(); ++j) {
            const Vec d0 = min_image(g, pattern[j], box);
            for (int sy = -ky; sy <= ky; ++sy)
                for (int sx = -kx; sx <= kx; ++sx) {
                    if (j == i && (std::abs(sx) + std::abs(sy) <= 1)) continue;  // self or square edges
                    const double dx = d0[0] + sx * lx, dy = d0[1] + sy * ly;
                    const double d2 = dx * dx + dy * dy;
                    if (d2 <= diag * diag) cand.push_back({d2, dx, dy, j});
                }
        }
        std::sort(cand.begin(), cand.end(), [](const Candidate& a, const Candidate& b) {
            return std::tie(a.d2, a.j, a.dx, a.dy) < std::tie(b.d2, b.j, b.dx, b.dy);
        });
        std::vector<ClipVertex> poly{{-lx / 2, -ly / 2, i}, {lx / 2, -ly / 2, i}, {lx / 2, ly / 2, i}, {-lx / 2, ly / 2, i}};
        double reach2 = 0.25 * (lx * lx + ly * ly);
        for (const Candidate& c : cand) {
            if (c.d2 > 4.0 * reach2) break;
            poly = clip(poly, c.dx, c.dy, 0.5 * c.d2, c.j);
            reach2 = 0.0;
            for (const auto& v : poly) reach2 = std::max(reach2, v.x * v.x + v.y * v.y);
        }
        VoronoiCell& cell = cells[i];
        cell.generator = i;
        std::set<std::uint32_t> nbrs;
        for (std::size_t k = 0; k < poly.size(); ++k) {
            const ClipVertex& a = poly[k];
            const ClipVertex& b = poly[(k + 1) % poly.size()];
            if (std::hypot(b.x - a.x, b.y - a.y) <= tol) continue;
            const Vec pos{g[0] + a.x, g[1] + a.y, 0.0};
            const Vec wrapped = wrap_point(pos, box);
            cell.vertex_id.push_back(static_cast<std::uint32_t>(vertices.size()));
            vertices.push_back(wrapped);
            cell.vertex_shift.push_back(shift_between(pos, wrapped, box));
            cell.loop.push_back(pos);
            nbrs.insert(a.edge_label);
        }
        cell.neighbors.assign(nbrs.begin(), nbrs.end());
        cell.area = polygon_area(cell.loop);
    }
    return Tessellation(box, pattern.points(), std::move(vertices), std::move(cells));
}

Tessellation voronoi(const PointPattern& pattern) {
    if (pattern.dim() != 2) throw InvalidArgument("tessellations are 2D only");
    if (pattern.empty()) throw InvalidArgument("Voronoi tessellation needs at least 1 point");
    if (pattern.size() >= 3) {
        try {
            return dual_voronoi(pattern, delaunay(pattern));
        } catch (const TessellationError& e) {
            if (std::string(e.what()).rfind("pattern too sparse", 0) != 0) throw;
        }
    }
    return voronoi_by_clipping(pattern);
}

CellStats pool_cell_statistics(const std::vector<Tessellation>& tessellations) {
    CellStats s;
    double area_sum = 0.0, area_sq = 0.0, edge_sum = 0.0, edge_sq = 0.0, side_sum = 0.0;
    std::size_t edges = 0;
    for (const Tessellation& t : tessellations) {
        for (const VoronoiCell& c : t.cells()) {
            ++s.cell_count;
            area_sum += c.area;
            side_sum += c.sides();
            ++s.side_histogram[c.sides()];
            for (std::size_t k = 0; k < c.loop.size(); ++k) {
                const Vec& a = c.loop[k];
                const Vec& b = c.loop[(k + 1) % c.loop.size()];
                const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
                edge_sum += len;
                ++edges;
            }
        }
    }
    if (s.cell_count == 0) return s;
    const double n = static_cast<double>(s.cell_count);
    s.area_mean = area_sum / n;
    s.mean_sides = side_sum / n;
    if (edges) s.edge_length_mean = edge_sum / static_cast<double>(edges);
    // Second pass for numerically stable deviations.
    for (const Tessellation& t : tessellations)
        for (const VoronoiCell& c : t.cells()) {
            area_sq += (c.area - s.area_mean) * (c.area - s.area_mean);
            for (std::size_t k = 0; k < c.loop.size(); ++k) {
                const Vec& a = c.loop[k];
                const Vec& b = c.loop[(k + 1) % c.loop.size()];
                const double dev = std::hypot(b[0] - a[0], b[1] - a[1]) - s.edge_length_mean;
                edge_sq += dev * dev;
            }
        }
    s.area_cv = s.area_mean != 0.0 ? std::sqrt(area_sq / n) / s.area_mean : 0.0;
    if (edges && s.edge_length_mean != 0.0)
        s.edge_length_cv = std::sqrt(edge_sq / static_cast<double>(edges)) / s.edge_length_mean;
    return s;
}

CellStats cell_statistics(const Tessellation& tess) { return pool_cell_statistics({tess}); }

CellStats ensemble_cell_statistics(const std::vector<PointPattern>& patterns) {
    if (patterns.empty()) throw InvalidArgument("ensemble statistics need at least one pattern");
    for (const auto& p : patterns)
        if (p.dim() != 2) throw InvalidArgument("ensemble statistics need 2D patterns (mixed dimensions given)");
    std::vector<Tessellation> tess;
    tess.reserve(patterns.size());
    for (const auto& p : patterns) tess.push_back(voronoi(p));
    return pool_cell_statistics(tess);
}

std::string format_tessellation(const Tessellation& tess) {
    const BoxDomain& box = tess.box();
    std::string out = "#hupa-tess v1\nrule=voronoi dim=2 lengths=" + format_decimal(box.length(0)) + "," +
                      format_decimal(box.length(1)) + " points=" + std::to_string(tess.points().size()) +
                      " vertices=" + std::to_string(tess.vertices().size()) +
                      " faces=" + std::to_string(tess.cells().size()) + "\n";
    out += "[vertices] id x y\n";
    for (std::size_t v = 0; v < tess.vertices().size(); ++v)
        out += std::to_string(v) + " " + format_decimal(tess.vertices()[v][0]) + " " +
               format_decimal(tess.vertices()[v][1]) + "\n";
    out += "[faces] generator area sides : vertex:shift_x:shift_y ...\n";
    for (const VoronoiCell& c : tess.cells()) {
        out += std::to_string(c.generator) + " " + format_decimal(c.area) + " " + std::to_string(c.sides()) + " :";
        for (std::size_t k = 0; k < c.vertex_id.size(); ++k)
            out += " " + std::to_string(c.vertex_id[k]) + ":" + std::to_string(c.vertex_shift[k][0]) + ":" +
                   std::to_string(c.vertex_shift[k][1]);
        out += "\n";
    }
    return out;
}

std::string format_triangulation(const Triangulation& tri) {
    const BoxDomain& box = tri.box();
    std::string out = "#hupa-tess v1\nrule=delaunay dim=2 lengths=" + format_decimal(box.length(0)) + "," +
                      format_decimal(box.length(1)) + " points=" + std::to_string(tri.points().size()) +
                      " vertices=" + std::to_string(tri.points().size()) +
                      " faces=" + std::to_string(tri.face_count()) + "\n";
    out += "[vertices] id x y\n";
    for (std::size_t v = 0; v < tri.points().size(); ++v)
        out += std::to_string(v) + " " + format_decimal(tri.points()[v][0]) + " " + format_decimal(tri.points()[v][1]) +
               "\n";
    out += "[faces] face area sides : vertex:shift_x:shift_y ...\n";
    for (std::size_t f = 0; f < tri.face_count(); ++f) {
        const Triangle& t = tri.triangles()[f];
        out += std::to_string(f) + " " + format_decimal(t.area) + " 3 :";
        for (int k = 0; k < 3; ++k)
            out += " " + std::to_string(t.vertex[k]) + ":" + std::to_string(t.shift[k][0]) + ":" +
                   std::to_string(t.shift[k][1]);
        out += "\n";
    }
    return out;
}

}  // namespace hupa
