#include "lattri/triangulation.hpp"

#include "lattri/error.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <unordered_map>

namespace lattri {

const char* edge_class_name(EdgeClass c) noexcept {
    switch (c) {
    case EdgeClass::Increasing: return "increasing";
    case EdgeClass::Decreasing: return "decreasing";
    case EdgeClass::UnitDiagTop: return "unit_diag_top";
    case EdgeClass::Other: return "other";
    }
    return "?";
}

namespace {

struct Derived {
    std::vector<Triangle> tris;
    std::vector<std::array<int, 2>> inc;
};

// Checks everything that depends only on the edge list and rebuilds the
// triangle caches. Returns an error message on the first violation.
std::optional<std::string> derive(const BoundaryCondition& bc, const std::vector<Edge>& edges, Derived& out) {
    const Region& r = bc.region();
    const std::size_t n = edges.size();
    if (n != std::size_t(r.midpoint_count())) {
        return "expected " + std::to_string(r.midpoint_count()) + " edges, got " + std::to_string(n);
    }
    for (std::size_t x = 0; x < n; ++x) {
        const Edge& e = edges[x];
        if (e.midpoint() != r.midpoints()[x]) return "edge " + to_string(e) + " stored at the wrong midpoint";
        if (!bc.is_compatible(e)) return "edge " + to_string(e) + " is not compatible with the boundary condition";
    }

    // Crossing edges share the interior of some unit square; axis edges are
    // filed under both squares they border.
    std::map<UnitSquare, std::vector<int>> buckets;
    for (std::size_t x = 0; x < n; ++x) {
        const Edge& e = edges[x];
        if (is_unit_axis(e)) {
            const Point lo = e.a;
            if (e.dx() == 0) {
                buckets[UnitSquare{lo}].push_back(int(x));
                buckets[UnitSquare{Point{lo.x2 - 2, lo.y2}}].push_back(int(x));
            } else {
                buckets[UnitSquare{lo}].push_back(int(x));
                buckets[UnitSquare{Point{lo.x2, lo.y2 - 2}}].push_back(int(x));
            }
            continue;
        }
        for (const UnitSquare& s : squares_crossed(e)) buckets[s].push_back(int(x));
    }
    for (const auto& [sq, ids] : buckets) {
        for (std::size_t i = 0; i < ids.size(); ++i) {
            for (std::size_t j = i + 1; j < ids.size(); ++j) {
                if (open_segments_intersect(edges[std::size_t(ids[i])], edges[std::size_t(ids[j])])) {
                    return "edges " + to_string(edges[std::size_t(ids[i])]) + " and " +
                           to_string(edges[std::size_t(ids[j])]) + " cross";
                }
            }
        }
    }

    std::unordered_map<Point, std::vector<Point>, PointHash> nbrs;
    for (const Edge& e : edges) {
        nbrs[e.a].push_back(e.b);
        nbrs[e.b].push_back(e.a);
    }
    auto edge_id = [&](Point p, Point q) -> int {
        const int m = r.midpoint_index(Point{(p.x2 + q.x2) / 2, (p.y2 + q.y2) / 2});
        if (m < 0) return -1;
        const Edge& e = edges[std::size_t(m)];
        return ((e.a == p && e.b == q) || (e.a == q && e.b == p)) ? m : -1;
    };

    std::set<std::array<int, 3>> seen;
    out.tris.clear();
    out.inc.assign(n, {-1, -1});
    for (std::size_t x = 0; x < n; ++x) {
        const Edge& e = edges[x];
        for (const Point c : nbrs[e.a]) {
            if (c == e.b) continue;
            const std::int64_t o = orient(e.a, e.b, c);
            if (o != 4 && o != -4) continue;
            const int mb = edge_id(e.b, c);
            if (mb < 0) continue;
            const int ma = edge_id(e.a, c);
            std::array<int, 3> key{int(x), ma, mb};
            std::sort(key.begin(), key.end());
            if (!seen.insert(key).second) continue;
            Triangle t;
            t.verts = {e.a, e.b, c};
            t.sides = {mb, ma, int(x)};  // side i is opposite vertex i
            const int id = int(out.tris.size());
            for (int s : t.sides) {
                auto& slot = out.inc[std::size_t(s)];
                if (slot[0] < 0) {
                    slot[0] = id;
                } else if (slot[1] < 0) {
                    slot[1] = id;
                } else {
                    return "edge " + to_string(edges[std::size_t(s)]) + " lies in more than two triangles";
                }
            }
            out.tris.push_back(t);
        }
    }
    if (std::int64_t(out.tris.size()) != r.twice_area()) {
        return "triangles do not tile the polygon: " + std::to_string(out.tris.size()) + " unit triangles for area " +
               std::to_string(r.twice_area()) + "/2";
    }
    std::set<Edge> boundary(r.boundary_edges().begin(), r.boundary_edges().end());
    for (std::size_t x = 0; x < n; ++x) {
        const int want = boundary.count(edges[x]) ? 1 : 2;
        const int have = (out.inc[x][0] >= 0) + (out.inc[x][1] >= 0);
        if (have != want) {
            return "edge " + to_string(edges[x]) + " lies in " + std::to_string(have) + " triangles, expected " +
                   std::to_string(want);
        }
    }
    return std::nullopt;
}

std::array<int, 3> sorted_sides(const Triangle& t) {
    std::array<int, 3> s = t.sides;
    std::sort(s.begin(), s.end());
    return s;
}

} // namespace

Triangulation Triangulation::from_edges(BoundaryPtr bc, const std::vector<Edge>& edges) {
    if (!bc) fail(ErrorCode::InvalidArgument, "triangulation needs a boundary condition");
    const Region& r = bc->region();
    std::vector<Edge> placed(std::size_t(r.midpoint_count()), Edge{});
    std::vector<char> filled(placed.size(), 0);
    if (edges.size() != placed.size()) {
        fail(ErrorCode::InvalidTriangulation, "expected " + std::to_string(placed.size()) + " edges, got " +
                                                  std::to_string(edges.size()));
    }
    for (const Edge& e : edges) {
        const int m = r.midpoint_index(e.midpoint());
        if (m < 0) fail(ErrorCode::InvalidTriangulation, "edge " + to_string(e) + " has no midpoint in the region");
        if (filled[std::size_t(m)]) {
            fail(ErrorCode::InvalidTriangulation, "two edges share the midpoint of " + to_string(e));
        }
        filled[std::size_t(m)] = 1;
        placed[std::size_t(m)] = e;
    }
    Derived d;
    if (auto err = derive(*bc, placed, d)) fail(ErrorCode::InvalidTriangulation, *err);

    Triangulation t;
    t.bc_ = std::move(bc);
    t.edges_ = std::move(placed);
    t.tris_ = std::move(d.tris);
    t.inc_ = std::move(d.inc);
    t.len_.resize(t.edges_.size());
    for (std::size_t x = 0; x < t.edges_.size(); ++x) {
        t.len_[x] = l1_length(t.edges_[x]);
        t.total_len_ += t.len_[x];
    }
    return t;
}

std::optional<std::string> Triangulation::validate() const {
    Derived d;
    if (auto err = derive(*bc_, edges_, d)) return err;
    std::set<std::array<int, 3>> want, have;
    for (const Triangle& t : d.tris) want.insert(sorted_sides(t));
    for (const Triangle& t : tris_) have.insert(sorted_sides(t));
    if (want != have) return std::string("triangle cache out of sync with edges");
    for (std::size_t id = 0; id < tris_.size(); ++id) {
        const Triangle& t = tris_[id];
        for (int i = 0; i < 3; ++i) {
            const Edge& e = edges_[std::size_t(t.sides[std::size_t(i)])];
            const Point v = t.verts[std::size_t(i)];
            if (e.a == v || e.b == v) return std::string("triangle side listed against the wrong vertex");
            const auto& slot = inc_[std::size_t(t.sides[std::size_t(i)])];
            if (slot[0] != int(id) && slot[1] != int(id)) return std::string("incidence cache out of sync");
        }
    }
    std::int64_t total = 0;
    for (std::size_t x = 0; x < edges_.size(); ++x) {
        if (len_[x] != l1_length(edges_[x])) return std::string("length cache out of sync");
        total += len_[x];
    }
    if (total != total_len_) return std::string("total length out of sync");
    return std::nullopt;
}

Point Triangulation::apex(int tri, int x) const noexcept {
    const Triangle& t = tris_[std::size_t(tri)];
    for (int i = 0; i < 3; ++i) {
        if (t.sides[std::size_t(i)] == x) return t.verts[std::size_t(i)];
    }
    return t.verts[0];
}

bool Triangulation::is_flippable(int x) const noexcept {
    if (bc_->is_constraint_midpoint(x)) return false;
    const auto& slot = inc_[std::size_t(x)];
    if (slot[1] < 0) return false;
    const Point p1 = apex(slot[0], x), p2 = apex(slot[1], x);
    const Edge& e = edges_[std::size_t(x)];
    return p1.x2 + p2.x2 == e.a.x2 + e.b.x2 && p1.y2 + p2.y2 == e.a.y2 + e.b.y2;
}

Edge Triangulation::flip_target(int x) const {
    const auto& slot = inc_[std::size_t(x)];
    if (slot[1] < 0) fail(ErrorCode::NotFlippable, "edge " + to_string(edge(x)) + " lies in one triangle");
    return Edge::make(apex(slot[0], x), apex(slot[1], x));
}

void Triangulation::set_edge(int x, const Edge& e) {
    const int old = len_[std::size_t(x)];
    edges_[std::size_t(x)] = e;
    len_[std::size_t(x)] = l1_length(e);
    total_len_ += len_[std::size_t(x)] - old;
}

void Triangulation::flip(int x) {
    if (!is_flippable(x)) fail(ErrorCode::NotFlippable, "edge " + to_string(edge(x)) + " is not flippable");
    const int t1 = inc_[std::size_t(x)][0], t2 = inc_[std::size_t(x)][1];
    const Edge e = edges_[std::size_t(x)];
    const Point a = e.a, b = e.b;
    const Point p1 = apex(t1, x), p2 = apex(t2, x);

    auto side_opposite = [this](int tri, Point v) {
        const Triangle& t = tris_[std::size_t(tri)];
        for (int i = 0; i < 3; ++i) {
            if (t.verts[std::size_t(i)] == v) return t.sides[std::size_t(i)];
        }
        return -1;
    };
    const int m_ap1 = side_opposite(t1, b), m_bp1 = side_opposite(t1, a);
    const int m_ap2 = side_opposite(t2, b), m_bp2 = side_opposite(t2, a);

    tris_[std::size_t(t1)].verts = {a, p1, p2};
    tris_[std::size_t(t1)].sides = {x, m_ap2, m_ap1};
    tris_[std::size_t(t2)].verts = {b, p1, p2};
    tris_[std::size_t(t2)].sides = {x, m_bp2, m_bp1};

    auto retarget = [this](int m, int from, int to) {
        auto& slot = inc_[std::size_t(m)];
        if (slot[0] == from) {
            slot[0] = to;
        } else {
            slot[1] = to;
        }
    };
    retarget(m_ap2, t2, t1);
    retarget(m_bp1, t1, t2);
    set_edge(x, Edge::make(p1, p2));
}

Triangulation Triangulation::flipped(int x) const {
    Triangulation t = *this;
    t.flip(x);
    return t;
}

int Triangulation::largest_side(int tri) const noexcept {
    const Triangle& t = tris_[std::size_t(tri)];
    int best = t.sides[0];
    for (int s : t.sides) {
        if (len_[std::size_t(s)] > len_[std::size_t(best)]) best = s;
    }
    return best;
}

int Triangulation::smallest_side_length(int tri) const noexcept {
    const Triangle& t = tris_[std::size_t(tri)];
    int best = len_[std::size_t(t.sides[0])];
    for (int s : t.sides) best = std::min(best, len_[std::size_t(s)]);
    return best;
}

bool Triangulation::largest_in(int x, int tri) const noexcept {
    const Triangle& t = tris_[std::size_t(tri)];
    for (int s : t.sides) {
        if (s != x && len_[std::size_t(s)] >= len_[std::size_t(x)]) return false;
    }
    return true;
}

bool Triangulation::largest_in_all(int x) const noexcept {
    for (int tri : inc_[std::size_t(x)]) {
        if (tri >= 0 && !largest_in(x, tri)) return false;
    }
    return true;
}

EdgeClass Triangulation::classify(int x) const {
    for (int tri : inc_[std::size_t(x)]) {
        if (tri < 0) continue;
        const Triangle& t = tris_[std::size_t(tri)];
        const int l0 = len_[std::size_t(t.sides[0])], l1 = len_[std::size_t(t.sides[1])],
                  l2 = len_[std::size_t(t.sides[2])];
        LATTRI_ENSURE(2 * std::max({l0, l1, l2}) == l0 + l1 + l2,
                      "longest side of a unit triangle is not the sum of the other two");
    }
    if (is_flippable(x) && l1_length(flip_target(x)) > length(x)) return EdgeClass::Increasing;
    if (largest_in_all(x)) return is_unit_diagonal(edge(x)) ? EdgeClass::UnitDiagTop : EdgeClass::Decreasing;
    return EdgeClass::Other;
}

int Triangulation::psi(int x) const {
    const auto& slot = inc_[std::size_t(x)];
    if (slot[1] < 0 && !largest_in_all(x)) {
        fail(ErrorCode::UndefinedClass, "psi undefined for boundary edge " + to_string(edge(x)));
    }
    int best = -1;
    for (int tri : slot) {
        if (tri < 0) continue;
        for (int s : tris_[std::size_t(tri)].sides) {
            if (s == x) continue;
            if (best < 0 || len_[std::size_t(s)] < best) best = len_[std::size_t(s)];
        }
    }
    return best;
}

bool Triangulation::angle_bounds_hold() const noexcept {
    for (const Triangle& t : tris_) {
        int obtuse = 0;
        for (int i = 0; i < 3; ++i) {
            const Point v = t.verts[std::size_t(i)];
            const Point p = t.verts[std::size_t((i + 1) % 3)];
            const Point q = t.verts[std::size_t((i + 2) % 3)];
            const std::int64_t ux = p.x2 - v.x2, uy = p.y2 - v.y2;
            const std::int64_t wx = q.x2 - v.x2, wy = q.y2 - v.y2;
            const std::int64_t dot = ux * wx + uy * wy;
            const std::int64_t cross = std::llabs(ux * wy - uy * wx);
            if (dot <= 0) {
                ++obtuse;
            } else if (cross > dot) {
                return false;  // acute angle wider than pi/4
            }
        }
        if (obtuse != 1) return false;
    }
    return true;
}

} // namespace lattri
