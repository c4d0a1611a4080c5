#include "lattri/edge_poset.hpp"

#include "lattri/error.hpp"

#include <algorithm>
#include <cstdlib>

namespace lattri {

std::vector<Edge> ground_state_edges(const BoundaryCondition& bc, int x) {
    const Region& r = bc.region();
    if (x < 0 || x >= r.midpoint_count()) fail(ErrorCode::InvalidArgument, "midpoint index out of range");
    if (auto c = bc.constraint_at(x)) return {*c};

    const Point m = r.midpoints()[std::size_t(x)];
    const int span = (r.max_corner().x2 - r.min_corner().x2 + r.max_corner().y2 - r.min_corner().y2) / 2;
    for (int len = 1; len <= span; ++len) {
        std::vector<Edge> found;
        for (int dx = 0; dx <= len; ++dx) {
            const int dy_abs = len - dx;
            for (int sgn : {1, -1}) {
                const int dy = sgn * dy_abs;
                if (dy_abs == 0 && sgn < 0) continue;
                if (dx == 0 && dy < 0) continue;  // same edge as (0, -dy)
                if (((m.x2 - dx) & 1) || ((m.y2 - dy) & 1)) continue;
                const Edge e = Edge::make(Point{m.x2 - dx, m.y2 - dy}, Point{m.x2 + dx, m.y2 + dy});
                if (bc.is_compatible(e)) found.push_back(e);
            }
        }
        if (!found.empty()) {
            std::sort(found.begin(), found.end());
            LATTRI_ENSURE(found.size() == 1 || (found.size() == 2 && is_unit_diagonal(found[0]) &&
                                                is_unit_diagonal(found[1])),
                          "ground state edge at " + to_string(m) + " is not unique");
            return found;
        }
    }
    fail(ErrorCode::Internal, "no compatible edge at midpoint " + to_string(m));
}

GroundState::GroundState(BoundaryPtr bc) : bc_(std::move(bc)) {
    if (!bc_) fail(ErrorCode::InvalidArgument, "ground state needs a boundary condition");
    const int n = bc_->region().midpoint_count();
    ground_.reserve(std::size_t(n));
    for (int x = 0; x < n; ++x) ground_.push_back(ground_state_edges(*bc_, x));
}

bool GroundState::is_ground(const Edge& e) const noexcept {
    const int m = bc_->region().midpoint_index(e.midpoint());
    if (m < 0) return false;
    const auto& g = ground_[std::size_t(m)];
    return std::find(g.begin(), g.end(), e) != g.end();
}

Triangulation GroundState::triangulation() const {
    std::vector<Edge> edges;
    edges.reserve(ground_.size());
    for (const auto& g : ground_) edges.push_back(g.front());
    try {
        return Triangulation::from_edges(bc_, edges);
    } catch (const Error& err) {
        fail(ErrorCode::Internal, std::string("ground state edges do not form a triangulation: ") + err.what());
    }
}

std::optional<Edge> GroundState::try_parent(const Edge& e) const {
    if (is_ground(e)) return std::nullopt;
    if (!bc_->is_compatible(e)) fail(ErrorCode::InvalidEdge, "edge " + to_string(e) + " is not compatible");
    const Parallelogram par = minimal_parallelogram(e);
    const Edge p = Edge::make(par.p, par.q);
    LATTRI_ENSURE(!par.length_preserving, "non-ground unit diagonal " + to_string(e));
    LATTRI_ENSURE(l1_length(p) < l1_length(e), "parent of " + to_string(e) + " is not shorter");
    LATTRI_ENSURE(bc_->is_compatible(p), "parent " + to_string(p) + " of " + to_string(e) + " crosses a constraint");
    return p;
}

Edge GroundState::parent(const Edge& e) const {
    auto p = try_parent(e);
    if (!p) fail(ErrorCode::AtGroundState, "edge " + to_string(e) + " is a ground state edge");
    return *p;
}

std::vector<Edge> GroundState::chain_to_ground(const Edge& e) const {
    std::vector<Edge> out{e};
    while (auto p = try_parent(out.back())) out.push_back(*p);
    LATTRI_ENSURE(is_ground(out.back()), "chain ended away from the ground state");
    return out;
}

bool GroundState::precedes(const Edge& e, const Edge& f) const {
    if (e.midpoint() != f.midpoint()) {
        fail(ErrorCode::MidpointMismatch, "edges " + to_string(e) + " and " + to_string(f) + " have different midpoints");
    }
    if (e == f) return false;
    Edge cur = f;
    while (auto p = try_parent(cur)) {
        if (*p == e) return true;
        if (l1_length(*p) < l1_length(e)) return false;
        cur = *p;
    }
    return false;
}

std::vector<Edge> GroundState::crossing_chain(const Edge& top, const Edge& g, bool full) const {
    std::vector<Edge> out;
    std::optional<Edge> cur = top;
    while (cur) {
        if (open_segments_intersect(*cur, g)) {
            out.push_back(*cur);
        } else if (!full) {
            break;
        }
        cur = try_parent(*cur);
    }
    return out;
}

} // namespace lattri
