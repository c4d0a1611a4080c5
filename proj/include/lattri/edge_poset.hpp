#pragma once

#include "lattri/triangulation.hpp"

#include <optional>
#include <vector>

namespace lattri {

/// Minimal-length compatible edges with the given midpoint, found by scanning
/// primitive offsets in order of increasing length. Two results only for a
/// pair of opposite unit diagonals.
std::vector<Edge> ground_state_edges(const BoundaryCondition& bc, int x);

/// Per-midpoint ground edges of a boundary condition, cached, plus the parent
/// relation on compatible edges.
class GroundState {
public:
    explicit GroundState(BoundaryPtr bc);

    const BoundaryCondition& boundary() const noexcept { return *bc_; }
    const BoundaryPtr& boundary_ptr() const noexcept { return bc_; }

    const std::vector<Edge>& ground_edges(int x) const noexcept { return ground_[static_cast<std::size_t>(x)]; }
    int ground_length(int x) const noexcept { return l1_length(ground_[static_cast<std::size_t>(x)].front()); }
    bool is_ground(const Edge& e) const noexcept;

    /// Union of ground edges, taking the lexicographically smaller diagonal
    /// wherever there are two. Throws Internal if it fails to validate.
    Triangulation triangulation() const;
    /// The edge that triangulation() places at x.
    const Edge& canonical_edge(int x) const noexcept { return ground_[static_cast<std::size_t>(x)].front(); }

    /// Other diagonal of the minimal parallelogram; nullopt for ground edges.
    std::optional<Edge> try_parent(const Edge& e) const;
    /// Throws AtGroundState for ground edges.
    Edge parent(const Edge& e) const;
    /// e, parent(e), ... down to the first ground edge.
    std::vector<Edge> chain_to_ground(const Edge& e) const;
    /// e is a strict ancestor of f. Throws MidpointMismatch.
    bool precedes(const Edge& e, const Edge& f) const;

    /// The set E_x(sigma, g) for the edge currently at x: chain members from
    /// `top` downward that meet g. With full = false the walk stops at the
    /// first member that misses g; full = true walks the whole chain.
    std::vector<Edge> crossing_chain(const Edge& top, const Edge& g, bool full = false) const;

private:
    BoundaryPtr bc_;
    std::vector<std::vector<Edge>> ground_;
};

} // namespace lattri
