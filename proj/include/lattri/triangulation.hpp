#pragma once

#include "lattri/region.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace lattri {

enum class EdgeClass { Increasing, Decreasing, UnitDiagTop, Other };

const char* edge_class_name(EdgeClass c) noexcept;

/// A lattice triangle stored by the midpoint indices of its sides and its
/// three vertices.
struct Triangle {
    std::array<int, 3> sides{};
    std::array<Point, 3> verts{};
};

/// Triangulation of a region under a boundary condition. edge_of(x) is the
/// source of truth; triangles and per-midpoint incidence are caches kept in
/// sync by flip().
class Triangulation {
public:
    /// One edge per midpoint, any order. Throws InvalidTriangulation with the
    /// first violated property.
    static Triangulation from_edges(BoundaryPtr bc, const std::vector<Edge>& edges);

    const BoundaryCondition& boundary() const noexcept { return *bc_; }
    const BoundaryPtr& boundary_ptr() const noexcept { return bc_; }
    const Region& region() const noexcept { return bc_->region(); }
    int size() const noexcept { return static_cast<int>(edges_.size()); }

    const Edge& edge(int x) const noexcept { return edges_[static_cast<std::size_t>(x)]; }
    int length(int x) const noexcept { return len_[static_cast<std::size_t>(x)]; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    /// Sum of all edge lengths.
    std::int64_t total_length() const noexcept { return total_len_; }

    const std::vector<Triangle>& triangles() const noexcept { return tris_; }
    /// Triangle slots containing edge x; the second is -1 for edges on the
    /// polygon boundary.
    const std::array<int, 2>& incident(int x) const noexcept { return inc_[static_cast<std::size_t>(x)]; }

    /// Full consistency check; nullopt when every invariant holds.
    std::optional<std::string> validate() const;

    bool is_flippable(int x) const noexcept;
    /// The edge that would replace edge(x). Precondition: is_flippable(x).
    Edge flip_target(int x) const;
    /// In place. Throws NotFlippable.
    void flip(int x);
    Triangulation flipped(int x) const;

    EdgeClass classify(int x) const;
    /// Edge x is strictly the longest side of every triangle containing it.
    bool largest_in_all(int x) const noexcept;
    bool largest_in(int x, int tri) const noexcept;
    /// Midpoint of the longest side of a triangle.
    int largest_side(int tri) const noexcept;
    int smallest_side_length(int tri) const noexcept;

    /// Shortest other side among the triangles containing edge x. Throws
    /// UndefinedClass for a boundary edge that is not decreasing.
    int psi(int x) const;

    bool angle_bounds_hold() const noexcept;

    /// Third vertex of triangle tri opposite edge x.
    Point apex(int tri, int x) const noexcept;

    bool operator==(const Triangulation& other) const noexcept { return edges_ == other.edges_; }

private:
    Triangulation() = default;
    void set_edge(int x, const Edge& e);

    BoundaryPtr bc_;
    std::vector<Edge> edges_;
    std::vector<int> len_;
    std::vector<Triangle> tris_;
    std::vector<std::array<int, 2>> inc_;
    std::int64_t total_len_ = 0;
};

} // namespace lattri
