#pragma once

#include "lattri/geometry.hpp"

#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace lattri {

/// A closed lattice polygon together with its lattice points and the
/// half-integer midpoint set of every triangulation of it.
class Region {
public:
    /// Throws InvalidPolygon for fewer than three vertices, repeated
    /// vertices, non-primitive or crossing sides, or zero area.
    static Region build(std::vector<Point> polygon);

    static Region rectangle(int width, int height);
    static Region square(int n) { return rectangle(n, n); }

    /// Counter-clockwise vertex list.
    const std::vector<Point>& polygon() const noexcept { return polygon_; }
    const std::vector<Edge>& boundary_edges() const noexcept { return boundary_edges_; }
    const std::vector<Point>& lattice_points() const noexcept { return lattice_points_; }
    const std::vector<Point>& midpoints() const noexcept { return midpoints_; }

    int midpoint_count() const noexcept { return static_cast<int>(midpoints_.size()); }
    int interior_lattice_count() const noexcept { return interior_count_; }
    int boundary_lattice_count() const noexcept { return boundary_count_; }
    /// Twice the polygon area in lattice units.
    std::int64_t twice_area() const noexcept { return twice_area_; }
    bool is_convex() const noexcept { return convex_; }

    /// Index into midpoints(), or -1.
    int midpoint_index(Point p) const noexcept;
    bool contains_lattice_point(Point p) const noexcept;

    enum class Location { Outside, Boundary, Inside };
    Location locate(Point p) const noexcept;

    /// Bounding box in doubled coordinates.
    Point min_corner() const noexcept { return lo_; }
    Point max_corner() const noexcept { return hi_; }

private:
    std::size_t grid_slot(Point p) const noexcept;
    bool in_box(Point p) const noexcept;

    std::vector<Point> polygon_;
    std::vector<Edge> boundary_edges_;
    std::vector<Point> lattice_points_;
    std::vector<Point> midpoints_;
    std::vector<int> grid_;  // doubled-coordinate box -> midpoint index, -2 lattice point in region, -1 none
    Point lo_{};
    Point hi_{};
    int interior_count_ = 0;
    int boundary_count_ = 0;
    std::int64_t twice_area_ = 0;
    bool convex_ = false;
};

/// The constraint set xi: polygon boundary plus extra forced edges.
class BoundaryCondition {
public:
    /// Throws ConstraintConflict when an extra edge is non-primitive, leaves
    /// the polygon, has an endpoint outside the lattice point set, or crosses
    /// another constraint.
    static std::shared_ptr<const BoundaryCondition> make(std::shared_ptr<const Region> region,
                                                         std::vector<Edge> extra = {});

    const Region& region() const noexcept { return *region_; }
    const std::shared_ptr<const Region>& region_ptr() const noexcept { return region_; }

    /// All constraint edges, boundary first.
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    /// Constraint edges that are not polygon sides.
    const std::vector<Edge>& extra_edges() const noexcept { return extra_; }

    bool is_constraint_midpoint(int midpoint) const noexcept {
        return constraint_of_[static_cast<std::size_t>(midpoint)] >= 0;
    }
    /// Constraint edge with the given midpoint index, if any.
    std::optional<Edge> constraint_at(int midpoint) const noexcept;
    int constraint_midpoint_count() const noexcept { return static_cast<int>(edges_.size()); }

    /// Local membership test for the set of edges compatible with xi: lattice
    /// endpoints in the region, primitive, inside the closed polygon and not
    /// crossing any constraint edge other than itself.
    bool is_compatible(const Edge& e) const noexcept;

private:
    std::shared_ptr<const Region> region_;
    std::vector<Edge> edges_;
    std::vector<Edge> extra_;
    std::vector<int> constraint_of_;  // per midpoint index, index into edges_ or -1
    bool fast_path_ = false;
};

using BoundaryPtr = std::shared_ptr<const BoundaryCondition>;

/// Free boundary condition on a fresh region.
BoundaryPtr free_boundary(Region region);

} // namespace lattri
