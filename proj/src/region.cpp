#include "lattri/region.hpp"

#include "lattri/error.hpp"

#include <algorithm>
#include <set>

namespace lattri {

namespace {

bool on_closed_segment(Point a, Point b, Point p) {
    if (orient(a, b, p) != 0) return false;
    return std::min(a.x2, b.x2) <= p.x2 && p.x2 <= std::max(a.x2, b.x2) &&
           std::min(a.y2, b.y2) <= p.y2 && p.y2 <= std::max(a.y2, b.y2);
}

bool closed_segments_meet(const Edge& e, const Edge& f) {
    if (open_segments_intersect(e, f)) return true;
    return on_closed_segment(e.a, e.b, f.a) || on_closed_segment(e.a, e.b, f.b) ||
           on_closed_segment(f.a, f.b, e.a) || on_closed_segment(f.a, f.b, e.b);
}

} // namespace

Region Region::build(std::vector<Point> polygon) {
    const std::size_t n = polygon.size();
    if (n < 3) fail(ErrorCode::InvalidPolygon, "polygon needs at least three vertices");
    for (const Point& p : polygon) {
        if (!p.is_lattice()) fail(ErrorCode::InvalidPolygon, "polygon vertex " + to_string(p) + " is not a lattice point");
    }
    {
        std::set<Point> seen(polygon.begin(), polygon.end());
        if (seen.size() != n) fail(ErrorCode::InvalidPolygon, "polygon has a repeated vertex");
    }

    // Shoelace in lattice units (coordinates are doubled, so divide by 4).
    std::int64_t twice_area_x4 = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const Point& p = polygon[i];
        const Point& q = polygon[(i + 1) % n];
        twice_area_x4 += std::int64_t(p.x2) * q.y2 - std::int64_t(q.x2) * p.y2;
    }
    if (twice_area_x4 == 0) fail(ErrorCode::InvalidPolygon, "polygon has zero area");
    if (twice_area_x4 < 0) {
        std::reverse(polygon.begin(), polygon.end());
        twice_area_x4 = -twice_area_x4;
    }

    Region r;
    r.polygon_ = std::move(polygon);
    r.twice_area_ = twice_area_x4 / 4;

    std::vector<Edge> sides;
    sides.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Edge e = Edge::make(r.polygon_[i], r.polygon_[(i + 1) % n]);
        if (!is_primitive(e)) {
            fail(ErrorCode::InvalidPolygon, "polygon side " + to_string(e) + " contains a lattice point");
        }
        sides.push_back(e);
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            if (adjacent) {
                if (open_segments_intersect(sides[i], sides[j])) {
                    fail(ErrorCode::InvalidPolygon, "adjacent polygon sides overlap");
                }
            } else if (closed_segments_meet(sides[i], sides[j])) {
                fail(ErrorCode::InvalidPolygon,
                     "polygon sides " + to_string(sides[i]) + " and " + to_string(sides[j]) + " intersect");
            }
        }
    }
    r.boundary_edges_ = sides;

    bool ccw_turns = true;
    for (std::size_t i = 0; i < n; ++i) {
        if (orient(r.polygon_[i], r.polygon_[(i + 1) % n], r.polygon_[(i + 2) % n]) < 0) ccw_turns = false;
    }
    r.convex_ = ccw_turns;

    r.lo_ = r.hi_ = r.polygon_.front();
    for (const Point& p : r.polygon_) {
        r.lo_.x2 = std::min(r.lo_.x2, p.x2);
        r.lo_.y2 = std::min(r.lo_.y2, p.y2);
        r.hi_.x2 = std::max(r.hi_.x2, p.x2);
        r.hi_.y2 = std::max(r.hi_.y2, p.y2);
    }
    const std::size_t w = std::size_t(r.hi_.x2 - r.lo_.x2 + 1);
    const std::size_t h = std::size_t(r.hi_.y2 - r.lo_.y2 + 1);
    r.grid_.assign(w * h, -1);

    for (std::int32_t x2 = r.lo_.x2; x2 <= r.hi_.x2; ++x2) {
        for (std::int32_t y2 = r.lo_.y2; y2 <= r.hi_.y2; ++y2) {
            const Point p{x2, y2};
            const Location loc = r.locate(p);
            if (loc == Location::Outside) continue;
            if (p.is_lattice()) {
                r.lattice_points_.push_back(p);
                (loc == Location::Inside ? r.interior_count_ : r.boundary_count_) += 1;
            } else {
                r.midpoints_.push_back(p);
            }
        }
    }
    std::sort(r.lattice_points_.begin(), r.lattice_points_.end());
    std::sort(r.midpoints_.begin(), r.midpoints_.end());
    for (const Point& p : r.lattice_points_) r.grid_[r.grid_slot(p)] = -2;
    for (std::size_t i = 0; i < r.midpoints_.size(); ++i) r.grid_[r.grid_slot(r.midpoints_[i])] = int(i);

    // Every triangulation has 3I + 2B - 3 edges; the midpoint set must match.
    const std::int64_t expected = 3 * std::int64_t(r.interior_count_) + 2 * std::int64_t(r.boundary_count_) - 3;
    LATTRI_ENSURE(std::int64_t(r.midpoints_.size()) == expected,
                  "midpoint count does not match 3I + 2B - 3");
    return r;
}

Region Region::rectangle(int width, int height) {
    if (width < 1 || height < 1) fail(ErrorCode::InvalidPolygon, "rectangle sides must be positive");
    std::vector<Point> poly;
    for (int x = 0; x < width; ++x) poly.push_back(Point::lattice(x, 0));
    for (int y = 0; y < height; ++y) poly.push_back(Point::lattice(width, y));
    for (int x = width; x > 0; --x) poly.push_back(Point::lattice(x, height));
    for (int y = height; y > 0; --y) poly.push_back(Point::lattice(0, y));
    return build(std::move(poly));
}

bool Region::in_box(Point p) const noexcept {
    return p.x2 >= lo_.x2 && p.x2 <= hi_.x2 && p.y2 >= lo_.y2 && p.y2 <= hi_.y2;
}

std::size_t Region::grid_slot(Point p) const noexcept {
    const std::size_t h = std::size_t(hi_.y2 - lo_.y2 + 1);
    return std::size_t(p.x2 - lo_.x2) * h + std::size_t(p.y2 - lo_.y2);
}

int Region::midpoint_index(Point p) const noexcept {
    if (!in_box(p)) return -1;
    const int v = grid_[grid_slot(p)];
    return v >= 0 ? v : -1;
}

bool Region::contains_lattice_point(Point p) const noexcept {
    return p.is_lattice() && in_box(p) && grid_[grid_slot(p)] == -2;
}

Region::Location Region::locate(Point p) const noexcept {
    const std::size_t n = polygon_.size();
    int winding = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const Point a = polygon_[i];
        const Point b = polygon_[(i + 1) % n];
        if (on_closed_segment(a, b, p)) return Location::Boundary;
        if (a.y2 <= p.y2) {
            if (b.y2 > p.y2 && orient(a, b, p) > 0) ++winding;
        } else if (b.y2 <= p.y2 && orient(a, b, p) < 0) {
            --winding;
        }
    }
    return winding != 0 ? Location::Inside : Location::Outside;
}

std::shared_ptr<const BoundaryCondition> BoundaryCondition::make(std::shared_ptr<const Region> region,
                                                                 std::vector<Edge> extra) {
    if (!region) fail(ErrorCode::InvalidArgument, "boundary condition needs a region");
    auto bc = std::shared_ptr<BoundaryCondition>(new BoundaryCondition());
    bc->region_ = std::move(region);
    const Region& r = *bc->region_;
    bc->edges_ = r.boundary_edges();
    bc->constraint_of_.assign(std::size_t(r.midpoint_count()), -1);
    for (std::size_t i = 0; i < bc->edges_.size(); ++i) {
        const int m = r.midpoint_index(bc->edges_[i].midpoint());
        LATTRI_ENSURE(m >= 0, "boundary edge midpoint missing from region");
        bc->constraint_of_[std::size_t(m)] = int(i);
    }
    bc->fast_path_ = false;

    std::sort(extra.begin(), extra.end());
    extra.erase(std::unique(extra.begin(), extra.end()), extra.end());
    for (const Edge& e : extra) {
        if (!r.contains_lattice_point(e.a) || !r.contains_lattice_point(e.b)) {
            fail(ErrorCode::ConstraintConflict, "constraint " + to_string(e) + " has an endpoint outside the region");
        }
        if (!is_primitive(e)) {
            fail(ErrorCode::ConstraintConflict, "constraint " + to_string(e) + " is not primitive");
        }
        if (!bc->is_compatible(e)) {
            fail(ErrorCode::ConstraintConflict,
                 "constraint " + to_string(e) + " leaves the polygon or crosses another constraint");
        }
        const int m = r.midpoint_index(e.midpoint());
        LATTRI_ENSURE(m >= 0, "constraint midpoint missing from region");
        if (bc->constraint_of_[std::size_t(m)] >= 0) continue;  // already a polygon side
        bc->constraint_of_[std::size_t(m)] = int(bc->edges_.size());
        bc->edges_.push_back(e);
        bc->extra_.push_back(e);
    }
    bc->fast_path_ = r.is_convex() && bc->extra_.empty();
    return bc;
}

std::optional<Edge> BoundaryCondition::constraint_at(int midpoint) const noexcept {
    const int k = constraint_of_[std::size_t(midpoint)];
    if (k < 0) return std::nullopt;
    return edges_[std::size_t(k)];
}

bool BoundaryCondition::is_compatible(const Edge& e) const noexcept {
    const Region& r = *region_;
    if (!r.contains_lattice_point(e.a) || !r.contains_lattice_point(e.b)) return false;
    if (!is_primitive(e)) return false;
    const int m = r.midpoint_index(e.midpoint());
    if (m < 0) return false;
    const int own = constraint_of_[std::size_t(m)];
    if (own >= 0) return edges_[std::size_t(own)] == e;
    if (fast_path_) return true;

    if (r.locate(e.midpoint()) != Region::Location::Inside) return false;
    const std::int32_t x_lo = std::min(e.a.x2, e.b.x2), x_hi = std::max(e.a.x2, e.b.x2);
    const std::int32_t y_lo = std::min(e.a.y2, e.b.y2), y_hi = std::max(e.a.y2, e.b.y2);
    for (const Edge& c : edges_) {
        if (std::max(c.a.x2, c.b.x2) < x_lo || std::min(c.a.x2, c.b.x2) > x_hi) continue;
        if (std::max(c.a.y2, c.b.y2) < y_lo || std::min(c.a.y2, c.b.y2) > y_hi) continue;
        if (open_segments_intersect(c, e)) return false;
    }
    return true;
}

BoundaryPtr free_boundary(Region region) {
    return BoundaryCondition::make(std::make_shared<const Region>(std::move(region)));
}

} // namespace lattri
