#pragma once

// Exact integer geometry on the half-integer lattice.
//
// Every coordinate is stored doubled: the lattice point (x, y) is kept as
// (2x, 2y), so edge midpoints, parallelogram centres and square corners are
// all integral. No predicate in this header touches floating point.

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace lattri {

struct Point {
    std::int32_t x2 = 0;
    std::int32_t y2 = 0;

    static constexpr Point lattice(std::int32_t x, std::int32_t y) noexcept {
        return {2 * x, 2 * y};
    }

    constexpr bool is_lattice() const noexcept {
        return (x2 & 1) == 0 && (y2 & 1) == 0;
    }
    /// In (1/2 Z)^2 but not in Z^2.
    constexpr bool is_midpoint_candidate() const noexcept { return !is_lattice(); }

    constexpr auto operator<=>(const Point&) const = default;
};

std::string to_string(Point p);

/// Canonical open segment between two distinct lattice points, endpoints in
/// lexicographic order on (x2, y2).
struct Edge {
    Point a;
    Point b;

    /// Throws InvalidEdge if the endpoints coincide or are not lattice points.
    static Edge make(Point p, Point q);
    static Edge lattice(std::int32_t x0, std::int32_t y0, std::int32_t x1, std::int32_t y1) {
        return make(Point::lattice(x0, y0), Point::lattice(x1, y1));
    }

    constexpr Point midpoint() const noexcept {
        return {(a.x2 + b.x2) / 2, (a.y2 + b.y2) / 2};
    }
    /// Direction b - a in lattice units.
    constexpr std::int64_t dx() const noexcept { return (b.x2 - a.x2) / 2; }
    constexpr std::int64_t dy() const noexcept { return (b.y2 - a.y2) / 2; }

    constexpr auto operator<=>(const Edge&) const = default;
};

std::string to_string(const Edge& e);

/// Face [x, x+1] x [y, y+1] of Z^2, identified by its lower-left corner.
struct UnitSquare {
    Point corner;
    constexpr auto operator<=>(const UnitSquare&) const = default;
};

/// Cross product (b - a) x (c - a) on doubled coordinates, i.e. eight times
/// the signed lattice area of the triangle.
std::int64_t orient(Point a, Point b, Point c) noexcept;

int l1_length(const Edge& e) noexcept;
bool is_primitive(const Edge& e) noexcept;
bool is_unit_axis(const Edge& e) noexcept;
bool is_unit_diagonal(const Edge& e) noexcept;

/// Open segments share a point: a proper crossing or a collinear overlap of
/// positive length. Touching at endpoints does not count.
bool open_segments_intersect(const Edge& e, const Edge& f) noexcept;

/// Unit squares whose interior meets e, sorted.
std::vector<UnitSquare> squares_crossed(const Edge& e);

struct Parallelogram {
    Point p;  // other diagonal, canonical order
    Point q;
    /// e is a unit diagonal and the other diagonal has the same length.
    bool length_preserving = false;
};

/// The area-1 lattice parallelogram in which e is the longest diagonal.
/// Throws UnitAxisEdge for unit horizontals/verticals and InvalidEdge for
/// non-primitive edges.
Parallelogram minimal_parallelogram(const Edge& e);

/// Scans the lattice near e and confirms that no lattice point lies strictly
/// inside either strip spanned by opposite sides of the minimal parallelogram.
bool excluded_region_clear(const Edge& e);

struct PointHash {
    std::size_t operator()(const Point& p) const noexcept {
        return std::hash<std::uint64_t>{}((std::uint64_t(std::uint32_t(p.x2)) << 32) |
                                          std::uint32_t(p.y2));
    }
};

struct EdgeHash {
    std::size_t operator()(const Edge& e) const noexcept {
        PointHash h;
        return h(e.a) * 0x9E3779B97F4A7C15ULL ^ h(e.b);
    }
};

} // namespace lattri
