#include "lattri/geometry.hpp"

#include "lattri/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>

namespace lattri {

namespace {

std::int64_t floor_div(std::int64_t num, std::int64_t den) {
    std::int64_t q = num / den;
    if ((num % den != 0) && ((num < 0) != (den < 0))) --q;
    return q;
}

// Solves a*s + b*t = gcd(a, b) with gcd >= 0.
std::int64_t ext_gcd(std::int64_t a, std::int64_t b, std::int64_t& s, std::int64_t& t) {
    std::int64_t s0 = 1, s1 = 0, t0 = 0, t1 = 1;
    while (b != 0) {
        const std::int64_t q = a / b;
        std::int64_t tmp = a - q * b;
        a = b;
        b = tmp;
        tmp = s0 - q * s1;
        s0 = s1;
        s1 = tmp;
        tmp = t0 - q * t1;
        t0 = t1;
        t1 = tmp;
    }
    if (a < 0) {
        a = -a;
        s0 = -s0;
        t0 = -t0;
    }
    s = s0;
    t = t0;
    return a;
}

} // namespace

std::string to_string(Point p) {
    auto half = [](std::int32_t v) {
        if (v % 2 == 0) return std::to_string(v / 2);
        return std::to_string(v) + "/2";
    };
    return "(" + half(p.x2) + "," + half(p.y2) + ")";
}

std::string to_string(const Edge& e) { return to_string(e.a) + "-" + to_string(e.b); }

Edge Edge::make(Point p, Point q) {
    if (!p.is_lattice() || !q.is_lattice()) {
        fail(ErrorCode::InvalidEdge, "edge endpoints must be lattice points: " +
                                         to_string(p) + " " + to_string(q));
    }
    if (p == q) fail(ErrorCode::InvalidEdge, "degenerate edge at " + to_string(p));
    return p < q ? Edge{p, q} : Edge{q, p};
}

std::int64_t orient(Point a, Point b, Point c) noexcept {
    const std::int64_t ux = b.x2 - a.x2, uy = b.y2 - a.y2;
    const std::int64_t vx = c.x2 - a.x2, vy = c.y2 - a.y2;
    return ux * vy - uy * vx;
}

int l1_length(const Edge& e) noexcept {
    return static_cast<int>(std::llabs(e.dx()) + std::llabs(e.dy()));
}

bool is_primitive(const Edge& e) noexcept {
    return std::gcd(std::llabs(e.dx()), std::llabs(e.dy())) == 1;
}

bool is_unit_axis(const Edge& e) noexcept { return l1_length(e) == 1; }

bool is_unit_diagonal(const Edge& e) noexcept {
    return std::llabs(e.dx()) == 1 && std::llabs(e.dy()) == 1;
}

bool open_segments_intersect(const Edge& e, const Edge& f) noexcept {
    const std::int64_t o1 = orient(e.a, e.b, f.a);
    const std::int64_t o2 = orient(e.a, e.b, f.b);
    if (o1 == 0 && o2 == 0) {
        // Collinear: compare the open intervals along the dominant axis.
        const bool use_x = e.a.x2 != e.b.x2;
        auto coord = [use_x](Point p) { return use_x ? p.x2 : p.y2; };
        const auto e_lo = std::min(coord(e.a), coord(e.b));
        const auto e_hi = std::max(coord(e.a), coord(e.b));
        const auto f_lo = std::min(coord(f.a), coord(f.b));
        const auto f_hi = std::max(coord(f.a), coord(f.b));
        return std::max(e_lo, f_lo) < std::min(e_hi, f_hi);
    }
    const std::int64_t o3 = orient(f.a, f.b, e.a);
    const std::int64_t o4 = orient(f.a, f.b, e.b);
    const bool straddle_e = (o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0);
    const bool straddle_f = (o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0);
    return straddle_e && straddle_f;
}

std::vector<UnitSquare> squares_crossed(const Edge& e) {
    const std::int64_t dx = e.dx(), dy = e.dy();
    if (dx == 0 || dy == 0) return {};  // on grid lines
    const std::int64_t ax = e.a.x2 / 2, ay = e.a.y2 / 2;
    const std::int64_t adx = std::llabs(dx), ady = std::llabs(dy);
    const std::int64_t den = adx * ady;

    // Grid-line crossings as parameters t*den along the segment.
    std::vector<std::int64_t> breaks;
    breaks.reserve(static_cast<std::size_t>(adx + ady + 2));
    for (std::int64_t k = 0; k <= adx; ++k) breaks.push_back(k * ady);
    for (std::int64_t m = 0; m <= ady; ++m) breaks.push_back(m * adx);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    std::vector<UnitSquare> out;
    out.reserve(breaks.size());
    for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
        const std::int64_t mid = breaks[i] + breaks[i + 1];  // parameter mid/(2 den)
        const std::int64_t fx = floor_div(2 * den * ax + dx * mid, 2 * den);
        const std::int64_t fy = floor_div(2 * den * ay + dy * mid, 2 * den);
        out.push_back(UnitSquare{Point::lattice(static_cast<std::int32_t>(fx),
                                                static_cast<std::int32_t>(fy))});
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

Parallelogram minimal_parallelogram(const Edge& e) {
    if (!is_primitive(e)) {
        fail(ErrorCode::InvalidEdge, "minimal parallelogram of non-primitive edge " + to_string(e));
    }
    if (is_unit_axis(e)) {
        fail(ErrorCode::UnitAxisEdge, "unit axis edge " + to_string(e) +
                                          " is never the longest diagonal of a parallelogram");
    }
    const std::int64_t vx = e.dx(), vy = e.dy();
    // det(v, w) = vx*wy - vy*wx = 1.
    std::int64_t wy = 0, wx_neg = 0;
    const std::int64_t g = ext_gcd(vx, vy, wy, wx_neg);
    LATTRI_ENSURE(g == 1, "primitive edge without unit determinant partner");
    // vx*wy + vy*wx_neg = 1  =>  wx = -wx_neg.
    const std::int64_t w0x = -wx_neg, w0y = wy;

    // Other diagonal is 2w + (2t-1)v for w = w0 + t v; minimise its l1 length.
    const double vv = double(vx * vx + vy * vy);
    const double wv = double(w0x * vx + w0y * vy);
    const std::int64_t centre = static_cast<std::int64_t>(std::floor((1.0 - 2.0 * wv / vv) / 2.0));
    std::int64_t best_t = 0;
    std::int64_t best_len = std::numeric_limits<std::int64_t>::max();
    int best_count = 0;
    for (std::int64_t t = centre - 3; t <= centre + 3; ++t) {
        const std::int64_t ox = 2 * w0x + (2 * t - 1) * vx;
        const std::int64_t oy = 2 * w0y + (2 * t - 1) * vy;
        const std::int64_t len = std::llabs(ox) + std::llabs(oy);
        if (len < best_len) {
            best_len = len;
            best_t = t;
            best_count = 1;
        } else if (len == best_len) {
            ++best_count;
        }
    }
    const int elen = l1_length(e);
    LATTRI_ENSURE(best_count == 1, "minimal parallelogram not unique for " + to_string(e));
    LATTRI_ENSURE(best_len <= elen, "edge " + to_string(e) + " is not a longest diagonal");
    LATTRI_ENSURE(best_len < elen || is_unit_diagonal(e),
                  "length-preserving parallelogram for a non unit diagonal " + to_string(e));

    const std::int64_t wx = w0x + best_t * vx, wy_t = w0y + best_t * vy;
    const Point p{static_cast<std::int32_t>(e.a.x2 + 2 * wx), static_cast<std::int32_t>(e.a.y2 + 2 * wy_t)};
    const Point q{static_cast<std::int32_t>(e.b.x2 - 2 * wx), static_cast<std::int32_t>(e.b.y2 - 2 * wy_t)};
    Parallelogram out;
    out.p = std::min(p, q);
    out.q = std::max(p, q);
    out.length_preserving = best_len == elen;
    return out;
}

bool excluded_region_clear(const Edge& e) {
    const Parallelogram par = minimal_parallelogram(e);
    // Vertices a, p, b, q in cyclic order; sides u = p - a, w = q - a.
    const std::int64_t ax = e.a.x2 / 2, ay = e.a.y2 / 2;
    const std::int64_t ux = par.p.x2 / 2 - ax, uy = par.p.y2 / 2 - ay;
    const std::int64_t wx = par.q.x2 / 2 - ax, wy = par.q.y2 / 2 - ay;
    const std::int64_t det = ux * wy - uy * wx;
    LATTRI_ENSURE(det == 1 || det == -1, "minimal parallelogram does not have unit area");

    const std::int64_t margin = l1_length(e) + 2;
    const std::int64_t x_lo = std::min(e.a.x2, e.b.x2) / 2 - margin;
    const std::int64_t x_hi = std::max(e.a.x2, e.b.x2) / 2 + margin;
    const std::int64_t y_lo = std::min(e.a.y2, e.b.y2) / 2 - margin;
    const std::int64_t y_hi = std::max(e.a.y2, e.b.y2) / 2 + margin;
    for (std::int64_t x = x_lo; x <= x_hi; ++x) {
        for (std::int64_t y = y_lo; y <= y_hi; ++y) {
            const std::int64_t zx = x - ax, zy = y - ay;
            // z - a = s u + r w with s = det(z, w)/det and r = det(u, z)/det.
            const std::int64_t s_num = (zx * wy - zy * wx) * det;
            const std::int64_t r_num = (ux * zy - uy * zx) * det;
            // det^2 = 1, so the strip interiors are 0 < s < 1 and 0 < r < 1.
            if ((s_num > 0 && s_num < 1) || (r_num > 0 && r_num < 1)) return false;
        }
    }
    return true;
}

} // namespace lattri

namespace lattri {

const char* error_code_name(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::InvalidPolygon: return "InvalidPolygon";
    case ErrorCode::ConstraintConflict: return "ConstraintConflict";
    case ErrorCode::InvalidEdge: return "InvalidEdge";
    case ErrorCode::UnitAxisEdge: return "UnitAxisEdge";
    case ErrorCode::InvalidTriangulation: return "InvalidTriangulation";
    case ErrorCode::NotFlippable: return "NotFlippable";
    case ErrorCode::AtGroundState: return "AtGroundState";
    case ErrorCode::MidpointMismatch: return "MidpointMismatch";
    case ErrorCode::NotARoot: return "NotARoot";
    case ErrorCode::NotGroundEdge: return "NotGroundEdge";
    case ErrorCode::UndefinedClass: return "UndefinedClass";
    case ErrorCode::InvalidLambda: return "InvalidLambda";
    case ErrorCode::CapExceeded: return "CapExceeded";
    case ErrorCode::DegenerateCondition: return "DegenerateCondition";
    case ErrorCode::MidpointSetMismatch: return "MidpointSetMismatch";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::UnknownExperiment: return "UnknownExperiment";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::Internal: return "Internal";
    }
    return "Unknown";
}

} // namespace lattri
