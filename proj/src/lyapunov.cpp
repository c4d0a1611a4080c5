#include "lattri/lyapunov.hpp"

#include "lattri/error.hpp"
#include "lattri/influence.hpp"

#include <cmath>
#include <sstream>

namespace lattri {

void CompensatedSum::add(double v) noexcept {
    const double t = sum_ + v;
    if (std::fabs(sum_) >= std::fabs(v)) {
        comp_ += (sum_ - t) + v;
    } else {
        comp_ += (v - t) + sum_;
    }
    sum_ = t;
}

LyapunovConfig LyapunovConfig::derive(double lambda, std::optional<double> alpha, double psi0) {
    if (!(lambda > 0.0 && lambda < 1.0)) {
        fail(ErrorCode::InvalidLambda, "lambda must lie in (0, 1), got " + std::to_string(lambda));
    }
    LyapunovConfig cfg;
    cfg.lambda = lambda;
    cfg.alpha = alpha ? *alpha : std::pow(lambda, -0.25);
    const double a_max = std::pow(lambda, -0.5);
    if (!(cfg.alpha > 1.0 && cfg.alpha < a_max)) {
        fail(ErrorCode::InvalidArgument, "alpha must lie in (1, " + std::to_string(a_max) + ")");
    }
    if (!(psi0 > 1.0)) fail(ErrorCode::InvalidArgument, "psi0 must exceed 1");
    cfg.psi0 = psi0;

    const double la = std::log(cfg.alpha);
    const double rhs = std::log((cfg.alpha * cfg.alpha - 1.0) / (10.0 * cfg.alpha * cfg.alpha));
    long c = 2;
    while (!(-(double(c) / 4.0) * la <= std::log(0.1) && std::log(double(c)) - (double(c) / 2.0) * la <= rhs)) ++c;
    cfg.C = c;

    // 4 x alpha^(2C) <= alpha^x, i.e. h(x) >= 0 with h convex, minimised at 1/ln(alpha).
    auto h = [&](double x) { return x * la - std::log(4.0 * x) - 2.0 * double(c) * la; };
    const double bound = (3.0 + 2.0 / (cfg.alpha - 1.0)) * double(c) * double(c);
    long lo = long(std::floor(bound)) + 1;
    const double x_min = 1.0 / la;
    if (h(x_min) < 0.0) {
        lo = std::max(lo, long(std::ceil(x_min)));
        long hi = lo;
        while (h(double(hi)) < 0.0) hi *= 2;
        while (lo < hi) {
            const long mid = lo + (hi - lo) / 2;
            if (h(double(mid)) >= 0.0) {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
    }
    cfg.C_prime = lo;
    return cfg;
}

double LyapunovConfig::epsilon_formula() const noexcept {
    const double a = alpha;
    return std::pow(a - 1.0, 3) * std::pow(a + 1.0, 2) / (32.0 * std::pow(a, 5));
}

double chain_weight(const GroundState& gs, const Edge& top, const Edge& g, double alpha, bool full) {
    const int glen = l1_length(g);
    double w = 0.0;
    for (const Edge& h : gs.crossing_chain(top, g, full)) w += std::pow(alpha, l1_length(h) - glen);
    return w;
}

namespace {

void require_ground(const GroundState& gs, const Edge& g) {
    if (!gs.is_ground(g)) fail(ErrorCode::NotGroundEdge, "edge " + to_string(g) + " is not a ground state edge");
}

bool boxes_overlap(const Edge& e, const Edge& g) {
    return std::max(e.a.x2, e.b.x2) > std::min(g.a.x2, g.b.x2) && std::min(e.a.x2, e.b.x2) < std::max(g.a.x2, g.b.x2) &&
           std::max(e.a.y2, e.b.y2) > std::min(g.a.y2, g.b.y2) && std::min(e.a.y2, e.b.y2) < std::max(g.a.y2, g.b.y2);
}

bool meets(const Edge& e, const Edge& g) {
    // An axis-parallel g has a degenerate box; fall through to the exact test.
    if (g.dx() != 0 && g.dy() != 0 && e.dx() != 0 && e.dy() != 0 && !boxes_overlap(e, g)) return false;
    return open_segments_intersect(e, g);
}

} // namespace

double lyapunov_value(const Triangulation& s, const GroundState& gs, const Edge& g, const LyapunovConfig& cfg,
                      bool full) {
    require_ground(gs, g);
    CompensatedSum sum;
    for (int x = 0; x < s.size(); ++x) {
        if (!full && !meets(s.edge(x), g)) continue;
        sum.add(chain_weight(gs, s.edge(x), g, cfg.alpha, full));
    }
    return sum.value();
}

double flip_probability(int old_len, int new_len, double lambda) noexcept {
    const int m = std::min(old_len, new_len);
    const double a = std::pow(lambda, old_len - m);
    const double b = std::pow(lambda, new_len - m);
    return b / (a + b);
}

double drift_term(const Triangulation& s, const GroundState& gs, const Edge& g, int x, const LyapunovConfig& cfg,
                  bool* in_dec, bool* in_inc) {
    require_ground(gs, g);
    if (in_dec) *in_dec = false;
    if (in_inc) *in_inc = false;
    const EdgeClass cls = s.classify(x);
    const int glen = l1_length(g);
    if (cls == EdgeClass::Decreasing) {
        // A decreasing constraint edge can only meet g by being g; it never flips.
        if (s.boundary().is_constraint_midpoint(x) || !meets(s.edge(x), g)) return 0.0;
        LATTRI_ENSURE(s.is_flippable(x), "interior decreasing edge is not flippable");
        if (in_dec) *in_dec = true;
        const int psi = s.psi(x);
        return -std::pow(cfg.alpha, s.length(x) - glen) / (1.0 + std::pow(cfg.lambda, 2 * psi));
    }
    if (cls == EdgeClass::Increasing) {
        if (!meets(s.flip_target(x), g)) return 0.0;
        if (in_inc) *in_inc = true;
        const int psi = s.psi(x);
        return std::pow(cfg.alpha, s.length(x) - glen) * std::pow(cfg.alpha * cfg.lambda, 2 * psi) /
               (1.0 + std::pow(cfg.lambda, 2 * psi));
    }
    return 0.0;
}

DriftReport expected_drift(const Triangulation& s, const GroundState& gs, const Edge& g, const LyapunovConfig& cfg) {
    require_ground(gs, g);
    DriftReport rep;
    CompensatedSum sum;
    for (int x = 0; x < s.size(); ++x) {
        bool dec = false, inc = false;
        const double rho = drift_term(s, gs, g, x, cfg, &dec, &inc);
        if (!dec && !inc) continue;
        DriftRow row;
        row.midpoint = x;
        row.cls = s.classify(x);
        row.length = s.length(x);
        row.psi = s.psi(x);
        row.rho = rho;
        row.in_dec = dec;
        row.in_inc = inc;
        rep.rows.push_back(row);
        rep.dec_count += dec;
        rep.inc_count += inc;
        sum.add(rho);
    }
    rep.total = sum.value() / double(s.size());
    rep.psi_value = lyapunov_value(s, gs, g, cfg);
    return rep;
}

std::string DriftReport::to_csv() const {
    std::ostringstream out;
    out << "# schema: drift_rows v1\n";
    out << "midpoint_index,class,length,psi,rho\n";
    out.precision(17);
    for (const DriftRow& r : rows) {
        out << r.midpoint << ',' << edge_class_name(r.cls) << ',' << r.length << ',' << r.psi << ',' << r.rho << '\n';
    }
    return out.str();
}

double direct_drift(const Triangulation& s, const GroundState& gs, const Edge& g, const LyapunovConfig& cfg) {
    require_ground(gs, g);
    CompensatedSum sum;
    for (int x = 0; x < s.size(); ++x) {
        if (!s.is_flippable(x)) continue;
        const Edge old_e = s.edge(x);
        const Edge new_e = s.flip_target(x);
        // Psi is a sum of per-midpoint terms, so flipping x changes only its own.
        const double delta =
            chain_weight(gs, new_e, g, cfg.alpha, true) - chain_weight(gs, old_e, g, cfg.alpha, true);
        if (delta == 0.0) continue;
        sum.add(flip_probability(l1_length(old_e), l1_length(new_e), cfg.lambda) * delta);
    }
    return sum.value() / double(s.size());
}

DriveResult drive_to_ground(const Triangulation& s, const GroundState& gs, const Edge& g) {
    require_ground(gs, g);
    const Region& r = s.region();
    const int xg = r.midpoint_index(g.midpoint());
    DriveResult res{{}, s};
    Triangulation& t = res.final_state;

    auto drive = [&](int x, const Edge& target) {
        while (t.edge(x) != target) {
            int chosen = -1;
            for (int z : tree_roots(t, x)) {
                if (t.classify(z) == EdgeClass::Decreasing && t.is_flippable(z)) {
                    chosen = z;
                    break;
                }
            }
            LATTRI_ENSURE(chosen >= 0, "no decreasing root to flip towards " + to_string(target));
            t.flip(chosen);
            res.flips.push_back(chosen);
        }
    };

    const Edge cur = t.edge(xg);
    if (cur == g || gs.precedes(g, cur)) {
        drive(xg, g);
        return res;
    }
    const auto& ground = gs.ground_edges(xg);
    LATTRI_ENSURE(ground.size() == 2 && is_unit_diagonal(g), "ground edge does not precede the current edge");
    const Edge other = ground[0] == g ? ground[1] : ground[0];
    drive(xg, other);
    // Bring in the four unit sides of the square so the diagonal can flip.
    const Point lo{std::min(g.a.x2, g.b.x2), std::min(g.a.y2, g.b.y2)};
    const Point hi{std::max(g.a.x2, g.b.x2), std::max(g.a.y2, g.b.y2)};
    const Edge sides[4] = {Edge::make(lo, Point{hi.x2, lo.y2}), Edge::make(lo, Point{lo.x2, hi.y2}),
                           Edge::make(Point{hi.x2, lo.y2}, hi), Edge::make(Point{lo.x2, hi.y2}, hi)};
    for (const Edge& h : sides) drive(r.midpoint_index(h.midpoint()), h);
    LATTRI_ENSURE(t.is_flippable(xg), "unit diagonal not flippable inside its square");
    t.flip(xg);
    res.flips.push_back(xg);
    return res;
}

bool largest_crossing_bound_holds(const Triangulation& s, const GroundState& gs, const Edge& g,
                                  const LyapunovConfig& cfg) {
    const double psi = lyapunov_value(s, gs, g, cfg);
    int longest = 0;
    for (const Edge& e : s.edges()) {
        if (meets(e, g)) longest = std::max(longest, l1_length(e));
    }
    return double(longest) <= double(l1_length(g)) + std::log(psi) / std::log(cfg.alpha) + 1e-9;
}

bool crossing_count_bound_holds(const Triangulation& s, const GroundState& gs, const Edge& g,
                                const LyapunovConfig& cfg) {
    const double psi = lyapunov_value(s, gs, g, cfg);
    int count = 0;
    for (const Edge& e : s.edges()) count += meets(e, g);
    return double(count) <= psi + 1e-9;
}

PsiTracker::PsiTracker(const Triangulation& s, const GroundState& gs, const Edge& g, double alpha)
    : gs_(&gs), g_(g), glen_(l1_length(g)), alpha_(alpha) {
    require_ground(gs, g);
    for (const Edge& e : s.edges()) add_edge(e, 1);
}

void PsiTracker::add_edge(const Edge& e, int sign) {
    if (!meets(e, g_)) return;
    for (const Edge& h : gs_->crossing_chain(e, g_)) {
        const int k = l1_length(h) - glen_;
        LATTRI_ENSURE(k >= 0, "edge meeting a ground edge is shorter than it");
        if (std::size_t(k) >= count_.size()) count_.resize(std::size_t(k) + 1, 0);
        count_[std::size_t(k)] += sign;
    }
}

void PsiTracker::replace(const Edge& old_edge, const Edge& new_edge) {
    add_edge(old_edge, -1);
    add_edge(new_edge, 1);
}

double PsiTracker::value() const {
    CompensatedSum sum;
    for (std::size_t k = 0; k < count_.size(); ++k) {
        if (count_[k] != 0) sum.add(double(count_[k]) * std::pow(alpha_, int(k)));
    }
    return sum.value();
}

} // namespace lattri
