#include "lattri/experiments.hpp"

#include "lattri/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <numeric>
#include <sstream>

namespace lattri {

std::int64_t ExperimentPlan::effective_burn_in() const {
    if (burn_in >= 0) return burn_in;
    const double n = double(bc->region().midpoint_count());
    return std::int64_t(std::llround(20.0 * n * std::log(n)));
}

std::int64_t ExperimentPlan::effective_interval() const {
    if (interval > 0) return interval;
    return bc->region().midpoint_count();
}

void ExperimentPlan::check() const {
    if (!bc) fail(ErrorCode::InvalidArgument, "experiment plan without a region");
    if (!(lambda > 0.0) || !std::isfinite(lambda)) fail(ErrorCode::InvalidLambda, "lambda must be positive");
    if (replicas < 1) fail(ErrorCode::InvalidArgument, "replicas must be >= 1");
    if (samples < 1) fail(ErrorCode::InvalidArgument, "sample count must be >= 1");
    if (burn_in < -1) fail(ErrorCode::InvalidArgument, "burn-in must be >= 0");
    if (interval == 0 || interval < -1) fail(ErrorCode::InvalidArgument, "sample interval must be >= 1");
    if (initial && initial->boundary_ptr() != bc) {
        fail(ErrorCode::InvalidArgument, "initial state belongs to another boundary condition");
    }
}

Estimate replica_estimate(const std::vector<double>& v) {
    Estimate e;
    if (v.empty()) return e;
    CompensatedSum s;
    for (double x : v) s.add(x);
    e.mean = s.value() / double(v.size());
    if (v.size() < 2) return e;
    CompensatedSum q;
    for (double x : v) q.add((x - e.mean) * (x - e.mean));
    e.se = std::sqrt(q.value() / double(v.size() - 1) / double(v.size()));
    return e;
}

std::pair<double, double> wilson_interval(std::int64_t k, std::int64_t n, double z) {
    if (n <= 0) return {0.0, 1.0};
    const double p = double(k) / double(n);
    const double nn = double(n);
    const double denom = 1.0 + z * z / nn;
    const double centre = (p + z * z / (2.0 * nn)) / denom;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn)) / denom;
    return {std::max(0.0, centre - half), std::min(1.0, centre + half)};
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    std::string s = buf;
    if (s == "-0" || s.find_first_not_of("-0.") == std::string::npos) {
        // keep "-0.000" from leaking into hashed output
        if (!s.empty() && s[0] == '-') s.erase(0, 1);
    }
    return s;
}

// ---------------------------------------------------------------- tails

namespace {

std::vector<std::int64_t> pooled(const std::vector<std::vector<std::int64_t>>& hs, std::size_t skip) {
    std::vector<std::int64_t> out;
    for (std::size_t r = 0; r < hs.size(); ++r) {
        if (r == skip) continue;
        if (hs[r].size() > out.size()) out.resize(hs[r].size(), 0);
        for (std::size_t v = 0; v < hs[r].size(); ++v) out[v] += hs[r][v];
    }
    return out;
}

// Tail counts: c[l] = #samples with value >= l.
std::vector<std::int64_t> tail_counts(const std::vector<std::int64_t>& h) {
    std::vector<std::int64_t> c(h.size(), 0);
    std::int64_t acc = 0;
    for (std::size_t i = h.size(); i-- > 0;) {
        acc += h[i];
        c[i] = acc;
    }
    return c;
}

TailFit fit_tail(const std::vector<std::int64_t>& h, int min_count) {
    TailFit f;
    const std::vector<std::int64_t> c = tail_counts(h);
    if (c.empty() || c[0] == 0) return f;
    const double n = double(c[0]);
    double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t l = 1; l < c.size(); ++l) {
        // Only attained values: lengths at a midpoint share a parity, so the
        // tail is a staircase and repeated steps would double-count.
        if (h[l] == 0 || c[l] < min_count || c[l] == c[0]) continue;
        const double p = double(c[l]) / n;
        const double var = (1.0 - p) / (n * p);
        const double w = 1.0 / var;
        const double x = double(l), y = std::log(p);
        sw += w;
        sx += w * x;
        sy += w * y;
        sxx += w * x * x;
        sxy += w * x * y;
        ++f.points;
    }
    if (f.points < 2) return f;
    const double d = sw * sxx - sx * sx;
    if (!(d > 0.0)) return f;
    f.slope = (sw * sxy - sx * sy) / d;
    f.intercept = (sy - f.slope * sx) / sw;
    f.se = std::sqrt(sw / d);
    f.ok = true;
    return f;
}

} // namespace

TailTable tail_from_histograms(const std::vector<std::vector<std::int64_t>>& hs, int min_count) {
    TailTable t;
    const std::vector<std::int64_t> all = pooled(hs, hs.size());
    const std::vector<std::int64_t> c = tail_counts(all);
    t.n = c.empty() ? 0 : c[0];
    std::vector<std::vector<std::int64_t>> per;
    for (const auto& h : hs) per.push_back(tail_counts(h));
    for (std::size_t l = 0; l < c.size(); ++l) {
        TailRow row;
        row.ell = int(l);
        row.count = c[l];
        row.p = t.n ? double(c[l]) / double(t.n) : 0.0;
        if (hs.size() >= 2) {
            std::vector<double> ps;
            for (const auto& pr : per) {
                const double nr = pr.empty() ? 0.0 : double(pr[0]);
                ps.push_back(nr > 0 && l < pr.size() ? double(pr[l]) / nr : 0.0);
            }
            row.se = replica_estimate(ps).se;
        } else if (t.n) {
            row.se = std::sqrt(row.p * (1.0 - row.p) / double(t.n));
        }
        t.rows.push_back(row);
    }
    t.fit = fit_tail(all, min_count);
    if (t.fit.ok && hs.size() >= 2) {
        // Delete-one-replica jackknife; samples inside a replica are correlated.
        std::vector<double> th;
        bool all_ok = true;
        for (std::size_t r = 0; r < hs.size(); ++r) {
            const TailFit fr = fit_tail(pooled(hs, r), min_count);
            if (!fr.ok) {
                all_ok = false;
                break;
            }
            th.push_back(fr.slope);
        }
        if (all_ok) {
            const double R = double(th.size());
            const double m = std::accumulate(th.begin(), th.end(), 0.0) / R;
            double q = 0;
            for (double v : th) q += (v - m) * (v - m);
            t.fit.se = std::max(t.fit.se, std::sqrt((R - 1.0) / R * q));
        }
    }
    return t;
}

std::string TailTable::to_csv(const std::string& schema) const {
    std::ostringstream os;
    os << "# schema: " << schema << " v1\n";
    os << "ell,count,p,se\n";
    for (const TailRow& r : rows) os << r.ell << ',' << r.count << ',' << fixed(r.p) << ',' << fixed(r.se) << '\n';
    os << "# fit_ok=" << (fit.ok ? 1 : 0) << " slope=" << fixed(fit.slope) << " se=" << fixed(fit.se)
       << " points=" << fit.points << " n=" << n << '\n';
    return os.str();
}

namespace {

using Hist = std::vector<std::int64_t>;

void bump(Hist& h, int v) {
    if (v < 0) v = 0;
    if (std::size_t(v) >= h.size()) h.resize(std::size_t(v) + 1, 0);
    ++h[std::size_t(v)];
}

} // namespace

EdgeTailReport edge_tail(const ExperimentPlan& plan, int x, std::optional<double> alpha) {
    plan.check();
    const GroundState gs(plan.bc);
    const int n = plan.bc->region().midpoint_count();
    if (x < -1 || x >= n) fail(ErrorCode::InvalidArgument, "midpoint index out of range");
    std::vector<int> mids;
    if (x >= 0) {
        mids.push_back(x);
    } else {
        for (int y = 0; y < n; ++y)
            if (!plan.bc->is_constraint_midpoint(y)) mids.push_back(y);
    }
    const auto hs = sample_replicas<Hist>(plan, [&](Hist& h, const Triangulation& s) {
        for (int y : mids) bump(h, s.length(y) - gs.ground_length(y));
    });
    EdgeTailReport rep;
    rep.table = tail_from_histograms(hs);
    rep.alpha = alpha ? *alpha : std::pow(plan.lambda, -0.25);
    rep.consistency_gate = rep.table.fit.ok && -rep.table.fit.slope >= 0.5 * std::log(rep.alpha);
    return rep;
}

// ---------------------------------------------------------------- crossings

namespace {

void check_rect(const Region& r, const Rect& rect) {
    if (rect.width() < 1 || rect.height() < 1) fail(ErrorCode::InvalidArgument, "rectangle must have width and height >= 1");
    for (Point p : {Point::lattice(rect.x0, rect.y0), Point::lattice(rect.x1, rect.y0), Point::lattice(rect.x0, rect.y1),
                    Point::lattice(rect.x1, rect.y1)}) {
        if (r.locate(p) == Region::Location::Outside) fail(ErrorCode::InvalidArgument, "rectangle leaves the region");
    }
}

// Segment meets the open rectangle (Liang-Barsky with strict bounds).
bool meets_open_rect(const Edge& e, const Rect& rect) {
    const double x0 = e.a.x2, y0 = e.a.y2, dx = e.b.x2 - e.a.x2, dy = e.b.y2 - e.a.y2;
    double t0 = 0.0, t1 = 1.0;
    const double p[4] = {-dx, dx, -dy, dy};
    const double q[4] = {x0 - 2.0 * rect.x0, 2.0 * rect.x1 - x0, y0 - 2.0 * rect.y0, 2.0 * rect.y1 - y0};
    for (int i = 0; i < 4; ++i) {
        if (p[i] == 0.0) {
            if (q[i] <= 0.0) return false;
            continue;
        }
        const double t = q[i] / p[i];
        if (p[i] < 0) t0 = std::max(t0, t);
        else t1 = std::min(t1, t);
    }
    return t0 < t1;
}

bool tri_inside(const Triangle& t, const Rect& rect) {
    for (Point v : t.verts) {
        if (v.x2 < 2 * rect.x0 || v.x2 > 2 * rect.x1 || v.y2 < 2 * rect.y0 || v.y2 > 2 * rect.y1) return false;
    }
    return true;
}

bool tri_small(const Triangulation& s, const Triangle& t, int L) {
    for (int m : t.sides)
        if (s.length(m) > L) return false;
    return true;
}

bool touches_x(const Triangle& t, int x) {
    for (Point v : t.verts)
        if (v.x2 == 2 * x) return true;
    return false;
}

} // namespace

CrossingResult small_triangle_crossing(const Triangulation& s, const Rect& rect, int L) {
    check_rect(s.region(), rect);
    for (const Edge& e : s.boundary().extra_edges()) {
        if (meets_open_rect(e, rect)) fail(ErrorCode::InvalidArgument, "constraint edge " + to_string(e) + " meets the rectangle");
    }
    const auto& tris = s.triangles();
    std::vector<char> good(tris.size(), 0);
    for (std::size_t i = 0; i < tris.size(); ++i) good[i] = tri_inside(tris[i], rect) && tri_small(s, tris[i], L);
    std::vector<int> from(tris.size(), -2);
    std::deque<int> queue;
    for (std::size_t i = 0; i < tris.size(); ++i) {
        if (good[i] && touches_x(tris[i], rect.x0)) {
            from[i] = -1;
            queue.push_back(int(i));
        }
    }
    CrossingResult res;
    while (!queue.empty()) {
        const int t = queue.front();
        queue.pop_front();
        if (touches_x(tris[std::size_t(t)], rect.x1)) {
            for (int u = t; u != -1; u = from[std::size_t(u)]) res.path.push_back(u);
            std::reverse(res.path.begin(), res.path.end());
            res.crossed = true;
            return res;
        }
        for (int m : tris[std::size_t(t)].sides) {
            for (int u : s.incident(m)) {
                if (u < 0 || u == t || !good[std::size_t(u)] || from[std::size_t(u)] != -2) continue;
                from[std::size_t(u)] = t;
                queue.push_back(u);
            }
        }
    }
    return res;
}

std::optional<std::string> verify_crossing_path(const Triangulation& s, const Rect& rect, int L,
                                                const std::vector<int>& path) {
    const auto& tris = s.triangles();
    if (path.empty()) return "empty path";
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (path[i] < 0 || std::size_t(path[i]) >= tris.size()) return "triangle index out of range";
        const Triangle& t = tris[std::size_t(path[i])];
        if (!tri_inside(t, rect)) return "triangle leaves the rectangle";
        if (!tri_small(s, t, L)) return "side longer than L";
        if (i > 0) {
            const Triangle& p = tris[std::size_t(path[i - 1])];
            bool shared = false;
            for (int a : t.sides)
                for (int b : p.sides) shared = shared || a == b;
            if (!shared) return "consecutive triangles share no edge";
        }
    }
    if (!touches_x(tris[std::size_t(path.front())], rect.x0)) return "path does not start on the left side";
    if (!touches_x(tris[std::size_t(path.back())], rect.x1)) return "path does not end on the right side";
    return std::nullopt;
}

Estimate crossing_frequency(const ExperimentPlan& plan, const Rect& rect, int L) {
    struct Acc {
        std::int64_t hit = 0, n = 0;
    };
    const auto acc = sample_replicas<Acc>(plan, [&](Acc& a, const Triangulation& s) {
        const CrossingResult r = small_triangle_crossing(s, rect, L);
        if (r.crossed) {
            LATTRI_ENSURE(!verify_crossing_path(s, rect, L, r.path), "crossing witness failed verification");
            ++a.hit;
        }
        ++a.n;
    });
    std::vector<double> f;
    for (const Acc& a : acc) f.push_back(double(a.hit) / double(a.n));
    return replica_estimate(f);
}

int unit_vertical_crossings(const Triangulation& s, const Rect& rect) {
    check_rect(s.region(), rect);
    const Region& r = s.region();
    int count = 0;
    for (int c = rect.x0 + 1; c < rect.x1; ++c) {
        bool full = true;
        for (int y = rect.y0; y < rect.y1 && full; ++y) {
            const int m = r.midpoint_index(Point{2 * c, 2 * y + 1});
            full = m >= 0 && s.edge(m) == Edge::lattice(c, y, c, y + 1);
        }
        count += full;
    }
    return count;
}

VerticalReport vertical_crossings(const ExperimentPlan& plan, const Rect& rect) {
    const auto hs = sample_replicas<Hist>(plan, [&](Hist& h, const Triangulation& s) {
        bump(h, unit_vertical_crossings(s, rect));
    });
    VerticalReport rep;
    std::vector<double> means;
    for (const Hist& h : hs) {
        std::int64_t n = 0, sum = 0;
        for (std::size_t v = 0; v < h.size(); ++v) {
            n += h[v];
            sum += std::int64_t(v) * h[v];
        }
        means.push_back(double(sum) / double(n));
    }
    rep.mean = replica_estimate(means);
    rep.histogram = pooled(hs, hs.size());
    return rep;
}

// ---------------------------------------------------------------- coupling

std::vector<int> window_midpoints(const Region& r, const Rect& w) {
    std::vector<int> out;
    const auto& mids = r.midpoints();
    for (int i = 0; i < int(mids.size()); ++i) {
        const Point p = mids[std::size_t(i)];
        if (p.x2 >= 2 * w.x0 && p.x2 <= 2 * w.x1 && p.y2 >= 2 * w.y0 && p.y2 <= 2 * w.y1) out.push_back(i);
    }
    return out;
}

CouplingReport coupling_agreement(const ExperimentPlan& a, const ExperimentPlan& b, const Rect& window) {
    a.check();
    b.check();
    if (a.bc->region().midpoints() != b.bc->region().midpoints()) {
        fail(ErrorCode::MidpointSetMismatch, "coupled plans must share the region");
    }
    if (a.lambda != b.lambda) fail(ErrorCode::InvalidArgument, "coupled plans must share lambda");
    const std::vector<int> mids = window_midpoints(a.bc->region(), window);
    if (mids.empty()) fail(ErrorCode::InvalidArgument, "window contains no midpoints");
    const Triangulation sa = a.initial ? *a.initial : GroundState(a.bc).triangulation();
    const Triangulation sb = b.initial ? *b.initial : GroundState(b.bc).triangulation();
    const std::int64_t burn = a.effective_burn_in();
    const std::int64_t gap = a.effective_interval();
    const auto freq = parallel_map<double>(
        std::size_t(a.replicas),
        [&](std::size_t r) {
            Chain ca(sa, a.lambda, derive_seed(a.seed, r));
            Chain cb(sb, b.lambda, derive_seed(a.seed, r));
            for (std::int64_t t = 0; t < burn; ++t) coupled_step(ca, cb);
            std::int64_t agree = 0;
            for (int i = 0; i < a.samples; ++i) {
                for (std::int64_t t = 0; t < gap; ++t) coupled_step(ca, cb);
                bool same = true;
                for (int m : mids) same = same && ca.state().edge(m) == cb.state().edge(m);
                agree += same;
            }
            return double(agree) / double(a.samples);
        },
        a.threads);
    CouplingReport rep;
    rep.agreement = replica_estimate(freq);
    rep.samples = std::int64_t(a.replicas) * a.samples;
    return rep;
}

WallSetup wall_setup(int n, int k, int left, int w, int m) {
    const int c = left + w + m;
    if (left < 0 || w < 1 || m < 1 || k < 1 || c + 1 > n) fail(ErrorCode::InvalidArgument, "wall does not fit in the strip");
    auto region = std::make_shared<const Region>(Region::rectangle(n, k));
    WallSetup ws;
    ws.free_bc = BoundaryCondition::make(region);
    ws.wall = Edge::lattice(c, 0, c + 1, k);
    ws.wall_bc = BoundaryCondition::make(region, {ws.wall});
    ws.window = Rect{left, 0, left + w, k};
    return ws;
}

// ---------------------------------------------------------------- frequencies

FrequencyReport ground_state_frequency(const ExperimentPlan& plan, const Edge& g) {
    plan.check();
    const GroundState gs(plan.bc);
    if (!gs.is_ground(g)) fail(ErrorCode::NotGroundEdge, to_string(g) + " is not a ground state edge");
    const int x = plan.bc->region().midpoint_index(g.midpoint());
    struct Acc {
        std::int64_t hit = 0, n = 0;
    };
    const auto acc = sample_replicas<Acc>(plan, [&](Acc& a, const Triangulation& s) {
        a.hit += s.edge(x) == g;
        ++a.n;
    });
    FrequencyReport rep;
    std::vector<double> f;
    for (const Acc& a : acc) {
        rep.hits += a.hit;
        rep.n += a.n;
        f.push_back(double(a.hit) / double(a.n));
    }
    rep.est = replica_estimate(f);
    rep.wilson = wilson_interval(rep.hits, rep.n);
    return rep;
}

int vertex_degree(const Triangulation& s, Point v) {
    int d = 0;
    for (const Edge& e : s.edges()) d += e.a == v || e.b == v;
    return d;
}

TailTable degree_tail(const ExperimentPlan& plan, Point v) {
    plan.check();
    if (!plan.bc->region().contains_lattice_point(v)) fail(ErrorCode::InvalidArgument, "vertex is not a lattice point of the region");
    const auto hs = sample_replicas<Hist>(plan, [&](Hist& h, const Triangulation& s) { bump(h, vertex_degree(s, v)); });
    return tail_from_histograms(hs);
}

// ---------------------------------------------------------------- Lyapunov experiments

Triangulation forced_crossing_state(const GroundState& gs, const Edge& g, Rng& rng, int attempts, int max_forced) {
    const BoundaryCondition& bc = gs.boundary();
    const auto& pts = bc.region().lattice_points();
    std::vector<Edge> forced = bc.extra_edges();
    const std::size_t base = forced.size();
    for (int a = 0; a < attempts && int(forced.size() - base) < max_forced; ++a) {
        const Point p = pts[std::size_t(rng.below(pts.size()))];
        const Point q = pts[std::size_t(rng.below(pts.size()))];
        if (p == q) continue;
        const Edge e = Edge::make(p, q);
        if (!is_primitive(e) || !open_segments_intersect(e, g) || !bc.is_compatible(e)) continue;
        bool ok = true;
        for (std::size_t i = base; i < forced.size() && ok; ++i) ok = forced[i] != e && !open_segments_intersect(forced[i], e);
        if (ok) forced.push_back(e);
    }
    const GroundState filled(BoundaryCondition::make(bc.region_ptr(), std::move(forced)));
    return Triangulation::from_edges(gs.boundary_ptr(), filled.triangulation().edges());
}

std::vector<Triangulation> reverse_drive_path(const Triangulation& s, const GroundState& gs, const Edge& g) {
    const DriveResult d = drive_to_ground(s, gs, g);
    std::vector<Triangulation> path{s};
    Triangulation cur = s;
    for (int x : d.flips) {
        cur.flip(x);
        path.push_back(cur);
    }
    std::reverse(path.begin(), path.end());
    return path;
}

std::optional<Triangulation> reverse_drive_state(const GroundState& gs, const Edge& g, const LyapunovConfig& cfg,
                                                 double target, Rng& rng, int max_tries) {
    for (int t = 0; t < max_tries; ++t) {
        const Triangulation top = forced_crossing_state(gs, g, rng);
        if (lyapunov_value(top, gs, g, cfg) < target) continue;
        std::vector<Triangulation> above;
        for (Triangulation& s : reverse_drive_path(top, gs, g)) {
            if (lyapunov_value(s, gs, g, cfg) >= target) above.push_back(std::move(s));
        }
        return above[std::size_t(rng.below(above.size()))];
    }
    return std::nullopt;
}

std::string ContractionReport::to_csv() const {
    std::ostringstream os;
    os << "# schema: contraction_cases v1\n";
    os << "case,psi,drift,direct,eps_hat\n";
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const ContractionCase& c = cases[i];
        os << i << ',' << fixed(c.psi, 8) << ',' << fixed(c.drift, 12) << ',' << fixed(c.direct, 12) << ','
           << fixed(c.eps_hat, 10) << '\n';
    }
    return os.str();
}

ContractionReport contraction_cases(const BoundaryPtr& bc, const LyapunovConfig& cfg, int cases, std::uint64_t seed,
                                    unsigned threads) {
    if (cases < 1) fail(ErrorCode::InvalidArgument, "need at least one case");
    const GroundState gs(bc);
    const Region& r = bc->region();
    std::vector<int> interior;
    for (int x = 0; x < r.midpoint_count(); ++x) {
        if (!bc->is_constraint_midpoint(x) && r.locate(r.midpoints()[std::size_t(x)]) == Region::Location::Inside) {
            interior.push_back(x);
        }
    }
    if (interior.empty()) fail(ErrorCode::InvalidArgument, "region has no free interior midpoint");
    struct Out {
        ContractionCase c;
        int failures = 0;
    };
    const auto outs = parallel_map<Out>(
        std::size_t(cases),
        [&](std::size_t i) {
            Out o;
            Rng rng(derive_seed(seed, i));
            for (;;) {
                const int x = interior[std::size_t(rng.below(interior.size()))];
                const Edge g = gs.canonical_edge(x);
                auto s = reverse_drive_state(gs, g, cfg, cfg.psi0, rng, 1);
                if (!s) {
                    LATTRI_ENSURE(++o.failures < 100000, "no forced state reaches psi0");
                    continue;
                }
                const DriftReport rep = expected_drift(*s, gs, g, cfg);
                o.c.psi = rep.psi_value;
                o.c.drift = rep.total;
                o.c.direct = direct_drift(*s, gs, g, cfg);
                o.c.eps_hat = -rep.total * double(s->size()) / rep.psi_value;
                return o;
            }
        },
        threads);
    ContractionReport rep;
    rep.eps_min = INFINITY;
    for (const Out& o : outs) {
        rep.cases.push_back(o.c);
        rep.failed_constructions += o.failures;
        rep.negative += o.c.drift < 0.0;
        rep.eps_min = std::min(rep.eps_min, o.c.eps_hat);
    }
    return rep;
}

double trajectory_epsilon(const Triangulation& start, const GroundState& gs, const Edge& g,
                          const LyapunovConfig& cfg, int runs, std::uint64_t seed, std::uint64_t max_steps,
                          unsigned threads) {
    const auto mins = parallel_map<double>(
        std::size_t(std::max(runs, 0)),
        [&](std::size_t r) {
            Chain c(start, cfg.lambda, derive_seed(seed, r));
            PsiTracker psi(c.state(), gs, g, cfg.alpha);
            double best = INFINITY;
            bool fresh = true;
            for (std::uint64_t t = 0; t < max_steps && psi.value() > cfg.psi0; ++t) {
                if (fresh) {
                    const DriftReport rep = expected_drift(c.state(), gs, g, cfg);
                    best = std::min(best, -rep.total * double(c.state().size()) / rep.psi_value);
                }
                const StepOutcome o = c.step();
                fresh = o.action == StepAction::Flipped;
                if (fresh) psi.replace(o.old_edge, o.new_edge);
            }
            return best;
        },
        threads);
    double best = INFINITY;
    for (double m : mins) best = std::min(best, m);
    return best;
}

HittingReport hitting_time_moment(const Triangulation& start, const GroundState& gs, const Edge& g,
                                  const LyapunovConfig& cfg, double eps, int runs, std::uint64_t seed,
                                  std::uint64_t max_steps, unsigned threads) {
    if (runs < 1) fail(ErrorCode::InvalidArgument, "need at least one run");
    const double base = 1.0 + eps / double(start.size());
    struct Out {
        std::uint64_t T = 0;
        bool hit = false;
    };
    const auto outs = parallel_map<Out>(
        std::size_t(runs),
        [&](std::size_t r) {
            Chain c(start, cfg.lambda, derive_seed(seed, r));
            const auto t = hitting_time(c, gs, g, cfg.alpha, cfg.psi0, max_steps);
            return Out{t ? *t : max_steps, bool(t)};
        },
        threads);
    HittingReport rep;
    rep.runs = runs;
    rep.psi_start = lyapunov_value(start, gs, g, cfg);
    std::vector<double> m;
    double sumT = 0;
    for (const Out& o : outs) {
        rep.censored += !o.hit;
        m.push_back(std::pow(base, double(o.T)));
        sumT += double(o.T);
    }
    rep.moment = replica_estimate(m);
    rep.mean_T = sumT / double(runs);
    return rep;
}

} // namespace lattri
