#pragma once

#include "lattri/dynamics.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace lattri {

/// Axis-aligned lattice rectangle [x0, x1] x [y0, y1].
struct Rect {
    int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
    int width() const noexcept { return x1 - x0; }
    int height() const noexcept { return y1 - y0; }
};

struct ExperimentPlan {
    BoundaryPtr bc;
    double lambda = 0.5;
    std::uint64_t seed = 1;
    int replicas = 4;
    std::int64_t burn_in = -1;   // -1: 20 |Lambda| log |Lambda|
    std::int64_t interval = -1;  // -1: |Lambda|
    int samples = 100;           // per replica
    unsigned threads = 0;
    std::optional<Triangulation> initial;  // default: ground state

    std::int64_t effective_burn_in() const;
    std::int64_t effective_interval() const;
    /// Throws InvalidArgument / InvalidLambda.
    void check() const;
};

/// Mean with a standard error.
struct Estimate {
    double mean = 0.0;
    double se = 0.0;
};

/// Mean over replicas, SE from their spread.
Estimate replica_estimate(const std::vector<double>& per_replica);

/// Wilson score interval for k successes in n trials.
std::pair<double, double> wilson_interval(std::int64_t k, std::int64_t n, double z = 1.96);

std::string fixed(double v, int digits = 10);

/// Runs plan.replicas chains with seeds derive_seed(plan.seed, r); after
/// burn-in, calls observe(acc, state) every interval steps, samples times.
template <class Acc>
std::vector<Acc> sample_replicas(const ExperimentPlan& plan,
                                 const std::function<void(Acc&, const Triangulation&)>& observe,
                                 const std::function<Acc()>& make = [] { return Acc{}; });

/// Empirical tail P(value >= ell) for ell = 0 .. max, pooled over replicas,
/// with a weighted log-linear fit over attained values ell >= 1 whose SE
/// comes from a delete-one-replica jackknife.
struct TailRow {
    int ell = 0;
    std::int64_t count = 0;
    double p = 0.0;
    double se = 0.0;
};
struct TailFit {
    bool ok = false;
    double slope = 0.0;
    double se = 0.0;
    double intercept = 0.0;
    int points = 0;
};
struct TailTable {
    std::vector<TailRow> rows;
    std::int64_t n = 0;
    TailFit fit;
    std::string to_csv(const std::string& schema) const;
};
/// histograms[r][v] = number of samples of value v in replica r.
TailTable tail_from_histograms(const std::vector<std::vector<std::int64_t>>& histograms, int min_count = 5);

/// Excess length |sigma_x| - |g_x|. With x = -1 the samples are pooled over
/// every midpoint not on a constraint.
struct EdgeTailReport {
    TailTable table;
    double alpha = 0.0;
    /// Fitted decay rate -slope is at least half of log alpha.
    bool consistency_gate = false;
};
EdgeTailReport edge_tail(const ExperimentPlan& plan, int x, std::optional<double> alpha = std::nullopt);

struct CrossingResult {
    bool crossed = false;
    std::vector<int> path;  // triangle slots, left to right
};
/// BFS over triangles inside rect with every side of length <= L, adjacent
/// when they share an edge. Throws InvalidArgument for width < 1, a rect
/// outside the region or a constraint edge meeting its interior.
CrossingResult small_triangle_crossing(const Triangulation& s, const Rect& rect, int L);
/// nullopt when the path is a valid witness.
std::optional<std::string> verify_crossing_path(const Triangulation& s, const Rect& rect, int L,
                                                const std::vector<int>& path);
Estimate crossing_frequency(const ExperimentPlan& plan, const Rect& rect, int L);

/// Interior columns x0 < c < x1 in which all unit verticals of rect are present.
int unit_vertical_crossings(const Triangulation& s, const Rect& rect);
struct VerticalReport {
    Estimate mean;
    std::vector<std::int64_t> histogram;
};
VerticalReport vertical_crossings(const ExperimentPlan& plan, const Rect& rect);

/// Midpoints of the region inside the closed rectangle.
std::vector<int> window_midpoints(const Region& r, const Rect& window);

struct CouplingReport {
    Estimate agreement;
    std::int64_t samples = 0;
};
/// Coupled chains on plans that share the region, lambda, seed and sampling
/// parameters; frequency after burn-in that every window edge coincides.
CouplingReport coupling_agreement(const ExperimentPlan& a, const ExperimentPlan& b, const Rect& window);

/// Strip of height k and width n with a window [left, left + w] x [0, k] and,
/// for the constrained plan, the edge (c, 0)-(c + 1, k) with c = left + w + m.
struct WallSetup {
    BoundaryPtr free_bc;
    BoundaryPtr wall_bc;
    Rect window;
    Edge wall;
};
WallSetup wall_setup(int n, int k, int left, int w, int m);

struct FrequencyReport {
    std::int64_t hits = 0;
    std::int64_t n = 0;
    Estimate est;
    std::pair<double, double> wilson{0.0, 0.0};
};
/// Stationary frequency of g at its midpoint. Throws NotGroundEdge.
FrequencyReport ground_state_frequency(const ExperimentPlan& plan, const Edge& g);

int vertex_degree(const Triangulation& s, Point v);
TailTable degree_tail(const ExperimentPlan& plan, Point v);

/// Forces random long compatible edges that meet g, pairwise non-crossing,
/// and fills the rest with the ground state of the boundary condition that
/// also contains them. The result is a state of the original boundary.
Triangulation forced_crossing_state(const GroundState& gs, const Edge& g, Rng& rng, int attempts = 4000,
                                    int max_forced = 60);

/// States visited by drive_to_ground(s, g) in reverse order: the first
/// contains g, the last is s.
std::vector<Triangulation> reverse_drive_path(const Triangulation& s, const GroundState& gs, const Edge& g);

/// A state on the reverse drive path of a forced crossing state, drawn
/// uniformly among those with Psi_g >= target. nullopt after max_tries
/// forced states all below target.
std::optional<Triangulation> reverse_drive_state(const GroundState& gs, const Edge& g, const LyapunovConfig& cfg,
                                                 double target, Rng& rng, int max_tries = 200);

struct ContractionCase {
    double psi = 0.0;
    double drift = 0.0;   // closed form
    double direct = 0.0;  // brute force
    double eps_hat = 0.0; // -drift |Lambda| / psi
};
struct ContractionReport {
    std::vector<ContractionCase> cases;
    int negative = 0;
    int failed_constructions = 0;  // forced states below psi0
    double eps_min = 0.0;
    std::string to_csv() const;
};
/// `cases` reverse-drive states with Psi_g >= cfg.psi0, each for the ground
/// edge at a random free interior midpoint.
ContractionReport contraction_cases(const BoundaryPtr& bc, const LyapunovConfig& cfg, int cases, std::uint64_t seed,
                                    unsigned threads = 0);

/// Smallest -drift |Lambda| / Psi_g over the states above cfg.psi0 visited by
/// `runs` chains from start before they hit. Infinity if none is visited.
double trajectory_epsilon(const Triangulation& start, const GroundState& gs, const Edge& g,
                          const LyapunovConfig& cfg, int runs, std::uint64_t seed, std::uint64_t max_steps,
                          unsigned threads = 0);

struct HittingReport {
    Estimate moment;     // mean of (1 + eps/|Lambda|)^T
    double psi_start = 0.0;
    int runs = 0;
    int censored = 0;    // runs that did not hit within max_steps
    double mean_T = 0.0;
};
HittingReport hitting_time_moment(const Triangulation& start, const GroundState& gs, const Edge& g,
                                  const LyapunovConfig& cfg, double eps, int runs, std::uint64_t seed,
                                  std::uint64_t max_steps, unsigned threads = 0);

// --- template implementation ---

template <class Acc>
std::vector<Acc> sample_replicas(const ExperimentPlan& plan,
                                 const std::function<void(Acc&, const Triangulation&)>& observe,
                                 const std::function<Acc()>& make) {
    plan.check();
    const std::int64_t burn = plan.effective_burn_in();
    const std::int64_t gap = plan.effective_interval();
    const Triangulation start = plan.initial ? *plan.initial : GroundState(plan.bc).triangulation();
    return parallel_map<Acc>(
        std::size_t(plan.replicas),
        [&](std::size_t r) {
            Acc acc = make();
            Chain chain(start, plan.lambda, derive_seed(plan.seed, r));
            chain.run(std::uint64_t(burn));
            for (int i = 0; i < plan.samples; ++i) {
                chain.run(std::uint64_t(gap));
                observe(acc, chain.state());
            }
            return acc;
        },
        plan.threads);
}

} // namespace lattri
