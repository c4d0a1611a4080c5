#pragma once

#include "lattri/edge_poset.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lattri {

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    void add(double v) noexcept;
    double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

struct LyapunovConfig {
    double lambda = 0.5;
    double alpha = 0.0;
    long C = 0;
    long C_prime = 0;
    double psi0 = 50.0;

    /// Default alpha is lambda^(-1/4). Throws InvalidLambda unless
    /// 0 < lambda < 1, InvalidArgument for alpha outside (1, lambda^(-1/2)).
    static LyapunovConfig derive(double lambda, std::optional<double> alpha = std::nullopt, double psi0 = 50.0);

    /// (alpha-1)^3 (alpha+1)^2 / (32 alpha^5). Reported, never used as a gate.
    double epsilon_formula() const noexcept;
};

/// sum over chain members h of top meeting g of alpha^(|h| - |g|).
double chain_weight(const GroundState& gs, const Edge& top, const Edge& g, double alpha, bool full = false);

/// Psi_g. Throws NotGroundEdge if g is not a ground state edge.
double lyapunov_value(const Triangulation& s, const GroundState& gs, const Edge& g, const LyapunovConfig& cfg,
                      bool full = false);

/// Flip probability at a flippable midpoint, in the stable min-shifted form.
double flip_probability(int old_len, int new_len, double lambda) noexcept;

struct DriftRow {
    int midpoint = -1;
    EdgeClass cls = EdgeClass::Other;
    int length = 0;
    int psi = -1;  // -1 where undefined
    double rho = 0.0;
    bool in_dec = false;
    bool in_inc = false;
};

struct DriftReport {
    std::vector<DriftRow> rows;  // only midpoints with rho != 0 or in a drift set
    double psi_value = 0.0;
    double total = 0.0;          // (1/|Lambda|) sum rho
    int dec_count = 0;
    int inc_count = 0;

    std::string to_csv() const;
};

/// rho_g(sigma, x).
double drift_term(const Triangulation& s, const GroundState& gs, const Edge& g, int x, const LyapunovConfig& cfg,
                  bool* in_dec = nullptr, bool* in_inc = nullptr);

DriftReport expected_drift(const Triangulation& s, const GroundState& gs, const Edge& g, const LyapunovConfig& cfg);

/// One-step expectation of Psi_g(sigma') - Psi_g(sigma), computed by flipping
/// each midpoint and re-evaluating the changed term with full chains.
double direct_drift(const Triangulation& s, const GroundState& gs, const Edge& g, const LyapunovConfig& cfg);

struct DriveResult {
    std::vector<int> flips;  // midpoints in order
    Triangulation final_state;
};

/// Non-increasing flips that bring g into the triangulation.
DriveResult drive_to_ground(const Triangulation& s, const GroundState& gs, const Edge& g);

/// Largest length of an edge meeting g is at most |g| + log Psi_g / log alpha.
bool largest_crossing_bound_holds(const Triangulation& s, const GroundState& gs, const Edge& g,
                                  const LyapunovConfig& cfg);
/// Number of edges meeting g is at most Psi_g.
bool crossing_count_bound_holds(const Triangulation& s, const GroundState& gs, const Edge& g,
                                const LyapunovConfig& cfg);

/// Incrementally maintained Psi_g under single-edge changes, exact as a
/// polynomial in alpha (integer counts per exponent).
class PsiTracker {
public:
    PsiTracker(const Triangulation& s, const GroundState& gs, const Edge& g, double alpha);
    void replace(const Edge& old_edge, const Edge& new_edge);
    double value() const;

private:
    void add_edge(const Edge& e, int sign);

    const GroundState* gs_;
    Edge g_;
    int glen_;
    double alpha_;
    std::vector<long long> count_;  // by exponent |h| - |g|
};

} // namespace lattri
