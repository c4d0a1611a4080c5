#pragma once

#include "lattri/triangulation.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lattri {

using Rational = boost::multiprecision::cpp_rational;

/// "p/q", an integer, or an exact decimal such as "0.8". Throws ParseError.
Rational parse_rational(const std::string& text);
std::string rational_to_string(const Rational& q);

/// Every compatible edge with midpoint x, sorted.
std::vector<Edge> compatible_edges(const BoundaryCondition& bc, int x);

/// Free midpoints top to bottom, left to right.
std::vector<int> anclin_order(const BoundaryCondition& bc);

/// All triangulations of a region under a boundary condition.
class EnumeratedSpace {
public:
    int size() const noexcept { return static_cast<int>(choices_.size()); }
    const BoundaryPtr& boundary_ptr() const noexcept { return bc_; }
    const std::vector<int>& order() const noexcept { return order_; }
    /// Candidate edges per free midpoint, in order().
    const std::vector<std::vector<Edge>>& candidates() const noexcept { return candidates_; }

    /// Edge at midpoint x in state i.
    Edge edge(int i, int x) const;
    std::vector<Edge> edges(int i) const;
    Triangulation triangulation(int i) const;
    std::int64_t total_length(int i) const noexcept { return total_len_[static_cast<std::size_t>(i)]; }
    /// State index of a triangulation on the same boundary condition, or -1.
    int index_of(const Triangulation& s) const;

    /// Largest number of unblocked candidates met at any branching point.
    int max_live_candidates() const noexcept { return max_live_; }
    /// Complete assignments rejected by final validation.
    std::int64_t dead_leaves() const noexcept { return dead_leaves_; }
    /// log2 of the Anclin bound 2^(free midpoints).
    int free_midpoints() const noexcept { return static_cast<int>(order_.size()); }

private:
    friend EnumeratedSpace enumerate(BoundaryPtr bc, std::int64_t cap, std::optional<std::vector<int>> order,
                                     bool validate_leaves);

    BoundaryPtr bc_;
    std::vector<int> order_;
    std::vector<int> slot_of_;  // midpoint -> position in order_, -1 for constraints
    std::vector<std::vector<Edge>> candidates_;
    std::vector<std::vector<std::uint16_t>> choices_;
    std::vector<std::int64_t> total_len_;
    std::map<std::vector<std::uint16_t>, int> index_;
    int max_live_ = 0;
    std::int64_t dead_leaves_ = 0;
};

/// Depth-first search over free midpoints (default: anclin_order) branching
/// over candidates that cross nothing placed so far. Throws CapExceeded when
/// more than cap states are found; the message carries the partial count.
EnumeratedSpace enumerate(BoundaryPtr bc, std::int64_t cap = 10'000'000,
                          std::optional<std::vector<int>> order = std::nullopt, bool validate_leaves = true);

/// Exact Gibbs weights lambda^(total length) / Z.
struct ExactMeasure {
    Rational lambda;
    Rational Z;
    std::vector<Rational> prob;
    std::vector<double> as_double() const;
};
ExactMeasure exact_measure(const EnumeratedSpace& space, const Rational& lambda);

double tv_distance(const std::vector<double>& p, const std::vector<double>& q);

struct ConditionalGround {
    Rational given_ground;     // P(sigma_x ground | sigma_y ground)
    Rational given_not;        // P(sigma_x ground | sigma_y not ground)
    Rational marginal;         // P(sigma_x ground)
    Rational y_ground;         // P(sigma_y ground)
};

/// Ground events use the canonical ground edge (smaller unit diagonal).
/// Throws DegenerateCondition if sigma_y is almost surely ground or not.
ConditionalGround conditional_ground_prob(const EnumeratedSpace& space, const ExactMeasure& mu, int x, int y);

struct FkgWitness {
    std::string instance;  // human readable description
    BoundaryPtr bc;
    int x = -1;
    int y = -1;
    Rational lambda;
    ConditionalGround probs;
    int states = 0;
};

struct FkgInstance {
    std::string name;
    BoundaryPtr bc;
};

/// Rectangles up to 4x4 (wider ones only as thin strips) with up to three
/// interior constraints drawn from short primitive edges.
std::vector<FkgInstance> fkg_catalog(int max_instances = 400);

/// First (instance, x, y) with P(x ground | y not) > P(x ground | y ground)
/// and P(x ground) > P(x ground | y ground). Midpoints with a unique ground
/// edge are preferred.
std::optional<FkgWitness> fkg_search(const std::vector<FkgInstance>& catalog, const Rational& lambda,
                                     std::int64_t cap = 200'000);

/// Exact detailed balance pi(s) P(s, t) = pi(t) P(t, s) of the heat-bath
/// chain over the enumerated space. Returns the number of checked pairs, or
/// nullopt on the first violation.
std::optional<std::int64_t> detailed_balance_exact(const EnumeratedSpace& space, const ExactMeasure& mu);

} // namespace lattri
