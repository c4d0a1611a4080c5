#pragma once

#include "lattri/dynamics.hpp"
#include "lattri/error.hpp"
#include "lattri/enumeration.hpp"
#include "lattri/experiments.hpp"

#include <algorithm>
#include <cstdlib>
#include <memory>
#include <numeric>
#include <vector>

namespace testing_support {

using namespace lattri;

inline BoundaryPtr rect(int w, int h, std::vector<Edge> extra = {}) {
    return BoundaryCondition::make(std::make_shared<const Region>(Region::rectangle(w, h)), std::move(extra));
}

inline BoundaryPtr polygon(const std::vector<std::pair<int, int>>& verts, std::vector<Edge> extra = {}) {
    std::vector<Point> pts;
    // corners only; fill in the lattice points along each side
    for (std::size_t i = 0; i < verts.size(); ++i) {
        const auto [x0, y0] = verts[i];
        const auto [x1, y1] = verts[(i + 1) % verts.size()];
        const int g = std::max(1, std::gcd(std::abs(x1 - x0), std::abs(y1 - y0)));
        for (int k = 0; k < g; ++k) pts.push_back(Point::lattice(x0 + k * (x1 - x0) / g, y0 + k * (y1 - y0) / g));
    }
    return BoundaryCondition::make(std::make_shared<const Region>(Region::build(pts)), std::move(extra));
}

// 2x1 strip with the long edge (0,0)-(2,1), the running example.
inline Triangulation strip_example() {
    auto bc = rect(2, 1);
    std::vector<Edge> es = bc->edges();
    es.push_back(Edge::lattice(0, 0, 2, 1));
    es.push_back(Edge::lattice(0, 0, 1, 1));
    es.push_back(Edge::lattice(1, 0, 2, 1));
    return Triangulation::from_edges(bc, es);
}

// State after `steps` heat-bath steps from the ground state.
inline Triangulation chain_state(const BoundaryPtr& bc, double lambda, std::uint64_t seed, std::uint64_t steps) {
    Chain c(GroundState(bc).triangulation(), lambda, seed);
    c.run(steps);
    return c.state();
}

// A few non-boundary edges of a random state, usable as constraints.
inline std::vector<Edge> random_constraints(const BoundaryPtr& free_bc, Rng& rng, int count) {
    const Triangulation s = chain_state(free_bc, 0.9, rng.next(), 40 * std::uint64_t(free_bc->region().midpoint_count()));
    std::vector<Edge> pool;
    for (int x = 0; x < s.size(); ++x) {
        if (!free_bc->is_constraint_midpoint(x)) pool.push_back(s.edge(x));
    }
    std::vector<Edge> out;
    for (int i = 0; i < count && !pool.empty(); ++i) {
        const std::size_t k = rng.below(pool.size());
        out.push_back(pool[k]);
        pool.erase(pool.begin() + long(k));
    }
    return out;
}

inline std::vector<Triangulation> all_states(const BoundaryPtr& bc) {
    const EnumeratedSpace sp = enumerate(bc);
    std::vector<Triangulation> out;
    for (int i = 0; i < sp.size(); ++i) out.push_back(sp.triangulation(i));
    return out;
}

inline Edge random_ground_edge(const GroundState& gs, Rng& rng) {
    const int x = int(rng.below(std::uint64_t(gs.boundary().region().midpoint_count())));
    const auto& ge = gs.ground_edges(x);
    return ge[rng.below(ge.size())];
}

}  // namespace testing_support
