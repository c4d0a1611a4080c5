#include "doctest.h"
#include "support.hpp"

#include "lattri/dynamics.hpp"
#include "lattri/enumeration.hpp"

#include <cmath>
#include <set>

using namespace lattri;
using testing_support::rect;
using testing_support::strip_example;

namespace {

Edge E(int a, int b, int c, int d) { return Edge::lattice(a, b, c, d); }

int mid(const Triangulation& s, Point p) { return s.region().midpoint_index(p); }

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("rng") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
    Rng r(1);
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 70000; ++i) {
        const auto v = r.below(7);
        REQUIRE(v < 7);
        ++counts[v];
    }
    // each bucket within 5 sigma of 10000
    for (int c : counts) CHECK(std::abs(c - 10000) < 5 * std::sqrt(10000.0 * 6 / 7));
    for (int i = 0; i < 1000; ++i) {
        const double u = r.unit();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    std::set<std::uint64_t> seeds;
    for (std::uint64_t i = 0; i < 1000; ++i) seeds.insert(derive_seed(7, i));
    CHECK(seeds.size() == 1000);
    CHECK(derive_seed(7, 0) != derive_seed(8, 0));
    CHECK(derive_seed(7, 3) == derive_seed(7, 3));
}

TEST_CASE("heat bath rule") {
    // unit diagonal: probability 1/2 either way
    Triangulation sq = GroundState(rect(1, 1)).triangulation();
    const int d = mid(sq, Point{1, 1});
    const Edge lo = sq.edge(d);  // canonical, the smaller one
    StepOutcome o = heat_bath_update(sq, d, 0.49, 0.3);
    CHECK(o.action == StepAction::HeldByCoin);
    CHECK(sq.edge(d) == lo);
    o = heat_bath_update(sq, d, 0.51, 0.3);
    CHECK(o.action == StepAction::Flipped);
    CHECK(sq.edge(d) != lo);
    o = heat_bath_update(sq, d, 0.2, 0.3);
    CHECK(o.action == StepAction::Flipped);
    CHECK(sq.edge(d) == lo);

    // decreasing with psi = 1 at lambda 0.5: flips with probability 0.8
    Triangulation s = strip_example();
    const int x = mid(s, Point{2, 1});
    Triangulation t = s;
    o = heat_bath_update(t, x, 0.79, 0.5);
    CHECK(o.action == StepAction::Flipped);
    CHECK(o.old_len == 3);
    CHECK(o.new_len == 1);
    CHECK(t.edge(x) == E(1, 0, 1, 1));
    t = s;
    o = heat_bath_update(t, x, 0.81, 0.5);
    CHECK(o.action == StepAction::HeldByCoin);
    CHECK(t == s);

    // constraints and unflippable edges never move
    const int b = mid(s, Point{1, 0});
    o = heat_bath_update(s, b, 0.0, 0.5);
    CHECK(o.action == StepAction::HeldConstraint);
    o = heat_bath_update(s, mid(s, Point{1, 1}), 0.0, 0.5);
    CHECK(o.action == StepAction::HeldUnflippable);
    CHECK(s == strip_example());
}

TEST_CASE("chains are deterministic") {
    auto bc = rect(4, 4);
    const Triangulation g = GroundState(bc).triangulation();
    Chain a(g, 0.7, 99), b(g, 0.7, 99), c(g, 0.7, 100);
    a.run(0);
    CHECK(a.state() == g);
    CHECK(a.step_count() == 0);
    const auto sa = a.run(20000);
    b.run(20000);
    c.run(20000);
    CHECK(a.state() == b.state());
    CHECK_FALSE(a.state() == c.state());
    CHECK(sa.steps == 20000);
    CHECK(sa.flips + sa.held_coin + sa.held_constraint + sa.held_unflippable == sa.steps);
    CHECK_FALSE(a.state().validate().has_value());

    // observers fire on schedule
    Chain d(g, 0.7, 1);
    int calls = 0;
    d.run(1000, {{100, [&](const Chain& ch, const StepOutcome&) {
                      ++calls;
                      CHECK(ch.step_count() % 100 == 0);
                  }}});
    CHECK(calls == 10);

    // restoring step count and engine continues the same trajectory
    Chain e(g, 0.7, 5);
    e.run(500);
    Chain f(e.state(), 0.7, 5);
    f.restore(e.step_count(), e.rng().engine());
    e.run(500);
    f.run(500);
    CHECK(e.state() == f.state());
}

TEST_CASE("chain rejects bad lambda") {
    const Triangulation g = GroundState(rect(2, 2)).triangulation();
    try {
        Chain c(g, 0.0, 1);
        FAIL("expected InvalidLambda");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidLambda);
    }
    Chain ok(g, 1.0, 1);  // uniform chain allowed
    ok.run(100);
}

TEST_CASE("coupled steps") {
    auto bc = rect(5, 2);
    const Triangulation g = GroundState(bc).triangulation();
    Chain a(g, 0.6, 3), b(g, 0.6, 77);
    for (int i = 0; i < 5000; ++i) coupled_step(a, b);
    CHECK(a.state() == b.state());

    Chain c(GroundState(rect(3, 3)).triangulation(), 0.6, 1);
    try {
        coupled_step(a, c);
        FAIL("expected MidpointSetMismatch");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MidpointSetMismatch);
    }
    Chain d(g, 0.5, 1);
    try {
        coupled_step(a, d);
        FAIL("expected InvalidArgument");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidArgument);
    }
}

TEST_CASE("coupling keeps the marginal law of each chain") {
    // chain b has a constraint, chain a drives the randomness; b's mean total
    // length must match its exact stationary mean
    auto free_bc = rect(2, 2);
    auto wall = rect(2, 2, {E(0, 0, 1, 2)});
    const Rational lam = parse_rational("4/5");
    const EnumeratedSpace sp = enumerate(wall);
    const ExactMeasure mu = exact_measure(sp, lam);
    double exact_mean = 0.0;
    for (int i = 0; i < sp.size(); ++i) exact_mean += mu.prob[std::size_t(i)].convert_to<double>() * double(sp.total_length(i));

    const int batches = 40;
    std::vector<double> means;
    Chain a(GroundState(free_bc).triangulation(), 0.8, 11), b(GroundState(wall).triangulation(), 0.8, 12);
    for (int i = 0; i < 2000; ++i) coupled_step(a, b);
    for (int k = 0; k < batches; ++k) {
        double s = 0.0;
        for (int i = 0; i < 5000; ++i) {
            coupled_step(a, b);
            s += double(b.state().total_length());
        }
        means.push_back(s / 5000);
    }
    const Estimate est = replica_estimate(means);
    CHECK(std::abs(est.mean - exact_mean) <= 3.0 * est.se + 1e-9);
}

TEST_CASE("hitting time") {
    auto bc = rect(4, 4);
    GroundState gs(bc);
    const Edge g = gs.canonical_edge(bc->region().midpoint_index(Point{3, 3}));
    Chain c(gs.triangulation(), 0.5, 1);
    const auto t = hitting_time(c, gs, g, std::pow(0.5, -0.25), 5.0, 1000);
    REQUIRE(t.has_value());
    CHECK(*t == 0);

    Rng rng(2);
    Chain d(forced_crossing_state(gs, g, rng), 0.5, 2);
    const auto u = hitting_time(d, gs, g, std::pow(0.5, -0.25), 1.0, 1'000'000);
    REQUIRE(u.has_value());
    CHECK(*u > 0);
}

TEST_CASE("supercritical runs grow longer") {
    auto bc = rect(10, 10);
    const Triangulation g = GroundState(bc).triangulation();
    Chain sub(g, 0.9, 1), sup(g, 1.1, 1);
    sub.run(200000);
    sup.run(200000);
    CHECK(sup.state().total_length() > sub.state().total_length());
}

TEST_CASE("parallel map") {
    const auto v = parallel_map<int>(100, [](std::size_t i) { return int(i * i); }, 4);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(v[i] == int(i * i));
    CHECK_THROWS_AS(parallel_map<int>(
                        10,
                        [](std::size_t i) -> int {
                            if (i == 7) fail(ErrorCode::Internal, "boom");
                            return 0;
                        },
                        3),
                    Error);
}

}
