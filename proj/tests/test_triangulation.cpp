#include "doctest.h"
#include "oracle.hpp"
#include "support.hpp"

#include "lattri/edge_poset.hpp"

#include <map>
#include <queue>
#include <set>

using namespace lattri;
using testing_support::rect;
using testing_support::strip_example;

namespace {

Edge E(int a, int b, int c, int d) { return Edge::lattice(a, b, c, d); }

int mid(const Triangulation& s, Point p) { return s.region().midpoint_index(p); }

}  // namespace

TEST_SUITE("triangulation") {

TEST_CASE("validate") {
    auto bc = rect(1, 1);
    const Triangulation g = GroundState(bc).triangulation();
    CHECK_FALSE(g.validate().has_value());

    std::vector<Edge> es = g.edges();
    es.pop_back();
    CHECK_THROWS_AS(Triangulation::from_edges(bc, es), Error);

    const Triangulation s = strip_example();
    CHECK_FALSE(s.validate().has_value());
    CHECK(s.size() == 9);
    CHECK(s.total_length() == 6 + 3 + 2 + 2);  // six unit sides, the long edge, two diagonals

    // two crossing diagonals
    std::vector<Edge> bad = rect(1, 1)->edges();
    bad.push_back(E(0, 0, 1, 1));
    bad.push_back(E(1, 0, 0, 1));
    CHECK_THROWS_AS(Triangulation::from_edges(bc, bad), Error);
}

TEST_CASE("flippability and the running example") {
    const Triangulation s = strip_example();
    const int x = mid(s, Point{2, 1});
    const int left = mid(s, Point{1, 1});
    CHECK(s.is_flippable(x));
    CHECK_FALSE(s.is_flippable(left));
    for (int y = 0; y < s.size(); ++y) {
        if (s.boundary().is_constraint_midpoint(y)) CHECK_FALSE(s.is_flippable(y));
    }
    CHECK(s.flip_target(x) == E(1, 0, 1, 1));
    CHECK(s.classify(x) == EdgeClass::Decreasing);
    CHECK(s.classify(left) == EdgeClass::Other);
    CHECK(s.psi(x) == 1);

    Triangulation t = s;
    t.flip(x);
    CHECK(t.edge(x) == E(1, 0, 1, 1));
    CHECK(t.length(x) == 1);
    CHECK_FALSE(t.validate().has_value());
    t.flip(x);
    CHECK(t == s);

    try {
        t.flip(left);
        FAIL("expected NotFlippable");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotFlippable);
    }
}

TEST_CASE("unit square") {
    auto bc = rect(1, 1);
    Triangulation s = GroundState(bc).triangulation();
    const int x = mid(s, Point{1, 1});
    CHECK(s.is_flippable(x));
    CHECK(s.classify(x) == EdgeClass::UnitDiagTop);
    CHECK(s.psi(x) == 1);
    const Edge before = s.edge(x);
    s.flip(x);
    CHECK(s.edge(x) != before);
    CHECK(s.length(x) == 2);
}

TEST_CASE("psi with sides 2 and 3 around a length 5 edge") {
    // 3x2 rectangle, edge (0,0)-(3,2) with minimal parallelogram apices (1,1), (2,1)
    auto bc = rect(3, 2);
    const Edge big = E(0, 0, 3, 2);
    auto with = BoundaryCondition::make(bc->region_ptr(), {big, E(0, 0, 1, 1), E(1, 1, 3, 2), E(0, 0, 2, 1), E(2, 1, 3, 2)});
    const Triangulation t = GroundState(with).triangulation();
    // re-read the same edges under the free boundary
    const Triangulation s = Triangulation::from_edges(bc, t.edges());
    const int x = mid(s, big.midpoint());
    CHECK(s.length(x) == 5);
    CHECK(s.is_flippable(x));
    CHECK(s.psi(x) == 2);
    CHECK(s.classify(x) == EdgeClass::Decreasing);
    CHECK(s.flip_target(x) == E(1, 1, 2, 1));
}

TEST_CASE("boundary psi requires decreasing") {
    auto bc = rect(2, 1);
    const Triangulation g = GroundState(bc).triangulation();
    const int b = mid(g, Point{1, 0});
    CHECK(g.boundary().is_constraint_midpoint(b));
    try {
        (void)g.psi(b);
        FAIL("expected UndefinedClass");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UndefinedClass);
    }
}

TEST_CASE("angle bounds") {
    CHECK(oracle::angles_ok(Point::lattice(0, 0), Point::lattice(1, 0), Point::lattice(0, 1)));
    CHECK(GroundState(rect(2, 2)).triangulation().angle_bounds_hold());
    for (std::uint64_t seed = 1; seed <= 30; ++seed) {
        const Triangulation s = testing_support::chain_state(rect(4, 4), 1.0, seed, 3000);
        CHECK(s.angle_bounds_hold());
        for (const Triangle& tr : s.triangles()) CHECK(oracle::angles_ok(tr.verts[0], tr.verts[1], tr.verts[2]));
    }
}

TEST_CASE("every state of 2x2: involution, length change, classes") {
    const auto states = testing_support::all_states(rect(2, 2));
    CHECK(states.size() > 1);
    for (const Triangulation& s : states) {
        for (int x = 0; x < s.size(); ++x) {
            if (!s.is_flippable(x)) continue;
            const Triangulation t = s.flipped(x);
            CHECK_FALSE(t.validate().has_value());
            CHECK(t.flipped(x) == s);
            const int d = t.length(x) - s.length(x);
            if (s.classify(x) != EdgeClass::UnitDiagTop) CHECK(std::abs(d) == 2 * s.psi(x));
            switch (s.classify(x)) {
            case EdgeClass::Increasing: CHECK(d > 0); break;
            case EdgeClass::Decreasing: CHECK(d < 0); break;
            case EdgeClass::UnitDiagTop: CHECK(d == 0); break;
            case EdgeClass::Other: CHECK(d != 0); break;
            }
        }
    }
}

TEST_CASE("flip graph of 2x2 is connected") {
    auto bc = rect(2, 2);
    const EnumeratedSpace sp = enumerate(bc);
    std::vector<char> seen(std::size_t(sp.size()), 0);
    std::queue<int> q;
    q.push(0);
    seen[0] = 1;
    int reached = 1;
    while (!q.empty()) {
        const Triangulation s = sp.triangulation(q.front());
        q.pop();
        for (int x = 0; x < s.size(); ++x) {
            if (!s.is_flippable(x)) continue;
            const int j = sp.index_of(s.flipped(x));
            REQUIRE(j >= 0);
            if (!seen[std::size_t(j)]) {
                seen[std::size_t(j)] = 1;
                ++reached;
                q.push(j);
            }
        }
    }
    CHECK(reached == sp.size());
}

TEST_CASE("incidence caches stay in sync under flips") {
    Triangulation s = GroundState(rect(4, 3)).triangulation();
    Rng rng(7);
    for (int i = 0; i < 2000; ++i) {
        const int x = int(rng.below(std::uint64_t(s.size())));
        if (s.is_flippable(x)) s.flip(x);
    }
    CHECK_FALSE(s.validate().has_value());
    std::int64_t twice_area = 0;
    for (const Triangle& t : s.triangles()) twice_area += std::llabs(oracle::cross(t.verts[0], t.verts[1], t.verts[2])) / 4;
    CHECK(twice_area == s.region().twice_area());
    for (int x = 0; x < s.size(); ++x) {
        const auto& inc = s.incident(x);
        CHECK(inc[0] >= 0);
        CHECK((inc[1] < 0) == (s.region().locate(s.edge(x).midpoint()) == Region::Location::Boundary));
    }
}

}
