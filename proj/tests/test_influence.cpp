#include "doctest.h"
#include "oracle.hpp"
#include "invariants.hpp"
#include "support.hpp"

#include "lattri/influence.hpp"

#include <algorithm>
#include <set>
#include <string>

using namespace lattri;
using testing_support::rect;
using testing_support::strip_example;

namespace {

Edge E(int a, int b, int c, int d) { return Edge::lattice(a, b, c, d); }

int mid(const Triangulation& s, Point p) { return s.region().midpoint_index(p); }

// States used for the structural sweeps: all of the small spaces and a
// handful of random larger ones.
std::vector<Triangulation> sweep_states() {
    std::vector<Triangulation> out = testing_support::all_states(rect(2, 2));
    for (const auto& s : testing_support::all_states(rect(2, 1))) out.push_back(s);
    for (std::uint64_t seed = 1; seed <= 40; ++seed) out.push_back(testing_support::chain_state(rect(5, 4), 1.0, seed, 4000));
    return out;
}

}  // namespace

TEST_SUITE("influence") {

TEST_CASE("running example tree") {
    const Triangulation s = strip_example();
    const int x = mid(s, Point{2, 1});
    const InfluenceTree t = build_influence_tree(s, x);
    CHECK(t.root == x);
    CHECK(t.nodes.size() == 9);
    CHECK(t.nodes[0].children.size() == 4);
    CHECK(invariants::tree(s, t).empty());
    CHECK_FALSE(verify_tree(s, t).has_value());
    // the two diagonals expand once more into the end triangles
    int expanded_children = 0;
    for (int c : t.nodes[0].children) expanded_children += !t.nodes[std::size_t(c)].children.empty();
    CHECK(expanded_children == 2);
    CHECK(smallest_edge_hierarchy_holds(s, t));
}

TEST_CASE("unit diagonal root") {
    const Triangulation s = GroundState(rect(1, 1)).triangulation();
    const int x = mid(s, Point{1, 1});
    const InfluenceTree t = build_influence_tree(s, x);
    CHECK(t.nodes.size() == 5);
    CHECK(t.leaves(1).size() == 2);
    CHECK(t.leaves(2).size() == 2);
    CHECK(invariants::tree(s, t).empty());
}

TEST_CASE("nested tree on 3x2") {
    auto bc = rect(3, 2);
    auto with = BoundaryCondition::make(bc->region_ptr(),
                                        {E(0, 0, 3, 2), E(0, 0, 1, 1), E(1, 1, 3, 2), E(0, 0, 2, 1), E(2, 1, 3, 2)});
    const Triangulation s = Triangulation::from_edges(bc, GroundState(with).triangulation().edges());
    const int x = mid(s, Point{3, 2});
    const InfluenceTree t = build_influence_tree(s, x);
    bool grandchildren = false;
    for (const TreeNode& n : t.nodes) grandchildren |= n.parent > 0;
    CHECK(grandchildren);
    CHECK(invariants::tree(s, t).empty());
    CHECK(smallest_edge_hierarchy_holds(s, t));
}

TEST_CASE("not a root") {
    const Triangulation s = strip_example();
    try {
        build_influence_tree(s, mid(s, Point{1, 1}));
        FAIL("expected NotARoot");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::NotARoot);
    }
}

TEST_CASE("roots of a midpoint") {
    const Triangulation s = strip_example();
    const int x = mid(s, Point{2, 1});
    CHECK(tree_roots(s, x) == std::vector<int>{x});
    CHECK(tree_roots(s, mid(s, Point{1, 1})) == std::vector<int>{x});
}

TEST_CASE("partition") {
    const Triangulation g = GroundState(rect(3, 3)).triangulation();
    Partition p = partition_by_roots(g);
    CHECK(p.half_area.size() == 9);
    for (const auto& [root, area] : p.half_area) {
        CHECK(area == 2);
        CHECK(g.classify(root) == EdgeClass::UnitDiagTop);
    }

    const Triangulation s = strip_example();
    p = partition_by_roots(s);
    CHECK(p.half_area.size() == 1);
    CHECK(p.half_area.begin()->first == mid(s, Point{2, 1}));
    CHECK(p.half_area.begin()->second == 4);

    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const Triangulation r = testing_support::chain_state(rect(6, 6), 1.0, seed, 8000);
        p = partition_by_roots(r);
        int total = 0;
        for (const auto& kv : p.half_area) total += kv.second;
        CHECK(total == 72);
        for (std::size_t tri = 0; tri < r.triangles().size(); ++tri) {
            const int owner = p.owner[tri];
            REQUIRE(owner >= 0);
            const auto tris = build_influence_tree(r, owner).triangles();
            CHECK(std::find(tris.begin(), tris.end(), int(tri)) != tris.end());
        }
    }
}

TEST_CASE("structural sweep") {
    int trees = 0, roots_two = 0;
    for (const Triangulation& s : sweep_states()) {
        for (int x = 0; x < s.size(); ++x) {
            if (invariants::is_root(s, x)) {
                const InfluenceTree t = build_influence_tree(s, x);
                ++trees;
                const std::string prob = invariants::tree(s, t);
                CHECK_MESSAGE(prob.empty(), prob);
                CHECK(smallest_edge_hierarchy_holds(s, t));
            }
            const auto rs = tree_roots(s, x);
            REQUIRE(rs.size() >= 1);
            REQUIRE(rs.size() <= 2);
            for (int r : rs) {
                CHECK(invariants::is_root(s, r));
                CHECK(build_influence_tree(s, r).contains(x));
            }
            if (s.classify(x) == EdgeClass::Increasing) CHECK(rs.size() == 2);
            bool largest_somewhere = false;
            for (int tri : s.incident(x)) largest_somewhere |= tri >= 0 && s.largest_in(x, tri);
            if (largest_somewhere) CHECK(rs.size() == 1);
            if (rs.size() == 2) {
                ++roots_two;
                for (int r : rs) {
                    const InfluenceTree t = build_influence_tree(s, r);
                    for (const TreeNode& n : t.nodes) {
                        if (n.midpoint == x) CHECK(n.children.empty());
                    }
                }
            }
        }
    }
    CHECK(trees > 100);
    CHECK(roots_two > 0);
}

}
