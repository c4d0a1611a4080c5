#pragma once

#include "lattri/triangulation.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lattri {

struct TreeNode {
    int midpoint = -1;
    int parent = -1;       // node index, -1 for the root
    int side = 0;          // 0 for the root, else 1 or 2
    int expand_tri = -1;   // triangle this node expands into, -1 for a leaf
    std::vector<int> children;  // node indices
};

/// Tree of influence rooted at a decreasing or top unit-diagonal midpoint.
/// The root expands into each of its triangles (sides 1 and 2); every other
/// node expands into its far triangle when it is the longest edge there.
struct InfluenceTree {
    int root = -1;
    std::vector<TreeNode> nodes;  // nodes[0] is the root
    std::array<int, 2> root_tris{-1, -1};

    std::vector<int> leaves(int side) const;
    /// Triangles expanded anywhere in the tree.
    std::vector<int> triangles() const;
    bool contains(int midpoint) const;
};

/// Throws NotARoot unless edge x is decreasing or a top unit diagonal.
InfluenceTree build_influence_tree(const Triangulation& s, int x);

/// Checks acyclicity, strictly shorter children, per-side leaf sums and
/// square-set nesting. nullopt when all hold.
std::optional<std::string> verify_tree(const Triangulation& s, const InfluenceTree& t);

/// Roots of all trees containing x, by the climbing walk. Sorted, size 1 or 2.
std::vector<int> tree_roots(const Triangulation& s, int x);

/// Triangle slot -> root that owns it, and root -> owned area (in units of
/// half a unit square).
struct Partition {
    std::vector<int> owner;
    std::map<int, int> half_area;
};
Partition partition_by_roots(const Triangulation& s);

/// For every pair of expanded triangles where one's longest side is an
/// ancestor of the other's, the ancestor's shortest side is not shorter.
bool smallest_edge_hierarchy_holds(const Triangulation& s, const InfluenceTree& t);

} // namespace lattri
