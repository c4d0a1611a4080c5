#include "lattri/influence.hpp"

#include "lattri/error.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace lattri {

std::vector<int> InfluenceTree::leaves(int side) const {
    std::vector<int> out;
    for (const TreeNode& n : nodes) {
        if (n.side == side && n.children.empty()) out.push_back(n.midpoint);
    }
    return out;
}

std::vector<int> InfluenceTree::triangles() const {
    std::vector<int> out;
    for (int t : root_tris) {
        if (t >= 0) out.push_back(t);
    }
    for (std::size_t i = 1; i < nodes.size(); ++i) {
        if (nodes[i].expand_tri >= 0) out.push_back(nodes[i].expand_tri);
    }
    std::sort(out.begin(), out.end());
    return out;
}

bool InfluenceTree::contains(int midpoint) const {
    return std::any_of(nodes.begin(), nodes.end(), [midpoint](const TreeNode& n) { return n.midpoint == midpoint; });
}

namespace {

int other_triangle(const Triangulation& s, int x, int tri) {
    const auto& inc = s.incident(x);
    return inc[0] == tri ? inc[1] : inc[0];
}

} // namespace

InfluenceTree build_influence_tree(const Triangulation& s, int x) {
    const EdgeClass c = s.classify(x);
    if (c != EdgeClass::Decreasing && c != EdgeClass::UnitDiagTop) {
        fail(ErrorCode::NotARoot, "edge " + to_string(s.edge(x)) + " is " + edge_class_name(c) + ", not a tree root");
    }
    InfluenceTree t;
    t.root = x;
    t.nodes.push_back(TreeNode{x, -1, 0, -1, {}});

    // (node, triangle it was reached through)
    std::deque<std::pair<int, int>> queue;
    auto expand = [&](int node, int tri, int side) {
        t.nodes[std::size_t(node)].expand_tri = node == 0 ? -1 : tri;
        for (int m : s.triangles()[std::size_t(tri)].sides) {
            if (m == t.nodes[std::size_t(node)].midpoint) continue;
            const int id = int(t.nodes.size());
            t.nodes.push_back(TreeNode{m, node, side, -1, {}});
            t.nodes[std::size_t(node)].children.push_back(id);
            queue.emplace_back(id, tri);
        }
    };
    const auto& inc = s.incident(x);
    for (int side = 1; side <= 2; ++side) {
        const int tri = inc[std::size_t(side - 1)];
        if (tri < 0) continue;
        t.root_tris[std::size_t(side - 1)] = tri;
        expand(0, tri, side);
    }
    while (!queue.empty()) {
        const auto [node, via] = queue.front();
        queue.pop_front();
        const int y = t.nodes[std::size_t(node)].midpoint;
        const int far = other_triangle(s, y, via);
        if (far >= 0 && s.largest_in(y, far)) expand(node, far, t.nodes[std::size_t(node)].side);
    }
    return t;
}

std::optional<std::string> verify_tree(const Triangulation& s, const InfluenceTree& t) {
    std::set<int> seen;
    for (const TreeNode& n : t.nodes) {
        if (!seen.insert(n.midpoint).second) {
            return "midpoint " + to_string(s.region().midpoints()[std::size_t(n.midpoint)]) + " reached twice";
        }
    }
    std::vector<std::vector<UnitSquare>> squares(t.nodes.size());
    for (std::size_t i = 0; i < t.nodes.size(); ++i) squares[i] = squares_crossed(s.edge(t.nodes[i].midpoint));
    for (std::size_t i = 1; i < t.nodes.size(); ++i) {
        const TreeNode& n = t.nodes[i];
        const TreeNode& p = t.nodes[std::size_t(n.parent)];
        if (s.length(n.midpoint) >= s.length(p.midpoint)) return std::string("child edge not shorter than parent");
        const auto& sc = squares[i];
        const auto& sp = squares[std::size_t(n.parent)];
        if (!std::includes(sp.begin(), sp.end(), sc.begin(), sc.end())) {
            return "squares of " + to_string(s.edge(n.midpoint)) + " not nested in those of " +
                   to_string(s.edge(p.midpoint));
        }
        if (!sp.empty() && sc.size() >= sp.size()) return std::string("square nesting not strict");
    }
    for (int side = 1; side <= 2; ++side) {
        if (t.root_tris[std::size_t(side - 1)] < 0) continue;
        int sum = 0;
        for (int m : t.leaves(side)) sum += s.length(m);
        if (sum != s.length(t.root)) {
            return "side " + std::to_string(side) + " leaf lengths sum to " + std::to_string(sum) + ", root has " +
                   std::to_string(s.length(t.root));
        }
    }
    return std::nullopt;
}

std::vector<int> tree_roots(const Triangulation& s, int x) {
    if (s.largest_in_all(x)) return {x};
    std::vector<int> roots;
    for (int tri : s.incident(x)) {
        if (tri < 0 || s.largest_in(x, tri)) continue;
        int via = tri;
        int z = s.largest_side(tri);
        for (;;) {
            const int far = other_triangle(s, z, via);
            if (far < 0 || s.largest_in(z, far)) break;
            via = far;
            z = s.largest_side(far);
        }
        roots.push_back(z);
    }
    std::sort(roots.begin(), roots.end());
    roots.erase(std::unique(roots.begin(), roots.end()), roots.end());
    return roots;
}

Partition partition_by_roots(const Triangulation& s) {
    Partition p;
    p.owner.assign(s.triangles().size(), -1);
    for (std::size_t tri = 0; tri < s.triangles().size(); ++tri) {
        const std::vector<int> r = tree_roots(s, s.largest_side(int(tri)));
        LATTRI_ENSURE(r.size() == 1, "longest side of a triangle belongs to more than one tree");
        p.owner[tri] = r.front();
        p.half_area[r.front()] += 1;
    }
    return p;
}

bool smallest_edge_hierarchy_holds(const Triangulation& s, const InfluenceTree& t) {
    auto tri_of = [&t](int node) {
        const TreeNode& n = t.nodes[std::size_t(node)];
        return node == 0 ? -1 : n.expand_tri;
    };
    for (std::size_t i = 1; i < t.nodes.size(); ++i) {
        const int tri = tri_of(int(i));
        if (tri < 0) continue;
        const int small = s.smallest_side_length(tri);
        for (int a = t.nodes[i].parent; a >= 0; a = t.nodes[std::size_t(a)].parent) {
            const int atri = a == 0 ? t.root_tris[std::size_t(t.nodes[i].side - 1)] : tri_of(a);
            if (s.smallest_side_length(atri) < small) return false;
        }
    }
    return true;
}

} // namespace lattri
