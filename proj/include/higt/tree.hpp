#pragma once
#include <algorithm>
#include <ostream>
#include <vector>
#include <higt/core.hpp>

namespace higt {

enum class NodeKind { dummy_root, internal, leaf };

inline const char* to_string(NodeKind k)
{
    switch (k) {
        case NodeKind::dummy_root: return "root";
        case NodeKind::internal: return "internal";
        case NodeKind::leaf: return "leaf";
    }
    return "?";
}

using NodeId = std::size_t;

/**
 * A zero-pattern candidate.
 * A leaf is the single block B(h_o, g_m); an internal node is the union
 * of all blocks in (its output groups) x (its input groups).
 * Group ids index into GroupStructure::input_groups / output_groups.
 */
struct BlockNode
{
    NodeKind kind = NodeKind::leaf;
    std::vector<std::size_t> input_group_ids;
    std::vector<std::size_t> output_group_ids;
    std::vector<NodeId> children;
};

struct TreeConfig
{
    std::size_t block_inputs = 2;
    std::size_t block_outputs = 2;
};

/// Two-level tree under a dummy root; nodes[root] is the dummy root.
struct ScreeningTree
{
    std::vector<BlockNode> nodes;
    NodeId root = 0;

    const BlockNode& node(NodeId id) const { return nodes.at(id); }
    std::size_t size() const { return nodes.size(); }

    std::size_t count(NodeKind kind) const
    {
        return static_cast<std::size_t>(std::count_if(
            nodes.begin(), nodes.end(), [kind](const BlockNode& n) { return n.kind == kind; }));
    }
};

/**
 * Tiles input groups into consecutive runs of block_inputs and output groups
 * into runs of block_outputs (a trailing run may be shorter). Every
 * (input run, output run) pair becomes an internal node whose leaves are the
 * individual (input group, output group) pairs of the run product.
 *
 * Internal nodes are ordered input-run-major: all output runs of the first
 * input run come first.
 */
inline ScreeningTree build_tree(const GroupStructure& gs, const TreeConfig& cfg = {})
{
    if (gs.input_groups.empty() || gs.output_groups.empty()) {
        throw EmptyGroups("screening tree needs at least one input group and one output group");
    }
    if (cfg.block_inputs == 0 || cfg.block_outputs == 0) {
        throw Error("block sizes must be positive");
    }

    const auto n_in = gs.input_groups.size();
    const auto n_out = gs.output_groups.size();

    ScreeningTree tree;
    tree.nodes.push_back({NodeKind::dummy_root, {}, {}, {}});

    for (std::size_t g0 = 0; g0 < n_in; g0 += cfg.block_inputs) {
        const auto g1 = std::min(n_in, g0 + cfg.block_inputs);
        for (std::size_t h0 = 0; h0 < n_out; h0 += cfg.block_outputs) {
            const auto h1 = std::min(n_out, h0 + cfg.block_outputs);

            BlockNode internal{NodeKind::internal, {}, {}, {}};
            for (auto m = g0; m < g1; ++m) internal.input_group_ids.push_back(m);
            for (auto o = h0; o < h1; ++o) internal.output_group_ids.push_back(o);

            const NodeId internal_id = tree.nodes.size();
            tree.nodes[tree.root].children.push_back(internal_id);
            tree.nodes.push_back(std::move(internal));

            for (auto m = g0; m < g1; ++m) {
                for (auto o = h0; o < h1; ++o) {
                    const NodeId leaf_id = tree.nodes.size();
                    tree.nodes.push_back({NodeKind::leaf, {m}, {o}, {}});
                    tree.nodes[internal_id].children.push_back(leaf_id);
                }
            }
        }
    }
    return tree;
}

inline ScreeningTree build_tree(const GroupStructure& gs, std::size_t block_inputs, std::size_t block_outputs)
{
    return build_tree(gs, TreeConfig{block_inputs, block_outputs});
}

/**
 * Preorder sequence plus, for each position t, the position of the first
 * node after t's subtree (skip[t]). Skipping the descendants of order[t]
 * is `t = skip[t]`.
 */
struct DfsSequence
{
    std::vector<NodeId> order;
    std::vector<std::size_t> skip;
};

inline DfsSequence dfs_sequence(const ScreeningTree& tree)
{
    DfsSequence seq;
    seq.order.reserve(tree.size());
    seq.skip.resize(tree.size());

    // explicit stack of (node, position in order)
    struct Frame { NodeId id; std::size_t pos; std::size_t next_child; };
    std::vector<Frame> stack;
    stack.push_back({tree.root, 0, 0});
    seq.order.push_back(tree.root);
    while (!stack.empty()) {
        auto& top = stack.back();
        const auto& n = tree.nodes[top.id];
        if (top.next_child < n.children.size()) {
            const NodeId c = n.children[top.next_child++];
            stack.push_back({c, seq.order.size(), 0});
            seq.order.push_back(c);
        } else {
            seq.skip[top.pos] = seq.order.size();
            stack.pop_back();
        }
    }
    seq.skip.resize(seq.order.size());
    return seq;
}

inline std::vector<NodeId> dfs_order(const ScreeningTree& tree)
{
    return dfs_sequence(tree).order;
}

/// Every (output group, input group) leaf pair under a node, in row-major leaf order.
inline std::vector<std::pair<std::size_t, std::size_t>> block_pairs(const BlockNode& n)
{
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (auto m : n.input_group_ids) {
        for (auto o : n.output_group_ids) pairs.emplace_back(o, m);
    }
    return pairs;
}

/// K x J mask of the coefficients a node's zero pattern covers.
inline mask_t covered_mask(
    const ScreeningTree& tree, NodeId id, const GroupStructure& gs, index_t K, index_t J)
{
    mask_t mask = mask_t::Constant(K, J, false);
    const auto& n = tree.node(id);
    if (n.kind == NodeKind::dummy_root) {
        for (auto c : n.children) mask = mask || covered_mask(tree, c, gs, K, J);
        return mask;
    }
    for (auto [o, m] : block_pairs(n)) {
        for (auto k : gs.output_groups[o]) {
            for (auto j : gs.input_groups[m]) mask(k, j) = true;
        }
    }
    return mask;
}

/// Indented text rendering: kind, group ids (1-based) and covered-coefficient count.
inline void dump_tree(std::ostream& out, const ScreeningTree& tree, const GroupStructure& gs, index_t K, index_t J)
{
    const auto seq = dfs_sequence(tree);
    std::vector<int> depth(tree.size(), 0);
    for (auto id : seq.order) {
        for (auto c : tree.node(id).children) depth[c] = depth[id] + 1;
    }
    auto ids = [](const std::vector<std::size_t>& v) {
        std::string s = "{";
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i] + 1);
        return s + "}";
    };
    for (auto id : seq.order) {
        const auto& n = tree.node(id);
        out << std::string(2 * depth[id], ' ') << to_string(n.kind);
        if (n.kind != NodeKind::dummy_root) {
            out << " G=" << ids(n.input_group_ids) << " H=" << ids(n.output_group_ids);
        }
        out << " covered=" << covered_mask(tree, id, gs, K, J).count() << '\n';
    }
}

} // namespace higt
