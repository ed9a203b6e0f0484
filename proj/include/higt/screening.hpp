#pragma once
#include <algorithm>
#include <cmath>
#include <set>
#include <utility>
#include <vector>
#include <higt/core.hpp>
#include <higt/tree.hpp>

namespace higt {

/// C = Y X^T, the K x J matrix of output/input inner products.
inline mat_t precompute_correlation(const Dataset& ds)
{
    if (ds.X.cols() != ds.Y.cols()) throw DimensionMismatch("X and Y sample counts differ");
    return ds.Y * ds.X.transpose();
}

/// |c - lambda1 * s| minimized over s in [-1, 1].
inline double soft_residual(double c, double lambda1)
{
    return std::max(std::abs(c) - lambda1, 0.0);
}

struct RuleEvaluation
{
    double lhs = 0;
    double rhs = 0;
    bool screened = true;
};

namespace detail {

/// L and R of a single (h_o, g_m) block.
inline RuleEvaluation block_terms(
    std::size_t o, std::size_t m, const mat_t& C, const GroupStructure& gs, const RegParams& rp)
{
    const auto& h = gs.output_groups[o];
    const auto& g = gs.input_groups[m];
    // L is the Frobenius norm of the soft-thresholded block: the zero-block
    // optimality condition at B = 0 bounds the squared residuals.
    double sq = 0;
    for (auto j : g) {
        for (auto k : h) {
            const double r = soft_residual(C(k, j), rp.lambda1 * gs.element_weight(k, j));
            sq += r * r;
        }
    }
    RuleEvaluation ev;
    ev.lhs = std::sqrt(sq);
    ev.rhs = std::abs(
        rp.lambda2 * gs.input_weights[m] * std::sqrt(static_cast<double>(h.size()))
        - rp.lambda3 * gs.output_weights[o] * std::sqrt(static_cast<double>(g.size())));
    ev.screened = ev.lhs <= ev.rhs;
    return ev;
}

} // namespace detail

/// Zero test for a single block B(h_o, g_m).
inline RuleEvaluation leaf_rule(const BlockNode& node, const mat_t& C, const GroupStructure& gs, const RegParams& rp)
{
    if (node.kind != NodeKind::leaf) throw NotLeaf("leaf_rule called on a non-leaf node");
    return detail::block_terms(node.output_group_ids.front(), node.input_group_ids.front(), C, gs, rp);
}

/// Multi-block zero test: sum of the node's leaf L's against the sum of their R's.
inline RuleEvaluation block_rule(const BlockNode& node, const mat_t& C, const GroupStructure& gs, const RegParams& rp)
{
    if (node.kind != NodeKind::internal) throw NotInternal("block_rule called on a non-internal node");
    RuleEvaluation ev;
    for (auto [o, m] : block_pairs(node)) {
        const auto t = detail::block_terms(o, m, C, gs, rp);
        ev.lhs += t.lhs;
        ev.rhs += t.rhs;
    }
    ev.screened = ev.lhs <= ev.rhs;
    return ev;
}

struct ScreenStats
{
    std::size_t nodes_visited = 0;
    std::size_t nodes_skipped = 0;
    std::size_t internal_evaluated = 0;
    std::size_t internal_screened = 0;
    std::size_t leaves_evaluated = 0;
    std::size_t leaves_screened = 0;
    std::size_t uncovered_kept = 0;
};

/**
 * Coefficients that were not certified zero, together with the
 * (output group, input group) blocks that failed their leaf test.
 */
struct SurvivorSet
{
    mask_t coefficients;
    std::vector<std::pair<std::size_t, std::size_t>> blocks;
    std::vector<std::size_t> input_group_ids;
    std::vector<std::size_t> output_group_ids;
    ScreenStats stats;

    /// No screening: every coefficient and every block survives.
    static SurvivorSet all(const GroupStructure& gs, index_t K, index_t J)
    {
        SurvivorSet s;
        s.coefficients = mask_t::Constant(K, J, true);
        for (std::size_t m = 0; m < gs.n_input_groups(); ++m) {
            for (std::size_t o = 0; o < gs.n_output_groups(); ++o) s.blocks.emplace_back(o, m);
            s.input_group_ids.push_back(m);
        }
        for (std::size_t o = 0; o < gs.n_output_groups(); ++o) s.output_group_ids.push_back(o);
        return s;
    }

    std::size_t coefficient_count() const { return static_cast<std::size_t>(coefficients.count()); }
    bool empty() const { return coefficient_count() == 0; }

    /**
     * Number of penalty groups inside the surviving blocks: row groups
     * (k, g_m) for k in h_o plus column groups (j, h_o) for j in g_m.
     */
    std::size_t penalty_group_count(const GroupStructure& gs) const
    {
        std::set<std::pair<index_t, std::size_t>> rows, cols;
        for (auto [o, m] : blocks) {
            for (auto k : gs.output_groups[o]) rows.emplace(k, m);
            for (auto j : gs.input_groups[m]) cols.emplace(j, o);
        }
        return rows.size() + cols.size();
    }
};

/// Optional instrumentation of a screen() pass.
struct ScreenTrace
{
    std::vector<NodeId> evaluated;
    std::vector<RuleEvaluation> evaluations;
};

/**
 * Depth-first screening pass. The dummy root is always descended; a screened
 * internal node skips its whole subtree; a failed leaf adds its block to the
 * survivor set. Internal-node failure adds nothing and only causes descent.
 *
 * Coefficients outside every leaf block are governed by the l1 term alone and
 * survive iff their soft residual is positive.
 */
inline SurvivorSet screen(
    const ScreeningTree& tree,
    const mat_t& C,
    const GroupStructure& gs,
    const RegParams& rp,
    ScreenTrace* trace = nullptr)
{
    const index_t K = C.rows();
    const index_t J = C.cols();
    gs.validate(K, J);

    SurvivorSet out;
    out.coefficients = mask_t::Constant(K, J, false);
    auto& st = out.stats;

    const auto seq = dfs_sequence(tree);
    std::size_t t = 0;
    while (t < seq.order.size()) {
        const NodeId id = seq.order[t];
        const auto& n = tree.node(id);
        ++st.nodes_visited;
        if (n.kind == NodeKind::dummy_root) {
            ++t;
            continue;
        }

        RuleEvaluation ev;
        if (n.kind == NodeKind::internal) {
            ev = block_rule(n, C, gs, rp);
            ++st.internal_evaluated;
            st.internal_screened += ev.screened;
        } else {
            ev = leaf_rule(n, C, gs, rp);
            ++st.leaves_evaluated;
            st.leaves_screened += ev.screened;
        }
        if (trace) {
            trace->evaluated.push_back(id);
            trace->evaluations.push_back(ev);
        }

        if (ev.screened) {
            st.nodes_skipped += seq.skip[t] - t - 1;
            t = seq.skip[t];
            continue;
        }
        if (n.kind == NodeKind::leaf) {
            const auto o = n.output_group_ids.front();
            const auto m = n.input_group_ids.front();
            out.blocks.emplace_back(o, m);
            for (auto j : gs.input_groups[m]) {
                for (auto k : gs.output_groups[o]) out.coefficients(k, j) = true;
            }
        }
        ++t;
    }

    std::set<std::size_t> in_ids, out_ids;
    for (auto [o, m] : out.blocks) {
        in_ids.insert(m);
        out_ids.insert(o);
    }
    out.input_group_ids.assign(in_ids.begin(), in_ids.end());
    out.output_group_ids.assign(out_ids.begin(), out_ids.end());

    std::vector<bool> row_covered(K, false), col_covered(J, false);
    for (const auto& h : gs.output_groups) for (auto k : h) row_covered[k] = true;
    for (const auto& g : gs.input_groups) for (auto j : g) col_covered[j] = true;
    for (index_t j = 0; j < J; ++j) {
        for (index_t k = 0; k < K; ++k) {
            if (row_covered[k] && col_covered[j]) continue;
            if (soft_residual(C(k, j), rp.lambda1 * gs.element_weight(k, j)) > 0) {
                out.coefficients(k, j) = true;
                ++st.uncovered_kept;
            }
        }
    }
    return out;
}

} // namespace higt
