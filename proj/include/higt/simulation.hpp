#pragma once
#include <cstdint>
#include <set>
#include <utility>
#include <vector>
#include <higt/core.hpp>
#include <higt/rng.hpp>

namespace higt {

struct IntRange
{
    std::int64_t lo = 0;
    std::int64_t hi = 0;
};

struct SimConfig
{
    index_t N = 200;
    index_t J = 500;
    index_t K = 5;
    IntRange input_group_size{5, 10};
    IntRange input_overlap{1, 4};
    IntRange output_group_size{3, 5};
    IntRange output_overlap{1, 2};
    std::size_t nonzero_count = 52;
    double nonzero_value = 3;
    double noise_sd = 1;
    std::uint64_t seed = 1;

    void validate() const
    {
        if (N <= 1 || J <= 0 || K <= 0) throw InfeasibleConfig("N must be > 1 and J, K positive");
        auto check = [](IntRange size, IntRange overlap, const char* what) {
            if (size.lo < 1 || size.hi < size.lo || overlap.lo < 0 || overlap.hi < overlap.lo) {
                throw InfeasibleConfig(std::string("bad ") + what + " group ranges");
            }
            if (overlap.hi >= size.lo) {
                throw InfeasibleConfig(std::string(what) + " overlap must stay below the minimum group size");
            }
        };
        check(input_group_size, input_overlap, "input");
        check(output_group_size, output_overlap, "output");
        if (nonzero_count > static_cast<std::size_t>(K * J)) {
            throw InfeasibleConfig("nonzero_count exceeds K * J");
        }
        if (!(noise_sd >= 0)) throw InfeasibleConfig("noise_sd must be nonnegative");
    }
};

struct SimInstance
{
    Dataset dataset;          // standardized
    Dataset raw;              // Y = b_true * X + E before standardization
    mat_t noise;
    StandardizationFactors factors;
    GroupStructure groups;
    CoefficientMatrix b_true;
    std::uint64_t seed = 0;
};

namespace sim_stream {
inline constexpr std::uint64_t inputs = 1;
inline constexpr std::uint64_t noise = 2;
inline constexpr std::uint64_t groups = 3;
inline constexpr std::uint64_t support = 4;
} // namespace sim_stream

/**
 * Consecutive groups over {0..n-1}: sizes drawn per group from `size`, each
 * group sharing `overlap` trailing indices with its predecessor. The last
 * group is truncated at n; the union is always {0..n-1}.
 */
inline std::vector<IndexGroup> chained_groups(index_t n, IntRange size, IntRange overlap, RandomStream& rng)
{
    std::vector<IndexGroup> groups;
    index_t start = 0;
    while (true) {
        const index_t len = rng.uniform_int(size.lo, size.hi);
        const index_t end = std::min(n, start + len);
        IndexGroup g;
        for (index_t i = start; i < end; ++i) g.push_back(i);
        groups.push_back(std::move(g));
        if (end >= n) break;
        start = end - rng.uniform_int(overlap.lo, overlap.hi);
    }
    return groups;
}

/**
 * Picks (output group, input group) blocks in random order and fills them
 * row by row (whole row segments B(k, g_m)) until nonzero_count distinct
 * coefficients are planted. Returns (k, j) pairs in planting order.
 */
inline std::vector<std::pair<index_t, index_t>> plant_support(
    const GroupStructure& gs, std::size_t nonzero_count, RandomStream& rng)
{
    std::vector<std::pair<index_t, index_t>> planted;
    if (nonzero_count == 0) return planted;

    std::set<index_t> rows, cols;
    for (const auto& h : gs.output_groups) rows.insert(h.begin(), h.end());
    for (const auto& g : gs.input_groups) cols.insert(g.begin(), g.end());
    if (rows.size() * cols.size() < nonzero_count) {
        throw InfeasibleConfig("groups cover fewer coefficients than nonzero_count");
    }

    std::vector<std::pair<std::size_t, std::size_t>> blocks;
    for (std::size_t o = 0; o < gs.n_output_groups(); ++o) {
        for (std::size_t m = 0; m < gs.n_input_groups(); ++m) blocks.emplace_back(o, m);
    }
    rng.shuffle(blocks);

    std::set<std::pair<index_t, index_t>> seen;
    for (auto [o, m] : blocks) {
        for (auto k : gs.output_groups[o]) {
            for (auto j : gs.input_groups[m]) {
                if (seen.insert({k, j}).second) {
                    planted.emplace_back(k, j);
                    if (planted.size() == nonzero_count) return planted;
                }
            }
        }
    }
    throw InfeasibleConfig("could not plant the requested support");
}

inline SimInstance simulate(const SimConfig& cfg)
{
    cfg.validate();
    RandomStream group_rng(cfg.seed, sim_stream::groups);
    RandomStream x_rng(cfg.seed, sim_stream::inputs);
    RandomStream e_rng(cfg.seed, sim_stream::noise);
    RandomStream support_rng(cfg.seed, sim_stream::support);

    SimInstance inst;
    inst.seed = cfg.seed;
    auto inputs = chained_groups(cfg.J, cfg.input_group_size, cfg.input_overlap, group_rng);
    auto outputs = chained_groups(cfg.K, cfg.output_group_size, cfg.output_overlap, group_rng);
    inst.groups = GroupStructure(std::move(inputs), std::move(outputs));

    inst.b_true = mat_t::Zero(cfg.K, cfg.J);
    for (auto [k, j] : plant_support(inst.groups, cfg.nonzero_count, support_rng)) {
        inst.b_true(k, j) = cfg.nonzero_value;
    }

    mat_t X(cfg.J, cfg.N);
    for (index_t i = 0; i < cfg.N; ++i) {
        for (index_t j = 0; j < cfg.J; ++j) X(j, i) = x_rng.uniform();
    }
    inst.noise.resize(cfg.K, cfg.N);
    for (index_t i = 0; i < cfg.N; ++i) {
        for (index_t k = 0; k < cfg.K; ++k) inst.noise(k, i) = cfg.noise_sd * e_rng.normal();
    }
    mat_t Y = inst.b_true * X + inst.noise;

    inst.raw = Dataset(std::move(X), std::move(Y));
    inst.dataset = standardize(inst.raw, &inst.factors);
    return inst;
}

/// b_true expressed on the standardized scale: diag(1/sd_y) B diag(sd_x).
inline CoefficientMatrix standardized_coefficients(const SimInstance& inst)
{
    return inst.factors.y_scale.cwiseInverse().asDiagonal() * inst.b_true
           * inst.factors.x_scale.asDiagonal();
}

} // namespace higt
