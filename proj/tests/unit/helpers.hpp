#pragma once
#include <higt/higt.hpp>

namespace testutil {

using namespace higt;

inline mat_t normal_matrix(index_t r, index_t c, RandomStream& rng)
{
    mat_t M(r, c);
    for (index_t i = 0; i < M.size(); ++i) M.data()[i] = rng.normal();
    return M;
}

/// Standardized data from a sparse planted B plus unit noise.
inline Dataset random_dataset(index_t K, index_t J, index_t N, std::uint64_t seed)
{
    RandomStream rng(seed, 7);
    mat_t X = normal_matrix(J, N, rng);
    mat_t B = mat_t::Zero(K, J);
    for (index_t k = 0; k < K; ++k) {
        B(k, rng.uniform_int(0, J - 1)) = 1 + 2 * rng.uniform();
    }
    mat_t Y = B * X + normal_matrix(K, N, rng);
    return standardize(Dataset(std::move(X), std::move(Y)));
}

/// Overlapping chained groups covering every index.
inline GroupStructure random_groups(index_t K, index_t J, std::uint64_t seed)
{
    RandomStream rng(seed, 8);
    const index_t in_hi = std::max<index_t>(2, J / 2);
    auto inputs = chained_groups(J, {2, in_hi}, {1, 1}, rng);
    std::vector<IndexGroup> outputs;
    if (K == 1) {
        outputs = {{0}};
    } else {
        outputs = chained_groups(K, {2, std::max<index_t>(2, K)}, {1, 1}, rng);
    }
    return GroupStructure(std::move(inputs), std::move(outputs));
}

inline bool monotone(const std::vector<double>& trace, double tol = 1e-12)
{
    for (std::size_t i = 1; i < trace.size(); ++i) {
        if (trace[i] > trace[i - 1] + tol * std::max(1.0, std::abs(trace[i - 1]))) return false;
    }
    return true;
}

} // namespace testutil
