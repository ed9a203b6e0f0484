#include <gtest/gtest.h>
#include "helpers.hpp"
#include "oracle/dual_oracle.hpp"

using namespace higt;
using testutil::normal_matrix;

namespace {

double prox_objective(const mat_t& Z, const mat_t& V, double step, const GroupStructure& gs, const RegParams& rp)
{
    return 0.5 * (Z - V).squaredNorm() + step * penalty(Z, gs, rp);
}

ProxConfig tight()
{
    return {100000, 1e-14};
}

} // namespace

TEST(Prox, ZeroInputGivesZero)
{
    const auto gs = testutil::random_groups(3, 8, 1);
    const mat_t Z = prox_penalty(mat_t::Zero(3, 8), 0.7, gs, RegParams::uniform(1));
    EXPECT_EQ(Z.cwiseAbs().maxCoeff(), 0);
}

TEST(Prox, NoPenaltyIsIdentity)
{
    RandomStream rng(2, 1);
    const mat_t V = normal_matrix(3, 8, rng);
    const auto gs = testutil::random_groups(3, 8, 2);
    EXPECT_EQ(prox_penalty(V, 1.3, gs, RegParams{}), V);
}

TEST(Prox, RejectsNonPositiveStep)
{
    GroupStructure gs({{0}}, {{0}});
    EXPECT_THROW(prox_penalty(mat_t::Zero(1, 1), 0, gs, RegParams{}), Error);
}

TEST(Prox, SingleGroupClosedForm)
{
    for (std::uint64_t s = 1; s <= 20; ++s) {
        RandomStream rng(s, 3);
        const mat_t V = normal_matrix(1, 6, rng) * 2;
        GroupStructure gs({{0, 1, 2, 3, 4, 5}}, {{0}});
        const double step = 0.5 + rng.uniform(), l2 = 3 * rng.uniform();
        const mat_t Z = prox_penalty(V, step, gs, RegParams(0, l2, 0));
        const mat_t expected = std::max(1 - step * l2 / V.norm(), 0.0) * V;
        EXPECT_LE((Z - expected).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(Prox, DisjointGroupsWithL1ClosedForm)
{
    // soft-threshold, then group shrinkage of each row segment
    for (std::uint64_t s = 1; s <= 20; ++s) {
        RandomStream rng(s, 4);
        const index_t K = 3, J = 9;
        const mat_t V = normal_matrix(K, J, rng) * 2;
        GroupStructure gs({{0, 1, 2}, {3, 4}, {5, 6, 7, 8}}, {{0}});
        gs.input_weights = {1.0, 2.0, 0.5};
        const double step = 0.7, l1 = 0.4 * rng.uniform(), l2 = 2 * rng.uniform();
        const mat_t Z = prox_penalty(V, step, gs, RegParams(l1, l2, 0));

        mat_t expected = V.unaryExpr([&](double v) { return std::copysign(std::max(std::abs(v) - step * l1, 0.0), v); });
        for (std::size_t m = 0; m < gs.n_input_groups(); ++m) {
            for (index_t k = 0; k < K; ++k) {
                double sq = 0;
                for (auto j : gs.input_groups[m]) sq += expected(k, j) * expected(k, j);
                const double n = std::sqrt(sq);
                const double f = n > 0 ? std::max(1 - step * l2 * gs.input_weights[m] / n, 0.0) : 0.0;
                for (auto j : gs.input_groups[m]) expected(k, j) *= f;
            }
        }
        EXPECT_LE((Z - expected).cwiseAbs().maxCoeff(), 1e-10);
    }
}

TEST(Prox, DisjointOutputGroupsClosedForm)
{
    RandomStream rng(5, 1);
    const mat_t V = normal_matrix(4, 5, rng);
    GroupStructure gs({{0}}, {{0, 1}, {2, 3}});
    const double step = 0.9, l3 = 0.8;
    const mat_t Z = prox_penalty(V, step, gs, RegParams(0, 0, l3));
    for (index_t j = 0; j < 5; ++j) {
        for (auto rows : {std::pair{0, 1}, std::pair{2, 3}}) {
            const double n = std::hypot(V(rows.first, j), V(rows.second, j));
            const double f = std::max(1 - step * l3 / n, 0.0);
            EXPECT_NEAR(Z(rows.first, j), f * V(rows.first, j), 1e-10);
            EXPECT_NEAR(Z(rows.second, j), f * V(rows.second, j), 1e-10);
        }
    }
}

TEST(Prox, OverlappingMatchesDualOracle)
{
    for (std::uint64_t s = 1; s <= 10; ++s) {
        RandomStream rng(s, 6);
        const mat_t V = normal_matrix(4, 6, rng) * 2;
        GroupStructure gs({{0, 1, 2}, {2, 3, 4}, {4, 5}}, {{0, 1, 2}, {2, 3}});
        const double step = 0.5 + rng.uniform();
        const RegParams rp(0.3 * rng.uniform(), 0.6 * rng.uniform(), 0.6 * rng.uniform());

        const auto ref = oracle::prox(V, step, gs, rp, 100000);
        ASSERT_LE(ref.gap(), 1e-12);
        const double best = prox_objective(ref.B, V, step, gs, rp);

        const mat_t Z = prox_penalty(V, step, gs, rp, tight());
        EXPECT_LE(std::abs(prox_objective(Z, V, step, gs, rp) - best), 1e-8) << "seed " << s;
        EXPECT_LE((Z - ref.B).cwiseAbs().maxCoeff(), 1e-6);
    }
}

TEST(Prox, Nonexpansive)
{
    for (std::uint64_t s = 1; s <= 30; ++s) {
        RandomStream rng(s, 7);
        const auto gs = testutil::random_groups(4, 10, s);
        const RegParams rp(rng.uniform(), rng.uniform(), rng.uniform());
        const mat_t U = normal_matrix(4, 10, rng) * 2, V = normal_matrix(4, 10, rng) * 2;
        const mat_t PU = prox_penalty(U, 1, gs, rp, tight()), PV = prox_penalty(V, 1, gs, rp, tight());
        EXPECT_LE((PU - PV).norm(), (U - V).norm() + 1e-8);
    }
}

TEST(Prox, RestrictedPenaltyEqualsFullOnFreeSupport)
{
    for (std::uint64_t s = 1; s <= 20; ++s) {
        RandomStream rng(s, 8);
        const index_t K = 4, J = 12;
        const auto gs = testutil::random_groups(K, J, s);
        const RegParams rp(0.5, 1.5, 0.7);
        std::vector<index_t> cols;
        for (index_t j = 0; j < J; ++j) {
            if (rng.uniform() < 0.6) cols.push_back(j);
        }
        if (cols.empty()) cols.push_back(0);
        mask_t free(K, static_cast<index_t>(cols.size()));
        for (index_t i = 0; i < free.size(); ++i) free.data()[i] = rng.uniform() < 0.7;
        auto prox = make_restricted_prox(gs, rp, K, J, cols, free);

        mat_t B = mat_t::Zero(K, J);
        vec_t z(K * static_cast<index_t>(cols.size()));
        for (index_t a = 0; a < static_cast<index_t>(cols.size()); ++a) {
            for (index_t k = 0; k < K; ++k) {
                const double v = free(k, a) ? rng.normal() : 0.0;
                z[k + K * a] = v;
                B(k, cols[a]) = v;
            }
        }
        EXPECT_NEAR(prox.penalty(z), penalty(B, gs, rp), 1e-12 * std::max(1.0, penalty(B, gs, rp)));

        // pinned coordinates stay at zero
        vec_t out;
        vec_t v = vec_t::Constant(z.size(), 5.0);
        prox.apply(v, 0.1, out, 1000, 1e-12);
        for (index_t i = 0; i < free.size(); ++i) {
            if (!free.data()[i]) EXPECT_EQ(out[i], 0.0);
        }
    }
}

TEST(Prox, ReportsInnerProgress)
{
    const auto gs = testutil::random_groups(3, 9, 3);
    RandomStream rng(9, 1);
    const mat_t V = normal_matrix(3, 9, rng);
    OverlappingGroupProx::Report rep;
    prox_penalty(V, 1, gs, RegParams(0.1, 0.5, 0.5), {1, 1e-300}, &rep);
    EXPECT_EQ(rep.sweeps, 1);
    EXPECT_FALSE(rep.converged);
    prox_penalty(V, 1, gs, RegParams(0.1, 0.5, 0.5), tight(), &rep);
    EXPECT_TRUE(rep.converged);
    EXPECT_LE(rep.residual, 1e-14);
}
