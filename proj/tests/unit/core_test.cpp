#include <gtest/gtest.h>
#include "helpers.hpp"

using namespace higt;
using testutil::normal_matrix;

namespace {

// Direct triple-loop evaluation, kept separate from the library code path.
double reference_objective(const mat_t& B, const Dataset& ds, const GroupStructure& gs, const RegParams& rp)
{
    double loss = 0;
    for (index_t k = 0; k < ds.Y.rows(); ++k) {
        for (index_t n = 0; n < ds.Y.cols(); ++n) {
            double pred = 0;
            for (index_t j = 0; j < ds.X.rows(); ++j) pred += B(k, j) * ds.X(j, n);
            loss += 0.5 * (ds.Y(k, n) - pred) * (ds.Y(k, n) - pred);
        }
    }
    double pen = 0;
    for (index_t k = 0; k < B.rows(); ++k) {
        for (index_t j = 0; j < B.cols(); ++j) pen += rp.lambda1 * std::abs(B(k, j));
    }
    for (const auto& g : gs.input_groups) {
        for (index_t k = 0; k < B.rows(); ++k) {
            double s = 0;
            for (auto j : g) s += B(k, j) * B(k, j);
            pen += rp.lambda2 * std::sqrt(s);
        }
    }
    for (const auto& h : gs.output_groups) {
        for (index_t j = 0; j < B.cols(); ++j) {
            double s = 0;
            for (auto k : h) s += B(k, j) * B(k, j);
            pen += rp.lambda3 * std::sqrt(s);
        }
    }
    return loss + pen;
}

} // namespace

TEST(Standardize, PopulationConvention)
{
    mat_t X(1, 3);
    X << 1, 2, 3;
    mat_t Y(1, 3);
    Y << 3, 1, 2;
    StandardizationFactors f;
    auto ds = standardize(Dataset(X, Y), &f);
    const double a = std::sqrt(1.5);
    EXPECT_NEAR(ds.X(0, 0), -a, 1e-12);
    EXPECT_NEAR(ds.X(0, 1), 0, 1e-12);
    EXPECT_NEAR(ds.X(0, 2), a, 1e-12);
    EXPECT_NEAR(f.x_mean[0], 2, 1e-12);
    EXPECT_NEAR(f.x_scale[0], std::sqrt(2.0 / 3.0), 1e-12);
    // the raw data is untouched
    EXPECT_EQ(X(0, 0), 1);
}

TEST(Standardize, RowsHaveZeroMeanUnitVariance)
{
    RandomStream rng(3, 1);
    mat_t X = normal_matrix(6, 40, rng) * 5;
    X.array() += 7;
    mat_t Y = normal_matrix(2, 40, rng);
    auto ds = standardize(Dataset(X, Y));
    for (const mat_t* M : {&ds.X, &ds.Y}) {
        for (index_t r = 0; r < M->rows(); ++r) {
            EXPECT_LE(std::abs(M->row(r).mean()), 1e-10);
            EXPECT_LE(std::abs(M->row(r).squaredNorm() / 40 - 1), 1e-8);
        }
    }
}

TEST(Standardize, Idempotent)
{
    RandomStream rng(4, 1);
    auto once = standardize(Dataset(normal_matrix(3, 20, rng), normal_matrix(2, 20, rng)));
    auto twice = standardize(once);
    EXPECT_LE((once.X - twice.X).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_LE((once.Y - twice.Y).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Standardize, ConstantRowRejected)
{
    mat_t X(2, 3);
    X << 1, 2, 3, 5, 5, 5;
    mat_t Y(1, 3);
    Y << 1, 0, 1;
    try {
        standardize(Dataset(X, Y));
        FAIL() << "expected ConstantRow";
    } catch (const ConstantRow& e) {
        EXPECT_EQ(e.row(), 1u);
        EXPECT_EQ(e.matrix(), "X");
    }
    mat_t Yc = mat_t::Constant(1, 3, 2.0);
    EXPECT_THROW(standardize(Dataset(X.topRows(1), Yc)), ConstantRow);
}

TEST(Dataset, SampleCountsMustAgree)
{
    EXPECT_THROW(Dataset(mat_t::Ones(2, 3), mat_t::Ones(1, 4)), DimensionMismatch);
    EXPECT_THROW(Dataset(mat_t(0, 3), mat_t::Ones(1, 3)), DimensionMismatch);
}

TEST(GroupStructure, Validation)
{
    GroupStructure ok({{0, 1}, {1, 2}}, {{0}});
    EXPECT_NO_THROW(ok.validate(1, 3));
    EXPECT_THROW(ok.validate(1, 2), InvalidGroups);

    GroupStructure empty({{}}, {{0}});
    EXPECT_THROW(empty.validate(1, 3), InvalidGroups);

    GroupStructure bad_weight = ok;
    bad_weight.input_weights[0] = 0;
    EXPECT_THROW(bad_weight.validate(1, 3), InvalidGroups);

    GroupStructure short_weights = ok;
    short_weights.output_weights.clear();
    EXPECT_THROW(short_weights.validate(1, 3), InvalidGroups);

    GroupStructure ew = ok;
    ew.element_weights = mat_t::Ones(2, 3);
    EXPECT_THROW(ew.validate(1, 3), DimensionMismatch);
}

TEST(RegParams, RejectsNegative)
{
    EXPECT_THROW(RegParams(-1, 0, 0), Error);
    EXPECT_NO_THROW(RegParams(0, 0, 0));
}

TEST(Penalty, WorkedExampleTwoByTwo)
{
    GroupStructure gs({{0, 1}}, {{0, 1}});
    const mat_t B = mat_t::Ones(2, 2);
    EXPECT_NEAR(penalty(B, gs, RegParams::uniform(1)), 4 + 4 * std::sqrt(2.0), 1e-12);
}

TEST(Penalty, ZeroCases)
{
    GroupStructure gs({{0, 1}, {1, 2}}, {{0, 1}});
    EXPECT_EQ(penalty(mat_t::Zero(2, 3), gs, RegParams::uniform(2)), 0);
    RandomStream rng(1, 1);
    EXPECT_EQ(penalty(normal_matrix(2, 3, rng), gs, RegParams::uniform(0)), 0);
}

TEST(Penalty, ElementWeightsAreIndividual)
{
    GroupStructure gs({{0}}, {{0}});
    gs.element_weights = mat_t::Constant(1, 2, 1.0);
    gs.element_weights(0, 1) = 3;
    mat_t B(1, 2);
    B << -1, 2;
    EXPECT_NEAR(penalty(B, gs, RegParams(1, 0, 0)), 1 + 6, 1e-12);
}

TEST(Penalty, PositivelyHomogeneous)
{
    for (std::uint64_t s = 1; s <= 10; ++s) {
        const auto gs = testutil::random_groups(4, 9, s);
        RandomStream rng(s, 2);
        const mat_t B = normal_matrix(4, 9, rng);
        const RegParams rp(0.3, 1.1, 0.7);
        const double c = 0.1 + 5 * rng.uniform();
        const double lhs = penalty(c * B, gs, rp);
        EXPECT_NEAR(lhs, c * penalty(B, gs, rp), 1e-12 * lhs);
    }
}

TEST(Penalty, Convex)
{
    for (std::uint64_t s = 1; s <= 50; ++s) {
        const auto gs = testutil::random_groups(3, 8, s);
        RandomStream rng(s, 3);
        const mat_t B1 = normal_matrix(3, 8, rng);
        const mat_t B2 = normal_matrix(3, 8, rng);
        const double t = rng.uniform();
        const RegParams rp(rng.uniform(), rng.uniform(), rng.uniform());
        EXPECT_LE(penalty(t * B1 + (1 - t) * B2, gs, rp),
                  t * penalty(B1, gs, rp) + (1 - t) * penalty(B2, gs, rp) + 1e-10);
    }
}

TEST(Objective, AtZeroIsHalfSquaredNorm)
{
    const auto ds = testutil::random_dataset(3, 7, 30, 1);
    const auto gs = testutil::random_groups(3, 7, 1);
    EXPECT_EQ(objective(mat_t::Zero(3, 7), ds, gs, RegParams::uniform(1)), 0.5 * ds.Y.squaredNorm());
}

TEST(Objective, ExactFitWithoutPenalty)
{
    RandomStream rng(5, 1);
    const mat_t X = normal_matrix(4, 10, rng);
    const mat_t B = normal_matrix(2, 4, rng);
    const Dataset ds(X, B * X);
    GroupStructure gs({{0, 1, 2, 3}}, {{0, 1}});
    EXPECT_NEAR(objective(B, ds, gs, RegParams{}), 0, 1e-20);
}

TEST(Objective, MatchesElementwiseReference)
{
    for (std::uint64_t s = 1; s <= 10; ++s) {
        const auto ds = testutil::random_dataset(3, 6, 15, s);
        const auto gs = testutil::random_groups(3, 6, s);
        RandomStream rng(s, 4);
        const mat_t B = normal_matrix(3, 6, rng);
        const RegParams rp(0.5, 0.25, 2);
        const double ref = reference_objective(B, ds, gs, rp);
        EXPECT_NEAR(objective(B, ds, gs, rp), ref, 1e-12 * ref);
    }
}

TEST(Objective, ShapeChecked)
{
    const auto ds = testutil::random_dataset(2, 4, 10, 1);
    GroupStructure gs({{0}}, {{0}});
    EXPECT_THROW(objective(mat_t::Zero(3, 4), ds, gs, RegParams{}), DimensionMismatch);
    EXPECT_THROW(smooth_gradient(mat_t::Zero(2, 5), ds), DimensionMismatch);
}

TEST(SmoothGradient, AtZero)
{
    const auto ds = testutil::random_dataset(2, 5, 12, 2);
    const mat_t expected = -ds.Y * ds.X.transpose();
    EXPECT_LE((smooth_gradient(mat_t::Zero(2, 5), ds) - expected).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SmoothGradient, VanishesAtNoiselessTruth)
{
    RandomStream rng(6, 1);
    const mat_t X = normal_matrix(5, 20, rng);
    const mat_t B = normal_matrix(3, 5, rng);
    const Dataset ds(X, B * X);
    EXPECT_LE(smooth_gradient(B, ds).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(SmoothGradient, CentralFiniteDifferences)
{
    for (std::uint64_t s = 1; s <= 10; ++s) {
        RandomStream rng(s, 5);
        const index_t K = rng.uniform_int(1, 3), J = rng.uniform_int(1, 4), N = rng.uniform_int(2, 10);
        const Dataset ds(normal_matrix(J, N, rng), normal_matrix(K, N, rng));
        const mat_t B = normal_matrix(K, J, rng);
        const mat_t G = smooth_gradient(B, ds);
        const double h = 1e-6;
        for (index_t k = 0; k < K; ++k) {
            for (index_t j = 0; j < J; ++j) {
                mat_t Bp = B, Bm = B;
                Bp(k, j) += h;
                Bm(k, j) -= h;
                const double fd = (loss(Bp, ds) - loss(Bm, ds)) / (2 * h);
                EXPECT_LE(std::abs(fd - G(k, j)), 1e-5 * std::max(1.0, std::abs(G(k, j))))
                    << "seed " << s << " entry " << k << "," << j;
            }
        }
    }
}
