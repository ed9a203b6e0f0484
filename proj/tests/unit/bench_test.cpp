#include <gtest/gtest.h>
#include <sstream>
#include "helpers.hpp"

using namespace higt;

namespace {

BenchGrid small_grid()
{
    BenchGrid g;
    g.fixed.J = 120;
    g.fixed.N = 100;
    g.fixed.nonzero_count = 20;
    g.replicates = 2;
    g.values = {0.07};
    g.warm_repeat = false;
    return g;
}

void expect_same_results(const BenchReport& a, const BenchReport& b)
{
    ASSERT_EQ(a.records.size(), b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        EXPECT_EQ(a.records[i].seed, b.records[i].seed);
        EXPECT_EQ(a.records[i].survivor_groups, b.records[i].survivor_groups);
        EXPECT_EQ(a.records[i].missing, b.records[i].missing);
        EXPECT_EQ(a.records[i].recovery.f1, b.records[i].recovery.f1);
        EXPECT_EQ(a.records[i].objective, b.records[i].objective);
    }
}

} // namespace

TEST(Bench, SingleCellIsDeterministic)
{
    auto g = small_grid();
    g.replicates = 1;
    g.methods = {Method::higt};
    const auto a = run_grid(g);
    ASSERT_EQ(a.cells.size(), 1u);
    ASSERT_EQ(a.records.size(), 1u);
    expect_same_results(a, run_grid(g));
}

TEST(Bench, LambdaSweepShape)
{
    auto g = small_grid();
    g.values = {0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5};
    g.methods = {Method::higt};
    const auto rep = run_grid(g);
    ASSERT_EQ(rep.cells.size(), 9u);

    std::ostringstream csv;
    write_cells_csv(csv, rep);
    std::size_t lines = 0;
    for (char ch : csv.str()) lines += ch == '\n';
    EXPECT_EQ(lines, 10u);

    for (std::size_t r = 0; r < g.replicates; ++r) {
        std::size_t prev = std::numeric_limits<std::size_t>::max();
        for (const auto& rec : rep.records) {
            if (rec.replicate != r) continue;
            EXPECT_LE(rec.survivor_groups, prev);
            prev = rec.survivor_groups;
            EXPECT_LE(rec.survivor_groups, rec.total_groups);
        }
        EXPECT_EQ(prev, 0u);
    }
    EXPECT_EQ(rep.cells.back().missing.mean, 20);
}

TEST(Bench, MethodsAgreeOnRecovery)
{
    const auto rep = run_grid(small_grid());
    ASSERT_EQ(rep.records.size(), 4u);
    for (std::size_t i = 0; i < rep.records.size(); i += 2) {
        const auto& a = rep.records[i];
        const auto& b = rep.records[i + 1];
        EXPECT_EQ(a.method, Method::higt);
        EXPECT_EQ(b.method, Method::no_screen);
        EXPECT_EQ(a.recovery.f1, b.recovery.f1);
        EXPECT_NEAR(a.objective, b.objective, 1e-8 * b.objective);
        EXPECT_EQ(b.missing, 0u);
        EXPECT_EQ(b.survivor_groups, b.total_groups);
        EXPECT_EQ(b.screen_ms, 0);
    }
}

TEST(Bench, WorkerPoolKeepsOrder)
{
    auto g = small_grid();
    g.values = {0.05, 0.1};
    const auto serial = run_grid(g);
    g.workers = 3;
    expect_same_results(serial, run_grid(g));
}

TEST(Bench, AxesMapToSimulation)
{
    BenchGrid g;
    g.axis = BenchAxis::num_groups;
    EXPECT_EQ(cell_config(g, 40).J, 200);
    g.axis = BenchAxis::samples;
    EXPECT_EQ(cell_config(g, 300).N, 300);
    g.axis = BenchAxis::inputs;
    EXPECT_EQ(cell_config(g, 1000).J, 1000);
    g.axis = BenchAxis::outputs;
    EXPECT_EQ(cell_config(g, 8).K, 8);
    EXPECT_DOUBLE_EQ(cell_lambda(g, 8, 200), g.lambda * 200);
    g.axis = BenchAxis::lambda;
    g.scale_lambda_by_n = false;
    EXPECT_DOUBLE_EQ(cell_lambda(g, 0.3, 200), 0.3);
}

TEST(Bench, GridValidation)
{
    BenchGrid g;
    EXPECT_THROW(g.validate(), Error);
    g.values = {0.2, 0.1};
    EXPECT_THROW(g.validate(), Error);
    g.values = {0.1};
    g.replicates = 0;
    EXPECT_THROW(g.validate(), Error);
    EXPECT_THROW(parse_axis("depth"), ParseError);
    EXPECT_THROW(parse_method("other"), ParseError);
}

TEST(Bench, SupportGroupCount)
{
    GroupStructure gs({{0, 1}, {1, 2}}, {{0, 1}});
    mat_t b = mat_t::Zero(2, 3);
    b(0, 1) = 1;
    // row groups (0, g1), (0, g2) and the column group (1, h1)
    EXPECT_EQ(support_group_count(gs, b), 3u);
}
