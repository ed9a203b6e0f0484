#pragma once
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>
#include <higt/metrics.hpp>
#include <higt/simulation.hpp>
#include <higt/solver.hpp>

namespace higt {

enum class BenchAxis { lambda, num_groups, samples, inputs, outputs };
enum class Method { higt, no_screen };

inline const char* to_string(BenchAxis a)
{
    switch (a) {
        case BenchAxis::lambda: return "lambda";
        case BenchAxis::num_groups: return "num_groups";
        case BenchAxis::samples: return "samples";
        case BenchAxis::inputs: return "inputs";
        case BenchAxis::outputs: return "outputs";
    }
    return "?";
}

inline const char* to_string(Method m)
{
    return m == Method::higt ? "higt" : "no_screen";
}

inline BenchAxis parse_axis(const std::string& s)
{
    for (auto a : {BenchAxis::lambda, BenchAxis::num_groups, BenchAxis::samples, BenchAxis::inputs, BenchAxis::outputs}) {
        if (s == to_string(a)) return a;
    }
    throw ParseError("unknown bench axis '" + s + "'");
}

inline Method parse_method(const std::string& s)
{
    if (s == "higt") return Method::higt;
    if (s == "no_screen") return Method::no_screen;
    throw ParseError("unknown method '" + s + "'");
}

/**
 * A one-axis experiment. Lambdas are given on the correlation scale
 * (inputs and outputs with unit norm); with scale_lambda_by_n the solver
 * receives N * lambda, which is the same problem on unit-variance data.
 *
 * The num_groups axis sets J = 5 * value: with sizes drawn from [5, 10] and
 * overlaps from [1, 4], consecutive input groups advance by 5 on average.
 */
struct BenchGrid
{
    BenchAxis axis = BenchAxis::lambda;
    std::vector<double> values;
    SimConfig fixed;
    std::size_t replicates = 10;
    std::vector<Method> methods{Method::higt, Method::no_screen};
    double lambda = 0.05;  // used when the axis is not lambda
    bool scale_lambda_by_n = true;
    TreeConfig tree;
    SolverConfig solver;
    bool warm_repeat = true;
    unsigned workers = 1;

    void validate() const
    {
        if (values.empty()) throw Error("bench grid needs at least one value");
        if (!std::is_sorted(values.begin(), values.end())) throw Error("bench grid values must be sorted");
        if (replicates == 0) throw Error("replicates must be positive");
        if (methods.empty()) throw Error("bench grid needs at least one method");
        if (!(lambda >= 0)) throw Error("lambda must be nonnegative");
        solver.validate();
    }
};

/// One (value, replicate, method) run.
struct BenchRecord
{
    double value = 0;
    std::size_t replicate = 0;
    Method method = Method::higt;
    std::uint64_t seed = 0;
    double lambda_raw = 0;
    double screen_ms = 0;
    double solve_ms = 0;
    double total_ms = 0;
    std::size_t survivor_groups = 0;
    std::size_t total_groups = 0;
    std::size_t true_groups = 0;
    std::size_t missing = 0;
    RecoveryScore recovery;
    int iterations = 0;
    double objective = 0;
};

struct BenchCell
{
    double value = 0;
    Method method = Method::higt;
    Summary screen_ms, solve_ms, total_ms, survivor_groups, total_groups, true_groups, missing, f1;
};

struct BenchReport
{
    BenchGrid grid;
    std::vector<BenchRecord> records;
    std::vector<BenchCell> cells;
};

/// Penalty groups (row groups (k, g_m) and column groups (j, h_o)) holding a nonzero of b.
inline std::size_t support_group_count(const GroupStructure& gs, const CoefficientMatrix& b)
{
    std::size_t n = 0;
    for (const auto& g : gs.input_groups) {
        for (index_t k = 0; k < b.rows(); ++k) {
            n += std::any_of(g.begin(), g.end(), [&](index_t j) { return b(k, j) != 0; });
        }
    }
    for (const auto& h : gs.output_groups) {
        for (index_t j = 0; j < b.cols(); ++j) {
            n += std::any_of(h.begin(), h.end(), [&](index_t k) { return b(k, j) != 0; });
        }
    }
    return n;
}

/// True nonzeros of b_true that the survivor set discards.
inline std::size_t missing_nonzeros(const SurvivorSet& s, const CoefficientMatrix& b_true)
{
    std::size_t n = 0;
    for (index_t j = 0; j < b_true.cols(); ++j) {
        for (index_t k = 0; k < b_true.rows(); ++k) n += b_true(k, j) != 0 && !s.coefficients(k, j);
    }
    return n;
}

/// Simulation settings for one grid value.
inline SimConfig cell_config(const BenchGrid& grid, double value)
{
    SimConfig c = grid.fixed;
    const auto as_index = [](double v) { return static_cast<index_t>(std::llround(v)); };
    switch (grid.axis) {
        case BenchAxis::lambda: break;
        case BenchAxis::num_groups: c.J = 5 * as_index(value); break;
        case BenchAxis::samples: c.N = as_index(value); break;
        case BenchAxis::inputs: c.J = as_index(value); break;
        case BenchAxis::outputs: c.K = as_index(value); break;
    }
    return c;
}

inline double cell_lambda(const BenchGrid& grid, double value, index_t N)
{
    const double l = grid.axis == BenchAxis::lambda ? value : grid.lambda;
    return grid.scale_lambda_by_n ? l * static_cast<double>(N) : l;
}

namespace detail {

inline std::vector<BenchRecord> run_replicate(const BenchGrid& grid, double value, std::size_t rep)
{
    SimConfig sc = cell_config(grid, value);
    sc.seed = grid.fixed.seed + rep;
    const auto inst = simulate(sc);
    const auto& gs = inst.groups;
    const double lmda = cell_lambda(grid, value, sc.N);
    const auto rp = RegParams::uniform(lmda);
    const auto total = SurvivorSet::all(gs, sc.K, sc.J).penalty_group_count(gs);
    const auto truth_groups = support_group_count(gs, inst.b_true);

    std::vector<BenchRecord> out;
    for (auto method : grid.methods) {
        auto run = [&] {
            return method == Method::higt ? fit(inst.dataset, gs, rp, grid.tree, grid.solver)
                                          : solve_full(inst.dataset, gs, rp, grid.solver);
        };
        FitResult r = run();
        if (grid.warm_repeat) r = run();

        BenchRecord rec;
        rec.value = value;
        rec.replicate = rep;
        rec.method = method;
        rec.seed = sc.seed;
        rec.lambda_raw = lmda;
        rec.screen_ms = r.screen_time_ms;
        rec.solve_ms = r.solve_time_ms;
        rec.total_ms = r.total_time_ms();
        rec.survivor_groups = r.survivor.penalty_group_count(gs);
        rec.total_groups = total;
        rec.true_groups = truth_groups;
        rec.missing = missing_nonzeros(r.survivor, inst.b_true);
        rec.recovery = score(r.B, inst.b_true);
        rec.iterations = r.iterations;
        rec.objective = r.objective();
        out.push_back(rec);
    }
    return out;
}

} // namespace detail

/**
 * Runs every (value, replicate) task, optionally on a small thread pool.
 * Records come back in grid order regardless of the worker count; with
 * more than one worker the timings compete for cores.
 */
inline BenchReport run_grid(const BenchGrid& grid, const std::function<void(const BenchRecord&)>& on_record = {})
{
    grid.validate();
    const std::size_t n_tasks = grid.values.size() * grid.replicates;
    std::vector<std::vector<BenchRecord>> results(n_tasks);

    auto task = [&](std::size_t i) {
        results[i] = detail::run_replicate(grid, grid.values[i / grid.replicates], i % grid.replicates);
    };
    const unsigned workers = std::max(1u, std::min<unsigned>(grid.workers, static_cast<unsigned>(n_tasks)));
    if (workers == 1) {
        for (std::size_t i = 0; i < n_tasks; ++i) {
            task(i);
            if (on_record) for (const auto& r : results[i]) on_record(r);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        std::exception_ptr failure;
        std::mutex failure_mu;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n_tasks; i = next++) {
                    try {
                        task(i);
                    } catch (...) {
                        std::lock_guard lock(failure_mu);
                        if (!failure) failure = std::current_exception();
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
        if (failure) std::rethrow_exception(failure);
        if (on_record) for (const auto& rs : results) for (const auto& r : rs) on_record(r);
    }

    BenchReport report;
    report.grid = grid;
    for (auto& rs : results) report.records.insert(report.records.end(), rs.begin(), rs.end());

    for (double v : grid.values) {
        for (auto method : grid.methods) {
            std::vector<double> scr, sol, tot, surv, totg, trueg, miss, f1;
            for (const auto& r : report.records) {
                if (r.value != v || r.method != method) continue;
                scr.push_back(r.screen_ms);
                sol.push_back(r.solve_ms);
                tot.push_back(r.total_ms);
                surv.push_back(static_cast<double>(r.survivor_groups));
                totg.push_back(static_cast<double>(r.total_groups));
                trueg.push_back(static_cast<double>(r.true_groups));
                miss.push_back(static_cast<double>(r.missing));
                f1.push_back(r.recovery.f1);
            }
            report.cells.push_back({v, method, summarize(scr), summarize(sol), summarize(tot), summarize(surv),
                                    summarize(totg), summarize(trueg), summarize(miss), summarize(f1)});
        }
    }
    return report;
}

inline const std::vector<std::string>& cell_csv_columns()
{
    static const std::vector<std::string> cols{
        "axis", "value", "method", "replicates",
        "screen_ms_mean", "screen_ms_sd", "solve_ms_mean", "solve_ms_sd", "total_ms_mean", "total_ms_sd",
        "survivor_groups_mean", "survivor_groups_sd", "total_groups_mean", "true_groups_mean",
        "missing_mean", "missing_sd", "f1_mean", "f1_sd"};
    return cols;
}

inline const std::vector<std::string>& record_csv_columns()
{
    static const std::vector<std::string> cols{
        "axis", "value", "replicate", "method", "seed", "lambda_raw",
        "screen_ms", "solve_ms", "total_ms", "survivor_groups", "total_groups", "true_groups",
        "missing", "precision", "recall", "f1", "iterations", "objective"};
    return cols;
}

namespace detail {

inline void write_header(std::ostream& out, const std::vector<std::string>& cols)
{
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
}

} // namespace detail

/// One row per (value, method) cell.
inline void write_cells_csv(std::ostream& out, const BenchReport& rep)
{
    detail::write_header(out, cell_csv_columns());
    out << std::setprecision(10);
    for (const auto& c : rep.cells) {
        out << to_string(rep.grid.axis) << ',' << c.value << ',' << to_string(c.method) << ',' << c.f1.n << ','
            << c.screen_ms.mean << ',' << c.screen_ms.sd << ',' << c.solve_ms.mean << ',' << c.solve_ms.sd << ','
            << c.total_ms.mean << ',' << c.total_ms.sd << ',' << c.survivor_groups.mean << ','
            << c.survivor_groups.sd << ',' << c.total_groups.mean << ',' << c.true_groups.mean << ','
            << c.missing.mean << ',' << c.missing.sd << ',' << c.f1.mean << ',' << c.f1.sd << '\n';
    }
}

inline void write_records_csv(std::ostream& out, const BenchReport& rep)
{
    detail::write_header(out, record_csv_columns());
    out << std::setprecision(10);
    for (const auto& r : rep.records) {
        out << to_string(rep.grid.axis) << ',' << r.value << ',' << r.replicate << ',' << to_string(r.method) << ','
            << r.seed << ',' << r.lambda_raw << ',' << r.screen_ms << ',' << r.solve_ms << ',' << r.total_ms << ','
            << r.survivor_groups << ',' << r.total_groups << ',' << r.true_groups << ',' << r.missing << ','
            << r.recovery.precision << ',' << r.recovery.recall << ',' << r.recovery.f1 << ',' << r.iterations
            << ',' << r.objective << '\n';
    }
}

inline void write_markdown(std::ostream& out, const BenchReport& rep)
{
    out << "| " << to_string(rep.grid.axis)
        << " | method | screen ms | solve ms | total ms | survivor groups | missing nonzeros | F1 |\n"
        << "|---|---|---|---|---|---|---|---|\n";
    auto ms = [](const Summary& s) {
        std::ostringstream o;
        o << std::fixed << std::setprecision(2) << s.mean << " ± " << s.sd;
        return o.str();
    };
    for (const auto& c : rep.cells) {
        std::ostringstream row;
        row << "| " << c.value << " | " << to_string(c.method) << " | " << ms(c.screen_ms) << " | "
            << ms(c.solve_ms) << " | " << ms(c.total_ms) << " | " << std::fixed << std::setprecision(1)
            << c.survivor_groups.mean << " / " << c.total_groups.mean << " | " << c.missing.mean << " | "
            << std::setprecision(3) << c.f1.mean << " |\n";
        out << row.str();
    }
}

} // namespace higt
