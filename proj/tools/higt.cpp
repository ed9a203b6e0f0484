#include <filesystem>
#include <fstream>
#include <iostream>
#include <CLI11.hpp>
#include <higt/config.hpp>
#include <higt/higt.hpp>

namespace fs = std::filesystem;
using namespace higt;

namespace {

struct DataArgs
{
    std::string x, y, groups;
    double lambda1 = 0, lambda2 = 0, lambda3 = 0;
    bool no_standardize = false;
};

void add_data_options(CLI::App* cmd, DataArgs& a)
{
    cmd->add_option("--x", a.x, "input matrix file (J x N)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--y", a.y, "output matrix file (K x N)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--groups", a.groups, "group file")->required()->check(CLI::ExistingFile);
    cmd->add_option("--lambda1", a.lambda1, "element-wise strength")->check(CLI::NonNegativeNumber);
    cmd->add_option("--lambda2", a.lambda2, "input-group strength")->check(CLI::NonNegativeNumber);
    cmd->add_option("--lambda3", a.lambda3, "output-group strength")->check(CLI::NonNegativeNumber);
    cmd->add_flag("--no-standardize", a.no_standardize, "use the rows of X and Y as given");
}

struct Loaded
{
    Dataset ds;
    GroupStructure gs;
    RegParams rp;
};

Loaded load(const DataArgs& a)
{
    Dataset raw(io::read_matrix(a.x), io::read_matrix(a.y));
    Loaded l{a.no_standardize ? raw : standardize(raw), io::read_groups(a.groups), RegParams(a.lambda1, a.lambda2, a.lambda3)};
    l.gs.validate(l.ds.n_outputs(), l.ds.n_inputs());
    return l;
}

void write_text(const fs::path& p, const std::string& s)
{
    std::ofstream out(p);
    if (!out) throw Error("cannot write " + p.string());
    out << s;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Multi-task regression with overlapping input and output groups, screened by a group tree"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "generate a seeded simulated instance");
    std::string sim_config, sim_out;
    std::uint64_t sim_seed = 0;
    sim->add_option("--config", sim_config, "simulation config JSON")->check(CLI::ExistingFile);
    sim->add_option("--seed", sim_seed, "override the config seed");
    sim->add_option("--out", sim_out, "output directory")->required();

    // screen
    auto* scr = app.add_subcommand("screen", "run the screening pass only");
    DataArgs scr_args;
    TreeConfig scr_tree;
    bool scr_safe = false;
    add_data_options(scr, scr_args);
    scr->add_option("--block-inputs", scr_tree.block_inputs, "input groups per internal node")->check(CLI::PositiveNumber);
    scr->add_option("--block-outputs", scr_tree.block_outputs, "output groups per internal node")->check(CLI::PositiveNumber);
    scr->add_flag("--safe", scr_safe, "also solve and audit the screened coefficients against the optimality conditions");

    // fit
    auto* fitc = app.add_subcommand("fit", "screen and solve");
    DataArgs fit_args;
    std::string fit_config, fit_out, fit_warm;
    TreeConfig fit_tree;
    bool fit_no_screen = false;
    add_data_options(fitc, fit_args);
    fitc->add_option("--config", fit_config, "solver config JSON")->check(CLI::ExistingFile);
    fitc->add_option("--block-inputs", fit_tree.block_inputs)->check(CLI::PositiveNumber);
    fitc->add_option("--block-outputs", fit_tree.block_outputs)->check(CLI::PositiveNumber);
    fitc->add_option("--warm-start", fit_warm, "initial coefficient matrix file")->check(CLI::ExistingFile);
    fitc->add_flag("--no-screen", fit_no_screen, "solve over every coefficient");
    fitc->add_option("--out", fit_out, "output prefix (writes <prefix>.beta.csv and <prefix>.result.json)")->required();

    // eval
    auto* ev = app.add_subcommand("eval", "support recovery of an estimate");
    std::string ev_est, ev_truth;
    double ev_threshold = default_support_threshold;
    ev->add_option("--est", ev_est)->required()->check(CLI::ExistingFile);
    ev->add_option("--truth", ev_truth)->required()->check(CLI::ExistingFile);
    ev->add_option("--threshold", ev_threshold)->check(CLI::NonNegativeNumber);

    // bench
    auto* bn = app.add_subcommand("bench", "run an experiment grid");
    std::string bn_grid, bn_out, bn_records, bn_md;
    bn->add_option("--grid", bn_grid, "grid JSON")->required()->check(CLI::ExistingFile);
    bn->add_option("--out", bn_out, "per-cell CSV report")->required();
    bn->add_option("--records", bn_records, "per-run CSV (default: <out stem>.records.csv)");
    bn->add_option("--markdown", bn_md, "markdown summary (default: <out stem>.md)");

    // tree
    auto* tr = app.add_subcommand("tree", "inspect the screening tree");
    auto* dump = tr->add_subcommand("dump", "print the tree");
    tr->require_subcommand(1);
    std::string tr_groups;
    TreeConfig tr_cfg;
    index_t tr_K = 0, tr_J = 0;
    dump->add_option("--groups", tr_groups)->required()->check(CLI::ExistingFile);
    dump->add_option("--block-inputs", tr_cfg.block_inputs)->check(CLI::PositiveNumber);
    dump->add_option("--block-outputs", tr_cfg.block_outputs)->check(CLI::PositiveNumber);
    dump->add_option("--K", tr_K, "number of outputs (default: largest index in the groups)");
    dump->add_option("--J", tr_J, "number of inputs (default: largest index in the groups)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sim) {
            SimConfig cfg = sim_config.empty() ? SimConfig{} : read_config<SimConfig>(sim_config);
            if (sim->count("--seed")) cfg.seed = sim_seed;
            const auto inst = simulate(cfg);
            const fs::path dir(sim_out);
            fs::create_directories(dir);
            io::write_matrix((dir / "x.csv").string(), inst.raw.X);
            io::write_matrix((dir / "y.csv").string(), inst.raw.Y);
            io::write_matrix((dir / "btrue.csv").string(), inst.b_true);
            io::write_groups((dir / "groups.txt").string(), inst.groups);
            json meta{{"config", cfg},
                      {"standardized", false},
                      {"input_groups", inst.groups.n_input_groups()},
                      {"output_groups", inst.groups.n_output_groups()}};
            write_text(dir / "meta.json", meta.dump(2) + "\n");
            std::cout << meta.dump(2) << '\n';
        } else if (*scr) {
            const auto l = load(scr_args);
            const auto t0 = std::chrono::steady_clock::now();
            const auto tree = build_tree(l.gs, scr_tree);
            const auto surv = screen(tree, precompute_correlation(l.ds), l.gs, l.rp);
            const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
            json out{{"survivor_group_counts",
                      {{"input_groups", surv.input_group_ids.size()},
                       {"output_groups", surv.output_group_ids.size()},
                       {"blocks", surv.blocks.size()},
                       {"penalty_groups", surv.penalty_group_count(l.gs)}}},
                     {"survivor_coefficient_count", surv.coefficient_count()},
                     {"nodes_visited", surv.stats.nodes_visited},
                     {"nodes_skipped", surv.stats.nodes_skipped},
                     {"wall_time_ms", ms},
                     {"stats", surv.stats}};
            if (scr_safe) {
                auto res = solve_restricted(l.ds, l.gs, l.rp, surv);
                const auto audit = audit_screening(l.ds, l.gs, l.rp, res);
                out["audit"] = {{"violating_coefficients", audit.violating_coefficients},
                                {"violating_blocks", audit.violating_blocks},
                                {"max_violation", audit.max_violation}};
            }
            std::cout << out.dump(2) << '\n';
        } else if (*fitc) {
            const auto l = load(fit_args);
            const SolverConfig cfg = fit_config.empty() ? SolverConfig{} : read_config<SolverConfig>(fit_config);
            mat_t warm;
            if (!fit_warm.empty()) warm = io::read_matrix(fit_warm);
            const auto* warm_ptr = fit_warm.empty() ? nullptr : &warm;
            const auto res = fit_no_screen ? solve_full(l.ds, l.gs, l.rp, cfg, warm_ptr)
                                           : fit(l.ds, l.gs, l.rp, fit_tree, cfg, warm_ptr);
            io::write_matrix(fit_out + ".beta.csv", res.B);
            json out = fit_summary(res, l.gs);
            out["lambda"] = l.rp;
            out["solver"] = cfg;
            write_text(fit_out + ".result.json", out.dump(2) + "\n");
            out.erase("objective_trace");
            std::cout << out.dump(2) << '\n';
        } else if (*ev) {
            const auto s = score(io::read_matrix(ev_est), io::read_matrix(ev_truth), ev_threshold);
            std::cout << json(s).dump(2) << '\n';
        } else if (*bn) {
            const auto grid = read_config<BenchGrid>(bn_grid);
            const fs::path out(bn_out);
            const fs::path stem = out.parent_path() / out.stem();
            if (bn_records.empty()) bn_records = stem.string() + ".records.csv";
            if (bn_md.empty()) bn_md = stem.string() + ".md";
            const auto rep = run_grid(grid, [](const BenchRecord& r) {
                std::cerr << "value=" << r.value << " rep=" << r.replicate << " " << to_string(r.method)
                          << " total_ms=" << r.total_ms << " f1=" << r.recovery.f1 << '\n';
            });
            std::ofstream cells(bn_out), records(bn_records), md(bn_md);
            if (!cells || !records || !md) throw Error("cannot write bench outputs");
            write_cells_csv(cells, rep);
            write_records_csv(records, rep);
            write_markdown(md, rep);
            write_markdown(std::cout, rep);
        } else if (*dump) {
            const auto gs = io::read_groups(tr_groups);
            index_t K = tr_K, J = tr_J;
            for (const auto& h : gs.output_groups) for (auto k : h) K = std::max(K, k + 1);
            for (const auto& g : gs.input_groups) for (auto j : g) J = std::max(J, j + 1);
            dump_tree(std::cout, build_tree(gs, tr_cfg), gs, K, J);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
