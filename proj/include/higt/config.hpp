#pragma once
// JSON conversions for configuration and result types. Needs nlohmann/json
// (the single header json.hpp) on the include path.
#include <fstream>
#include <string>
#include <json.hpp>
#include <higt/bench.hpp>

namespace higt {

using json = nlohmann::json;

namespace detail {

template <class T>
void get_opt(const json& j, const char* key, T& out)
{
    if (auto it = j.find(key); it != j.end()) it->get_to(out);
}

inline void reject_unknown(const json& j, std::initializer_list<const char*> known, const char* what)
{
    if (!j.is_object()) throw ParseError(std::string(what) + " must be a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (auto k : known) ok = ok || it.key() == k;
        if (!ok) throw ParseError(std::string("unknown key '") + it.key() + "' in " + what);
    }
}

} // namespace detail

inline void to_json(json& j, const IntRange& r) { j = json::array({r.lo, r.hi}); }

inline void from_json(const json& j, IntRange& r)
{
    if (!j.is_array() || j.size() != 2) throw ParseError("range must be a two-element array");
    r.lo = j[0].get<std::int64_t>();
    r.hi = j[1].get<std::int64_t>();
}

inline void to_json(json& j, const SimConfig& c)
{
    j = json{{"N", c.N}, {"J", c.J}, {"K", c.K},
             {"input_group_size_range", c.input_group_size}, {"input_overlap_range", c.input_overlap},
             {"output_group_size_range", c.output_group_size}, {"output_overlap_range", c.output_overlap},
             {"nonzero_count", c.nonzero_count}, {"nonzero_value", c.nonzero_value},
             {"noise_sd", c.noise_sd}, {"seed", c.seed}, {"rng_version", RandomStream::version}};
}

inline void from_json(const json& j, SimConfig& c)
{
    detail::reject_unknown(j, {"N", "J", "K", "input_group_size_range", "input_overlap_range",
                               "output_group_size_range", "output_overlap_range", "nonzero_count",
                               "nonzero_value", "noise_sd", "seed", "rng_version"}, "simulation config");
    detail::get_opt(j, "N", c.N);
    detail::get_opt(j, "J", c.J);
    detail::get_opt(j, "K", c.K);
    detail::get_opt(j, "input_group_size_range", c.input_group_size);
    detail::get_opt(j, "input_overlap_range", c.input_overlap);
    detail::get_opt(j, "output_group_size_range", c.output_group_size);
    detail::get_opt(j, "output_overlap_range", c.output_overlap);
    detail::get_opt(j, "nonzero_count", c.nonzero_count);
    detail::get_opt(j, "nonzero_value", c.nonzero_value);
    detail::get_opt(j, "noise_sd", c.noise_sd);
    detail::get_opt(j, "seed", c.seed);
    if (auto it = j.find("rng_version"); it != j.end() && it->get<int>() != RandomStream::version) {
        throw ParseError("config was written for a different random stream version");
    }
}

inline void to_json(json& j, const SolverConfig& c)
{
    j = json{{"max_outer_iters", c.max_outer_iters}, {"rel_obj_tol", c.rel_obj_tol},
             {"inner_prox_iters", c.inner_prox_iters}, {"inner_prox_tol", c.inner_prox_tol},
             {"step_rule", c.step_rule == StepRule::backtracking ? "backtracking" : "fixed_lipschitz"}};
}

inline void from_json(const json& j, SolverConfig& c)
{
    detail::reject_unknown(j, {"max_outer_iters", "rel_obj_tol", "inner_prox_iters", "inner_prox_tol", "step_rule"},
                           "solver config");
    detail::get_opt(j, "max_outer_iters", c.max_outer_iters);
    detail::get_opt(j, "rel_obj_tol", c.rel_obj_tol);
    detail::get_opt(j, "inner_prox_iters", c.inner_prox_iters);
    detail::get_opt(j, "inner_prox_tol", c.inner_prox_tol);
    if (auto it = j.find("step_rule"); it != j.end()) {
        const auto s = it->get<std::string>();
        if (s == "backtracking") c.step_rule = StepRule::backtracking;
        else if (s == "fixed_lipschitz") c.step_rule = StepRule::fixed_lipschitz;
        else throw ParseError("unknown step_rule '" + s + "'");
    }
    c.validate();
}

inline void to_json(json& j, const TreeConfig& c)
{
    j = json{{"block_inputs", c.block_inputs}, {"block_outputs", c.block_outputs}};
}

inline void from_json(const json& j, TreeConfig& c)
{
    detail::reject_unknown(j, {"block_inputs", "block_outputs"}, "tree config");
    detail::get_opt(j, "block_inputs", c.block_inputs);
    detail::get_opt(j, "block_outputs", c.block_outputs);
}

inline void to_json(json& j, const RegParams& rp)
{
    j = json{{"lambda1", rp.lambda1}, {"lambda2", rp.lambda2}, {"lambda3", rp.lambda3}};
}

inline void to_json(json& j, const RecoveryScore& s)
{
    j = json{{"precision", s.precision}, {"recall", s.recall}, {"f1", s.f1},
             {"true_positives", s.true_positives}, {"false_positives", s.false_positives},
             {"false_negatives", s.false_negatives}, {"threshold", s.threshold}};
}

inline void to_json(json& j, const ScreenStats& s)
{
    j = json{{"nodes_visited", s.nodes_visited}, {"nodes_skipped", s.nodes_skipped},
             {"internal_evaluated", s.internal_evaluated}, {"internal_screened", s.internal_screened},
             {"leaves_evaluated", s.leaves_evaluated}, {"leaves_screened", s.leaves_screened},
             {"uncovered_kept", s.uncovered_kept}};
}

/// Summary of a fit; the coefficients themselves go to a matrix file.
inline json fit_summary(const FitResult& r, const GroupStructure& gs)
{
    return json{{"objective", r.objective()}, {"iterations", r.iterations}, {"converged", r.converged},
                {"screen_time_ms", r.screen_time_ms}, {"solve_time_ms", r.solve_time_ms},
                {"total_time_ms", r.total_time_ms()}, {"survivor_groups", r.survivor.penalty_group_count(gs)},
                {"survivor_coefficients", r.survivor.coefficient_count()},
                {"gradient_map_norm", r.gradient_map_norm}, {"prox_residual", r.prox_residual},
                {"lipschitz", r.lipschitz}, {"fallback_steps", r.fallback_steps},
                {"objective_trace", r.objective_trace}, {"screening", r.survivor.stats}};
}

/**
 * Grid file:
 *   {"axis": "lambda", "values": [...], "replicates": 10, "methods": ["higt", "no_screen"],
 *    "lambda": 0.05, "scale_lambda_by_n": true, "warm_repeat": true, "workers": 1,
 *    "fixed": {simulation config}, "solver": {...}, "tree": {...}}
 */
inline void from_json(const json& j, BenchGrid& g)
{
    detail::reject_unknown(j, {"axis", "values", "replicates", "methods", "lambda", "scale_lambda_by_n",
                               "warm_repeat", "workers", "fixed", "solver", "tree"}, "bench grid");
    if (auto it = j.find("axis"); it != j.end()) g.axis = parse_axis(it->get<std::string>());
    detail::get_opt(j, "values", g.values);
    detail::get_opt(j, "replicates", g.replicates);
    if (auto it = j.find("methods"); it != j.end()) {
        g.methods.clear();
        for (const auto& m : *it) g.methods.push_back(parse_method(m.get<std::string>()));
    }
    detail::get_opt(j, "lambda", g.lambda);
    detail::get_opt(j, "scale_lambda_by_n", g.scale_lambda_by_n);
    detail::get_opt(j, "warm_repeat", g.warm_repeat);
    detail::get_opt(j, "workers", g.workers);
    detail::get_opt(j, "fixed", g.fixed);
    detail::get_opt(j, "solver", g.solver);
    detail::get_opt(j, "tree", g.tree);
    g.validate();
}

inline void to_json(json& j, const BenchGrid& g)
{
    json methods = json::array();
    for (auto m : g.methods) methods.push_back(to_string(m));
    j = json{{"axis", to_string(g.axis)}, {"values", g.values}, {"replicates", g.replicates},
             {"methods", methods}, {"lambda", g.lambda}, {"scale_lambda_by_n", g.scale_lambda_by_n},
             {"warm_repeat", g.warm_repeat}, {"workers", g.workers}, {"fixed", g.fixed},
             {"solver", g.solver}, {"tree", g.tree}};
}

inline json read_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

template <class T>
T read_config(const std::string& path)
{
    try {
        return read_json(path).get<T>();
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

} // namespace higt
