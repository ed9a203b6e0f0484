#pragma once
#include <chrono>
#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <vector>
#include <higt/core.hpp>
#include <higt/prox.hpp>
#include <higt/screening.hpp>
#include <higt/tree.hpp>

namespace higt {

enum class StepRule { fixed_lipschitz, backtracking };

struct SolverConfig
{
    int max_outer_iters = 2000;
    double rel_obj_tol = 1e-8;
    int inner_prox_iters = 100;
    double inner_prox_tol = 1e-10;
    StepRule step_rule = StepRule::backtracking;

    void validate() const
    {
        if (max_outer_iters <= 0 || inner_prox_iters <= 0) throw Error("iteration limits must be positive");
        if (!(rel_obj_tol > 0) || !(inner_prox_tol > 0)) throw Error("tolerances must be positive");
    }
};

struct FitResult
{
    CoefficientMatrix B;
    std::vector<double> objective_trace;
    int iterations = 0;
    bool converged = false;
    double screen_time_ms = 0;
    double solve_time_ms = 0;
    SurvivorSet survivor;

    double lipschitz = 0;
    double gradient_map_norm = 0;
    double prox_residual = 0;
    int fallback_steps = 0;

    double objective() const { return objective_trace.empty() ? 0.0 : objective_trace.back(); }
    double total_time_ms() const { return screen_time_ms + solve_time_ms; }
};

namespace detail {

using clock_t_ = std::chrono::steady_clock;

inline double ms_since(clock_t_::time_point t0)
{
    return std::chrono::duration<double, std::milli>(clock_t_::now() - t0).count();
}

} // namespace detail

/// Largest eigenvalue of X X^T by power iteration.
inline double estimate_lipschitz(const mat_t& X, int max_iters = 100, double tol = 1e-6)
{
    if (X.rows() == 0) return 0;
    vec_t v = vec_t::Ones(X.rows()).normalized();
    double lmda = 0;
    for (int it = 0; it < max_iters; ++it) {
        vec_t w = X * (X.transpose() * v);
        const double next = w.norm();
        if (next == 0) return 0;
        v = w / next;
        const bool done = std::abs(next - lmda) <= tol * next;
        lmda = next;
        if (done) break;
    }
    return lmda;
}

/**
 * Accelerated proximal gradient on the coefficients in survivor.coefficients;
 * every other coefficient stays exactly 0. The restricted penalty keeps each
 * group term that touches a surviving coefficient, so the objective trace is
 * the full problem's objective.
 *
 * The trace is monotone: an accelerated step that does not decrease the
 * objective is replaced by a plain proximal step from the current iterate
 * and the momentum is restarted.
 */
inline FitResult solve_restricted(
    const Dataset& ds,
    const GroupStructure& gs,
    const RegParams& rp,
    const SurvivorSet& survivor,
    const SolverConfig& cfg = {},
    const CoefficientMatrix* warm_start = nullptr)
{
    cfg.validate();
    rp.validate();
    const index_t K = ds.n_outputs();
    const index_t J = ds.n_inputs();
    gs.validate(K, J);
    if (survivor.coefficients.rows() != K || survivor.coefficients.cols() != J) {
        throw DimensionMismatch("survivor mask must be K x J");
    }
    if (warm_start) detail::check_dims(*warm_start, ds);

    const auto t0 = detail::clock_t_::now();
    FitResult res;
    res.survivor = survivor;
    res.B = mat_t::Zero(K, J);

    std::vector<index_t> cols;
    for (index_t j = 0; j < J; ++j) {
        if (survivor.coefficients.col(j).any()) cols.push_back(j);
    }
    const index_t Ja = static_cast<index_t>(cols.size());
    if (Ja == 0) {
        res.objective_trace.push_back(0.5 * ds.Y.squaredNorm());
        res.converged = true;
        res.solve_time_ms = detail::ms_since(t0);
        return res;
    }

    mat_t Xa(Ja, ds.n_samples());
    mask_t free(K, Ja);
    for (index_t a = 0; a < Ja; ++a) {
        Xa.row(a) = ds.X.row(cols[a]);
        free.col(a) = survivor.coefficients.col(cols[a]);
    }
    auto prox = make_restricted_prox(gs, rp, K, J, cols, free);
    const mat_t& Y = ds.Y;

    auto as_cvec = [](const mat_t& M) { return Eigen::Map<const vec_t>(M.data(), M.size()); };

    auto penalty_of = [&](const mat_t& P) { return prox.penalty(as_cvec(P)); };

    mat_t B = mat_t::Zero(K, Ja);
    if (warm_start) {
        for (index_t a = 0; a < Ja; ++a) {
            for (index_t k = 0; k < K; ++k) B(k, a) = free(k, a) ? (*warm_start)(k, cols[a]) : 0.0;
        }
    }
    mat_t BX = B * Xa;
    double F = 0.5 * (BX - Y).squaredNorm() + penalty_of(B);
    if (!std::isfinite(F)) throw NonFiniteObjective("initial objective is not finite");
    res.objective_trace.push_back(F);

    double L = 0;
    if (cfg.step_rule == StepRule::fixed_lipschitz) {
        // power iteration approaches from below
        L = 1.01 * estimate_lipschitz(Xa);
    } else {
        for (index_t a = 0; a < Ja; ++a) L = std::max(L, Xa.row(a).squaredNorm());
    }
    if (!(L > 0)) L = 1;

    mat_t Bprev = B, BprevX = BX;
    mat_t Z, ZX, G, P, PX;
    vec_t v, pz;

    // prox-gradient step from (Z, ZX); fills P, PX and returns F(P)
    auto step_from = [&](const mat_t& Zp, const mat_t& ZpX) {
        const mat_t R = ZpX - Y;
        const double fz = 0.5 * R.squaredNorm();
        G.noalias() = R * Xa.transpose();
        while (true) {
            const mat_t Vm = Zp - G / L;
            v = as_cvec(Vm);
            const auto rep = prox.apply(v, 1.0 / L, pz, cfg.inner_prox_iters, cfg.inner_prox_tol);
            res.prox_residual = rep.residual;
            P = Eigen::Map<const mat_t>(pz.data(), K, Ja);
            PX.noalias() = P * Xa;
            const double fp = 0.5 * (PX - Y).squaredNorm();
            const mat_t D = P - Zp;
            const double model = fz + (G.array() * D.array()).sum() + 0.5 * L * D.squaredNorm();
            if (cfg.step_rule == StepRule::fixed_lipschitz
                || fp <= model + 1e-12 * std::max(1.0, std::abs(fz))) {
                res.gradient_map_norm = L * D.norm();
                const double val = fp + penalty_of(P);
                if (!std::isfinite(val)) throw NonFiniteObjective("objective became non-finite");
                return val;
            }
            L *= 2;
            if (!std::isfinite(L)) throw NonFiniteObjective("step size underflow in backtracking");
        }
    };

    // FISTA with monotone restart
    double t_cur = 1;
    Z = B;
    ZX = BX;
    res.iterations = 0;
    for (int it = 1; it <= cfg.max_outer_iters; ++it) {
        res.iterations = it;
        double Fp = step_from(Z, ZX);
        if (!(Fp <= F)) {
            ++res.fallback_steps;
            t_cur = 1;
            Fp = step_from(B, BX);
            if (!(Fp <= F)) {
                // no descent possible at the current accuracy
                res.converged = true;
                res.objective_trace.push_back(F);
                break;
            }
        }
        Bprev.swap(B);
        BprevX.swap(BX);
        B = P;
        BX = PX;
        const double Fold = F;
        F = Fp;
        res.objective_trace.push_back(F);

        const double t_next = 0.5 * (1 + std::sqrt(1 + 4 * t_cur * t_cur));
        const double mom = (t_cur - 1) / t_next;
        t_cur = t_next;
        Z = B + mom * (B - Bprev);
        ZX = BX + mom * (BX - BprevX);

        const double denom = std::max({std::abs(Fold), std::abs(F), std::numeric_limits<double>::min()});
        if ((Fold - F) / denom < cfg.rel_obj_tol) {
            res.converged = true;
            break;
        }
    }

    res.lipschitz = L;
    for (index_t a = 0; a < Ja; ++a) res.B.col(cols[a]) = B.col(a);
    res.solve_time_ms = detail::ms_since(t0);
    return res;
}

/// No-screening baseline: the restricted solver over every coefficient.
inline FitResult solve_full(
    const Dataset& ds, const GroupStructure& gs, const RegParams& rp, const SolverConfig& cfg = {},
    const CoefficientMatrix* warm_start = nullptr)
{
    return solve_restricted(ds, gs, rp, SurvivorSet::all(gs, ds.n_outputs(), ds.n_inputs()), cfg, warm_start);
}

/// Screen with the group tree, then solve on the survivors.
inline FitResult fit(
    const Dataset& ds,
    const GroupStructure& gs,
    const RegParams& rp,
    const TreeConfig& tree_cfg = {},
    const SolverConfig& cfg = {},
    const CoefficientMatrix* warm_start = nullptr)
{
    const auto t0 = detail::clock_t_::now();
    const auto tree = build_tree(gs, tree_cfg);
    const mat_t C = precompute_correlation(ds);
    auto survivor = screen(tree, C, gs, rp);
    const double screen_ms = detail::ms_since(t0);

    auto res = solve_restricted(ds, gs, rp, survivor, cfg, warm_start);
    res.screen_time_ms = screen_ms;
    return res;
}

/**
 * Post-solve audit of the screened coefficients. One full proximal-gradient
 * step is taken from the fitted B over the unrestricted problem; B is optimal
 * iff it is a fixed point, so a screened coefficient that moves away from 0
 * marks a violated optimality condition.
 */
struct KktAudit
{
    std::size_t violating_coefficients = 0;
    std::size_t violating_blocks = 0;
    double max_violation = 0;
};

inline KktAudit audit_screening(
    const Dataset& ds,
    const GroupStructure& gs,
    const RegParams& rp,
    const FitResult& fitted,
    double tol = 1e-6)
{
    const index_t K = ds.n_outputs();
    const index_t J = ds.n_inputs();
    const double L = 1.01 * estimate_lipschitz(ds.X);
    KktAudit audit;
    if (!(L > 0)) return audit;

    const mat_t G = smooth_gradient(fitted.B, ds);
    ProxConfig pc;
    pc.inner_prox_iters = 2000;
    pc.inner_prox_tol = 1e-12;
    const mat_t P = prox_penalty(fitted.B - G / L, 1.0 / L, gs, rp, pc);

    mask_t bad = mask_t::Constant(K, J, false);
    const double scale = 1.0 + fitted.B.cwiseAbs().maxCoeff();
    for (index_t j = 0; j < J; ++j) {
        for (index_t k = 0; k < K; ++k) {
            if (fitted.survivor.coefficients(k, j)) continue;
            const double moved = std::abs(P(k, j));
            if (moved > tol * scale) {
                bad(k, j) = true;
                ++audit.violating_coefficients;
                audit.max_violation = std::max(audit.max_violation, moved);
            }
        }
    }
    if (audit.violating_coefficients == 0) return audit;

    std::set<std::pair<std::size_t, std::size_t>> kept(fitted.survivor.blocks.begin(), fitted.survivor.blocks.end());
    for (std::size_t m = 0; m < gs.n_input_groups(); ++m) {
        for (std::size_t o = 0; o < gs.n_output_groups(); ++o) {
            if (kept.count({o, m})) continue;
            bool any = false;
            for (auto k : gs.output_groups[o]) {
                for (auto j : gs.input_groups[m]) any = any || bad(k, j);
            }
            audit.violating_blocks += any;
        }
    }
    return audit;
}

} // namespace higt
