#pragma once
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>
#include <higt/core.hpp>

namespace higt {

/**
 * Proximal map of
 *
 *     sum_i a_i |z_i| + sum_t w_t ||z_{S_t}||_2
 *
 * over a flat coordinate vector, where the index sets S_t may overlap.
 * The l1 part is applied first by soft-thresholding (exact for absolute
 * group norms), then the group part is solved on its dual,
 *
 *     min_{||xi_t|| <= step * w_t}  1/2 || u - sum_t xi_t ||^2,
 *
 * by cyclic block-coordinate ascent: each block update is an exact
 * projection onto a ball. The primal solution is z = u - sum_t xi_t.
 *
 * Dual iterates are kept between calls (normalized by step * w_t) and reused
 * as the starting point of the next call.
 */
class OverlappingGroupProx
{
public:
    struct Report
    {
        int sweeps = 0;
        double residual = 0;
        bool converged = true;
    };

    OverlappingGroupProx() = default;

    /**
     * @param   l1_weights  per-coordinate l1 strength (lambda1 * w).
     * @param   free        per-coordinate flag; non-free coordinates are pinned at 0.
     * @param   term_ptr    CSR offsets into term_idx, size n_terms + 1.
     * @param   term_idx    coordinates of each group term.
     * @param   term_weight strength of each group term (lambda * group weight).
     */
    OverlappingGroupProx(
        vec_t l1_weights,
        std::vector<std::uint8_t> free,
        std::vector<std::size_t> term_ptr,
        std::vector<index_t> term_idx,
        std::vector<double> term_weight)
        : l1_(std::move(l1_weights)),
          free_(std::move(free)),
          ptr_(std::move(term_ptr)),
          idx_(std::move(term_idx)),
          w_(std::move(term_weight)),
          dual_(vec_t::Zero(static_cast<index_t>(idx_.size())))
    {}

    index_t dim() const { return l1_.size(); }
    std::size_t n_terms() const { return w_.size(); }

    /// Value of the penalty (without step) at z.
    double penalty(const vec_t& z) const
    {
        double v = (l1_.array() * z.array().abs()).sum();
        for (std::size_t t = 0; t < w_.size(); ++t) {
            double sq = 0;
            for (auto p = ptr_[t]; p < ptr_[t + 1]; ++p) sq += z[idx_[p]] * z[idx_[p]];
            v += w_[t] * std::sqrt(sq);
        }
        return v;
    }

    void reset_dual() { dual_.setZero(); }

    /// z <- argmin 1/2 ||z - v||^2 + step * penalty(z)
    Report apply(const vec_t& v, double step, vec_t& z, int max_sweeps, double tol)
    {
        const index_t n = dim();
        z.resize(n);
        for (index_t i = 0; i < n; ++i) {
            if (!free_[i]) {
                z[i] = 0;
                continue;
            }
            const double a = std::abs(v[i]) - step * l1_[i];
            z[i] = a > 0 ? std::copysign(a, v[i]) : 0.0;
        }

        Report rep;
        if (w_.empty()) return rep;

        radius_.resize(w_.size());
        for (std::size_t t = 0; t < w_.size(); ++t) radius_[t] = step * w_[t];

        // warm start: z = u - sum_t xi_t with xi_t = radius_t * dual_t
        for (std::size_t t = 0; t < w_.size(); ++t) {
            for (auto p = ptr_[t]; p < ptr_[t + 1]; ++p) z[idx_[p]] -= radius_[t] * dual_[p];
        }

        rep.converged = false;
        for (rep.sweeps = 1; rep.sweeps <= max_sweeps; ++rep.sweeps) {
            double max_change = 0;
            for (std::size_t t = 0; t < w_.size(); ++t) {
                const double r = radius_[t];
                // block residual without this term's dual: z_S + xi_t
                double sq = 0;
                for (auto p = ptr_[t]; p < ptr_[t + 1]; ++p) {
                    const double q = z[idx_[p]] + r * dual_[p];
                    sq += q * q;
                }
                const double norm = std::sqrt(sq);
                const double scale = norm > r ? r / norm : 1.0;

                double change_sq = 0;
                for (auto p = ptr_[t]; p < ptr_[t + 1]; ++p) {
                    const double old_xi = r * dual_[p];
                    const double q = z[idx_[p]] + old_xi;
                    const double new_xi = scale * q;
                    z[idx_[p]] = q - new_xi;
                    dual_[p] = r > 0 ? new_xi / r : 0.0;
                    change_sq += (new_xi - old_xi) * (new_xi - old_xi);
                }
                max_change = std::max(max_change, std::sqrt(change_sq));
            }
            rep.residual = max_change;
            if (max_change <= tol) {
                rep.converged = true;
                break;
            }
        }
        rep.sweeps = std::min(rep.sweeps, max_sweeps);
        return rep;
    }

private:
    vec_t l1_;
    std::vector<std::uint8_t> free_;
    std::vector<std::size_t> ptr_;
    std::vector<index_t> idx_;
    std::vector<double> w_;
    vec_t dual_;
    std::vector<double> radius_;
};

/**
 * Builds the restricted prox over the coefficients B(:, cols) whose free mask
 * is set. Coordinates are column-major over K x cols.size(). Every group term
 * that touches a free coordinate is kept, restricted to the free coordinates,
 * so the restricted penalty equals the full penalty for any B supported on
 * the free set.
 */
template <class FreeMask>
inline OverlappingGroupProx make_restricted_prox(
    const GroupStructure& gs,
    const RegParams& rp,
    index_t K,
    index_t J,
    const std::vector<index_t>& cols,
    const FreeMask& free_mask)
{
    const index_t Ja = static_cast<index_t>(cols.size());
    std::vector<index_t> pos(J, -1);
    for (index_t a = 0; a < Ja; ++a) pos[cols[a]] = a;

    vec_t l1(K * Ja);
    std::vector<std::uint8_t> free(K * Ja, 0);
    for (index_t a = 0; a < Ja; ++a) {
        for (index_t k = 0; k < K; ++k) {
            l1[k + K * a] = rp.lambda1 * gs.element_weight(k, cols[a]);
            free[k + K * a] = free_mask(k, a) ? 1 : 0;
        }
    }

    std::vector<std::size_t> ptr{0};
    std::vector<index_t> idx;
    std::vector<double> w;
    auto close_term = [&](double weight) {
        if (idx.size() > ptr.back() && weight > 0) {
            ptr.push_back(idx.size());
            w.push_back(weight);
        } else {
            idx.resize(ptr.back());
        }
    };

    for (std::size_t m = 0; m < gs.n_input_groups(); ++m) {
        for (index_t k = 0; k < K; ++k) {
            for (auto j : gs.input_groups[m]) {
                const index_t a = pos[j];
                if (a >= 0 && free[k + K * a]) idx.push_back(k + K * a);
            }
            close_term(rp.lambda2 * gs.input_weights[m]);
        }
    }
    for (std::size_t o = 0; o < gs.n_output_groups(); ++o) {
        for (index_t a = 0; a < Ja; ++a) {
            for (auto k : gs.output_groups[o]) {
                if (free[k + K * a]) idx.push_back(k + K * a);
            }
            close_term(rp.lambda3 * gs.output_weights[o]);
        }
    }
    return OverlappingGroupProx(std::move(l1), std::move(free), std::move(ptr), std::move(idx), std::move(w));
}

struct ProxConfig
{
    int inner_prox_iters = 100;
    double inner_prox_tol = 1e-10;
};

/// argmin_Z 1/2 ||Z - V||_F^2 + step * penalty(Z) over the full K x J matrix.
inline mat_t prox_penalty(
    const mat_t& V,
    double step,
    const GroupStructure& gs,
    const RegParams& rp,
    const ProxConfig& cfg = {},
    OverlappingGroupProx::Report* report = nullptr)
{
    if (!(step > 0)) throw Error("prox step must be positive");
    const index_t K = V.rows();
    const index_t J = V.cols();
    gs.validate(K, J);
    std::vector<index_t> cols(J);
    for (index_t j = 0; j < J; ++j) cols[j] = j;
    const mask_t all = mask_t::Constant(K, J, true);
    auto prox = make_restricted_prox(gs, rp, K, J, cols, all);

    const vec_t v = Eigen::Map<const vec_t>(V.data(), V.size());
    vec_t z;
    const auto rep = prox.apply(v, step, z, cfg.inner_prox_iters, cfg.inner_prox_tol);
    if (report) *report = rep;
    return Eigen::Map<const mat_t>(z.data(), K, J);
}

} // namespace higt
