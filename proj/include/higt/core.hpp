#pragma once
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>
#include <Eigen/Dense>
#include <higt/errors.hpp>

namespace higt {

using index_t = Eigen::Index;
using mat_t = Eigen::MatrixXd;
using vec_t = Eigen::VectorXd;
using mask_t = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// K x J coefficient matrix: row k holds task k, column j holds input j.
using CoefficientMatrix = mat_t;

/**
 * Multi-task regression data.
 * X is J x N (inputs x samples) and Y is K x N (outputs x samples).
 * Samples live in columns so that B * X predicts Y directly.
 */
struct Dataset
{
    mat_t X;
    mat_t Y;

    Dataset() = default;
    Dataset(mat_t x, mat_t y)
        : X(std::move(x)), Y(std::move(y))
    {
        if (X.cols() != Y.cols()) {
            throw DimensionMismatch(
                "X has " + std::to_string(X.cols()) + " samples but Y has "
                + std::to_string(Y.cols()));
        }
        if (X.size() == 0 || Y.size() == 0) {
            throw DimensionMismatch("empty dataset");
        }
    }

    index_t n_samples() const { return X.cols(); }
    index_t n_inputs() const { return X.rows(); }
    index_t n_outputs() const { return Y.rows(); }
};

/// Element-wise (lambda1), input-group (lambda2) and output-group (lambda3) strengths.
struct RegParams
{
    double lambda1 = 0;
    double lambda2 = 0;
    double lambda3 = 0;

    RegParams() = default;
    RegParams(double l1, double l2, double l3)
        : lambda1(l1), lambda2(l2), lambda3(l3)
    {
        validate();
    }

    static RegParams uniform(double lmda) { return {lmda, lmda, lmda}; }

    RegParams scaled(double c) const { return {lambda1 * c, lambda2 * c, lambda3 * c}; }

    void validate() const
    {
        if (!(lambda1 >= 0 && lambda2 >= 0 && lambda3 >= 0)) {
            throw Error("regularization strengths must be nonnegative");
        }
    }
};

using IndexGroup = std::vector<index_t>;

/**
 * Overlapping input groups (sets of columns of B) and output groups
 * (sets of rows of B), with their weights.
 *
 * Indices are 0-based internally; the group file format is 1-based.
 * An empty element_weights matrix means every element weight is 1.
 */
struct GroupStructure
{
    std::vector<IndexGroup> input_groups;
    std::vector<IndexGroup> output_groups;
    std::vector<double> input_weights;
    std::vector<double> output_weights;
    mat_t element_weights;
    std::vector<std::string> input_labels;
    std::vector<std::string> output_labels;

    GroupStructure() = default;

    /// Groups with all weights equal to 1.
    GroupStructure(std::vector<IndexGroup> inputs, std::vector<IndexGroup> outputs)
        : input_groups(std::move(inputs)),
          output_groups(std::move(outputs)),
          input_weights(input_groups.size(), 1.0),
          output_weights(output_groups.size(), 1.0)
    {}

    std::size_t n_input_groups() const { return input_groups.size(); }
    std::size_t n_output_groups() const { return output_groups.size(); }

    double element_weight(index_t k, index_t j) const
    {
        return element_weights.size() == 0 ? 1.0 : element_weights(k, j);
    }

    /// Throws InvalidGroups / DimensionMismatch if inconsistent with a K x J coefficient matrix.
    void validate(index_t K, index_t J) const
    {
        auto check = [](const std::vector<IndexGroup>& groups, index_t bound, const char* what) {
            for (std::size_t i = 0; i < groups.size(); ++i) {
                if (groups[i].empty()) {
                    throw InvalidGroups(std::string(what) + " group " + std::to_string(i) + " is empty");
                }
                for (auto idx : groups[i]) {
                    if (idx < 0 || idx >= bound) {
                        throw InvalidGroups(
                            std::string(what) + " group " + std::to_string(i)
                            + " has out-of-range index " + std::to_string(idx));
                    }
                }
            }
        };
        check(input_groups, J, "input");
        check(output_groups, K, "output");
        if (input_weights.size() != input_groups.size()
            || output_weights.size() != output_groups.size()) {
            throw InvalidGroups("group weight count does not match group count");
        }
        for (double w : input_weights) {
            if (!(w > 0)) throw InvalidGroups("input group weights must be positive");
        }
        for (double w : output_weights) {
            if (!(w > 0)) throw InvalidGroups("output group weights must be positive");
        }
        if (element_weights.size() != 0) {
            if (element_weights.rows() != K || element_weights.cols() != J) {
                throw DimensionMismatch("element weights must be K x J");
            }
            if (!(element_weights.array() > 0).all()) {
                throw InvalidGroups("element weights must be positive");
            }
        }
    }
};

/// Per-row affine maps applied by standardize(); data = (raw - mean) / scale.
struct StandardizationFactors
{
    vec_t x_mean;
    vec_t x_scale;
    vec_t y_mean;
    vec_t y_scale;
};

namespace detail {

inline void standardize_rows(mat_t& M, vec_t& mean, vec_t& scale, const char* name)
{
    const double n = static_cast<double>(M.cols());
    mean = M.rowwise().mean();
    M.colwise() -= mean;
    scale.resize(M.rows());
    for (index_t r = 0; r < M.rows(); ++r) {
        // population (1/N) convention: ||row||^2 == N afterwards
        const double var = M.row(r).squaredNorm() / n;
        if (!(var >= 1e-12)) throw ConstantRow(static_cast<std::size_t>(r), name);
        scale[r] = std::sqrt(var);
        M.row(r) /= scale[r];
    }
}

inline void check_dims(const CoefficientMatrix& B, const Dataset& ds)
{
    if (B.rows() != ds.n_outputs() || B.cols() != ds.n_inputs()) {
        throw DimensionMismatch(
            "B is " + std::to_string(B.rows()) + "x" + std::to_string(B.cols())
            + ", expected " + std::to_string(ds.n_outputs()) + "x" + std::to_string(ds.n_inputs()));
    }
}

} // namespace detail

/// Center every row of X and Y and scale it to unit population variance.
inline Dataset standardize(const Dataset& raw, StandardizationFactors* factors = nullptr)
{
    Dataset out = raw;
    StandardizationFactors f;
    detail::standardize_rows(out.X, f.x_mean, f.x_scale, "X");
    detail::standardize_rows(out.Y, f.y_mean, f.y_scale, "Y");
    if (factors) *factors = std::move(f);
    return out;
}

/**
 * lambda1 * sum w|b| + lambda2 * sum_k sum_m rho_m ||B(k, g_m)||
 *                    + lambda3 * sum_j sum_o nu_o  ||B(h_o, j)||
 */
inline double penalty(const CoefficientMatrix& B, const GroupStructure& gs, const RegParams& rp)
{
    gs.validate(B.rows(), B.cols());
    double l1 = 0;
    if (gs.element_weights.size() == 0) {
        l1 = B.cwiseAbs().sum();
    } else {
        l1 = (gs.element_weights.array() * B.array().abs()).sum();
    }

    double in = 0;
    for (std::size_t m = 0; m < gs.input_groups.size(); ++m) {
        const auto& g = gs.input_groups[m];
        for (index_t k = 0; k < B.rows(); ++k) {
            double sq = 0;
            for (auto j : g) sq += B(k, j) * B(k, j);
            in += gs.input_weights[m] * std::sqrt(sq);
        }
    }

    double out = 0;
    for (std::size_t o = 0; o < gs.output_groups.size(); ++o) {
        const auto& h = gs.output_groups[o];
        for (index_t j = 0; j < B.cols(); ++j) {
            double sq = 0;
            for (auto k : h) sq += B(k, j) * B(k, j);
            out += gs.output_weights[o] * std::sqrt(sq);
        }
    }
    return rp.lambda1 * l1 + rp.lambda2 * in + rp.lambda3 * out;
}

/// 0.5 * ||Y - B X||_F^2
inline double loss(const CoefficientMatrix& B, const Dataset& ds)
{
    detail::check_dims(B, ds);
    return 0.5 * (ds.Y - B * ds.X).squaredNorm();
}

inline double objective(
    const CoefficientMatrix& B, const Dataset& ds, const GroupStructure& gs, const RegParams& rp)
{
    return loss(B, ds) + penalty(B, gs, rp);
}

/// Gradient of the squared loss: (B X - Y) X^T.
inline mat_t smooth_gradient(const CoefficientMatrix& B, const Dataset& ds)
{
    detail::check_dims(B, ds);
    const mat_t resid = B * ds.X - ds.Y;
    return resid * ds.X.transpose();
}

} // namespace higt
