#pragma once
#include <cmath>
#include <vector>
#include <higt/core.hpp>

namespace higt {

struct RecoveryScore
{
    double precision = 0;
    double recall = 0;
    double f1 = 0;
    std::size_t true_positives = 0;
    std::size_t false_positives = 0;
    std::size_t false_negatives = 0;
    double threshold = 0;
};

inline constexpr double default_support_threshold = 1e-6;

inline double f1_score(double precision, double recall)
{
    return precision + recall > 0 ? 2 * precision * recall / (precision + recall) : 0.0;
}

/**
 * Support recovery of b_est against b_true. An estimate counts as nonzero iff
 * |b| > threshold. Precision is 0 when nothing is estimated nonzero and
 * recall is 0 when b_true is all zero.
 */
inline RecoveryScore score(const CoefficientMatrix& b_est, const CoefficientMatrix& b_true, double threshold = default_support_threshold)
{
    if (b_est.rows() != b_true.rows() || b_est.cols() != b_true.cols()) {
        throw DimensionMismatch("estimate and truth must have identical shape");
    }
    if (!(threshold >= 0)) throw Error("threshold must be nonnegative");

    RecoveryScore s;
    s.threshold = threshold;
    for (index_t j = 0; j < b_true.cols(); ++j) {
        for (index_t k = 0; k < b_true.rows(); ++k) {
            const bool est = std::abs(b_est(k, j)) > threshold;
            const bool truth = b_true(k, j) != 0;
            s.true_positives += est && truth;
            s.false_positives += est && !truth;
            s.false_negatives += !est && truth;
        }
    }
    const auto est_nz = s.true_positives + s.false_positives;
    const auto true_nz = s.true_positives + s.false_negatives;
    s.precision = est_nz ? static_cast<double>(s.true_positives) / est_nz : 0.0;
    s.recall = true_nz ? static_cast<double>(s.true_positives) / true_nz : 0.0;
    s.f1 = f1_score(s.precision, s.recall);
    return s;
}

/// Mean and sample standard deviation (sd = 0 for fewer than two values).
struct Summary
{
    double mean = 0;
    double sd = 0;
    std::size_t n = 0;
};

inline Summary summarize(const std::vector<double>& xs)
{
    Summary s;
    s.n = xs.size();
    if (xs.empty()) return s;
    for (double x : xs) s.mean += x;
    s.mean /= static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0;
        for (double x : xs) ss += (x - s.mean) * (x - s.mean);
        s.sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    }
    return s;
}

} // namespace higt
