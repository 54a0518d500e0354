#pragma once

#include "pctmi/estimator.hpp"
#include "pctmi/series.hpp"

#include <optional>
#include <vector>

namespace pctmi {

struct SearchBounds {
    int lambda_max = 5;
    int gamma_max = 5;
    std::size_t min_samples = 50;
};

/// Optimal window/gap configuration of a pair and the conditional MI reached there.
struct CtmiResult {
    double value = 0.0;
    int lambda_pq = 1;
    int lambda_qp = 1;
    int gamma_pq = 0;
    std::optional<double> p_value;
    std::size_t n_eff = 0;

    WindowConfig config() const { return {lambda_pq, lambda_qp, gamma_pq}; }
    /// The same result seen from the reversed pair (q, p).
    CtmiResult reversed() const;
};

struct CondCtmiResult {
    double value = 0.0;
    std::vector<int> cond_gaps;     ///< relative to the time of p's window, in time units
    std::vector<int> cond_windows;
    std::optional<double> p_value;
    std::size_t n_eff = 0;
};

/// Estimated I(X_t^(p;lambda_pq); X_{t+gamma}^(q;lambda_qp) | X^(p;1)_{t-1}, X^(q;1)_{t+gamma-1}).
double evaluate_config(const TimeSeries& p, const TimeSeries& q, const WindowConfig& config, const KnnParams& knn,
                       std::size_t min_samples = 50);

/// Maximises evaluate_config over compatible_configs. Estimates within 1e-12 of each other are
/// resolved towards the smallest lambda_pq + lambda_qp, then the smallest |gamma|, then positive
/// gamma. The search always runs on the name-ordered pair, so ctmi(q, p) == ctmi(p, q).reversed().
/// When perm is given, p_value is the permutation test at the optimum.
CtmiResult ctmi(const TimeSeries& p, const TimeSeries& q, const SearchBounds& bounds = {}, const KnnParams& knn = {},
                const std::optional<PermutationParams>& perm = std::nullopt);

/// Smallest admissible conditioning gap for a pair whose optimal gap is gamma:
/// max(1, sgn(gamma) * |gamma + 1|).
int min_conditioning_gap(int gamma);

/// Minimises the conditional MI of the pair, with its configuration frozen at base, over each
/// conditioner's (window, gap). Conditioners are optimised one at a time for two sweeps, in name order.
/// Throws InfeasibleConditioningError when no admissible gap yields enough rows.
CondCtmiResult cond_ctmi(const TimeSeries& p, const TimeSeries& q, const CtmiResult& base,
                         const std::vector<const TimeSeries*>& conditioners, const SearchBounds& bounds = {},
                         const KnnParams& knn = {}, const std::optional<PermutationParams>& perm = std::nullopt);

/// Permutation p-value of the conditional test at the optimum found by cond_ctmi. Runs in the same
/// orientation as the search, so the result does not depend on the argument order of p and q.
double cond_ctmi_p_value(const TimeSeries& p, const TimeSeries& q, const CtmiResult& base,
                         const std::vector<const TimeSeries*>& conditioners, const CondCtmiResult& optimum,
                         const SearchBounds& bounds, const KnnParams& knn, const PermutationParams& perm);

/// Samples for I(p;q | conditioners) at the given (window, gap) per conditioner, pair frozen at base.
JointSampleSet conditional_samples(const TimeSeries& p, const TimeSeries& q, const CtmiResult& base,
                                   const std::vector<Conditioner>& conditioners, std::size_t min_samples);

}  // namespace pctmi
