#pragma once

#include <span>
#include <vector>

#include "ctrlcmp/aggregate.hpp"
#include "ctrlcmp/datamodel.hpp"
#include "ctrlcmp/ingest.hpp"
#include "ctrlcmp/rng.hpp"
#include "ctrlcmp/smooth.hpp"

namespace ctrlcmp {

/// Draws ceil(N / l) contiguous blocks of length l with uniformly random
/// start points (with replacement), concatenates them, and truncates to N.
/// With l = N this is the identity; with l = 1 it is an iid resample.
std::vector<double> moving_block_resample(std::span<const double> series, int block_length,
                                          rng::Stream& stream);
void moving_block_resample_into(std::span<const double> series, int block_length,
                                rng::Stream& stream, std::vector<double>& out);

/// min(1, m * p) for m simultaneous hypotheses.
std::vector<double> bonferroni_adjust(std::span<const double> p_values);

/// Sets p_adjusted = min(1, m * p_raw) across the given tests and refreshes
/// each significance decision against its own alpha.
void apply_bonferroni(std::span<TestResult*> family);

/// The shared-curve null: one characteristic fit on the concatenated scatter
/// of both controllers, plus each controller's residuals around it in time
/// order. Block-resampling those residuals and adding them back onto the
/// pooled curve generates data satisfying "both controllers share one
/// characteristic" while keeping each controller's OAT design fixed.
struct NullModel {
    double pooled_bandwidth = 0.0;
    std::vector<double> fitted1, fitted2;       // pooled curve at each design point
    std::vector<double> residuals1, residuals2; // time order
};

NullModel fit_null_model(const ScatterData& s1, const ScatterData& s2, const AnalysisConfig& cfg,
                         CurveKind kind);

/// Both null-hypothesis tests for one metric family, computed from one set of
/// bootstrap replicates (identical streams would be drawn if they were run
/// separately, so sharing changes nothing).
struct PairTestResult {
    TestResult curve_equality;
    TestResult daily_difference;
    double daily_observed = 0.0;  // D_obs, controller 2 minus controller 1
};

PairTestResult run_pair_tests(const ScatterData& s1, const ScatterData& s2,
                              const AnalysisConfig& cfg, const OatDistribution& dist,
                              const Interval& common_support, CurveKind kind,
                              unsigned workers = 1);

TestResult curve_equality_test(const ScatterData& s1, const ScatterData& s2,
                               const AnalysisConfig& cfg, const Interval& common_support,
                               CurveKind kind = CurveKind::energy, unsigned workers = 1);

TestResult daily_difference_test(const ScatterData& s1, const ScatterData& s2,
                                 const AnalysisConfig& cfg, const OatDistribution& dist,
                                 CurveKind kind = CurveKind::energy, unsigned workers = 1);

/// Bias-corrected percentile endpoints from a bootstrap sample. If the
/// median-bias count is 0 or B the normal quantile diverges; the interval
/// falls back to the plain percentile form and flags the overflow.
struct BcEndpoints {
    double lower = 0.0;
    double upper = 0.0;
    double z0 = 0.0;
    bool bias_overflow = false;
};

BcEndpoints bc_endpoints(std::span<const double> bootstrap_sample, double observed, double beta);

/// Confidence interval for the daily difference, bootstrapping under the
/// alternative: residuals around each controller's own fitted curve.
/// Call only after the daily-difference test came out significant.
IntervalEstimate bc_confidence_interval(const ScatterData& s1, const ScatterData& s2,
                                        const AnalysisConfig& cfg, const OatDistribution& dist,
                                        const Interval& common_support, CurveKind kind,
                                        unsigned workers = 1);

}  // namespace ctrlcmp
