#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ctrlcmp/comfort.hpp"
#include "ctrlcmp/datamodel.hpp"
#include "ctrlcmp/ingest.hpp"

namespace ctrlcmp {

/// An (OAT, response) scatter in time order. Keeping time order matters:
/// residual series derived from it feed the moving block bootstrap.
struct ScatterData {
    std::vector<double> x;
    std::vector<double> y;

    std::size_t size() const { return x.size(); }
    Interval x_range() const;
    std::size_t distinct_x() const;
};

ScatterData energy_scatter(const ControllerDataset& d);
ScatterData comfort_scatter(const ComfortSeries& s);
ScatterData pooled_scatter(const ScatterData& a, const ScatterData& b);

/// Local linear regression with the Epanechnikov kernel on a fixed x-design.
///
/// The estimate at t is the intercept of the weighted least-squares fit of
/// y ~ b0 + b1 (x - t), which is linear in y: fit(t) = sum_i w_i(t) y_i. The
/// effective weights depend only on the design, t, and the bandwidth, so they
/// can be cached (see SmootherPlan) and reused across bootstrap replicates.
///
/// Sparse neighborhoods widen the bandwidth locally: if fewer than
/// kMinWindowPoints points fall in the kernel window, the bandwidth doubles
/// (at most kMaxWidenings times) until satisfied. Degenerate windows where
/// all x coincide fall back to the kernel-weighted mean.
class KernelDesign {
public:
    static constexpr std::uint32_t kNoExclude = UINT32_MAX;
    static constexpr int kMinWindowPoints = 5;
    static constexpr int kMaxWidenings = 6;

    explicit KernelDesign(std::span<const double> x);

    std::size_t size() const { return xs_.size(); }
    Interval x_range() const { return {xs_.front(), xs_.back()}; }

    struct EvalInfo {
        bool fallback = false;
        int widenings = 0;
    };

    /// Appends (original index, effective weight) pairs for the estimate at t.
    /// Throws DegenerateNeighborhood when widening cannot reach the minimum
    /// window population.
    EvalInfo weights_at(double t, double h, std::vector<std::pair<std::uint32_t, double>>& out,
                        std::uint32_t exclude = kNoExclude) const;

    double fit(std::span<const double> y, double t, double h,
               std::uint32_t exclude = kNoExclude) const;

private:
    std::vector<double> xs_;             // ascending
    std::vector<std::uint32_t> order_;   // xs_[k] == x[order_[k]]
};

/// Cached effective weights for a whole evaluation grid over one design and
/// bandwidth. apply() is a sparse matrix-vector product, bit-identical to
/// evaluating KernelDesign::fit at each grid point.
struct SmootherPlan {
    std::vector<double> grid;
    std::vector<std::size_t> row_start;   // grid.size() + 1 offsets
    std::vector<std::uint32_t> index;
    std::vector<double> weight;
    double bandwidth = 0.0;
    int fallback_rows = 0;
    int max_widenings = 0;

    void apply(std::span<const double> y, std::span<double> out) const;
    std::vector<double> apply(std::span<const double> y) const;
};

SmootherPlan build_plan(const KernelDesign& design, std::span<const double> grid, double h);

/// One-off local linear estimate at t with bandwidth h.
double local_linear_fit(const ScatterData& data, double t, double h);

/// Leave-one-out cross-validated bandwidth over a geometric grid of 20
/// candidates spanning [0.5 degF, range(x)/2]. Ties break toward the larger
/// (smoother) candidate. Deterministic for fixed data.
double select_bandwidth(const ScatterData& data);

/// cfg.bandwidth when set, otherwise select_bandwidth.
double resolve_bandwidth(const ScatterData& data, const AnalysisConfig& cfg);

std::vector<double> uniform_grid(const Interval& support, int points);

/// Smoothed characteristic on a uniform grid over the given support.
/// Comfort curves are floored at zero (violations cannot be negative).
CharacteristicCurve fit_characteristic(const ScatterData& data, const AnalysisConfig& cfg,
                                       const Interval& support, CurveKind kind);

}  // namespace ctrlcmp
