#include "ctrlcmp/smooth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ctrlcmp/errors.hpp"

namespace ctrlcmp {

Interval ScatterData::x_range() const {
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    return x.empty() ? Interval{} : Interval{*lo, *hi};
}

std::size_t ScatterData::distinct_x() const {
    std::vector<double> xs = x;
    std::sort(xs.begin(), xs.end());
    return static_cast<std::size_t>(std::unique(xs.begin(), xs.end()) - xs.begin());
}

ScatterData energy_scatter(const ControllerDataset& d) {
    ScatterData s;
    s.x.reserve(d.records.size());
    s.y.reserve(d.records.size());
    for (const auto& r : d.records) {
        s.x.push_back(r.oat);
        s.y.push_back(r.energy);
    }
    return s;
}

ScatterData comfort_scatter(const ComfortSeries& series) {
    return ScatterData{series.oat, series.values};
}

ScatterData pooled_scatter(const ScatterData& a, const ScatterData& b) {
    ScatterData s;
    s.x.reserve(a.size() + b.size());
    s.y.reserve(a.size() + b.size());
    s.x.insert(s.x.end(), a.x.begin(), a.x.end());
    s.x.insert(s.x.end(), b.x.begin(), b.x.end());
    s.y.insert(s.y.end(), a.y.begin(), a.y.end());
    s.y.insert(s.y.end(), b.y.begin(), b.y.end());
    return s;
}

KernelDesign::KernelDesign(std::span<const double> x) {
    order_.resize(x.size());
    std::iota(order_.begin(), order_.end(), 0u);
    std::stable_sort(order_.begin(), order_.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return x[a] < x[b]; });
    xs_.resize(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) xs_[k] = x[order_[k]];
}

KernelDesign::EvalInfo KernelDesign::weights_at(
    double t, double h, std::vector<std::pair<std::uint32_t, double>>& out,
    std::uint32_t exclude) const {
    if (!(h > 0.0)) throw StatError("smooth: bandwidth must be positive");
    out.clear();

    double h_eff = h;
    std::size_t lo = 0, hi = 0;
    std::size_t count = 0;
    int widenings = 0;
    for (;; ++widenings) {
        // Epanechnikov weight is positive iff |x - t| < h_eff, strictly.
        lo = static_cast<std::size_t>(
            std::upper_bound(xs_.begin(), xs_.end(), t - h_eff) - xs_.begin());
        hi = static_cast<std::size_t>(
            std::lower_bound(xs_.begin(), xs_.end(), t + h_eff) - xs_.begin());
        count = hi - lo;
        if (exclude != kNoExclude) {
            for (std::size_t k = lo; k < hi; ++k) {
                if (order_[k] == exclude) {
                    --count;
                    break;
                }
            }
        }
        if (count >= kMinWindowPoints) break;
        if (widenings >= kMaxWidenings) {
            throw DegenerateNeighborhood("smooth: only " + std::to_string(count) +
                                         " points near t=" + std::to_string(t) + " after " +
                                         std::to_string(widenings) + " widenings");
        }
        h_eff *= 2.0;
    }

    double s0 = 0.0, s1 = 0.0, s2 = 0.0;
    for (std::size_t k = lo; k < hi; ++k) {
        if (order_[k] == exclude) continue;
        const double u = xs_[k] - t;
        const double un = u / h_eff;
        const double w = 1.0 - un * un;
        s0 += w;
        s1 += w * u;
        s2 += w * u * u;
    }
    const double det = s0 * s2 - s1 * s1;

    EvalInfo info;
    info.widenings = widenings;
    // All in-window x equal (s2 == 0) or numerically singular: kernel-weighted mean.
    info.fallback = !(det > 1e-12 * s0 * s2);

    for (std::size_t k = lo; k < hi; ++k) {
        if (order_[k] == exclude) continue;
        const double u = xs_[k] - t;
        const double un = u / h_eff;
        const double w = 1.0 - un * un;
        const double eff = info.fallback ? w / s0 : w * (s2 - s1 * u) / det;
        out.emplace_back(order_[k], eff);
    }
    return info;
}

double KernelDesign::fit(std::span<const double> y, double t, double h,
                         std::uint32_t exclude) const {
    std::vector<std::pair<std::uint32_t, double>> row;
    weights_at(t, h, row, exclude);
    double v = 0.0;
    for (const auto& [i, w] : row) v += w * y[i];
    return v;
}

void SmootherPlan::apply(std::span<const double> y, std::span<double> out) const {
    for (std::size_t r = 0; r < grid.size(); ++r) {
        double v = 0.0;
        for (std::size_t k = row_start[r]; k < row_start[r + 1]; ++k) {
            v += weight[k] * y[index[k]];
        }
        out[r] = v;
    }
}

std::vector<double> SmootherPlan::apply(std::span<const double> y) const {
    std::vector<double> out(grid.size());
    apply(y, out);
    return out;
}

SmootherPlan build_plan(const KernelDesign& design, std::span<const double> grid, double h) {
    SmootherPlan plan;
    plan.grid.assign(grid.begin(), grid.end());
    plan.bandwidth = h;
    plan.row_start.reserve(grid.size() + 1);
    plan.row_start.push_back(0);
    std::vector<std::pair<std::uint32_t, double>> row;
    for (double t : grid) {
        try {
            const auto info = design.weights_at(t, h, row);
            if (info.fallback) ++plan.fallback_rows;
            plan.max_widenings = std::max(plan.max_widenings, info.widenings);
        } catch (const DegenerateNeighborhood&) {
            throw DegenerateNeighborhood("smooth: degenerate neighborhood at grid point t=" +
                                         std::to_string(t));
        }
        for (const auto& [i, w] : row) {
            plan.index.push_back(i);
            plan.weight.push_back(w);
        }
        plan.row_start.push_back(plan.index.size());
    }
    return plan;
}

double local_linear_fit(const ScatterData& data, double t, double h) {
    return KernelDesign(data.x).fit(data.y, t, h);
}

double select_bandwidth(const ScatterData& data) {
    if (data.distinct_x() < 10) {
        throw InsufficientData("smooth: need at least 10 distinct OAT values, have " +
                               std::to_string(data.distinct_x()));
    }
    const KernelDesign design(data.x);
    const double range = data.x_range().width();
    const double lo = 0.5;
    const double hi = std::max(range / 2.0, lo * 1.05);
    constexpr int kCandidates = 20;

    bool any_ok = false;
    double best_err = 0.0, best_h = 0.0;
    const double ratio = std::pow(hi / lo, 1.0 / (kCandidates - 1));
    double h = lo;
    for (int c = 0; c < kCandidates; ++c, h *= ratio) {
        double sse = 0.0;
        bool ok = true;
        for (std::size_t i = 0; i < data.size(); ++i) {
            try {
                const double pred = design.fit(data.y, data.x[i], h, static_cast<std::uint32_t>(i));
                const double d = data.y[i] - pred;
                sse += d * d;
            } catch (const DegenerateNeighborhood&) {
                ok = false;
                break;
            }
        }
        if (!ok || !std::isfinite(sse)) continue;
        // <= so that equal scores resolve toward the larger, smoother bandwidth
        if (!any_ok || sse <= best_err) {
            any_ok = true;
            best_err = sse;
            best_h = h;
        }
    }
    if (!any_ok) throw BandwidthFailure("smooth: every candidate bandwidth was degenerate");
    return best_h;
}

double resolve_bandwidth(const ScatterData& data, const AnalysisConfig& cfg) {
    return cfg.bandwidth ? *cfg.bandwidth : select_bandwidth(data);
}

std::vector<double> uniform_grid(const Interval& support, int points) {
    std::vector<double> grid(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        grid[static_cast<std::size_t>(i)] =
            support.lo + (support.hi - support.lo) * static_cast<double>(i) /
                             static_cast<double>(points - 1);
    }
    grid.back() = support.hi;
    return grid;
}

CharacteristicCurve fit_characteristic(const ScatterData& data, const AnalysisConfig& cfg,
                                       const Interval& support, CurveKind kind) {
    if (data.size() < 2) throw InsufficientData("smooth: scatter too small to fit");
    const Interval range = data.x_range();
    if (support.lo < range.lo || support.hi > range.hi) {
        throw DataError("smooth: requested support extends beyond the observed OAT range");
    }
    CharacteristicCurve curve;
    curve.kind = kind;
    curve.support = support;
    curve.bandwidth = resolve_bandwidth(data, cfg);
    curve.grid = uniform_grid(support, cfg.grid_points);

    const KernelDesign design(data.x);
    const auto plan = build_plan(design, curve.grid, curve.bandwidth);
    curve.values = plan.apply(data.y);
    if (kind == CurveKind::comfort) {
        for (double& v : curve.values) v = std::max(0.0, v);
    }
    for (std::size_t i = 0; i < curve.values.size(); ++i) {
        if (!std::isfinite(curve.values[i])) {
            throw StatError("smooth: non-finite curve value at t=" + std::to_string(curve.grid[i]));
        }
    }
    return curve;
}

}  // namespace ctrlcmp
