#include "ctrlcmp/aggregate.hpp"

#include <algorithm>
#include <cmath>

#include "ctrlcmp/errors.hpp"

namespace ctrlcmp {

namespace {

double interpolate(std::span<const double> grid, std::span<const double> values, double t) {
    if (t <= grid.front()) return values.front();
    if (t >= grid.back()) return values.back();
    const auto it = std::upper_bound(grid.begin(), grid.end(), t);
    const auto i = static_cast<std::size_t>(it - grid.begin());
    const double w = (t - grid[i - 1]) / (grid[i] - grid[i - 1]);
    return values[i - 1] + w * (values[i] - values[i - 1]);
}

}  // namespace

OatDistribution make_oat_distribution(OatDistributionMode mode, const ControllerDataset& d1,
                                      const ControllerDataset& d2,
                                      const Interval& common_support) {
    OatDistribution dist;
    dist.mode = mode;
    dist.pooled = common_support;
    if (mode == OatDistributionMode::hourly_uniform) {
        std::array<Interval, 24> raw;
        std::array<bool, 24> seen{};
        for (const auto* d : {&d1, &d2}) {
            for (const auto& r : d->records) {
                const auto h = static_cast<std::size_t>(r.timestamp.local_hour());
                if (!seen[h]) {
                    raw[h] = {r.oat, r.oat};
                    seen[h] = true;
                } else {
                    raw[h].lo = std::min(raw[h].lo, r.oat);
                    raw[h].hi = std::max(raw[h].hi, r.oat);
                }
            }
        }
        for (std::size_t h = 0; h < 24; ++h) {
            if (!seen[h]) continue;
            const Interval clipped = intersect(raw[h], common_support);
            if (!clipped.empty()) dist.hourly[h] = clipped;
        }
    }
    return dist;
}

double average_over(std::span<const double> grid, std::span<const double> values,
                    const Interval& interval) {
    if (!(interval.lo < interval.hi)) {
        throw EmptyIntervalError("aggregate: empty interval [" + std::to_string(interval.lo) +
                                 ", " + std::to_string(interval.hi) + "]");
    }
    if (interval.lo < grid.front() || interval.hi > grid.back()) {
        throw DataError("aggregate: interval extends beyond the curve support");
    }
    // Knots: a, interior grid points, b. Trapezoid over consecutive knots.
    double integral = 0.0;
    double prev_t = interval.lo;
    double prev_v = interpolate(grid, values, interval.lo);
    const auto begin = std::upper_bound(grid.begin(), grid.end(), interval.lo);
    for (auto it = begin; it != grid.end() && *it < interval.hi; ++it) {
        const auto i = static_cast<std::size_t>(it - grid.begin());
        integral += 0.5 * (values[i] + prev_v) * (*it - prev_t);
        prev_t = *it;
        prev_v = values[i];
    }
    const double end_v = interpolate(grid, values, interval.hi);
    integral += 0.5 * (end_v + prev_v) * (interval.hi - prev_t);
    return integral / (interval.hi - interval.lo);
}

double hourly_average(const CharacteristicCurve& curve, const Interval& interval) {
    return average_over(curve.grid, curve.values, interval);
}

double daily_total_grid(std::span<const double> grid, std::span<const double> values,
                        const OatDistribution& dist) {
    if (dist.mode == OatDistributionMode::pooled_uniform) {
        return 24.0 * average_over(grid, values, dist.pooled);
    }
    double total = 0.0;
    for (std::size_t h = 0; h < 24; ++h) {
        if (!dist.hourly[h]) {
            throw EmptyIntervalError("aggregate: no OAT interval for local hour " +
                                     std::to_string(h));
        }
        total += average_over(grid, values, *dist.hourly[h]);
    }
    return total;
}

double daily_total(const CharacteristicCurve& curve, const OatDistribution& dist) {
    return daily_total_grid(curve.grid, curve.values, dist);
}

}  // namespace ctrlcmp
