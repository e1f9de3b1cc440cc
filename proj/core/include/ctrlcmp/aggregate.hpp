#pragma once

#include <array>
#include <optional>
#include <span>

#include "ctrlcmp/datamodel.hpp"
#include "ctrlcmp/ingest.hpp"

namespace ctrlcmp {

/// Uniform OAT weighting for the daily aggregate. Pooled mode integrates the
/// curve once over the full common support; hourly mode keeps one interval per
/// hour of day, built from the OATs observed at that local hour in either
/// dataset and clipped to the common support. Hours with no usable interval
/// stay empty and raise EmptyIntervalError when integrated.
struct OatDistribution {
    OatDistributionMode mode = OatDistributionMode::pooled_uniform;
    Interval pooled;
    std::array<std::optional<Interval>, 24> hourly;
};

OatDistribution make_oat_distribution(OatDistributionMode mode, const ControllerDataset& d1,
                                      const ControllerDataset& d2, const Interval& common_support);

/// Mean of a gridded curve over [a, b]: the trapezoidal integral on the
/// curve's grid restricted to [a, b] with interpolated endpoints, divided by
/// b - a. Exact for curves that are affine between grid points.
double average_over(std::span<const double> grid, std::span<const double> values,
                    const Interval& interval);

/// E_g for one hour: the curve averaged over an OAT interval.
double hourly_average(const CharacteristicCurve& curve, const Interval& interval);

double daily_total_grid(std::span<const double> grid, std::span<const double> values,
                        const OatDistribution& dist);

/// E_day (or C_day): 24x the pooled average, or the sum of the 24 per-hour
/// averages, depending on the distribution mode.
double daily_total(const CharacteristicCurve& curve, const OatDistribution& dist);

}  // namespace ctrlcmp
