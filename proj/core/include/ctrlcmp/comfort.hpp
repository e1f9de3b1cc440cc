#pragma once

#include <vector>

#include "ctrlcmp/datamodel.hpp"

namespace ctrlcmp {

/// (x)_+ : zero below zero, identity above.
inline double soft_threshold(double x) { return x < 0.0 ? 0.0 : x; }

/// Hourly comfort violations C[i] paired with the OAT at which they occurred,
/// in record order. Units degF-hours per hour; always nonnegative.
struct ComfortSeries {
    std::vector<double> values;
    std::vector<double> oat;

    std::size_t size() const { return values.size(); }
};

/// Zone-averaged degree-hours outside the band of comfort for one hour:
/// (1/Z) * sum_j (|T_j - S_j| - B_j)_+, with the hourly mean temperature
/// standing in for the within-hour integral.
double hourly_comfort(const HourlyRecord& record, int zone_count);

ComfortSeries comfort_series(const ControllerDataset& d);

}  // namespace ctrlcmp
