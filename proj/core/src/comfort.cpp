#include "ctrlcmp/comfort.hpp"

#include <cmath>

namespace ctrlcmp {

double hourly_comfort(const HourlyRecord& record, int zone_count) {
    double total = 0.0;
    for (const auto& z : record.zones) {
        total += soft_threshold(std::abs(z.temp - z.setpoint) - z.band);
    }
    return zone_count > 0 ? total / static_cast<double>(zone_count) : 0.0;
}

ComfortSeries comfort_series(const ControllerDataset& d) {
    ComfortSeries s;
    s.values.reserve(d.records.size());
    s.oat.reserve(d.records.size());
    for (const auto& r : d.records) {
        s.values.push_back(hourly_comfort(r, d.zone_count));
        s.oat.push_back(r.oat);
    }
    return s;
}

}  // namespace ctrlcmp
