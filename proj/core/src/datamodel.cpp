#include "ctrlcmp/datamodel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

namespace ctrlcmp {

namespace {

// Days since 1970-01-01 for a proleptic Gregorian date (Howard Hinnant's
// days_from_civil).
std::int64_t days_from_civil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const auto yoe = static_cast<unsigned>(y - era * 400);                  // [0, 399]
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;    // [0, 365]
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;             // [0, 146096]
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const auto doe = static_cast<unsigned>(z - era * 146097);               // [0, 146096]
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t yy = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);           // [0, 365]
    const unsigned mp = (5 * doy + 2) / 153;                                // [0, 11]
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y = static_cast<int>(yy + (m <= 2));
}

bool parse_fixed_uint(std::string_view text, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > text.size()) return false;
    int value = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
        const char c = text[i];
        if (c < '0' || c > '9') return false;
        value = value * 10 + (c - '0');
    }
    out = value;
    return true;
}

constexpr int days_in_month(int y, int m) {
    constexpr int table[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    if (m == 2) {
        const bool leap = (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
        return leap ? 29 : 28;
    }
    return table[m - 1];
}

}  // namespace

std::optional<Timestamp> parse_timestamp(std::string_view text) {
    // YYYY-MM-DDThh:mm:ss followed by Z or +-hh:mm
    if (text.size() < 20) return std::nullopt;
    int year, month, day, hour, minute, second;
    if (!parse_fixed_uint(text, 0, 4, year) || text[4] != '-' ||
        !parse_fixed_uint(text, 5, 2, month) || text[7] != '-' ||
        !parse_fixed_uint(text, 8, 2, day) || text[10] != 'T' ||
        !parse_fixed_uint(text, 11, 2, hour) || text[13] != ':' ||
        !parse_fixed_uint(text, 14, 2, minute) || text[16] != ':' ||
        !parse_fixed_uint(text, 17, 2, second)) {
        return std::nullopt;
    }
    if (month < 1 || month > 12 || day < 1 || day > days_in_month(year, month) || hour > 23 ||
        minute > 59 || second > 60) {
        return std::nullopt;
    }
    std::int32_t offset_min = 0;
    const std::string_view tail = text.substr(19);
    if (tail == "Z") {
        offset_min = 0;
    } else if (tail.size() == 6 && (tail[0] == '+' || tail[0] == '-') && tail[3] == ':') {
        int oh, om;
        if (!parse_fixed_uint(tail, 1, 2, oh) || !parse_fixed_uint(tail, 4, 2, om)) {
            return std::nullopt;
        }
        if (oh > 23 || om > 59) return std::nullopt;
        offset_min = static_cast<std::int32_t>(oh * 60 + om);
        if (tail[0] == '-') offset_min = -offset_min;
    } else {
        return std::nullopt;
    }
    Timestamp ts;
    ts.offset_min = offset_min;
    const std::int64_t days = days_from_civil(year, static_cast<unsigned>(month),
                                              static_cast<unsigned>(day));
    const std::int64_t local_sec = days * 86400 + hour * 3600 + minute * 60 + second;
    ts.epoch_sec = local_sec - static_cast<std::int64_t>(offset_min) * 60;
    return ts;
}

std::string format_timestamp(const Timestamp& ts) {
    const std::int64_t local = ts.epoch_sec + static_cast<std::int64_t>(ts.offset_min) * 60;
    std::int64_t days = local / 86400;
    std::int64_t rem = local % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    int y;
    unsigned m, d;
    civil_from_days(days, y, m, d);
    const int hour = static_cast<int>(rem / 3600);
    const int minute = static_cast<int>((rem % 3600) / 60);
    const int second = static_cast<int>(rem % 60);

    char buf[32];
    auto two = [](char* p, int v) {
        p[0] = static_cast<char>('0' + v / 10);
        p[1] = static_cast<char>('0' + v % 10);
    };
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d", y, m, d, hour, minute, second);
    std::string out(buf);
    if (ts.offset_min == 0) {
        out += 'Z';
    } else {
        const int off = std::abs(ts.offset_min);
        char tail[7] = {ts.offset_min < 0 ? '-' : '+', 0, 0, ':', 0, 0, 0};
        two(tail + 1, off / 60);
        two(tail + 4, off % 60);
        out += tail;
    }
    return out;
}

Interval ControllerDataset::oat_support() const {
    Interval s{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& r : records) {
        s.lo = std::min(s.lo, r.oat);
        s.hi = std::max(s.hi, r.oat);
    }
    return s;
}

std::string_view to_string(ViolationRule rule) {
    switch (rule) {
        case ViolationRule::NegativeEnergy: return "NegativeEnergy";
        case ViolationRule::NonFiniteEnergy: return "NonFiniteEnergy";
        case ViolationRule::NonFiniteOat: return "NonFiniteOat";
        case ViolationRule::ZoneCountMismatch: return "ZoneCountMismatch";
        case ViolationRule::NegativeBand: return "NegativeBand";
        case ViolationRule::NonFiniteZoneField: return "NonFiniteZoneField";
        case ViolationRule::NonMonotonicTime: return "NonMonotonicTime";
        case ViolationRule::InsufficientRecords: return "InsufficientRecords";
    }
    return "Unknown";
}

std::string Violation::describe() const {
    std::string out{to_string(rule)};
    if (index >= 0) out += "@" + std::to_string(index);
    if (!detail.empty()) out += " (" + detail + ")";
    return out;
}

std::vector<Violation> validate_dataset(const ControllerDataset& d, int min_records) {
    std::vector<Violation> out;
    if (d.records.size() < static_cast<std::size_t>(std::max(0, min_records))) {
        out.push_back({-1, ViolationRule::InsufficientRecords,
                       "N=" + std::to_string(d.records.size()) + " < " +
                           std::to_string(min_records)});
    }
    for (std::size_t i = 0; i < d.records.size(); ++i) {
        const auto& r = d.records[i];
        const auto idx = static_cast<std::ptrdiff_t>(i);
        if (!std::isfinite(r.energy)) {
            out.push_back({idx, ViolationRule::NonFiniteEnergy, {}});
        } else if (r.energy < 0.0) {
            out.push_back({idx, ViolationRule::NegativeEnergy, {}});
        }
        if (!std::isfinite(r.oat)) out.push_back({idx, ViolationRule::NonFiniteOat, {}});
        if (r.zones.size() != static_cast<std::size_t>(d.zone_count)) {
            out.push_back({idx, ViolationRule::ZoneCountMismatch,
                           std::to_string(r.zones.size()) + " zones, expected " +
                               std::to_string(d.zone_count)});
        }
        for (std::size_t j = 0; j < r.zones.size(); ++j) {
            const auto& z = r.zones[j];
            if (!std::isfinite(z.temp) || !std::isfinite(z.setpoint) || !std::isfinite(z.band)) {
                out.push_back({idx, ViolationRule::NonFiniteZoneField, "zone " + std::to_string(j + 1)});
            } else if (z.band < 0.0) {
                out.push_back({idx, ViolationRule::NegativeBand, "zone " + std::to_string(j + 1)});
            }
        }
        if (i > 0 && d.records[i - 1].timestamp.epoch_sec >= r.timestamp.epoch_sec) {
            out.push_back({idx, ViolationRule::NonMonotonicTime, {}});
        }
    }
    return out;
}

GapStats dataset_gaps(const ControllerDataset& d) {
    GapStats stats;
    if (d.records.size() < 2) return stats;
    for (std::size_t i = 1; i < d.records.size(); ++i) {
        if (d.records[i].timestamp.epoch_sec - d.records[i - 1].timestamp.epoch_sec > 3600) {
            ++stats.gap_count;
        }
    }
    const auto span_hours =
        (d.records.back().timestamp.epoch_sec - d.records.front().timestamp.epoch_sec) / 3600 + 1;
    if (span_hours > 0) {
        stats.missing_fraction =
            1.0 - static_cast<double>(d.records.size()) / static_cast<double>(span_hours);
        stats.missing_fraction = std::max(0.0, stats.missing_fraction);
    }
    return stats;
}

namespace {

// Per-zone, per-local-hour summary of the comfort band schedule. The two
// controllers run on different dates, so schedules are fingerprinted by
// hour-of-day rather than by raw record alignment.
struct BandBucket {
    std::size_t count = 0;
    double min = std::numeric_limits<double>::infinity();
    double max = -std::numeric_limits<double>::infinity();
    double sum = 0.0;

    double mean() const { return count ? sum / static_cast<double>(count) : 0.0; }
};

std::vector<std::array<BandBucket, 24>> band_fingerprint(const ControllerDataset& d) {
    std::vector<std::array<BandBucket, 24>> buckets(
        static_cast<std::size_t>(std::max(0, d.zone_count)));
    for (const auto& r : d.records) {
        const int h = r.timestamp.local_hour();
        for (std::size_t j = 0; j < r.zones.size() && j < buckets.size(); ++j) {
            auto& b = buckets[j][static_cast<std::size_t>(h)];
            ++b.count;
            b.min = std::min(b.min, r.zones[j].band);
            b.max = std::max(b.max, r.zones[j].band);
            b.sum += r.zones[j].band;
        }
    }
    return buckets;
}

}  // namespace

ComparabilityResult check_comparability(const ControllerDataset& d1, const ControllerDataset& d2,
                                        const ComparabilityOptions& opts) {
    ComparabilityResult res;
    if (d1.zone_count != d2.zone_count) {
        res.incomparable_configs = true;
        res.issues.push_back("zone counts differ: " + std::to_string(d1.zone_count) + " vs " +
                             std::to_string(d2.zone_count));
    } else {
        const auto f1 = band_fingerprint(d1);
        const auto f2 = band_fingerprint(d2);
        for (std::size_t j = 0; j < f1.size(); ++j) {
            for (int h = 0; h < 24; ++h) {
                const auto& a = f1[j][static_cast<std::size_t>(h)];
                const auto& b = f2[j][static_cast<std::size_t>(h)];
                if (a.count == 0 || b.count == 0) continue;  // no common evidence at this hour
                if (std::abs(a.min - b.min) > opts.band_tolerance ||
                    std::abs(a.max - b.max) > opts.band_tolerance ||
                    std::abs(a.mean() - b.mean()) > opts.band_tolerance) {
                    res.incomparable_configs = true;
                    res.issues.push_back("band schedule differs for zone " + std::to_string(j + 1) +
                                         " at local hour " + std::to_string(h));
                }
            }
        }
    }

    res.common_support = intersect(d1.oat_support(), d2.oat_support());
    if (res.common_support.empty() || res.common_support.width() < opts.min_overlap) {
        res.insufficient_overlap = true;
        res.issues.push_back("common OAT support narrower than " +
                             std::to_string(opts.min_overlap) + " degF");
    }
    res.pass = !res.incomparable_configs && !res.insufficient_overlap;
    return res;
}

std::string_view to_string(CurveKind kind) {
    return kind == CurveKind::energy ? "energy" : "comfort";
}

double CharacteristicCurve::value_at(double t) const {
    if (grid.empty()) return 0.0;
    if (t <= grid.front()) return values.front();
    if (t >= grid.back()) return values.back();
    const auto it = std::upper_bound(grid.begin(), grid.end(), t);
    const auto i = static_cast<std::size_t>(it - grid.begin());
    const double x0 = grid[i - 1], x1 = grid[i];
    const double w = (t - x0) / (x1 - x0);
    return values[i - 1] + w * (values[i] - values[i - 1]);
}

}  // namespace ctrlcmp
