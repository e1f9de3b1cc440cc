#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ctrlcmp/mathutil.hpp"

namespace ctrlcmp {

/// A calendar hour. Stored as UTC seconds since the Unix epoch plus the
/// original UTC offset; hour-of-day binning must happen in building local
/// time, so the offset is kept alongside.
struct Timestamp {
    std::int64_t epoch_sec = 0;  // UTC
    std::int32_t offset_min = 0; // minutes east of UTC, as written in the source

    /// Hour of day (0..23) in building local time.
    int local_hour() const {
        const std::int64_t local = epoch_sec + static_cast<std::int64_t>(offset_min) * 60;
        std::int64_t h = local / 3600;
        if (local % 3600 != 0 && local < 0) --h;
        return static_cast<int>(((h % 24) + 24) % 24);
    }

    bool operator==(const Timestamp&) const = default;
};

/// Strict ISO 8601 "YYYY-MM-DDThh:mm:ss" with a mandatory offset
/// (Z or +-hh:mm). Returns nullopt on any deviation.
std::optional<Timestamp> parse_timestamp(std::string_view text);
std::string format_timestamp(const Timestamp& ts);

struct ZoneSample {
    double temp = 0.0;      // average zone temperature over the hour, degF
    double setpoint = 0.0;  // average set point over the hour, degF
    double band = 0.0;      // comfort half-width, degF

    bool operator==(const ZoneSample&) const = default;
};

struct HourlyRecord {
    Timestamp timestamp;
    double oat = 0.0;     // outside air temperature, degF
    double energy = 0.0;  // energy consumed over the hour, kWh
    std::vector<ZoneSample> zones;

    bool operator==(const HourlyRecord&) const = default;
};

/// All measurements for one controller, time-ordered. Immutable by
/// convention after construction; safe to share across readers.
struct ControllerDataset {
    std::string label;
    int zone_count = 0;
    std::vector<HourlyRecord> records;

    std::size_t size() const { return records.size(); }
    /// Observed OAT support [min, max].
    Interval oat_support() const;

    bool operator==(const ControllerDataset&) const = default;
};

enum class ViolationRule {
    NegativeEnergy,
    NonFiniteEnergy,
    NonFiniteOat,
    ZoneCountMismatch,
    NegativeBand,
    NonFiniteZoneField,
    NonMonotonicTime,
    InsufficientRecords,
};

std::string_view to_string(ViolationRule rule);

/// One broken invariant. index is the offending record, or -1 for
/// dataset-level rules.
struct Violation {
    std::ptrdiff_t index = -1;
    ViolationRule rule;
    std::string detail;

    std::string describe() const;
};

inline constexpr int kDefaultMinRecords = 72;

/// Checks every type invariant; returns an empty list iff the dataset is
/// well formed. Pure and idempotent.
std::vector<Violation> validate_dataset(const ControllerDataset& d,
                                        int min_records = kDefaultMinRecords);

/// Missing-hour telemetry: gaps are permitted but flagged.
struct GapStats {
    std::size_t gap_count = 0;        // adjacent pairs more than one hour apart
    double missing_fraction = 0.0;    // 1 - N / hours spanned
};
GapStats dataset_gaps(const ControllerDataset& d);

struct ComparabilityOptions {
    double band_tolerance = 0.01;  // degF
    double min_overlap = 5.0;      // degF
};

/// Outcome of the equal-comfort-configuration check. The decision is
/// symmetric in the two datasets.
struct ComparabilityResult {
    bool pass = false;
    bool incomparable_configs = false;
    bool insufficient_overlap = false;
    Interval common_support;
    std::vector<std::string> issues;
};

/// Passes iff zone counts match, the per-zone band schedules agree by
/// hour-of-day fingerprint within tolerance, and the common OAT support is
/// wide enough. Band schedules are compared by hour-of-day because the two
/// controllers run on different calendar days.
ComparabilityResult check_comparability(const ControllerDataset& d1, const ControllerDataset& d2,
                                        const ComparabilityOptions& opts = {});

enum class CurveKind { energy, comfort };

std::string_view to_string(CurveKind kind);

/// A smoothed characteristic estimate on an evaluation grid.
/// kWh per hour for energy curves, degF-hours per hour for comfort curves.
struct CharacteristicCurve {
    std::vector<double> grid;    // ascending evaluation temperatures, degF
    std::vector<double> values;  // estimate at each grid point
    double bandwidth = 0.0;      // kernel bandwidth, degF
    Interval support;            // evaluation support
    CurveKind kind = CurveKind::energy;

    /// Linear interpolation inside the grid; grid must be ascending.
    double value_at(double t) const;
};

/// One hypothesis test outcome. block_length holds the resolved block length
/// for each controller's residual series (they differ when the series lengths
/// do and the block length is on automatic).
struct TestResult {
    double statistic = 0.0;
    double p_raw = 1.0;
    double p_adjusted = 1.0;
    bool significant = false;
    double alpha = 0.0;
    int replicates = 0;
    std::array<int, 2> block_length = {0, 0};
    int discarded = 0;
};

/// Bootstrap confidence interval for a daily difference.
struct IntervalEstimate {
    double estimate = 0.0;  // kWh/day for energy, degF-h/day for comfort
    double level = 0.0;     // beta
    double lower = 0.0;
    double upper = 0.0;
    std::string method;  // "bias-corrected percentile", or "percentile" after bias overflow
    bool estimate_outside_bounds = false;
    bool bias_overflow = false;
};

}  // namespace ctrlcmp
