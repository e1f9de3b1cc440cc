#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ctrlcmp/aggregate.hpp"
#include "ctrlcmp/datamodel.hpp"
#include "ctrlcmp/infer.hpp"
#include "ctrlcmp/ingest.hpp"

namespace ctrlcmp {

/// Full output of one controller comparison: both characteristic pairs, the
/// four hypothesis tests (energy curve/daily, comfort curve/daily), daily
/// differences, and intervals for the significant ones.
struct ComparisonReport {
    AnalysisConfig config;
    std::string label1, label2;
    Interval common_support;

    CharacteristicCurve energy1, energy2;
    CharacteristicCurve comfort1, comfort2;

    TestResult energy_curve_equality;
    TestResult energy_daily_difference;
    TestResult comfort_curve_equality;
    TestResult comfort_daily_difference;

    double delta_energy_day = 0.0;   // kWh/day, controller 2 minus controller 1
    double delta_comfort_day = 0.0;  // degF-h/day

    std::optional<IntervalEstimate> energy_interval;   // present iff significant
    std::optional<IntervalEstimate> comfort_interval;

    std::vector<std::string> warnings;
};

/// Validate -> comparability -> comfort series -> fits -> tests -> intervals.
/// Throws DataError subclasses for input problems and StatError subclasses
/// for statistical failures. Deterministic for a fixed config seed,
/// regardless of worker count.
ComparisonReport run_comparison(const ControllerDataset& d1, const ControllerDataset& d2,
                                const AnalysisConfig& cfg, unsigned workers = 1);

}  // namespace ctrlcmp
