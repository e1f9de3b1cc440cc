#include "ctrlcmp/pipeline.hpp"

#include <cmath>

#include "ctrlcmp/comfort.hpp"
#include "ctrlcmp/errors.hpp"
#include "ctrlcmp/smooth.hpp"

namespace ctrlcmp {

namespace {

void require_valid(const ControllerDataset& d, int min_records) {
    const auto violations = validate_dataset(d, min_records);
    if (violations.empty()) return;
    std::string msg = "datamodel: dataset '" + d.label + "' failed validation:";
    const std::size_t shown = std::min<std::size_t>(violations.size(), 5);
    for (std::size_t i = 0; i < shown; ++i) msg += " " + violations[i].describe();
    if (violations.size() > shown) {
        msg += " (+" + std::to_string(violations.size() - shown) + " more)";
    }
    throw DataError(msg);
}

void gap_warning(const ControllerDataset& d, std::vector<std::string>& warnings) {
    const GapStats gaps = dataset_gaps(d);
    if (gaps.missing_fraction > 0.20) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "dataset '%s' is missing %.1f%% of hours in its span",
                      d.label.c_str(), 100.0 * gaps.missing_fraction);
        warnings.emplace_back(buf);
    } else if (gaps.gap_count > 0) {
        warnings.push_back("dataset '" + d.label + "' has " + std::to_string(gaps.gap_count) +
                           " gaps; bootstrap blocks span the observed sequence");
    }
}

}  // namespace

ComparisonReport run_comparison(const ControllerDataset& d1, const ControllerDataset& d2,
                                const AnalysisConfig& cfg, unsigned workers) {
    cfg.validate();
    require_valid(d1, cfg.min_records);
    require_valid(d2, cfg.min_records);

    ComparisonReport report;
    report.config = cfg;
    report.label1 = d1.label;
    report.label2 = d2.label;
    gap_warning(d1, report.warnings);
    gap_warning(d2, report.warnings);

    const ComparabilityResult comp =
        check_comparability(d1, d2, {.band_tolerance = 0.01, .min_overlap = cfg.min_overlap});
    if (comp.incomparable_configs) {
        std::string msg = "datamodel: comfort configurations are not comparable:";
        for (const auto& issue : comp.issues) msg += " " + issue + ";";
        throw IncomparableConfigs(msg);
    }
    if (comp.insufficient_overlap) {
        throw InsufficientOverlap("datamodel: " + comp.issues.back());
    }
    report.common_support = comp.common_support;

    const ComfortSeries series1 = comfort_series(d1);
    const ComfortSeries series2 = comfort_series(d2);
    const ScatterData energy1 = energy_scatter(d1);
    const ScatterData energy2 = energy_scatter(d2);
    const ScatterData comfort1 = comfort_scatter(series1);
    const ScatterData comfort2 = comfort_scatter(series2);

    // Report curves cover each controller's own observed support; the tests
    // run on the common support where both are defined.
    report.energy1 = fit_characteristic(energy1, cfg, energy1.x_range(), CurveKind::energy);
    report.energy2 = fit_characteristic(energy2, cfg, energy2.x_range(), CurveKind::energy);
    report.comfort1 = fit_characteristic(comfort1, cfg, comfort1.x_range(), CurveKind::comfort);
    report.comfort2 = fit_characteristic(comfort2, cfg, comfort2.x_range(), CurveKind::comfort);

    const OatDistribution dist =
        make_oat_distribution(cfg.oat_distribution, d1, d2, comp.common_support);

    PairTestResult energy_tests = run_pair_tests(energy1, energy2, cfg, dist,
                                                 comp.common_support, CurveKind::energy, workers);
    PairTestResult comfort_tests = run_pair_tests(
        comfort1, comfort2, cfg, dist, comp.common_support, CurveKind::comfort, workers);

    if (cfg.bonferroni_scope == BonferroniScope::per_family) {
        TestResult* energy_family[] = {&energy_tests.curve_equality,
                                       &energy_tests.daily_difference};
        TestResult* comfort_family[] = {&comfort_tests.curve_equality,
                                        &comfort_tests.daily_difference};
        apply_bonferroni(energy_family);
        apply_bonferroni(comfort_family);
    } else {
        TestResult* all[] = {&energy_tests.curve_equality, &energy_tests.daily_difference,
                             &comfort_tests.curve_equality, &comfort_tests.daily_difference};
        apply_bonferroni(all);
    }

    report.energy_curve_equality = energy_tests.curve_equality;
    report.energy_daily_difference = energy_tests.daily_difference;
    report.comfort_curve_equality = comfort_tests.curve_equality;
    report.comfort_daily_difference = comfort_tests.daily_difference;
    report.delta_energy_day = energy_tests.daily_observed;
    report.delta_comfort_day = comfort_tests.daily_observed;

    for (const auto* t : {&report.energy_curve_equality, &report.energy_daily_difference,
                          &report.comfort_curve_equality, &report.comfort_daily_difference}) {
        if (t->discarded > 0) {
            report.warnings.push_back("a test discarded " + std::to_string(t->discarded) +
                                      " bootstrap replicates");
            break;
        }
    }

    if (report.energy_daily_difference.significant) {
        report.energy_interval = bc_confidence_interval(energy1, energy2, cfg, dist,
                                                        comp.common_support, CurveKind::energy,
                                                        workers);
    }
    if (report.comfort_daily_difference.significant) {
        report.comfort_interval = bc_confidence_interval(comfort1, comfort2, cfg, dist,
                                                         comp.common_support, CurveKind::comfort,
                                                         workers);
    }
    for (const auto& iv : {report.energy_interval, report.comfort_interval}) {
        if (iv && iv->bias_overflow) {
            report.warnings.push_back(
                "bias correction overflowed; interval fell back to plain percentile");
        }
        if (iv && iv->estimate_outside_bounds) {
            report.warnings.push_back("interval does not contain the point estimate");
        }
    }
    return report;
}

}  // namespace ctrlcmp
