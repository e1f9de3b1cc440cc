#pragma once

#include <filesystem>
#include <string>

#include "ctrlcmp/aggregate.hpp"
#include "ctrlcmp/datamodel.hpp"
#include "ctrlcmp/ingest.hpp"

namespace ctrlcmp {

/// Energy characteristic shape: a quadratic bowl with its minimum at the
/// heating/cooling switchover temperature and independent curvatures on the
/// heating (below) and cooling (above) sides.
struct PiecewiseQuadratic {
    double center = 55.0;  // degF
    double base = 50.0;    // kWh/h at the minimum
    double below = 0.15;   // kWh/h per degF^2, heating side
    double above = 0.12;   // cooling side

    double operator()(double t) const {
        const double d = t - center;
        return base + (d < 0.0 ? below : above) * d * d;
    }
    double integral(double a, double b) const;
    double average(const Interval& iv) const { return integral(iv.lo, iv.hi) / iv.width(); }
};

/// Comfort characteristic shape: flat in the comfortable middle, quadratic
/// rise beyond the two knees.
struct TailQuadratic {
    double base = 0.05;      // degF-h per hour
    double lo_knee = 50.0;   // degF
    double hi_knee = 70.0;
    double lo_quad = 0.002;  // per degF^2
    double hi_quad = 0.002;

    double operator()(double t) const {
        double v = base;
        if (t < lo_knee) {
            const double d = lo_knee - t;
            v += lo_quad * d * d;
        }
        if (t > hi_knee) {
            const double d = t - hi_knee;
            v += hi_quad * d * d;
        }
        return v;
    }
    double integral(double a, double b) const;
    double average(const Interval& iv) const { return integral(iv.lo, iv.hi) / iv.width(); }
};

struct SyntheticSpec {
    int n_hours = 2160;  // 90 days
    int zone_count = 2;
    std::uint64_t seed = 1;
    Timestamp start{1704096000, -480};  // 2024-01-01T00:00:00-08:00

    // OAT process: daily sinusoid plus AR(1) weather noise, clamped to range.
    double oat_min = 40.0, oat_max = 80.0;
    double oat_mean = 60.0, oat_amplitude = 10.0;
    double oat_peak_hour = 15.0;
    double oat_phi = 0.7, oat_sigma = 2.0;

    PiecewiseQuadratic energy;
    double energy_phi = 0.6, energy_sigma = 3.0;

    TailQuadratic comfort;
    double comfort_phi = 0.6, comfort_sigma = 0.05;

    double setpoint = 72.0, band = 1.0;

    void validate() const;  // throws ConfigError
};

/// Exact characteristics behind a generated dataset, with closed-form daily
/// aggregates. The comfort characteristic is stored in latent form (before
/// the nonnegativity of observed violations); comfort_observed applies the
/// censoring analytically.
struct GroundTruth {
    PiecewiseQuadratic energy;
    TailQuadratic comfort;
    double comfort_noise_sd = 0.0;  // stationary sd of the latent comfort noise

    double energy_day(const Interval& iv) const { return 24.0 * energy.average(iv); }
    double comfort_day_latent(const Interval& iv) const { return 24.0 * comfort.average(iv); }

    /// E[(c(T) + eps)_+] for stationary normal eps: what the fitted comfort
    /// characteristic actually estimates.
    double comfort_observed(double t) const;
    double comfort_day_observed(const Interval& iv) const;

    /// Daily aggregate of a true characteristic under the same OAT
    /// distribution the pipeline uses.
    double energy_day(const OatDistribution& dist) const;
    double comfort_day_observed(const OatDistribution& dist) const;
};

struct SynthResult {
    ControllerDataset dataset;
    GroundTruth truth;
    double energy_clip_rate = 0.0;  // share of hours clipped at zero energy
};

/// Deterministic per spec.seed: the same spec yields the same dataset.
SynthResult generate_dataset(const SyntheticSpec& spec);

/// Flat key=value file, same syntax as the analysis config.
SyntheticSpec parse_synth_spec(const std::filesystem::path& path);
SyntheticSpec parse_synth_spec_text(std::string_view text);

/// Ground-truth sidecar written next to generated CSVs.
void write_ground_truth_json(const SynthResult& result, const SyntheticSpec& spec,
                             const std::filesystem::path& path);

struct RatePair {
    double raw = 0.0;
    double adjusted = 0.0;
};

struct StudySummary {
    int trials = 0;
    RatePair energy_curve, energy_daily, comfort_curve, comfort_daily;  // rejection rates
    double energy_curve_floor = 0.0;  // share of trials with p_raw at the attainable floor
    double energy_daily_floor = 0.0;
    double energy_coverage = 0.0;   // CI coverage of the per-trial true delta
    double comfort_coverage = 0.0;
    double mean_delta_energy = 0.0;
    double mean_true_delta_energy = 0.0;
    double mean_delta_comfort = 0.0;
    double mean_true_delta_comfort = 0.0;
    int bias_overflows = 0;
};

std::string format_study_summary(const StudySummary& summary);

/// Runs the full comparison on `trials` freshly generated dataset pairs and
/// tallies rejection rates and confidence-interval coverage against the
/// closed-form ground truth. Deterministic per (cfg.seed, trial index).
StudySummary monte_carlo_study(const SyntheticSpec& spec1, const SyntheticSpec& spec2,
                               const AnalysisConfig& cfg, int trials, unsigned workers = 1);

}  // namespace ctrlcmp
