#include "ctrlcmp/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ctrlcmp/comfort.hpp"
#include "ctrlcmp/errors.hpp"
#include "ctrlcmp/infer.hpp"
#include "ctrlcmp/mathutil.hpp"
#include "ctrlcmp/parallel.hpp"
#include "ctrlcmp/rng.hpp"
#include "ctrlcmp/smooth.hpp"

#include <json.hpp>

namespace ctrlcmp {

namespace {

// Stream tags for the generator and the study driver.
constexpr std::uint64_t kTagOatNoise = 10;
constexpr std::uint64_t kTagEnergyNoise = 11;
constexpr std::uint64_t kTagComfortNoise = 12;
constexpr std::uint64_t kTagStudySpec = 100;
constexpr std::uint64_t kTagStudyConfig = 200;

// Stationary AR(1) path: w[0] from the stationary law, then
// w[i] = phi w[i-1] + N(0, sigma^2).
class Ar1 {
public:
    Ar1(double phi, double sigma, rng::Stream& stream) : phi_(phi), sigma_(sigma), stream_(stream) {
        const double denom = 1.0 - phi * phi;
        const double sd0 = denom > 0.0 ? sigma / std::sqrt(denom) : sigma;
        value_ = sigma > 0.0 ? stream.normal(0.0, sd0) : 0.0;
        first_ = true;
    }
    double next() {
        if (first_) {
            first_ = false;
            return value_;
        }
        value_ = phi_ * value_ + (sigma_ > 0.0 ? stream_.normal(0.0, sigma_) : 0.0);
        return value_;
    }

private:
    double phi_, sigma_;
    rng::Stream& stream_;
    double value_ = 0.0;
    bool first_ = true;
};

double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }

void check_finite(const char* key, double v) {
    if (!std::isfinite(v)) throw ConfigError(key, "finite value");
}

}  // namespace

double PiecewiseQuadratic::integral(double a, double b) const {
    auto side = [&](double q, double lo, double hi) {
        if (hi <= lo) return 0.0;
        const double u = hi - center, l = lo - center;
        return base * (hi - lo) + q * (u * u * u - l * l * l) / 3.0;
    };
    return side(below, a, std::min(b, center)) + side(above, std::max(a, center), b);
}

double TailQuadratic::integral(double a, double b) const {
    double total = base * (b - a);
    if (a < lo_knee) {
        const double u = std::min(b, lo_knee);
        const double da = lo_knee - a, du = lo_knee - u;
        total += lo_quad * (da * da * da - du * du * du) / 3.0;
    }
    if (b > hi_knee) {
        const double l = std::max(a, hi_knee);
        const double db = b - hi_knee, dl = l - hi_knee;
        total += hi_quad * (db * db * db - dl * dl * dl) / 3.0;
    }
    return total;
}

void SyntheticSpec::validate() const {
    if (n_hours < 1) throw ConfigError("n_hours", "n_hours >= 1");
    if (zone_count < 1) throw ConfigError("zone_count", "zone_count >= 1");
    if (!(oat_min < oat_max)) throw ConfigError("oat_min", "oat_min < oat_max");
    for (auto [key, phi] : {std::pair{"oat_phi", oat_phi}, {"energy_phi", energy_phi},
                            {"comfort_phi", comfort_phi}}) {
        if (!(std::abs(phi) < 1.0)) throw ConfigError(key, "|phi| < 1");
    }
    for (auto [key, sigma] : {std::pair{"oat_sigma", oat_sigma}, {"energy_sigma", energy_sigma},
                              {"comfort_sigma", comfort_sigma}}) {
        if (!(sigma >= 0.0)) throw ConfigError(key, "sigma >= 0");
    }
    if (!(oat_amplitude >= 0.0)) throw ConfigError("oat_amplitude", "amplitude >= 0");
    if (!(energy.below >= 0.0 && energy.above >= 0.0)) {
        throw ConfigError("energy_heat_curvature", "curvatures >= 0");
    }
    if (!(comfort.lo_quad >= 0.0 && comfort.hi_quad >= 0.0)) {
        throw ConfigError("comfort_cold_curvature", "curvatures >= 0");
    }
    if (!(band >= 0.0)) throw ConfigError("band", "band >= 0");
    for (auto [key, v] :
         {std::pair{"oat_mean", oat_mean}, {"energy_min_kwh", energy.base},
          {"energy_min_oat", energy.center}, {"comfort_base", comfort.base},
          {"setpoint", setpoint}}) {
        check_finite(key, v);
    }
}

double GroundTruth::comfort_observed(double t) const {
    const double mu = comfort(t);
    const double s = comfort_noise_sd;
    if (s <= 0.0) return std::max(0.0, mu);
    const double z = mu / s;
    return mu * normal_cdf(z) + s * normal_pdf(z);
}

double GroundTruth::comfort_day_observed(const Interval& iv) const {
    // Simpson's rule on the censored-mean function; it is smooth, so a few
    // thousand panels are plenty.
    constexpr int kPanels = 2000;
    const double h = iv.width() / kPanels;
    double sum = comfort_observed(iv.lo) + comfort_observed(iv.hi);
    for (int i = 1; i < kPanels; ++i) {
        sum += comfort_observed(iv.lo + h * i) * (i % 2 ? 4.0 : 2.0);
    }
    return 24.0 * (sum * h / 3.0) / iv.width();
}

double GroundTruth::energy_day(const OatDistribution& dist) const {
    if (dist.mode == OatDistributionMode::pooled_uniform) return energy_day(dist.pooled);
    double total = 0.0;
    for (const auto& iv : dist.hourly) {
        if (!iv) throw EmptyIntervalError("synth: hour without OAT interval");
        total += energy.average(*iv);
    }
    return total;
}

double GroundTruth::comfort_day_observed(const OatDistribution& dist) const {
    if (dist.mode == OatDistributionMode::pooled_uniform) {
        return comfort_day_observed(dist.pooled);
    }
    double total = 0.0;
    for (const auto& iv : dist.hourly) {
        if (!iv) throw EmptyIntervalError("synth: hour without OAT interval");
        total += comfort_day_observed(*iv) / 24.0;
    }
    return total;
}

SynthResult generate_dataset(const SyntheticSpec& spec) {
    spec.validate();
    SynthResult out;
    out.truth.energy = spec.energy;
    out.truth.comfort = spec.comfort;
    const double denom = 1.0 - spec.comfort_phi * spec.comfort_phi;
    out.truth.comfort_noise_sd =
        denom > 0.0 ? spec.comfort_sigma / std::sqrt(denom) : spec.comfort_sigma;

    rng::Stream oat_stream(spec.seed, {kTagOatNoise});
    rng::Stream energy_stream(spec.seed, {kTagEnergyNoise});
    rng::Stream comfort_stream(spec.seed, {kTagComfortNoise});
    Ar1 oat_noise(spec.oat_phi, spec.oat_sigma, oat_stream);
    Ar1 energy_noise(spec.energy_phi, spec.energy_sigma, energy_stream);
    Ar1 comfort_noise(spec.comfort_phi, spec.comfort_sigma, comfort_stream);

    ControllerDataset d;
    d.label = "synthetic";
    d.zone_count = spec.zone_count;
    d.records.reserve(static_cast<std::size_t>(spec.n_hours));

    std::size_t clipped = 0;
    for (int i = 0; i < spec.n_hours; ++i) {
        HourlyRecord r;
        r.timestamp = {spec.start.epoch_sec + static_cast<std::int64_t>(i) * 3600,
                       spec.start.offset_min};
        const double hour = r.timestamp.local_hour();
        const double cycle =
            spec.oat_mean +
            spec.oat_amplitude * std::cos(2.0 * M_PI * (hour - spec.oat_peak_hour) / 24.0);
        r.oat = std::clamp(cycle + oat_noise.next(), spec.oat_min, spec.oat_max);

        r.energy = spec.energy(r.oat) + energy_noise.next();
        if (r.energy < 0.0) {
            r.energy = 0.0;
            ++clipped;
        }

        // Zone temperatures realize the target violation exactly: every zone
        // deviates by band + v beyond its set point when v > 0 (alternating
        // hot/cold), and sits on the set point otherwise.
        const double v = spec.comfort(r.oat) + comfort_noise.next();
        r.zones.resize(static_cast<std::size_t>(spec.zone_count));
        for (int j = 0; j < spec.zone_count; ++j) {
            auto& z = r.zones[static_cast<std::size_t>(j)];
            z.setpoint = spec.setpoint;
            z.band = spec.band;
            if (v > 0.0) {
                const double sign = (j % 2 == 0) ? 1.0 : -1.0;
                z.temp = spec.setpoint + sign * (spec.band + v);
            } else {
                z.temp = spec.setpoint;
            }
        }
        d.records.push_back(std::move(r));
    }
    out.energy_clip_rate = static_cast<double>(clipped) / static_cast<double>(spec.n_hours);
    out.dataset = std::move(d);
    return out;
}

SyntheticSpec parse_synth_spec_text(std::string_view text) {
    SyntheticSpec spec;
    std::size_t pos = 0;
    auto trim = [](std::string_view s) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
            s.remove_prefix(1);
        }
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
            s.remove_suffix(1);
        }
        return s;
    };
    while (pos <= text.size()) {
        const std::size_t eol = std::min(text.find('\n', pos), text.size());
        std::string_view line = trim(text.substr(pos, eol - pos));
        pos = eol + 1;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = trim(line.substr(0, hash));
        }
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(std::string(line), "expected key=value");
        const std::string key{trim(line.substr(0, eq))};
        const std::string value{trim(line.substr(eq + 1))};

        auto as_double = [&](double& target) {
            try {
                std::size_t used = 0;
                target = std::stod(value, &used);
                if (used != value.size()) throw std::invalid_argument(value);
            } catch (const std::exception&) {
                throw ConfigError(key, "decimal value");
            }
        };
        auto as_int = [&](int& target) {
            try {
                std::size_t used = 0;
                target = std::stoi(value, &used);
                if (used != value.size()) throw std::invalid_argument(value);
            } catch (const std::exception&) {
                throw ConfigError(key, "integer value");
            }
        };

        if (key == "n_hours") as_int(spec.n_hours);
        else if (key == "zone_count") as_int(spec.zone_count);
        else if (key == "seed") {
            try {
                spec.seed = std::stoull(value);
            } catch (const std::exception&) {
                throw ConfigError(key, "64-bit unsigned integer");
            }
        } else if (key == "start") {
            const auto ts = parse_timestamp(value);
            if (!ts) throw ConfigError(key, "ISO 8601 timestamp with offset");
            spec.start = *ts;
        } else if (key == "oat_min") as_double(spec.oat_min);
        else if (key == "oat_max") as_double(spec.oat_max);
        else if (key == "oat_mean") as_double(spec.oat_mean);
        else if (key == "oat_amplitude") as_double(spec.oat_amplitude);
        else if (key == "oat_peak_hour") as_double(spec.oat_peak_hour);
        else if (key == "oat_phi") as_double(spec.oat_phi);
        else if (key == "oat_sigma") as_double(spec.oat_sigma);
        else if (key == "energy_min_oat") as_double(spec.energy.center);
        else if (key == "energy_min_kwh") as_double(spec.energy.base);
        else if (key == "energy_heat_curvature") as_double(spec.energy.below);
        else if (key == "energy_cool_curvature") as_double(spec.energy.above);
        else if (key == "energy_phi") as_double(spec.energy_phi);
        else if (key == "energy_sigma") as_double(spec.energy_sigma);
        else if (key == "comfort_base") as_double(spec.comfort.base);
        else if (key == "comfort_cold_knee") as_double(spec.comfort.lo_knee);
        else if (key == "comfort_hot_knee") as_double(spec.comfort.hi_knee);
        else if (key == "comfort_cold_curvature") as_double(spec.comfort.lo_quad);
        else if (key == "comfort_hot_curvature") as_double(spec.comfort.hi_quad);
        else if (key == "comfort_phi") as_double(spec.comfort_phi);
        else if (key == "comfort_sigma") as_double(spec.comfort_sigma);
        else if (key == "setpoint") as_double(spec.setpoint);
        else if (key == "band") as_double(spec.band);
        else throw ConfigError(key, "known synthetic spec key");
    }
    spec.validate();
    return spec;
}

SyntheticSpec parse_synth_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("synth: cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_synth_spec_text(buf.str());
}

void write_ground_truth_json(const SynthResult& result, const SyntheticSpec& spec,
                             const std::filesystem::path& path) {
    nlohmann::json doc;
    doc["seed"] = spec.seed;
    doc["n_hours"] = spec.n_hours;
    doc["energy_characteristic"] = {
        {"shape", "piecewise-quadratic"},
        {"min_oat_f", result.truth.energy.center},
        {"min_kwh_per_h", result.truth.energy.base},
        {"heat_curvature", result.truth.energy.below},
        {"cool_curvature", result.truth.energy.above},
    };
    doc["comfort_characteristic"] = {
        {"shape", "flat-with-quadratic-tails"},
        {"base_f_h_per_h", result.truth.comfort.base},
        {"cold_knee_f", result.truth.comfort.lo_knee},
        {"hot_knee_f", result.truth.comfort.hi_knee},
        {"cold_curvature", result.truth.comfort.lo_quad},
        {"hot_curvature", result.truth.comfort.hi_quad},
        {"latent_noise_sd", result.truth.comfort_noise_sd},
    };
    const Interval full{spec.oat_min, spec.oat_max};
    doc["energy_day_kwh_full_range"] = result.truth.energy_day(full);
    doc["comfort_day_latent_f_h_full_range"] = result.truth.comfort_day_latent(full);
    doc["comfort_day_observed_f_h_full_range"] = result.truth.comfort_day_observed(full);
    doc["energy_clip_rate"] = result.energy_clip_rate;

    std::ofstream out(path);
    if (!out) throw DataError("synth: cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

namespace {

struct TrialOutcome {
    PairTestResult energy, comfort;
    IntervalEstimate energy_ci, comfort_ci;
    double true_delta_energy = 0.0;
    double true_delta_comfort = 0.0;
};

}  // namespace

StudySummary monte_carlo_study(const SyntheticSpec& spec1, const SyntheticSpec& spec2,
                               const AnalysisConfig& cfg, int trials, unsigned workers) {
    if (trials < 50) throw ConfigError("trials", "trials >= 50");
    spec1.validate();
    spec2.validate();
    cfg.validate();

    std::vector<TrialOutcome> outcomes(static_cast<std::size_t>(trials));
    std::vector<std::string> failures(static_cast<std::size_t>(trials));

    parallel_for(static_cast<std::size_t>(trials), workers, [&](std::size_t trial) {
        try {
            SyntheticSpec a = spec1;
            a.seed = rng::derive_seed(spec1.seed, {kTagStudySpec, trial, 1});
            SyntheticSpec b = spec2;
            b.seed = rng::derive_seed(spec2.seed, {kTagStudySpec, trial, 2});
            const SynthResult gen1 = generate_dataset(a);
            const SynthResult gen2 = generate_dataset(b);

            AnalysisConfig trial_cfg = cfg;
            trial_cfg.seed = rng::derive_seed(cfg.seed, {kTagStudyConfig, trial});

            const Interval common =
                intersect(gen1.dataset.oat_support(), gen2.dataset.oat_support());
            if (common.empty()) throw DataError("no common OAT support");
            const OatDistribution dist = make_oat_distribution(
                trial_cfg.oat_distribution, gen1.dataset, gen2.dataset, common);

            const ScatterData e1 = energy_scatter(gen1.dataset);
            const ScatterData e2 = energy_scatter(gen2.dataset);
            const ScatterData c1 = comfort_scatter(comfort_series(gen1.dataset));
            const ScatterData c2 = comfort_scatter(comfort_series(gen2.dataset));

            TrialOutcome& o = outcomes[trial];
            o.energy = run_pair_tests(e1, e2, trial_cfg, dist, common, CurveKind::energy, 1);
            o.comfort = run_pair_tests(c1, c2, trial_cfg, dist, common, CurveKind::comfort, 1);
            TestResult* energy_family[] = {&o.energy.curve_equality, &o.energy.daily_difference};
            TestResult* comfort_family[] = {&o.comfort.curve_equality, &o.comfort.daily_difference};
            apply_bonferroni(energy_family);
            apply_bonferroni(comfort_family);

            // Coverage needs the interval in every trial, significant or not.
            o.energy_ci =
                bc_confidence_interval(e1, e2, trial_cfg, dist, common, CurveKind::energy, 1);
            o.comfort_ci =
                bc_confidence_interval(c1, c2, trial_cfg, dist, common, CurveKind::comfort, 1);

            o.true_delta_energy = gen2.truth.energy_day(dist) - gen1.truth.energy_day(dist);
            o.true_delta_comfort =
                gen2.truth.comfort_day_observed(dist) - gen1.truth.comfort_day_observed(dist);
        } catch (const std::exception& e) {
            failures[trial] = e.what();
        }
    });

    for (std::size_t t = 0; t < failures.size(); ++t) {
        if (!failures[t].empty()) {
            throw StatError("synth: study trial " + std::to_string(t) + " failed: " + failures[t]);
        }
    }

    StudySummary s;
    s.trials = trials;
    const double floor_limit = 1.5 / (cfg.replicates + 1.0);
    for (const auto& o : outcomes) {
        auto tally = [&](RatePair& rate, const TestResult& t) {
            rate.raw += (t.p_raw < cfg.alpha) ? 1.0 : 0.0;
            rate.adjusted += (t.p_adjusted < cfg.alpha) ? 1.0 : 0.0;
        };
        tally(s.energy_curve, o.energy.curve_equality);
        tally(s.energy_daily, o.energy.daily_difference);
        tally(s.comfort_curve, o.comfort.curve_equality);
        tally(s.comfort_daily, o.comfort.daily_difference);
        s.energy_curve_floor += (o.energy.curve_equality.p_raw < floor_limit) ? 1.0 : 0.0;
        s.energy_daily_floor += (o.energy.daily_difference.p_raw < floor_limit) ? 1.0 : 0.0;
        s.energy_coverage += (o.true_delta_energy >= o.energy_ci.lower &&
                              o.true_delta_energy <= o.energy_ci.upper)
                                 ? 1.0
                                 : 0.0;
        s.comfort_coverage += (o.true_delta_comfort >= o.comfort_ci.lower &&
                               o.true_delta_comfort <= o.comfort_ci.upper)
                                  ? 1.0
                                  : 0.0;
        s.mean_delta_energy += o.energy.daily_observed;
        s.mean_true_delta_energy += o.true_delta_energy;
        s.mean_delta_comfort += o.comfort.daily_observed;
        s.mean_true_delta_comfort += o.true_delta_comfort;
        s.bias_overflows += (o.energy_ci.bias_overflow ? 1 : 0) + (o.comfort_ci.bias_overflow ? 1 : 0);
    }
    const auto m = static_cast<double>(trials);
    for (RatePair* r : {&s.energy_curve, &s.energy_daily, &s.comfort_curve, &s.comfort_daily}) {
        r->raw /= m;
        r->adjusted /= m;
    }
    s.energy_curve_floor /= m;
    s.energy_daily_floor /= m;
    s.energy_coverage /= m;
    s.comfort_coverage /= m;
    s.mean_delta_energy /= m;
    s.mean_true_delta_energy /= m;
    s.mean_delta_comfort /= m;
    s.mean_true_delta_comfort /= m;
    return s;
}

std::string format_study_summary(const StudySummary& s) {
    std::ostringstream out;
    out << "trials: " << s.trials << '\n';
    out << "test                      reject(raw)  reject(adj)\n";
    auto row = [&](const char* name, const RatePair& r) {
        out << name;
        for (std::size_t i = std::string(name).size(); i < 26; ++i) out << ' ';
        char buf[64];
        std::snprintf(buf, sizeof buf, "%10.3f  %11.3f\n", r.raw, r.adjusted);
        out << buf;
    };
    row("energy curve equality", s.energy_curve);
    row("energy daily difference", s.energy_daily);
    row("comfort curve equality", s.comfort_curve);
    row("comfort daily difference", s.comfort_daily);
    char buf[256];
    std::snprintf(buf, sizeof buf,
                  "p-floor share (energy curve / daily): %.3f / %.3f\n"
                  "CI coverage (energy / comfort): %.3f / %.3f\n"
                  "mean delta energy (est / true): %.3f / %.3f kWh per day\n"
                  "mean delta comfort (est / true): %.4f / %.4f degF-h per day\n"
                  "bias overflows: %d\n",
                  s.energy_curve_floor, s.energy_daily_floor, s.energy_coverage,
                  s.comfort_coverage, s.mean_delta_energy, s.mean_true_delta_energy,
                  s.mean_delta_comfort, s.mean_true_delta_comfort, s.bias_overflows);
    out << buf;
    return out.str();
}

}  // namespace ctrlcmp
