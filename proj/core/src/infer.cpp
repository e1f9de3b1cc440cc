#include "ctrlcmp/infer.hpp"

#include <algorithm>
#include <cmath>

#include "ctrlcmp/errors.hpp"
#include "ctrlcmp/mathutil.hpp"
#include "ctrlcmp/parallel.hpp"

namespace ctrlcmp {

namespace {

// RNG stream tag values; part of the reproducibility contract.
constexpr std::uint64_t kPurposeNull = 0;
constexpr std::uint64_t kPurposeConfidence = 1;

std::uint64_t kind_tag(CurveKind kind) { return kind == CurveKind::energy ? 0 : 1; }

void clamp_nonnegative(std::vector<double>& v) {
    for (double& x : v) x = std::max(0.0, x);
}

double mean_squared_difference(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s / static_cast<double>(a.size());
}

// p = (1 + #{extreme}) / (B + 1); guaranteed inside [1/(B+1), 1].
double bootstrap_p(std::size_t extreme, std::size_t effective_b) {
    return static_cast<double>(1 + extreme) / static_cast<double>(effective_b + 1);
}

struct ReplicateEngine {
    const SmootherPlan& plan1;
    const SmootherPlan& plan2;
    const OatDistribution& dist;
    CurveKind kind;

    std::span<const double> fitted1, fitted2;
    std::span<const double> residuals1, residuals2;
    int block1 = 0, block2 = 0;

    std::uint64_t seed = 0;
    std::uint64_t purpose = 0;
    std::uint64_t metric = 0;

    // Computes (T*, D*) for replicate b. Buffers are caller-provided so
    // worker threads can reuse them.
    void replicate(std::size_t b, std::vector<double>& e, std::vector<double>& y,
                   std::vector<double>& c1, std::vector<double>& c2, double& t_out,
                   double& d_out) const {
        auto simulate = [&](int controller, std::span<const double> fitted,
                            std::span<const double> residuals, int block,
                            const SmootherPlan& plan, std::vector<double>& curve) {
            rng::Stream stream(seed, {purpose, metric, static_cast<std::uint64_t>(controller),
                                      static_cast<std::uint64_t>(b)});
            moving_block_resample_into(residuals, block, stream, e);
            y.resize(fitted.size());
            for (std::size_t i = 0; i < fitted.size(); ++i) y[i] = fitted[i] + e[i];
            curve.resize(plan.grid.size());
            plan.apply(y, curve);
            if (kind == CurveKind::comfort) clamp_nonnegative(curve);
        };
        simulate(1, fitted1, residuals1, block1, plan1, c1);
        simulate(2, fitted2, residuals2, block2, plan2, c2);
        t_out = mean_squared_difference(c1, c2);
        d_out = daily_total_grid(plan2.grid, c2, dist) - daily_total_grid(plan1.grid, c1, dist);
    }
};

// Runs all replicates, discarding any whose statistics come out non-finite.
// Results land in per-index slots, so the output is identical for any worker
// count; the reduction below walks them in index order.
void run_replicates(const ReplicateEngine& engine, int replicates, unsigned workers,
                    std::vector<double>& tstar, std::vector<double>& dstar,
                    std::vector<char>& bad) {
    const auto b_total = static_cast<std::size_t>(replicates);
    tstar.assign(b_total, 0.0);
    dstar.assign(b_total, 0.0);
    bad.assign(b_total, 0);
    parallel_for(b_total, workers, [&](std::size_t b) {
        thread_local std::vector<double> e, y, c1, c2;
        double t = 0.0, d = 0.0;
        try {
            engine.replicate(b, e, y, c1, c2, t, d);
        } catch (const StatError&) {
            bad[b] = 1;
            return;
        }
        if (!std::isfinite(t) || !std::isfinite(d)) {
            bad[b] = 1;
            return;
        }
        tstar[b] = t;
        dstar[b] = d;
    });
}

void enforce_discard_budget(std::size_t discarded, std::size_t total) {
    if (static_cast<double>(discarded) > 0.05 * static_cast<double>(total)) {
        throw TestFailure("infer: " + std::to_string(discarded) + " of " + std::to_string(total) +
                          " bootstrap replicates failed");
    }
}

}  // namespace

void moving_block_resample_into(std::span<const double> series, int block_length,
                                rng::Stream& stream, std::vector<double>& out) {
    const std::size_t n = series.size();
    const auto l = static_cast<std::size_t>(block_length);
    if (l < 1 || l > n) throw StatError("infer: block length outside [1, N]");
    out.clear();
    out.reserve(n + l);
    while (out.size() < n) {
        const std::size_t start = stream.bounded(n - l + 1);
        const std::size_t take = std::min(l, n - out.size());
        out.insert(out.end(), series.begin() + static_cast<std::ptrdiff_t>(start),
                   series.begin() + static_cast<std::ptrdiff_t>(start + take));
    }
}

std::vector<double> moving_block_resample(std::span<const double> series, int block_length,
                                          rng::Stream& stream) {
    std::vector<double> out;
    moving_block_resample_into(series, block_length, stream, out);
    return out;
}

std::vector<double> bonferroni_adjust(std::span<const double> p_values) {
    const auto m = static_cast<double>(p_values.size());
    std::vector<double> out;
    out.reserve(p_values.size());
    for (double p : p_values) out.push_back(std::min(1.0, m * p));
    return out;
}

void apply_bonferroni(std::span<TestResult*> family) {
    const auto m = static_cast<double>(family.size());
    for (TestResult* t : family) {
        t->p_adjusted = std::min(1.0, m * t->p_raw);
        t->significant = t->p_adjusted < t->alpha;
    }
}

NullModel fit_null_model(const ScatterData& s1, const ScatterData& s2, const AnalysisConfig& cfg,
                         CurveKind kind) {
    const ScatterData pooled = pooled_scatter(s1, s2);
    NullModel null;
    null.pooled_bandwidth = resolve_bandwidth(pooled, cfg);
    const KernelDesign design(pooled.x);

    auto fit_at = [&](const ScatterData& s, std::vector<double>& fitted,
                      std::vector<double>& residuals) {
        fitted.resize(s.size());
        residuals.resize(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            double v = design.fit(pooled.y, s.x[i], null.pooled_bandwidth);
            if (kind == CurveKind::comfort) v = std::max(0.0, v);
            fitted[i] = v;
            residuals[i] = s.y[i] - v;
        }
    };
    fit_at(s1, null.fitted1, null.residuals1);
    fit_at(s2, null.fitted2, null.residuals2);
    return null;
}

PairTestResult run_pair_tests(const ScatterData& s1, const ScatterData& s2,
                              const AnalysisConfig& cfg, const OatDistribution& dist,
                              const Interval& common_support, CurveKind kind, unsigned workers) {
    const double h1 = resolve_bandwidth(s1, cfg);
    const double h2 = resolve_bandwidth(s2, cfg);
    const auto grid = uniform_grid(common_support, cfg.grid_points);

    const KernelDesign design1(s1.x);
    const KernelDesign design2(s2.x);
    const SmootherPlan plan1 = build_plan(design1, grid, h1);
    const SmootherPlan plan2 = build_plan(design2, grid, h2);

    std::vector<double> curve1 = plan1.apply(s1.y);
    std::vector<double> curve2 = plan2.apply(s2.y);
    if (kind == CurveKind::comfort) {
        clamp_nonnegative(curve1);
        clamp_nonnegative(curve2);
    }
    const double t_obs = mean_squared_difference(curve1, curve2);
    const double d_obs =
        daily_total_grid(grid, curve2, dist) - daily_total_grid(grid, curve1, dist);

    const NullModel null = fit_null_model(s1, s2, cfg, kind);
    const int l1 = resolve_block_length(cfg, s1.size());
    const int l2 = resolve_block_length(cfg, s2.size());

    ReplicateEngine engine{plan1,          plan2,          dist,
                           kind,           null.fitted1,   null.fitted2,
                           null.residuals1, null.residuals2, l1,
                           l2,             cfg.seed,       kPurposeNull,
                           kind_tag(kind)};

    std::vector<double> tstar, dstar;
    std::vector<char> bad;
    run_replicates(engine, cfg.replicates, workers, tstar, dstar, bad);

    std::size_t discarded = 0, t_extreme = 0, d_extreme = 0, kept = 0;
    for (std::size_t b = 0; b < tstar.size(); ++b) {
        if (bad[b]) {
            ++discarded;
            continue;
        }
        ++kept;
        if (tstar[b] >= t_obs) ++t_extreme;
        if (std::abs(dstar[b]) >= std::abs(d_obs)) ++d_extreme;
    }
    enforce_discard_budget(discarded, tstar.size());

    PairTestResult out;
    out.daily_observed = d_obs;

    auto fill = [&](TestResult& t, double statistic, std::size_t extreme) {
        t.statistic = statistic;
        t.p_raw = bootstrap_p(extreme, kept);
        t.p_adjusted = t.p_raw;
        t.alpha = cfg.alpha;
        t.significant = t.p_raw < cfg.alpha;
        t.replicates = cfg.replicates;
        t.block_length = {l1, l2};
        t.discarded = static_cast<int>(discarded);
    };
    fill(out.curve_equality, t_obs, t_extreme);
    fill(out.daily_difference, d_obs, d_extreme);
    return out;
}

TestResult curve_equality_test(const ScatterData& s1, const ScatterData& s2,
                               const AnalysisConfig& cfg, const Interval& common_support,
                               CurveKind kind, unsigned workers) {
    OatDistribution dist;
    dist.mode = OatDistributionMode::pooled_uniform;
    dist.pooled = common_support;
    return run_pair_tests(s1, s2, cfg, dist, common_support, kind, workers).curve_equality;
}

TestResult daily_difference_test(const ScatterData& s1, const ScatterData& s2,
                                 const AnalysisConfig& cfg, const OatDistribution& dist,
                                 CurveKind kind, unsigned workers) {
    return run_pair_tests(s1, s2, cfg, dist, dist.pooled, kind, workers).daily_difference;
}

BcEndpoints bc_endpoints(std::span<const double> bootstrap_sample, double observed, double beta) {
    if (bootstrap_sample.empty()) throw DegenerateBootstrap("infer: empty bootstrap sample");
    std::vector<double> sorted(bootstrap_sample.begin(), bootstrap_sample.end());
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() == sorted.back()) {
        throw DegenerateBootstrap("infer: all bootstrap replicates produced the same value");
    }

    const auto b_total = static_cast<double>(sorted.size());
    const auto below = static_cast<double>(
        std::count_if(sorted.begin(), sorted.end(), [&](double v) { return v < observed; }));
    const double z_beta = normal_quantile(0.5 * (1.0 + beta));

    BcEndpoints out;
    double lo_q, hi_q;
    if (below == 0.0 || below == b_total) {
        // Median bias correction diverges; fall back to the plain percentile
        // interval and report it.
        out.bias_overflow = true;
        out.z0 = 0.0;
        lo_q = 0.5 * (1.0 - beta);
        hi_q = 0.5 * (1.0 + beta);
    } else {
        out.z0 = normal_quantile(below / b_total);
        lo_q = normal_cdf(2.0 * out.z0 - z_beta);
        hi_q = normal_cdf(2.0 * out.z0 + z_beta);
    }
    out.lower = quantile_type7_sorted(sorted, lo_q);
    out.upper = quantile_type7_sorted(sorted, hi_q);
    return out;
}

IntervalEstimate bc_confidence_interval(const ScatterData& s1, const ScatterData& s2,
                                        const AnalysisConfig& cfg, const OatDistribution& dist,
                                        const Interval& common_support, CurveKind kind,
                                        unsigned workers) {
    const double h1 = resolve_bandwidth(s1, cfg);
    const double h2 = resolve_bandwidth(s2, cfg);
    const auto grid = uniform_grid(common_support, cfg.grid_points);

    const KernelDesign design1(s1.x);
    const KernelDesign design2(s2.x);
    const SmootherPlan plan1 = build_plan(design1, grid, h1);
    const SmootherPlan plan2 = build_plan(design2, grid, h2);

    std::vector<double> curve1 = plan1.apply(s1.y);
    std::vector<double> curve2 = plan2.apply(s2.y);
    if (kind == CurveKind::comfort) {
        clamp_nonnegative(curve1);
        clamp_nonnegative(curve2);
    }
    const double d_obs =
        daily_total_grid(grid, curve2, dist) - daily_total_grid(grid, curve1, dist);

    // Bootstrap under the alternative: residuals around each controller's own
    // fitted characteristic, evaluated at its own design points.
    auto own_fit = [&](const KernelDesign& design, const ScatterData& s, double h,
                       std::vector<double>& fitted, std::vector<double>& residuals) {
        fitted.resize(s.size());
        residuals.resize(s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            double v = design.fit(s.y, s.x[i], h);
            if (kind == CurveKind::comfort) v = std::max(0.0, v);
            fitted[i] = v;
            residuals[i] = s.y[i] - v;
        }
    };
    std::vector<double> fitted1, fitted2, residuals1, residuals2;
    own_fit(design1, s1, h1, fitted1, residuals1);
    own_fit(design2, s2, h2, fitted2, residuals2);

    const int l1 = resolve_block_length(cfg, s1.size());
    const int l2 = resolve_block_length(cfg, s2.size());

    ReplicateEngine engine{plan1,     plan2,      dist,        kind,
                           fitted1,   fitted2,    residuals1,  residuals2,
                           l1,        l2,         cfg.seed,    kPurposeConfidence,
                           kind_tag(kind)};

    std::vector<double> tstar, dstar;
    std::vector<char> bad;
    run_replicates(engine, cfg.replicates, workers, tstar, dstar, bad);

    std::vector<double> kept;
    kept.reserve(dstar.size());
    for (std::size_t b = 0; b < dstar.size(); ++b) {
        if (!bad[b]) kept.push_back(dstar[b]);
    }
    enforce_discard_budget(dstar.size() - kept.size(), dstar.size());

    const BcEndpoints ends = bc_endpoints(kept, d_obs, cfg.beta);

    IntervalEstimate est;
    est.estimate = d_obs;
    est.level = cfg.beta;
    est.lower = ends.lower;
    est.upper = ends.upper;
    est.method = ends.bias_overflow ? "percentile" : "bias-corrected percentile";
    est.bias_overflow = ends.bias_overflow;
    est.estimate_outside_bounds = d_obs < ends.lower || d_obs > ends.upper;
    return est;
}

}  // namespace ctrlcmp
