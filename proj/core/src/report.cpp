#include "ctrlcmp/report.hpp"

#include <charconv>
#include <fstream>

#include <json.hpp>

#include "ctrlcmp/comfort.hpp"
#include "ctrlcmp/errors.hpp"

namespace ctrlcmp {

namespace {

using nlohmann::json;

json qty(double value, const char* unit) { return json{{"value", value}, {"unit", unit}}; }

json interval_json(const Interval& iv, const char* unit) {
    return json{{"lo", qty(iv.lo, unit)}, {"hi", qty(iv.hi, unit)}};
}

json test_json(const TestResult& t) {
    return json{
        {"statistic", t.statistic},
        {"p_raw", qty(t.p_raw, "probability")},
        {"p_adjusted", qty(t.p_adjusted, "probability")},
        {"significant", t.significant},
        {"alpha", qty(t.alpha, "probability")},
        {"replicates", qty(t.replicates, "count")},
        {"block_length", json::array({qty(t.block_length[0], "hours"),
                                      qty(t.block_length[1], "hours")})},
        {"discarded", qty(t.discarded, "count")},
    };
}

json curve_json(const CharacteristicCurve& curve, const char* value_unit) {
    return json{
        {"kind", std::string(to_string(curve.kind))},
        {"bandwidth", qty(curve.bandwidth, "degF")},
        {"support", interval_json(curve.support, "degF")},
        {"grid", json{{"values", curve.grid}, {"unit", "degF"}}},
        {"curve", json{{"values", curve.values}, {"unit", value_unit}}},
    };
}

json ci_json(const IntervalEstimate& est, const char* unit) {
    return json{
        {"estimate", qty(est.estimate, unit)},
        {"level", qty(est.level, "probability")},
        {"lower", qty(est.lower, unit)},
        {"upper", qty(est.upper, unit)},
        {"method", est.method},
        {"bias_overflow", est.bias_overflow},
        {"estimate_outside_bounds", est.estimate_outside_bounds},
    };
}

json config_json(const AnalysisConfig& cfg) {
    json j{
        {"alpha", qty(cfg.alpha, "probability")},
        {"beta", qty(cfg.beta, "probability")},
        {"replicates", qty(cfg.replicates, "count")},
        {"grid_points", qty(cfg.grid_points, "count")},
        {"oat_distribution", std::string(to_string(cfg.oat_distribution))},
        {"seed", cfg.seed},
        {"min_overlap", qty(cfg.min_overlap, "degF")},
        {"min_records", qty(cfg.min_records, "count")},
        {"bonferroni_scope", std::string(to_string(cfg.bonferroni_scope))},
    };
    j["block_length"] = cfg.block_length ? json(qty(*cfg.block_length, "hours")) : json("auto");
    j["bandwidth"] = cfg.bandwidth ? json(qty(*cfg.bandwidth, "degF")) : json("auto");
    return j;
}

std::string format_number(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void atomic_write(const std::filesystem::path& path, const std::string& contents) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("report: cannot write " + tmp.string());
        out << contents;
    }
    std::filesystem::rename(tmp, path);
}

std::string curves_csv(const CharacteristicCurve& c1, const CharacteristicCurve& c2,
                       const std::string& label1, const std::string& label2,
                       const char* value_column) {
    std::string out = "controller,oat_f,";
    out += value_column;
    out += '\n';
    auto emit = [&](const CharacteristicCurve& c, const std::string& label) {
        for (std::size_t i = 0; i < c.grid.size(); ++i) {
            out += label + ',' + format_number(c.grid[i]) + ',' + format_number(c.values[i]) + '\n';
        }
    };
    emit(c1, label1);
    emit(c2, label2);
    return out;
}

}  // namespace

std::string report_to_json(const ComparisonReport& report) {
    json doc;
    doc["tool"] = "ctrlcmp";
    doc["controllers"] = json{{"1", report.label1}, {"2", report.label2}};
    doc["config"] = config_json(report.config);
    doc["seed"] = report.config.seed;
    doc["common_support"] = interval_json(report.common_support, "degF");

    const double mwh = report.delta_energy_day / 1000.0;
    doc["energy"] = json{
        {"curve_1", curve_json(report.energy1, "kWh/h")},
        {"curve_2", curve_json(report.energy2, "kWh/h")},
        {"curve_equality", test_json(report.energy_curve_equality)},
        {"daily_difference", test_json(report.energy_daily_difference)},
        {"delta_day", qty(report.delta_energy_day, "kWh/day")},
        {"delta_day_display", qty(mwh, "MWh/day")},
        {"confidence_interval",
         report.energy_interval ? ci_json(*report.energy_interval, "kWh/day") : json(nullptr)},
    };
    doc["comfort"] = json{
        {"curve_1", curve_json(report.comfort1, "degF*h/h")},
        {"curve_2", curve_json(report.comfort2, "degF*h/h")},
        {"curve_equality", test_json(report.comfort_curve_equality)},
        {"daily_difference", test_json(report.comfort_daily_difference)},
        {"delta_day", qty(report.delta_comfort_day, "degF*h/day")},
        {"confidence_interval",
         report.comfort_interval ? ci_json(*report.comfort_interval, "degF*h/day") : json(nullptr)},
    };
    doc["warnings"] = report.warnings;
    return doc.dump(2) + "\n";
}

void write_report_files(const ComparisonReport& report, const ControllerDataset& d1,
                        const ControllerDataset& d2, const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);

    atomic_write(out_dir / "report.json", report_to_json(report));
    atomic_write(out_dir / "energy_curves.csv",
                 curves_csv(report.energy1, report.energy2, report.label1, report.label2,
                            "energy_kwh_per_h"));
    atomic_write(out_dir / "comfort_curves.csv",
                 curves_csv(report.comfort1, report.comfort2, report.label1, report.label2,
                            "comfort_f_h_per_h"));

    std::string energy = "controller,oat_f,energy_kwh\n";
    std::string comfort = "controller,oat_f,comfort_f_h\n";
    for (const auto* d : {&d1, &d2}) {
        const ComfortSeries series = comfort_series(*d);
        for (std::size_t i = 0; i < d->records.size(); ++i) {
            const auto& r = d->records[i];
            energy += d->label + ',' + format_number(r.oat) + ',' + format_number(r.energy) + '\n';
            comfort +=
                d->label + ',' + format_number(series.oat[i]) + ',' +
                format_number(series.values[i]) + '\n';
        }
    }
    atomic_write(out_dir / "energy_scatter.csv", energy);
    atomic_write(out_dir / "comfort_scatter.csv", comfort);
}

}  // namespace ctrlcmp
