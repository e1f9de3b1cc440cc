#include "ctrlcmp/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ctrlcmp/errors.hpp"

namespace ctrlcmp {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

// Locale-independent decimal parse of the full token. Rejects thousands
// separators, trailing junk, and empty tokens.
bool parse_double(std::string_view token, double& out) {
    token = trim(token);
    if (token.empty()) return false;
    const char* first = token.data();
    const char* last = token.data() + token.size();
    if (*first == '+') ++first;  // from_chars does not accept a leading '+'
    const auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
}

bool parse_u64(std::string_view token, std::uint64_t& out) {
    token = trim(token);
    if (token.empty()) return false;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
    return ec == std::errc{} && ptr == token.data() + token.size();
}

bool parse_int(std::string_view token, int& out) {
    token = trim(token);
    if (token.empty()) return false;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), out);
    return ec == std::errc{} && ptr == token.data() + token.size();
}

std::vector<std::string_view> split_csv(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == ',') {
            out.push_back(line.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::vector<std::string> expected_header(int zones) {
    std::vector<std::string> cols = {"timestamp", "oat", "energy"};
    for (int z = 1; z <= zones; ++z) {
        const std::string p = "zone" + std::to_string(z) + "_";
        cols.push_back(p + "temp");
        cols.push_back(p + "setpoint");
        cols.push_back(p + "band");
    }
    return cols;
}

}  // namespace

std::string_view to_string(OatDistributionMode mode) {
    return mode == OatDistributionMode::pooled_uniform ? "pooled-uniform" : "hourly-uniform";
}

std::string_view to_string(BonferroniScope scope) {
    return scope == BonferroniScope::per_family ? "per-family" : "family-wide";
}

void AnalysisConfig::validate() const {
    if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha", "alpha in (0,1)");
    if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("beta", "beta in (0,1)");
    if (replicates < 99) throw ConfigError("replicates", "replicates >= 99");
    if (block_length && *block_length < 1) throw ConfigError("block_length", "block_length >= 1");
    if (bandwidth && !(*bandwidth > 0.0)) throw ConfigError("bandwidth", "bandwidth > 0");
    if (grid_points < 11) throw ConfigError("grid_points", "grid_points >= 11");
    if (!(min_overlap > 0.0)) throw ConfigError("min_overlap", "min_overlap > 0");
    if (min_records < 1) throw ConfigError("min_records", "min_records >= 1");
}

int resolve_block_length(const AnalysisConfig& cfg, std::size_t n) {
    if (cfg.block_length) return std::min<int>(*cfg.block_length, static_cast<int>(n));
    return std::min<int>(ceil_cbrt(n), static_cast<int>(n));
}

AnalysisConfig parse_config_text(std::string_view text) {
    AnalysisConfig cfg;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = std::min(text.find('\n', pos), text.size());
        std::string_view line = trim(text.substr(pos, eol - pos));
        pos = eol + 1;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = trim(line.substr(0, hash));
        }
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError(std::string(line), "expected key=value");
        }
        const std::string key{trim(line.substr(0, eq))};
        const std::string_view value = trim(line.substr(eq + 1));

        if (key == "alpha") {
            if (!parse_double(value, cfg.alpha)) throw ConfigError(key, "decimal value");
        } else if (key == "beta") {
            if (!parse_double(value, cfg.beta)) throw ConfigError(key, "decimal value");
        } else if (key == "replicates") {
            if (!parse_int(value, cfg.replicates)) throw ConfigError(key, "integer value");
        } else if (key == "block_length") {
            if (value == "auto") {
                cfg.block_length.reset();
            } else {
                int l;
                if (!parse_int(value, l)) throw ConfigError(key, "'auto' or positive integer");
                cfg.block_length = l;
            }
        } else if (key == "bandwidth") {
            if (value == "auto") {
                cfg.bandwidth.reset();
            } else {
                double h;
                if (!parse_double(value, h)) throw ConfigError(key, "'auto' or positive decimal");
                cfg.bandwidth = h;
            }
        } else if (key == "grid_points") {
            if (!parse_int(value, cfg.grid_points)) throw ConfigError(key, "integer value");
        } else if (key == "oat_distribution") {
            if (value == "pooled-uniform") {
                cfg.oat_distribution = OatDistributionMode::pooled_uniform;
            } else if (value == "hourly-uniform") {
                cfg.oat_distribution = OatDistributionMode::hourly_uniform;
            } else {
                throw ConfigError(key, "'pooled-uniform' or 'hourly-uniform'");
            }
        } else if (key == "seed") {
            if (!parse_u64(value, cfg.seed)) throw ConfigError(key, "64-bit unsigned integer");
        } else if (key == "min_overlap") {
            if (!parse_double(value, cfg.min_overlap)) throw ConfigError(key, "decimal value");
        } else if (key == "min_records") {
            if (!parse_int(value, cfg.min_records)) throw ConfigError(key, "integer value");
        } else if (key == "bonferroni_scope") {
            if (value == "per-family") {
                cfg.bonferroni_scope = BonferroniScope::per_family;
            } else if (value == "family-wide") {
                cfg.bonferroni_scope = BonferroniScope::family_wide;
            } else {
                throw ConfigError(key, "'per-family' or 'family-wide'");
            }
        } else {
            throw ConfigError(key, "known configuration key");
        }
    }
    if (const char* env = std::getenv("CONTROLLER_COMPARE_SEED")) {
        std::uint64_t s;
        if (!parse_u64(env, s)) {
            throw ConfigError("CONTROLLER_COMPARE_SEED", "64-bit unsigned integer");
        }
        cfg.seed = s;
    }
    cfg.validate();
    return cfg;
}

AnalysisConfig parse_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("config: cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

ControllerDataset parse_dataset_csv_stream(std::istream& in, const std::string& label,
                                           std::optional<int> zone_count) {
    std::string line;
    if (!std::getline(in, line)) throw EmptyFileError("ingest: empty file '" + label + "'");

    const auto header = split_csv(trim(line));
    if (header.size() < 3 || (header.size() - 3) % 3 != 0) {
        throw SchemaError("expected timestamp,oat,energy,zoneK_temp,zoneK_setpoint,zoneK_band");
    }
    const int zones_in_header = static_cast<int>((header.size() - 3) / 3);
    const int zones = zone_count.value_or(zones_in_header);
    const auto expected = expected_header(zones);
    if (header.size() != expected.size()) {
        throw SchemaError("header has " + std::to_string(header.size()) + " columns, expected " +
                          std::to_string(expected.size()) + " for " + std::to_string(zones) +
                          " zones");
    }
    for (std::size_t c = 0; c < expected.size(); ++c) {
        if (trim(header[c]) != expected[c]) throw SchemaError(expected[c]);
    }

    ControllerDataset d;
    d.label = label;
    d.zone_count = zones;

    long row = 1;  // header line
    while (std::getline(in, line)) {
        ++row;
        const std::string_view sv = trim(line);
        if (sv.empty()) continue;
        const auto fields = split_csv(sv);
        if (fields.size() != expected.size()) {
            throw ParseError(row, "row", std::to_string(fields.size()) + " fields");
        }
        HourlyRecord r;
        const auto ts = parse_timestamp(trim(fields[0]));
        if (!ts) throw ParseError(row, "timestamp", std::string(trim(fields[0])));
        r.timestamp = *ts;
        if (!parse_double(fields[1], r.oat)) {
            throw ParseError(row, "oat", std::string(trim(fields[1])));
        }
        if (!parse_double(fields[2], r.energy)) {
            throw ParseError(row, "energy", std::string(trim(fields[2])));
        }
        r.zones.resize(static_cast<std::size_t>(zones));
        for (int z = 0; z < zones; ++z) {
            const std::size_t base = 3 + static_cast<std::size_t>(z) * 3;
            auto& zs = r.zones[static_cast<std::size_t>(z)];
            if (!parse_double(fields[base], zs.temp)) {
                throw ParseError(row, expected[base], std::string(trim(fields[base])));
            }
            if (!parse_double(fields[base + 1], zs.setpoint)) {
                throw ParseError(row, expected[base + 1], std::string(trim(fields[base + 1])));
            }
            if (!parse_double(fields[base + 2], zs.band)) {
                throw ParseError(row, expected[base + 2], std::string(trim(fields[base + 2])));
            }
        }
        d.records.push_back(std::move(r));
    }
    if (d.records.empty()) throw EmptyFileError("ingest: no data rows in '" + label + "'");

    std::stable_sort(d.records.begin(), d.records.end(),
                     [](const HourlyRecord& a, const HourlyRecord& b) {
                         return a.timestamp.epoch_sec < b.timestamp.epoch_sec;
                     });
    return d;
}

ControllerDataset parse_dataset_csv(const std::filesystem::path& path,
                                    std::optional<int> zone_count) {
    std::ifstream in(path);
    if (!in) throw DataError("ingest: cannot open " + path.string());
    return parse_dataset_csv_stream(in, path.stem().string(), zone_count);
}

void write_dataset_csv(const ControllerDataset& d, std::ostream& out) {
    const auto cols = expected_header(d.zone_count);
    for (std::size_t c = 0; c < cols.size(); ++c) {
        out << (c ? "," : "") << cols[c];
    }
    out << '\n';
    for (const auto& r : d.records) {
        out << format_timestamp(r.timestamp) << ',' << format_double(r.oat) << ','
            << format_double(r.energy);
        for (const auto& z : r.zones) {
            out << ',' << format_double(z.temp) << ',' << format_double(z.setpoint) << ','
                << format_double(z.band);
        }
        out << '\n';
    }
}

void write_dataset_csv(const ControllerDataset& d, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw DataError("ingest: cannot write " + path.string());
    write_dataset_csv(d, out);
}

}  // namespace ctrlcmp
