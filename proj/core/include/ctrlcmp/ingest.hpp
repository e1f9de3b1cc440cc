#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "ctrlcmp/datamodel.hpp"

namespace ctrlcmp {

enum class OatDistributionMode { pooled_uniform, hourly_uniform };
enum class BonferroniScope { per_family, family_wide };

std::string_view to_string(OatDistributionMode mode);
std::string_view to_string(BonferroniScope scope);

/// Analysis settings. A value of nullopt for block_length or bandwidth means
/// "auto": the block length resolves to ceil(N^(1/3)) per residual series and
/// the bandwidth is selected by leave-one-out cross-validation.
struct AnalysisConfig {
    double alpha = 0.01;
    double beta = 0.95;
    int replicates = 499;
    std::optional<int> block_length;   // nullopt = auto
    std::optional<double> bandwidth;   // nullopt = auto, degF
    int grid_points = 101;
    OatDistributionMode oat_distribution = OatDistributionMode::pooled_uniform;
    std::uint64_t seed = 1;
    double min_overlap = 5.0;  // degF
    int min_records = kDefaultMinRecords;
    BonferroniScope bonferroni_scope = BonferroniScope::per_family;

    /// Throws ConfigError naming the offending key.
    void validate() const;
};

/// Resolved block length for a series of length n.
int resolve_block_length(const AnalysisConfig& cfg, std::size_t n);

/// Flat key=value file, '#' comments, unspecified keys take the defaults
/// above. The CONTROLLER_COMPARE_SEED environment variable, when set,
/// overrides the seed from the file.
AnalysisConfig parse_config(const std::filesystem::path& path);
AnalysisConfig parse_config_text(std::string_view text);

/// Dataset CSV with the exact header
///   timestamp,oat,energy,zone1_temp,zone1_setpoint,zone1_band,...
/// Rows are sorted by timestamp after parsing (stable). zone_count, when
/// given, must match the header; otherwise it is inferred. Row numbers in
/// errors are 1-based file lines (the header is line 1).
ControllerDataset parse_dataset_csv(const std::filesystem::path& path,
                                    std::optional<int> zone_count = std::nullopt);
ControllerDataset parse_dataset_csv_stream(std::istream& in, const std::string& label,
                                           std::optional<int> zone_count = std::nullopt);

/// Inverse of parse_dataset_csv. Numbers are written in shortest
/// round-trippable form, so parse(write(d)) == d field for field.
void write_dataset_csv(const ControllerDataset& d, std::ostream& out);
void write_dataset_csv(const ControllerDataset& d, const std::filesystem::path& path);

}  // namespace ctrlcmp
