#pragma once

#include <filesystem>
#include <string>

#include "ctrlcmp/pipeline.hpp"

namespace ctrlcmp {

/// JSON view of a comparison report. Every numeric leaf carries a unit
/// string; object keys serialize in sorted order, so the byte stream is a
/// pure function of the report.
std::string report_to_json(const ComparisonReport& report);

/// Writes the report document plus plot-ready curve and scatter tables:
///   report.json, energy_curves.csv, comfort_curves.csv,
///   energy_scatter.csv, comfort_scatter.csv
/// All writes are atomic (temp file + rename). Creates out_dir if missing.
void write_report_files(const ComparisonReport& report, const ControllerDataset& d1,
                        const ControllerDataset& d2, const std::filesystem::path& out_dir);

}  // namespace ctrlcmp
