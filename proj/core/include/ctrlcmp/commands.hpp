#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

namespace ctrlcmp {

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 2;
inline constexpr int kExitStatError = 3;

struct CompareArgs {
    std::filesystem::path dataset1;
    std::filesystem::path dataset2;
    std::filesystem::path config;
    std::filesystem::path out_dir;
    std::optional<std::uint64_t> seed;  // overrides config and environment
    std::optional<int> zones;
    unsigned workers = 1;
};

struct SynthArgs {
    std::filesystem::path spec;
    std::filesystem::path out;
};

struct McArgs {
    std::filesystem::path spec1;
    std::filesystem::path spec2;
    std::filesystem::path config;
    int trials = 0;
    unsigned workers = 1;
};

/// Full comparison workflow; writes report files under args.out_dir.
int cmd_compare(const CompareArgs& args, std::ostream& diag);

/// Generates a dataset CSV plus a ground-truth sidecar (<out>.truth.json).
int cmd_synth(const SynthArgs& args, std::ostream& diag);

/// Monte Carlo study; prints the summary table to out.
int cmd_mc(const McArgs& args, std::ostream& out, std::ostream& diag);

}  // namespace ctrlcmp
