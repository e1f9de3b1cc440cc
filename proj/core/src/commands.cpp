#include "ctrlcmp/commands.hpp"

#include <ostream>

#include "ctrlcmp/errors.hpp"
#include "ctrlcmp/ingest.hpp"
#include "ctrlcmp/pipeline.hpp"
#include "ctrlcmp/report.hpp"
#include "ctrlcmp/synth.hpp"

namespace ctrlcmp {

namespace {

template <typename Fn>
int guarded(std::ostream& diag, Fn&& fn) {
    try {
        fn();
        return kExitOk;
    } catch (const StatError& e) {
        diag << "error: " << e.what() << '\n';
        return kExitStatError;
    } catch (const DataError& e) {
        diag << "error: " << e.what() << '\n';
        return kExitDataError;
    } catch (const std::exception& e) {
        diag << "error: " << e.what() << '\n';
        return kExitDataError;
    }
}

}  // namespace

int cmd_compare(const CompareArgs& args, std::ostream& diag) {
    return guarded(diag, [&] {
        AnalysisConfig cfg = parse_config(args.config);
        if (args.seed) cfg.seed = *args.seed;
        const ControllerDataset d1 = parse_dataset_csv(args.dataset1, args.zones);
        const ControllerDataset d2 = parse_dataset_csv(args.dataset2, args.zones);
        const ComparisonReport report = run_comparison(d1, d2, cfg, args.workers);
        write_report_files(report, d1, d2, args.out_dir);
        diag << "report written to " << (args.out_dir / "report.json").string() << '\n';
    });
}

int cmd_synth(const SynthArgs& args, std::ostream& diag) {
    return guarded(diag, [&] {
        const SyntheticSpec spec = parse_synth_spec(args.spec);
        SynthResult result = generate_dataset(spec);
        result.dataset.label = args.out.stem().string();
        write_dataset_csv(result.dataset, args.out);
        const std::filesystem::path truth_path = args.out.string() + ".truth.json";
        write_ground_truth_json(result, spec, truth_path);
        diag << "wrote " << result.dataset.records.size() << " hours to " << args.out.string()
             << " (truth: " << truth_path.string() << ")\n";
    });
}

int cmd_mc(const McArgs& args, std::ostream& out, std::ostream& diag) {
    return guarded(diag, [&] {
        const SyntheticSpec spec1 = parse_synth_spec(args.spec1);
        const SyntheticSpec spec2 = parse_synth_spec(args.spec2);
        const AnalysisConfig cfg = parse_config(args.config);
        const StudySummary summary =
            monte_carlo_study(spec1, spec2, cfg, args.trials, args.workers);
        out << format_study_summary(summary);
    });
}

}  // namespace ctrlcmp
