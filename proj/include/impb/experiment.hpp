#ifndef IMPB_EXPERIMENT_HPP
#define IMPB_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "impb/config.hpp"

namespace impb {

/// Command-line overrides applied on top of a loaded config.
struct RunOverrides {
    std::optional<Variant> variant;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> episodes;
};

void apply_overrides(ExperimentConfig& cfg, const RunOverrides& overrides);

struct RunArtifacts {
    Variant variant = Variant::ImPb;
    std::uint64_t seed = 0;
    Evaluation final_eval;
    std::filesystem::path curves, histogram, memory;
};

/// `<variant>_<seed>` prefix shared by a run's files.
std::string run_stem(Variant variant, std::uint64_t seed);

/// Runs every (variant, seed) pair, concurrently up to cfg.threads, and writes
/// curves, histograms, memory dumps and manifest.txt into `out_dir`.
/// Progress lines go to `log`. Results come back in (variant, seed) order.
std::vector<RunArtifacts> run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                                         std::ostream& log);

struct AnalyzeRequest {
    std::filesystem::path memory;
    std::vector<SpaceId> spaces;
    std::size_t queries = 10000;
    std::uint64_t seed = 0;
    double gamma = PerfConfig{}.gamma;
};

/// Writes a histogram table for every requested space. A space absent from
/// the dump yields no rows and a warning on `warn`.
void analyze_memory(const AnalyzeRequest& req, std::ostream& out, std::ostream& warn);

/// CLI entry points; both return a process exit status and never throw.
int cmd_run(const std::filesystem::path& config, const std::filesystem::path& out_dir, const RunOverrides& overrides,
            std::ostream& log, std::ostream& err);
int cmd_analyze(const AnalyzeRequest& req, const std::optional<std::filesystem::path>& out_file, std::ostream& out,
                std::ostream& err);

}  // namespace impb

#endif  // IMPB_EXPERIMENT_HPP
