#include "impb/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <ostream>
#include <thread>

namespace impb {

void apply_overrides(ExperimentConfig& cfg, const RunOverrides& overrides) {
    if (overrides.variant) cfg.variants = {*overrides.variant};
    if (overrides.seed) cfg.seeds = {*overrides.seed};
    if (overrides.episodes) cfg.learner.episodes = *overrides.episodes;
}

std::string run_stem(Variant variant, std::uint64_t seed) { return variant_name(variant) + "_" + std::to_string(seed); }

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    return out;
}

RunArtifacts run_one(const ExperimentConfig& cfg, const Benchmark& bench, Variant variant, std::uint64_t seed,
                     const std::filesystem::path& dir) {
    LearnerConfig lc = cfg.learner;
    lc.variant = variant;
    lc.seed = seed;
    Learner learner(lc);
    auto checkpoints = learner.run(bench);

    RunArtifacts art;
    art.variant = variant;
    art.seed = seed;
    art.final_eval = checkpoints.back().eval;
    const std::string stem = run_stem(variant, seed);
    art.curves = dir / (stem + "_curves.csv");
    art.histogram = dir / (stem + "_hist.csv");
    art.memory = dir / (stem + "_memory.jsonl");

    {
        auto out = open_out(art.curves);
        write_curves_header(out);
        write_curves(out, checkpoints, variant_name(variant), seed);
    }
    {
        auto out = open_out(art.histogram);
        write_histogram_header(out);
        Rng rng(cfg.analysis_seed);
        for (SpaceId s : cfg.analysis_spaces) {
            write_histogram(out, s, policy_size_histogram(learner.memory(), s, cfg.analysis_queries, rng));
        }
    }
    {
        auto out = open_out(art.memory);
        learner.memory().dump(out);
    }
    return art;
}

}  // namespace

std::vector<RunArtifacts> run_experiment(const ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                                         std::ostream& log) {
    cfg.validate();
    std::filesystem::create_directories(out_dir);
    {
        auto out = open_out(out_dir / "manifest.txt");
        write_manifest(out, cfg);
    }
    const Benchmark bench = generate_benchmark(cfg.benchmark);

    std::vector<std::pair<Variant, std::uint64_t>> jobs;
    for (Variant v : cfg.variants) {
        for (std::uint64_t s : cfg.seeds) jobs.emplace_back(v, s);
    }
    std::vector<RunArtifacts> results(jobs.size());
    std::vector<std::exception_ptr> errors(jobs.size());
    std::atomic<std::size_t> next{0};
    std::mutex log_mutex;

    const auto worker = [&] {
        for (std::size_t j = next++; j < jobs.size(); j = next++) {
            const auto [variant, seed] = jobs[j];
            try {
                results[j] = run_one(cfg, bench, variant, seed, out_dir);
                const std::lock_guard lock(log_mutex);
                log << run_stem(variant, seed) << ": final global error " << results[j].final_eval.global << '\n';
            } catch (...) {
                errors[j] = std::current_exception();
            }
        }
    };
    unsigned threads = cfg.threads == 0 ? std::max(1U, std::thread::hardware_concurrency()) : cfg.threads;
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, jobs.size()));
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
        worker();
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return results;
}

void analyze_memory(const AnalyzeRequest& req, std::ostream& out, std::ostream& warn) {
    std::ifstream in(req.memory);
    if (!in) throw std::runtime_error("cannot read " + req.memory.string());
    PerfConfig perf;
    perf.gamma = req.gamma;
    const EpisodicMemory memory = EpisodicMemory::load(in, perf);

    write_histogram_header(out);
    Rng rng(req.seed);
    for (SpaceId s : req.spaces) {
        if (memory.count_in(s) == 0) {
            warn << "warning: " << space_label(s) << " has no entries in " << req.memory.string() << '\n';
            continue;
        }
        write_histogram(out, s, policy_size_histogram(memory, s, req.queries, rng));
    }
}

int cmd_run(const std::filesystem::path& config, const std::filesystem::path& out_dir, const RunOverrides& overrides,
            std::ostream& log, std::ostream& err) {
    try {
        ExperimentConfig cfg = load_config(config);
        apply_overrides(cfg, overrides);
        run_experiment(cfg, out_dir, log);
        return 0;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

int cmd_analyze(const AnalyzeRequest& req, const std::optional<std::filesystem::path>& out_file, std::ostream& out,
                std::ostream& err) {
    try {
        if (out_file) {
            auto file = open_out(*out_file);
            analyze_memory(req, file, err);
        } else {
            analyze_memory(req, out, err);
        }
        return 0;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace impb
