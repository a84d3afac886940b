// impb: run learning experiments and analyze their memory dumps.

#include <CLI11.hpp>

#include <iostream>

#include "impb/experiment.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Intrinsically motivated learner with procedures: experiments and analysis"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string variant_text;
    std::uint64_t seed = 0;
    std::size_t episodes = 0;
    auto* run = app.add_subcommand("run", "run every (variant, seed) pair of a config");
    run->add_option("--config", config_path, "config file (key = value lines)")->required()->check(CLI::ExistingFile);
    run->add_option("--out", out_dir, "output directory")->required();
    auto* variant_opt = run->add_option("--variant", variant_text, "run only this variant (IM-PB, Random-PB, SAGG-RIAC, RandomPolicy)");
    auto* seed_opt = run->add_option("--seed", seed, "run only this seed");
    auto* episodes_opt = run->add_option("--episodes", episodes, "episode budget per run")->check(CLI::PositiveNumber);

    impb::AnalyzeRequest req;
    std::vector<std::string> space_texts;
    std::string analyze_out;
    auto* analyze = app.add_subcommand("analyze", "policy-size histogram of a memory dump");
    analyze->add_option("--memory", req.memory, "memory dump (.jsonl)")->required()->check(CLI::ExistingFile);
    analyze->add_option("--space", space_texts, "task spaces, e.g. Ω0 or O0; repeatable")->required();
    analyze->add_option("--queries", req.queries, "uniform goals drawn per space")->capture_default_str();
    analyze->add_option("--seed", req.seed, "query seed")->capture_default_str();
    analyze->add_option("--gamma", req.gamma, "length penalty base used by the inverse model")->capture_default_str();
    auto* analyze_out_opt = analyze->add_option("--out", analyze_out, "output file (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) {
        impb::RunOverrides ov;
        if (*variant_opt) {
            ov.variant = impb::parse_variant(variant_text);
            if (!ov.variant) {
                std::cerr << "error: unknown variant '" << variant_text << "'\n";
                return 2;
            }
        }
        if (*seed_opt) ov.seed = seed;
        if (*episodes_opt) ov.episodes = episodes;
        return impb::cmd_run(config_path, out_dir, ov, std::cout, std::cerr);
    }

    for (const auto& t : space_texts) {
        const auto s = impb::parse_space(t);
        if (!s) {
            std::cerr << "error: unknown space '" << t << "'\n";
            return 2;
        }
        req.spaces.push_back(*s);
    }
    std::optional<std::filesystem::path> out_file;
    if (*analyze_out_opt) out_file = analyze_out;
    return impb::cmd_analyze(req, out_file, std::cout, std::cerr);
}
