#ifndef IMPB_CONFIG_HPP
#define IMPB_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "impb/eval.hpp"
#include "impb/learner.hpp"

namespace impb {

/// Raised for malformed or out-of-range config entries; `key()` names the culprit.
class ConfigError : public ValidationError {
public:
    ConfigError(std::string key, const std::string& message);
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

/// Everything an experiment run needs. `learner.variant` and `learner.seed`
/// are overwritten per run from `variants` and `seeds`.
struct ExperimentConfig {
    LearnerConfig learner;
    BenchmarkSpec benchmark = BenchmarkSpec::desk();
    std::vector<Variant> variants{Variant::ImPb, Variant::RandomPb, Variant::SaggRiac, Variant::RandomPolicy};
    std::vector<std::uint64_t> seeds{1, 2, 3};
    unsigned threads = 0;       // concurrent runs, 0 = hardware concurrency
    unsigned eval_threads = 1;  // per-run benchmark evaluation
    std::size_t analysis_queries = 10000;
    std::vector<SpaceId> analysis_spaces{SpaceId::Tip, SpaceId::Pen, SpaceId::Drawing,
                                         SpaceId::Joystick1, SpaceId::Joystick2, SpaceId::Character};
    std::uint64_t analysis_seed = 0;

    void validate() const;
};

/// Parses `key = value` lines; `#` starts a comment. Unknown keys, bad values
/// and duplicates raise ConfigError. `origin` only decorates messages.
ExperimentConfig parse_config(std::string_view text, const std::string& origin = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Every key with its resolved value, in a form parse_config accepts.
void write_manifest(std::ostream& out, const ExperimentConfig& cfg);

/// Keys recognized by the parser, in manifest order.
std::vector<std::string> config_keys();

}  // namespace impb

#endif  // IMPB_CONFIG_HPP
