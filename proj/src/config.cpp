#include "impb/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

namespace impb {

ConfigError::ConfigError(std::string key, const std::string& message)
    : ValidationError(key + ": " + message), key_(std::move(key)) {}

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

/// Splits on commas and whitespace, dropping empty pieces.
std::vector<std::string_view> tokens(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ',' || s[i] == ' ' || s[i] == '\t')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ',' && s[j] != ' ' && s[j] != '\t') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

double to_double(const std::string& key, std::string_view v) {
    double out = 0.0;
    const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || end != v.data() + v.size() || !std::isfinite(out)) {
        throw ConfigError(key, "expected a finite number, got '" + std::string(v) + "'");
    }
    return out;
}

std::uint64_t to_uint(const std::string& key, std::string_view v) {
    std::uint64_t out = 0;
    const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || end != v.data() + v.size()) {
        throw ConfigError(key, "expected a non-negative integer, got '" + std::string(v) + "'");
    }
    return out;
}

std::string fmt_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, res.ptr};
}

template <class T>
std::string join(const T& values, const std::function<std::string(typename T::value_type)>& f) {
    std::string out;
    for (const auto& v : values) {
        if (!out.empty()) out += ", ";
        out += f(v);
    }
    return out;
}

template <class Arr>
void set_array(const std::string& key, std::string_view v, Arr& arr) {
    const auto t = tokens(v);
    if (t.size() != arr.size()) {
        throw ConfigError(key, "expected " + std::to_string(arr.size()) + " numbers, got " + std::to_string(t.size()));
    }
    for (std::size_t i = 0; i < arr.size(); ++i) arr[i] = to_double(key, t[i]);
}

template <class Arr>
std::string get_array(const Arr& arr) {
    std::string out;
    for (double x : arr) {
        if (!out.empty()) out += ", ";
        out += fmt_double(x);
    }
    return out;
}

struct Field {
    std::string key;
    std::function<void(ExperimentConfig&, const std::string&, std::string_view)> set;
    std::function<std::string(const ExperimentConfig&)> get;
};

using DoubleRef = double& (*)(ExperimentConfig&);

Field real(std::string key, DoubleRef ref) {
    return {std::move(key), [ref](ExperimentConfig& c, const std::string& k, std::string_view v) { ref(c) = to_double(k, v); },
            [ref](const ExperimentConfig& c) { return fmt_double(ref(const_cast<ExperimentConfig&>(c))); }};
}

template <class T>
Field integer(std::string key, T& (*ref)(ExperimentConfig&)) {
    return {std::move(key),
            [ref](ExperimentConfig& c, const std::string& k, std::string_view v) {
                const std::uint64_t x = to_uint(k, v);
                if (x > std::numeric_limits<T>::max()) throw ConfigError(k, "value too large");
                ref(c) = static_cast<T>(x);
            },
            [ref](const ExperimentConfig& c) { return std::to_string(ref(const_cast<ExperimentConfig&>(c))); }};
}

template <class Arr>
Field array(std::string key, Arr& (*ref)(ExperimentConfig&)) {
    return {std::move(key), [ref](ExperimentConfig& c, const std::string& k, std::string_view v) { set_array(k, v, ref(c)); },
            [ref](const ExperimentConfig& c) { return get_array(ref(const_cast<ExperimentConfig&>(c))); }};
}

Field grid_field(std::size_t s) {
    std::string key = "benchmark.grid.O" + std::to_string(s);
    return {key,
            [s](ExperimentConfig& c, const std::string& k, std::string_view v) {
                std::vector<std::size_t> counts;
                if (v != "none") {
                    for (auto t : tokens(v)) counts.push_back(static_cast<std::size_t>(to_uint(k, t)));
                }
                c.benchmark.grid[s] = std::move(counts);
            },
            [s](const ExperimentConfig& c) {
                const auto& g = c.benchmark.grid[s];
                if (g.empty()) return std::string("none");
                std::string out;
                for (std::size_t n : g) out += (out.empty() ? "" : " ") + std::to_string(n);
                return out;
            }};
}

const std::vector<Field>& fields() {
    static const std::vector<Field> all = [] {
        std::vector<Field> f;
        // preset first: later grid keys override it
        f.push_back({"benchmark",
                     [](ExperimentConfig& c, const std::string& k, std::string_view v) {
                         if (v == "desk") c.benchmark = BenchmarkSpec::desk();
                         else if (v == "full") c.benchmark = BenchmarkSpec::full();
                         else if (v == "custom") c.benchmark = BenchmarkSpec{};
                         else throw ConfigError(k, "expected desk, full or custom, got '" + std::string(v) + "'");
                     },
                     [](const ExperimentConfig&) { return std::string("custom"); }});
        for (std::size_t s = 0; s < kNumSpaces; ++s) f.push_back(grid_field(s));
        f.push_back(integer<std::size_t>("benchmark.pad_count", [](ExperimentConfig& c) -> std::size_t& { return c.benchmark.pad_count; }));
        f.push_back({"benchmark.pad_space",
                     [](ExperimentConfig& c, const std::string& k, std::string_view v) {
                         const auto s = parse_space(v);
                         if (!s) throw ConfigError(k, "unknown space '" + std::string(v) + "'");
                         c.benchmark.pad_space = *s;
                     },
                     [](const ExperimentConfig& c) { return "O" + std::to_string(index_of(c.benchmark.pad_space)); }});
        f.push_back(integer<std::uint64_t>("benchmark.pad_seed", [](ExperimentConfig& c) -> std::uint64_t& { return c.benchmark.pad_seed; }));

        f.push_back({"experiment.variants",
                     [](ExperimentConfig& c, const std::string& k, std::string_view v) {
                         c.variants.clear();
                         for (auto t : tokens(v)) {
                             const auto var = parse_variant(t);
                             if (!var) throw ConfigError(k, "unknown variant '" + std::string(t) + "'");
                             c.variants.push_back(*var);
                         }
                     },
                     [](const ExperimentConfig& c) {
                         return join(c.variants, std::function<std::string(Variant)>(variant_name));
                     }});
        f.push_back({"experiment.seeds",
                     [](ExperimentConfig& c, const std::string& k, std::string_view v) {
                         c.seeds.clear();
                         for (auto t : tokens(v)) c.seeds.push_back(to_uint(k, t));
                     },
                     [](const ExperimentConfig& c) {
                         return join(c.seeds, std::function<std::string(std::uint64_t)>(
                                                  [](std::uint64_t s) { return std::to_string(s); }));
                     }});
        f.push_back(integer<std::size_t>("experiment.episodes", [](ExperimentConfig& c) -> std::size_t& { return c.learner.episodes; }));
        f.push_back(integer<std::size_t>("experiment.checkpoint_every", [](ExperimentConfig& c) -> std::size_t& { return c.learner.checkpoint_every; }));
        f.push_back(integer<unsigned>("experiment.threads", [](ExperimentConfig& c) -> unsigned& { return c.threads; }));
        f.push_back(integer<unsigned>("experiment.eval_threads", [](ExperimentConfig& c) -> unsigned& { return c.eval_threads; }));

        f.push_back(real("learner.near_threshold", [](ExperimentConfig& c) -> double& { return c.learner.near_threshold; }));
        f.push_back(real("learner.sigma_policy", [](ExperimentConfig& c) -> double& { return c.learner.sigma_policy; }));
        f.push_back(integer<std::size_t>("learner.neighbours", [](ExperimentConfig& c) -> std::size_t& { return c.learner.neighbours; }));
        f.push_back(real("learner.max_step", [](ExperimentConfig& c) -> double& { return c.learner.max_step; }));
        f.push_back(integer<std::size_t>("learner.max_random_size", [](ExperimentConfig& c) -> std::size_t& { return c.learner.max_random_size; }));
        f.push_back(real("learner.size_geometric_p", [](ExperimentConfig& c) -> double& { return c.learner.size_geometric_p; }));

        f.push_back(real("memory.gamma", [](ExperimentConfig& c) -> double& { return c.learner.perf.gamma; }));
        f.push_back(integer<std::size_t>("memory.brute_force_below", [](ExperimentConfig& c) -> std::size_t& { return c.learner.perf.brute_force_below; }));

        f.push_back(real("dmp.spring", [](ExperimentConfig& c) -> double& { return c.learner.dmp.spring; }));
        f.push_back(real("dmp.damping", [](ExperimentConfig& c) -> double& { return c.learner.dmp.damping; }));
        f.push_back(real("dmp.phase_decay", [](ExperimentConfig& c) -> double& { return c.learner.dmp.phase_decay; }));
        f.push_back(real("dmp.duration", [](ExperimentConfig& c) -> double& { return c.learner.dmp.duration; }));
        f.push_back(real("dmp.dt", [](ExperimentConfig& c) -> double& { return c.learner.dmp.dt; }));
        f.push_back(real("dmp.weight_scale", [](ExperimentConfig& c) -> double& { return c.learner.dmp.weight_scale; }));
        f.push_back(array("dmp.basis_times", +[](ExperimentConfig& c) -> std::array<double, kWeightsPerJoint>& { return c.learner.dmp.basis_times; }));

        f.push_back(real("world.link_length", [](ExperimentConfig& c) -> double& { return c.learner.world.link_length; }));
        f.push_back(array("world.initial_angles", +[](ExperimentConfig& c) -> std::array<double, kJoints>& { return c.learner.world.initial_angles; }));
        f.push_back(real("world.initial_z", [](ExperimentConfig& c) -> double& { return c.learner.world.initial_z; }));
        f.push_back(array("world.pen_home", +[](ExperimentConfig& c) -> Vec3& { return c.learner.world.pen_home; }));
        f.push_back(array("world.joystick1_home", +[](ExperimentConfig& c) -> Vec3& { return c.learner.world.joystick1_home; }));
        f.push_back(array("world.joystick2_home", +[](ExperimentConfig& c) -> Vec3& { return c.learner.world.joystick2_home; }));
        f.push_back(real("world.joystick_side", [](ExperimentConfig& c) -> double& { return c.learner.world.joystick_side; }));
        f.push_back(real("world.grab_radius", [](ExperimentConfig& c) -> double& { return c.learner.world.grab_radius; }));
        f.push_back(real("world.floor_z", [](ExperimentConfig& c) -> double& { return c.learner.world.floor_z; }));
        f.push_back(real("world.contact_z", [](ExperimentConfig& c) -> double& { return c.learner.world.contact_z; }));
        f.push_back(real("world.pen_break_z", [](ExperimentConfig& c) -> double& { return c.learner.world.pen_break_z; }));

        f.push_back(integer<std::size_t>("interest.split_threshold", [](ExperimentConfig& c) -> std::size_t& { return c.learner.interest.split_threshold; }));
        f.push_back(integer<std::size_t>("interest.min_child", [](ExperimentConfig& c) -> std::size_t& { return c.learner.interest.min_child; }));
        f.push_back(integer<std::size_t>("interest.window", [](ExperimentConfig& c) -> std::size_t& { return c.learner.interest.window; }));
        f.push_back(integer<std::size_t>("interest.split_quantiles", [](ExperimentConfig& c) -> std::size_t& { return c.learner.interest.split_quantiles; }));
        f.push_back(real("interest.p_exploit", [](ExperimentConfig& c) -> double& { return c.learner.interest.p_exploit; }));
        f.push_back(real("interest.p_region", [](ExperimentConfig& c) -> double& { return c.learner.interest.p_region; }));
        f.push_back(real("interest.p_random", [](ExperimentConfig& c) -> double& { return c.learner.interest.p_random; }));
        f.push_back(real("interest.cost_policy", [](ExperimentConfig& c) -> double& { return c.learner.interest.costs[0]; }));
        f.push_back(real("interest.cost_procedure", [](ExperimentConfig& c) -> double& { return c.learner.interest.costs[1]; }));

        f.push_back(integer<std::size_t>("procedure.neighbours", [](ExperimentConfig& c) -> std::size_t& { return c.learner.procedure.neighbours; }));
        f.push_back(real("procedure.sigma", [](ExperimentConfig& c) -> double& { return c.learner.procedure.sigma; }));
        f.push_back(real("procedure.max_step", [](ExperimentConfig& c) -> double& { return c.learner.procedure.max_step; }));

        f.push_back(integer<std::size_t>("analysis.queries", [](ExperimentConfig& c) -> std::size_t& { return c.analysis_queries; }));
        f.push_back({"analysis.spaces",
                     [](ExperimentConfig& c, const std::string& k, std::string_view v) {
                         c.analysis_spaces.clear();
                         for (auto t : tokens(v)) {
                             const auto s = parse_space(t);
                             if (!s) throw ConfigError(k, "unknown space '" + std::string(t) + "'");
                             c.analysis_spaces.push_back(*s);
                         }
                     },
                     [](const ExperimentConfig& c) {
                         return join(c.analysis_spaces, std::function<std::string(SpaceId)>(
                                                            [](SpaceId s) { return "O" + std::to_string(index_of(s)); }));
                     }});
        f.push_back(integer<std::uint64_t>("analysis.seed", [](ExperimentConfig& c) -> std::uint64_t& { return c.analysis_seed; }));
        return f;
    }();
    return all;
}

/// Picks the registered key a validation message talks about, longest first.
std::string blame(const std::string& message, const std::string& fallback) {
    std::string best;
    for (const Field& f : fields()) {
        if (f.key.size() > best.size() && message.find(f.key) != std::string::npos) best = f.key;
    }
    return best.empty() ? fallback : best;
}

}  // namespace

void ExperimentConfig::validate() const {
    const auto section = [](const std::string& prefix, const auto& check) {
        try {
            check();
        } catch (const ConfigError&) {
            throw;
        } catch (const ValidationError& e) {
            throw ConfigError(blame(e.what(), prefix), e.what());
        }
    };
    section("dmp", [&] { learner.dmp.validate(); });
    section("world", [&] { learner.world.validate(); });
    section("memory", [&] { learner.perf.validate(); });
    section("interest", [&] { learner.interest.validate(); });
    section("procedure", [&] { learner.procedure.validate(); });
    section("learner", [&] { learner.validate(); });
    section("benchmark", [&] { benchmark.validate(); });
    if (variants.empty()) throw ConfigError("experiment.variants", "at least one variant is required");
    if (seeds.empty()) throw ConfigError("experiment.seeds", "at least one seed is required");
    auto sorted = seeds;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        throw ConfigError("experiment.seeds", "seeds must be distinct");
    }
    auto vars = variants;
    std::sort(vars.begin(), vars.end());
    if (std::adjacent_find(vars.begin(), vars.end()) != vars.end()) {
        throw ConfigError("experiment.variants", "variants must be distinct");
    }
    if (eval_threads == 0) throw ConfigError("experiment.eval_threads", "must be at least 1");
}

ExperimentConfig parse_config(std::string_view text, const std::string& origin) {
    std::map<std::string, std::string, std::less<>> entries;
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line(raw);
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        const std::string where = origin + ":" + std::to_string(line_no);
        if (eq == std::string_view::npos) {
            throw ConfigError(std::string(line), where + ": expected 'key = value'");
        }
        std::string key(trim(line.substr(0, eq)));
        const std::string_view value = trim(line.substr(eq + 1));
        const auto& fs = fields();
        if (std::none_of(fs.begin(), fs.end(), [&](const Field& f) { return f.key == key; })) {
            throw ConfigError(key, where + ": unknown key");
        }
        if (!entries.emplace(key, std::string(value)).second) throw ConfigError(key, where + ": duplicate key");
    }

    ExperimentConfig cfg;
    for (const Field& f : fields()) {
        if (auto it = entries.find(f.key); it != entries.end()) f.set(cfg, f.key, it->second);
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("--config", "cannot read " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.string());
}

void write_manifest(std::ostream& out, const ExperimentConfig& cfg) {
    for (const Field& f : fields()) out << f.key << " = " << f.get(cfg) << '\n';
}

std::vector<std::string> config_keys() {
    std::vector<std::string> keys;
    for (const Field& f : fields()) keys.push_back(f.key);
    return keys;
}

}  // namespace impb
