#include "impb/memory.hpp"

#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include <json.hpp>

namespace impb {

namespace {

using nlohmann::json;

json outcome_json(const OutcomeVector& o) {
    return json(std::vector<double>(o.coords().begin(), o.coords().end()));
}

OutcomeVector outcome_from(std::size_t space, const json& coords) {
    const auto v = coords.get<std::vector<double>>();
    return OutcomeVector(space_from_index(space), v);
}

}  // namespace

void PerfConfig::validate() const {
    if (!(gamma > 1.0) || !std::isfinite(gamma)) throw ValidationError("memory.gamma must be a finite value > 1");
}

double performance(double distance, std::size_t size, const PerfConfig& cfg) {
    return distance * std::pow(cfg.gamma, static_cast<double>(size));
}

double performance(const MemoryEntry& entry, const OutcomeVector& goal, const PerfConfig& cfg) {
    return performance(normalized_distance(entry.outcome, goal), entry.size, cfg);
}

EpisodicMemory::EpisodicMemory(PerfConfig cfg) : cfg_(cfg), by_space_size_(kNumSpaces) {
    cfg_.validate();
    for (std::size_t s = 0; s < kNumSpaces; ++s) {
        by_space_.push_back(make_index(space_from_index(s)));
        procedures_.push_back(make_index(space_from_index(s)));
    }
}

SpatialIndex EpisodicMemory::make_index(SpaceId s) const {
    return SpatialIndex(dim_of(s), space_diameter(s), cfg_.brute_force_below);
}

void EpisodicMemory::append(std::shared_ptr<const PolicyParams> source, std::size_t size,
                            const OutcomeVector& outcome, const std::optional<Procedure>& procedure,
                            std::uint32_t episode) {
    if (!source || size == 0 || size > source->size()) throw ValidationError("memory entry has an invalid policy prefix");
    MemoryEntry e;
    e.id = static_cast<std::uint32_t>(entries_.size());
    e.episode = episode;
    e.source = std::move(source);
    e.size = size;
    e.outcome = outcome;
    e.procedure = procedure;

    const std::size_t s = index_of(outcome.space());
    by_space_[s].insert(e.id, outcome.coords(), std::pow(cfg_.gamma, static_cast<double>(size)));
    auto it = by_space_size_[s].find(size);
    if (it == by_space_size_[s].end()) it = by_space_size_[s].emplace(size, make_index(outcome.space())).first;
    it->second.insert(e.id, outcome.coords());
    if (procedure) procedures_[s].insert(e.id, outcome.coords());

    entries_.push_back(std::move(e));
    episodes_ = std::max<std::size_t>(episodes_, std::size_t{episode} + 1);
}

std::size_t EpisodicMemory::record(const EpisodeTrace& trace, const std::optional<Procedure>& procedure) {
    const auto source = std::make_shared<const PolicyParams>(trace.policy);
    const auto episode = static_cast<std::uint32_t>(episodes_);
    std::size_t added = 0;
    for (std::size_t k = 0; k < trace.prefix_outcomes.size(); ++k) {
        const bool full = k + 1 == trace.policy.size();
        for (const OutcomeVector& o : trace.prefix_outcomes[k]) {
            append(source, k + 1, o, full ? procedure : std::nullopt, episode);
            ++added;
        }
    }
    episodes_ = std::size_t{episode} + 1;
    return added;
}

std::size_t EpisodicMemory::count_in(SpaceId space) const { return by_space_[index_of(space)].size(); }

std::size_t EpisodicMemory::procedures_in(SpaceId space) const { return procedures_[index_of(space)].size(); }

std::optional<MemoryEntry> EpisodicMemory::nearest_outcome(const OutcomeVector& goal) const {
    const IndexHit h = by_space_[index_of(goal.space())].best(goal.coords(), false);
    if (!h.valid()) return std::nullopt;
    return entries_[h.id];
}

std::optional<MemoryEntry> EpisodicMemory::best_policy_for(const OutcomeVector& goal) const {
    const IndexHit h = by_space_[index_of(goal.space())].best(goal.coords(), true);
    if (!h.valid()) return std::nullopt;
    return entries_[h.id];
}

std::vector<MemoryEntry> EpisodicMemory::nearest_of_size(const OutcomeVector& goal, std::size_t size,
                                                         std::size_t k) const {
    std::vector<MemoryEntry> out;
    const auto& m = by_space_size_[index_of(goal.space())];
    const auto it = m.find(size);
    if (it == m.end()) return out;
    for (const IndexHit& h : it->second.k_nearest(goal.coords(), k)) out.push_back(entries_[h.id]);
    return out;
}

std::vector<MemoryEntry> EpisodicMemory::nearest_procedures(const OutcomeVector& goal, std::size_t k) const {
    std::vector<MemoryEntry> out;
    for (const IndexHit& h : procedures_[index_of(goal.space())].k_nearest(goal.coords(), k)) {
        out.push_back(entries_[h.id]);
    }
    return out;
}

// Consecutive entries of one executed policy share their primitives: each
// line carries only the primitives past `policy_from`, the previous line's prefix.
void EpisodicMemory::dump(std::ostream& out) const {
    const PolicyParams* source = nullptr;
    std::size_t written = 0;
    for (const MemoryEntry& e : entries_) {
        if (e.source.get() != source || e.size < written) {
            source = e.source.get();
            written = 0;
        }
        json j;
        j["episode"] = e.episode;
        j["policy_from"] = written;
        std::vector<double> flat;
        for (std::size_t k = written; k < e.size; ++k) {
            const auto& v = (*source)[k].values();
            flat.insert(flat.end(), v.begin(), v.end());
        }
        j["policy"] = flat;
        j["space"] = index_of(e.space());
        j["outcome"] = outcome_json(e.outcome);
        j["prefix"] = e.size;
        if (e.procedure) {
            j["procedure"] = {{"space_i", index_of(e.procedure->first.space())},
                              {"coords_i", outcome_json(e.procedure->first)},
                              {"space_j", index_of(e.procedure->second.space())},
                              {"coords_j", outcome_json(e.procedure->second)}};
        } else {
            j["procedure"] = nullptr;
        }
        out << j.dump() << '\n';
        written = e.size;
    }
}

EpisodicMemory EpisodicMemory::load(std::istream& in, PerfConfig cfg) {
    EpisodicMemory mem(cfg);
    struct Pending {
        std::size_t prefix;
        OutcomeVector outcome;
        std::optional<Procedure> procedure;
        std::uint32_t episode;
    };
    std::vector<double> flat;
    std::vector<Pending> pending;
    const auto flush = [&] {
        if (pending.empty()) return;
        auto policy = std::make_shared<const PolicyParams>(PolicyParams::from_flat(flat));
        for (const Pending& p : pending) mem.append(policy, p.prefix, p.outcome, p.procedure, p.episode);
        pending.clear();
        flat.clear();
    };

    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        try {
            const json j = json::parse(line);
            const auto from = j.value("policy_from", std::size_t{0});
            if (from == 0) flush();
            if (from * kPrimitiveDim != flat.size()) throw ValidationError("policy_from does not continue the previous line");
            const auto part = j.at("policy").get<std::vector<double>>();
            flat.insert(flat.end(), part.begin(), part.end());
            const auto prefix = j.at("prefix").get<std::size_t>();
            if (prefix == 0 || prefix * kPrimitiveDim != flat.size()) {
                throw ValidationError("prefix does not match policy length");
            }
            const OutcomeVector outcome = outcome_from(j.at("space").get<std::size_t>(), j.at("outcome"));
            std::optional<Procedure> proc;
            if (const auto& p = j.at("procedure"); !p.is_null()) {
                proc = Procedure{outcome_from(p.at("space_i").get<std::size_t>(), p.at("coords_i")),
                                 outcome_from(p.at("space_j").get<std::size_t>(), p.at("coords_j"))};
            }
            pending.push_back({prefix, outcome, proc, j.value("episode", 0U)});
        } catch (const json::exception& ex) {
            throw ValidationError("memory dump line " + std::to_string(line_no) + ": " + ex.what());
        } catch (const ValidationError& ex) {
            throw ValidationError("memory dump line " + std::to_string(line_no) + ": " + ex.what());
        }
    }
    flush();
    return mem;
}

}  // namespace impb
