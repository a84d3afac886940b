#ifndef IMPB_MEMORY_HPP
#define IMPB_MEMORY_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "impb/arm_sim.hpp"
#include "impb/dmp.hpp"
#include "impb/outcome.hpp"
#include "impb/spatial_index.hpp"

namespace impb {

struct PerfConfig {
    double gamma = 1.2;  // length penalty base, must exceed 1
    std::size_t brute_force_below = 64;

    void validate() const;
};

/// One reached outcome together with the policy prefix that produced it.
struct MemoryEntry {
    std::uint32_t id = 0;       // insertion order
    std::uint32_t episode = 0;  // index of the recorded trace
    std::shared_ptr<const PolicyParams> source;  // full executed policy
    std::size_t size = 0;                         // prefix length k; the entry's policy is source[0..k)
    OutcomeVector outcome;
    std::optional<Procedure> procedure;

    PolicyParams policy() const { return source->prefix(size); }
    SpaceId space() const { return outcome.space(); }
};

/// d(outcome, goal) * gamma^n where n is the entry's policy size. Lower is better.
double performance(const MemoryEntry& entry, const OutcomeVector& goal, const PerfConfig& cfg);
double performance(double distance, std::size_t size, const PerfConfig& cfg);

/// Append-only log of everything the learner executed, indexed per task space.
class EpisodicMemory {
public:
    explicit EpisodicMemory(PerfConfig cfg = {});

    const PerfConfig& config() const { return cfg_; }

    /// Adds one entry per (prefix, outcome). The procedure, when given,
    /// annotates only the entries of the full policy. Returns the entry count added.
    std::size_t record(const EpisodeTrace& trace, const std::optional<Procedure>& procedure = std::nullopt);

    /// Appends a single pre-built entry (used when loading dumps).
    void append(std::shared_ptr<const PolicyParams> source, std::size_t size, const OutcomeVector& outcome,
                const std::optional<Procedure>& procedure, std::uint32_t episode);

    std::size_t size() const { return entries_.size(); }
    std::size_t episodes() const { return episodes_; }
    const std::vector<MemoryEntry>& entries() const { return entries_; }
    const MemoryEntry& entry(std::uint32_t id) const { return entries_.at(id); }
    std::size_t count_in(SpaceId space) const;
    std::size_t procedures_in(SpaceId space) const;

    /// Entry whose outcome is closest to `goal` in plain normalized distance.
    std::optional<MemoryEntry> nearest_outcome(const OutcomeVector& goal) const;
    /// Entry minimizing performance(entry, goal): the inverse model.
    std::optional<MemoryEntry> best_policy_for(const OutcomeVector& goal) const;

    /// k nearest entries in goal's space whose policies have exactly `size` primitives.
    std::vector<MemoryEntry> nearest_of_size(const OutcomeVector& goal, std::size_t size, std::size_t k) const;
    /// k nearest procedure-annotated entries in goal's space.
    std::vector<MemoryEntry> nearest_procedures(const OutcomeVector& goal, std::size_t k) const;

    /// One JSON object per line.
    void dump(std::ostream& out) const;
    static EpisodicMemory load(std::istream& in, PerfConfig cfg = {});

private:
    SpatialIndex make_index(SpaceId s) const;

    PerfConfig cfg_;
    std::vector<MemoryEntry> entries_;
    std::size_t episodes_ = 0;
    std::vector<SpatialIndex> by_space_;                                // weighted by gamma^n
    std::vector<std::map<std::size_t, SpatialIndex>> by_space_size_;    // per policy size
    std::vector<SpatialIndex> procedures_;                              // procedure-annotated only
};

}  // namespace impb

#endif  // IMPB_MEMORY_HPP
