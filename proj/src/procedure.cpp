#include "impb/procedure.hpp"

#include <algorithm>
#include <map>
#include <utility>

#include "impb/local_regression.hpp"

namespace impb {

namespace {

std::vector<double> joined(const Procedure& p) {
    std::vector<double> v(p.first.coords().begin(), p.first.coords().end());
    v.insert(v.end(), p.second.coords().begin(), p.second.coords().end());
    return v;
}

Procedure split(std::span<const double> v, SpaceId first, SpaceId second) {
    const std::size_t d = dim_of(first);
    return {OutcomeVector(first, v.first(d)), OutcomeVector(second, v.subspan(d, dim_of(second)))};
}

Procedure perturbed(std::vector<double> coords, SpaceId first, SpaceId second, double sigma, Rng& rng) {
    std::normal_distribution<double> noise(0.0, sigma);
    for (double& c : coords) c = std::clamp(c + (sigma > 0.0 ? noise(rng) : 0.0), -1.0, 1.0);
    return split(coords, first, second);
}

}  // namespace

void ProcedureConfig::validate() const {
    if (neighbours < 2) throw ValidationError("procedure.neighbours must be at least 2");
    if (!(sigma >= 0.0)) throw ValidationError("procedure.sigma must be non-negative");
    if (!(max_step >= 0.0)) throw ValidationError("procedure.max_step must be non-negative");
}

std::optional<RefinedProcedure> refine_and_build(const Procedure& proc, const EpisodicMemory& memory) {
    auto first = memory.nearest_outcome(proc.first);
    auto second = memory.nearest_outcome(proc.second);
    if (!first || !second) return std::nullopt;
    return RefinedProcedure{concat(first->policy(), second->policy()), Procedure{first->outcome, second->outcome},
                            std::move(*first), std::move(*second)};
}

OutcomeVector random_outcome(Rng& rng, SpaceId space) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::array<double, kMaxOutcomeDim> c{};
    for (std::size_t i = 0; i < dim_of(space); ++i) c[i] = u(rng);
    return OutcomeVector(space, std::span<const double>(c.data(), dim_of(space)));
}

Procedure random_procedure(Rng& rng) {
    std::uniform_int_distribution<std::size_t> pick(0, kNumSpaces - 1);
    const SpaceId a = space_from_index(pick(rng));
    const SpaceId b = space_from_index(pick(rng));
    OutcomeVector first = random_outcome(rng, a);
    OutcomeVector second = random_outcome(rng, b);
    return {first, second};
}

std::optional<ProcedureProposal> local_procedure_optimization(const OutcomeVector& goal, const EpisodicMemory& memory,
                                                              Rng& rng, const ProcedureConfig& cfg) {
    const std::vector<MemoryEntry> nbrs = memory.nearest_procedures(goal, cfg.neighbours);
    if (nbrs.empty()) return std::nullopt;

    const auto fallback = [&](const MemoryEntry& e) {
        const Procedure& p = *e.procedure;
        return ProcedureProposal{perturbed(joined(p), p.first.space(), p.second.space(), cfg.sigma, rng), false};
    };
    if (nbrs.size() < cfg.neighbours) return fallback(nbrs.front());

    // regress only within the most common (space_i, space_j) pair; ties go to
    // the pair of the nearer neighbour
    using Pair = std::pair<SpaceId, SpaceId>;
    std::map<Pair, std::size_t> counts;
    std::vector<Pair> order;
    for (const auto& e : nbrs) {
        const Pair key{e.procedure->first.space(), e.procedure->second.space()};
        if (counts[key]++ == 0) order.push_back(key);
    }
    Pair modal = order.front();
    for (const Pair& key : order) {
        if (counts[key] > counts[modal]) modal = key;
    }

    std::vector<const MemoryEntry*> group;
    for (const auto& e : nbrs) {
        if (Pair{e.procedure->first.space(), e.procedure->second.space()} == modal) group.push_back(&e);
    }
    const MemoryEntry& base_entry = *group.front();
    if (group.size() < 2) return fallback(base_entry);

    const auto sample_of = [](const MemoryEntry& e) {
        return LocalSample{joined(*e.procedure),
                           std::vector<double>(e.outcome.coords().begin(), e.outcome.coords().end())};
    };
    const LocalSample base = sample_of(base_entry);
    std::vector<LocalSample> others;
    for (std::size_t i = 1; i < group.size(); ++i) others.push_back(sample_of(*group[i]));

    const auto step = local_linear_step(base, others, goal.coords(), cfg.max_step);
    if (!step) return fallback(base_entry);
    return ProcedureProposal{perturbed(*step, modal.first, modal.second, cfg.sigma, rng), true};
}

}  // namespace impb
