#include "impb/interest.hpp"

#include <algorithm>
#include <cmath>

#include "impb/error.hpp"

namespace impb {

std::string strategy_name(Strategy s) {
    return s == Strategy::PolicyExploration ? "policy" : "procedure";
}

void InterestConfig::validate() const {
    if (split_threshold < 2 * min_child) throw ValidationError("interest.split_threshold must be >= 2 * interest.min_child");
    if (min_child == 0) throw ValidationError("interest.min_child must be positive");
    if (window < 2) throw ValidationError("interest.window must be at least 2");
    if (split_quantiles < 2) throw ValidationError("interest.split_quantiles must be at least 2");
    for (double p : {p_exploit, p_region, p_random}) {
        if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("selection probabilities must lie in [0, 1]");
    }
    if (std::abs(p_exploit + p_region + p_random - 1.0) > 1e-9) {
        throw ValidationError("interest.p_exploit + p_region + p_random must sum to 1");
    }
    for (double k : costs) {
        if (!(k > 0.0) || !std::isfinite(k)) throw ValidationError("strategy costs must be positive");
    }
}

Region Region::whole(SpaceId s) {
    Region r;
    r.space = s;
    for (std::size_t i = 0; i < dim_of(s); ++i) {
        r.lo[i] = -1.0;
        r.hi[i] = 1.0;
    }
    return r;
}

bool Region::contains(const OutcomeVector& p) const {
    if (p.space() != space) return false;
    for (std::size_t i = 0; i < dim_of(space); ++i) {
        if (p[i] < lo[i]) return false;
        if (p[i] >= hi[i] && !(hi[i] == 1.0 && p[i] == 1.0)) return false;
    }
    return true;
}

double Region::volume() const {
    double v = 1.0;
    for (std::size_t i = 0; i < dim_of(space); ++i) v *= hi[i] - lo[i];
    return v;
}

double competence(const OutcomeVector& goal, const OutcomeVector& reached) {
    return -normalized_distance(reached, goal);
}

double progress(std::span<const Attempt> attempts, std::size_t window, std::optional<Strategy> strategy) {
    std::vector<double> history;
    for (const Attempt& a : attempts) {
        if (a.targeted && (!strategy || a.strategy == *strategy)) history.push_back(a.competence);
    }
    if (window > 0 && history.size() > window) history.erase(history.begin(), history.end() - static_cast<long>(window));
    const std::size_t m = history.size();
    if (m < 2) return 0.0;
    const std::size_t older = m / 2;
    double old_sum = 0.0;
    double new_sum = 0.0;
    for (std::size_t i = 0; i < older; ++i) old_sum += history[i];
    for (std::size_t i = older; i < m; ++i) new_sum += history[i];
    return new_sum / static_cast<double>(m - older) - old_sum / static_cast<double>(older);
}

InterestModel::InterestModel(InterestConfig cfg, std::vector<Strategy> strategies)
    : cfg_(cfg), strategies_(std::move(strategies)) {
    cfg_.validate();
    if (strategies_.empty()) throw ValidationError("interest model needs at least one strategy");
    for (std::size_t s = 0; s < kNumSpaces; ++s) regions_[s].push_back(Region::whole(space_from_index(s)));
}

std::size_t InterestModel::region_count() const {
    std::size_t n = 0;
    for (const auto& v : regions_) n += v.size();
    return n;
}

double InterestModel::interest(const Region& r, Strategy s) const {
    return std::abs(impb::progress(r.attempts, cfg_.window, s)) / cfg_.cost(s);
}

void InterestModel::refresh(Region& r) const {
    for (std::size_t s = 0; s < kNumStrategies; ++s) r.interest[s] = interest(r, static_cast<Strategy>(s));
}

std::size_t InterestModel::locate(SpaceId s, const OutcomeVector& p) const {
    const auto& rs = regions_[index_of(s)];
    for (std::size_t i = 0; i < rs.size(); ++i) {
        if (rs[i].contains(p)) return i;
    }
    throw ValidationError("outcome outside its space bounds: " + space_label(s));
}

void InterestModel::add_attempt(const Attempt& a) {
    auto& rs = regions_[index_of(a.point.space())];
    std::size_t i = locate(a.point.space(), a.point);
    rs[i].attempts.push_back(a);
    refresh(rs[i]);
    // a fresh split can leave a child above the threshold; keep going until stable
    std::vector<std::size_t> pending{i};
    while (!pending.empty()) {
        const std::size_t r = pending.back();
        pending.pop_back();
        if (rs[r].attempts.size() <= cfg_.split_threshold) continue;
        auto children = split_region(rs[r]);
        if (!children) continue;
        refresh(children->first);
        refresh(children->second);
        rs[r] = std::move(children->first);
        rs.push_back(std::move(children->second));
        pending.push_back(r);
        pending.push_back(rs.size() - 1);
    }
}

void InterestModel::update(const OutcomeVector& goal, std::span<const OutcomeVector> reached, Strategy strategy,
                           std::size_t episode) {
    double best = -1.0;
    std::array<const OutcomeVector*, kNumSpaces> last{};
    for (const OutcomeVector& o : reached) {
        if (o.space() == goal.space()) best = std::max(best, competence(goal, o));
        last[index_of(o.space())] = &o;
    }
    add_attempt({goal, best, strategy, episode, true});
    for (const OutcomeVector* o : last) {
        if (o) add_attempt({*o, 0.0, strategy, episode, false});
    }
}

double InterestModel::split_score(const Region& a, const Region& b) const {
    double score = 0.0;
    for (Strategy s : strategies_) {
        const double ia = std::abs(impb::progress(a.attempts, 0, s)) / cfg_.cost(s);
        const double ib = std::abs(impb::progress(b.attempts, 0, s)) / cfg_.cost(s);
        score += std::abs(ia - ib);
    }
    return score;
}

std::optional<std::pair<Region, Region>> InterestModel::split_region(const Region& r) const {
    const std::size_t m = r.attempts.size();
    std::optional<std::pair<Region, Region>> best;
    double best_score = -1.0;
    std::size_t best_balance = 0;

    std::vector<double> vals(m);
    for (std::size_t d = 0; d < dim_of(r.space); ++d) {
        for (std::size_t i = 0; i < m; ++i) vals[i] = r.attempts[i].point[d];
        std::sort(vals.begin(), vals.end());
        double previous_cut = std::nan("");
        for (std::size_t q = 1; q < cfg_.split_quantiles; ++q) {
            const std::size_t i = q * m / cfg_.split_quantiles;
            if (i == 0 || i >= m || vals[i - 1] == vals[i]) continue;
            const double cut = vals[i - 1] + (vals[i] - vals[i - 1]) / 2.0;
            if (!(cut > r.lo[d] && cut < r.hi[d]) || cut == previous_cut) continue;
            previous_cut = cut;

            Region left = r;
            Region right = r;
            left.attempts.clear();
            right.attempts.clear();
            left.hi[d] = cut;
            right.lo[d] = cut;
            for (const Attempt& a : r.attempts) (a.point[d] < cut ? left : right).attempts.push_back(a);
            const std::size_t balance = std::min(left.attempts.size(), right.attempts.size());
            if (balance < cfg_.min_child) continue;

            const double score = split_score(left, right);
            if (score > best_score || (score == best_score && balance > best_balance)) {
                best_score = score;
                best_balance = balance;
                best = std::make_pair(std::move(left), std::move(right));
            }
        }
    }
    return best;
}

Selection InterestModel::random_selection(Rng& rng) const {
    std::uniform_int_distribution<std::size_t> space_pick(0, kNumSpaces - 1);
    const SpaceId s = space_from_index(space_pick(rng));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::array<double, kMaxOutcomeDim> c{};
    for (std::size_t i = 0; i < dim_of(s); ++i) c[i] = u(rng);
    std::uniform_int_distribution<std::size_t> strat_pick(0, strategies_.size() - 1);
    const Strategy st = strategies_[strat_pick(rng)];
    return {OutcomeVector(s, std::span<const double>(c.data(), dim_of(s))), st, SelectionMode::Random};
}

Selection InterestModel::select(Rng& rng) const {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double u = unit(rng);

    struct Candidate {
        const Region* region;
        Strategy strategy;
        double interest;
    };
    std::vector<Candidate> pairs;
    double total = 0.0;
    const Candidate* top = nullptr;
    for (const auto& rs : regions_) {
        for (const Region& r : rs) {
            for (Strategy s : strategies_) {
                const double i = r.interest[static_cast<std::size_t>(s)];
                pairs.push_back({&r, s, i});
                total += i;
            }
        }
    }
    for (const Candidate& c : pairs) {
        if (!top || c.interest > top->interest) top = &c;
    }
    if (!(total > 0.0) || u >= cfg_.p_exploit + cfg_.p_region) return random_selection(rng);

    const Candidate* chosen = top;
    SelectionMode mode = SelectionMode::Exploit;
    if (u >= cfg_.p_exploit) {
        mode = SelectionMode::RegionSampling;
        double pick = unit(rng) * total;
        chosen = nullptr;
        for (const Candidate& c : pairs) {
            if (c.interest <= 0.0) continue;
            chosen = &c;
            if (pick < c.interest) break;
            pick -= c.interest;
        }
    }

    const Region& r = *chosen->region;
    std::array<double, kMaxOutcomeDim> g{};
    for (std::size_t i = 0; i < dim_of(r.space); ++i) {
        std::uniform_real_distribution<double> within(r.lo[i], r.hi[i]);
        g[i] = within(rng);
    }
    return {OutcomeVector(r.space, std::span<const double>(g.data(), dim_of(r.space))), chosen->strategy, mode};
}

}  // namespace impb
