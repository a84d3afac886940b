#include "impb/eval.hpp"

#include <iomanip>
#include <ostream>
#include <thread>

#include "impb/procedure.hpp"

namespace impb {

BenchmarkSpec BenchmarkSpec::desk() {
    BenchmarkSpec s;
    s.grid = {{{5, 5, 4}, {5, 5, 4}, {5, 5, 2, 2}, {5, 5, 4}, {5, 5, 4}, {10, 10}}};
    return s;
}

BenchmarkSpec BenchmarkSpec::full() {
    BenchmarkSpec s;
    s.grid = {{{14, 14, 14}, {14, 14, 14}, {9, 9, 9, 9}, {14, 14, 14}, {14, 14, 14}, {100, 100}}};
    s.pad_count = 63;
    s.pad_space = SpaceId::Drawing;
    s.pad_seed = 27600;
    return s;
}

void BenchmarkSpec::validate() const {
    for (std::size_t s = 0; s < kNumSpaces; ++s) {
        if (!grid[s].empty() && grid[s].size() != kSpaceDims[s]) {
            throw ValidationError("benchmark.grid.O" + std::to_string(s) + " needs " + std::to_string(kSpaceDims[s]) +
                                  " per-dimension counts");
        }
        for (std::size_t c : grid[s]) {
            if (c == 0) throw ValidationError("benchmark.grid.O" + std::to_string(s) + " counts must be positive");
        }
    }
}

std::size_t Benchmark::total() const {
    std::size_t n = 0;
    for (const auto& v : points) n += v.size();
    return n;
}

Benchmark generate_benchmark(const BenchmarkSpec& spec) {
    spec.validate();
    Benchmark b;
    for (std::size_t s = 0; s < kNumSpaces; ++s) {
        const auto& counts = spec.grid[s];
        if (counts.empty()) continue;
        const SpaceId space = space_from_index(s);
        const std::size_t dim = counts.size();
        std::size_t total = 1;
        for (std::size_t c : counts) total *= c;
        b.points[s].reserve(total);
        for (std::size_t t = 0; t < total; ++t) {
            // mixed-radix decode, last dimension fastest
            std::array<double, kMaxOutcomeDim> c{};
            std::size_t rest = t;
            for (std::size_t d = dim; d-- > 0;) {
                const std::size_t i = rest % counts[d];
                rest /= counts[d];
                c[d] = counts[d] == 1 ? 0.0 : -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(counts[d] - 1);
            }
            b.points[s].emplace_back(space, std::span<const double>(c.data(), dim));
        }
    }
    Rng rng(spec.pad_seed);
    for (std::size_t i = 0; i < spec.pad_count; ++i) {
        b.points[index_of(spec.pad_space)].push_back(random_outcome(rng, spec.pad_space));
    }
    return b;
}

Evaluation evaluate(const EpisodicMemory& memory, const Benchmark& benchmark, unsigned threads) {
    std::vector<const OutcomeVector*> all;
    all.reserve(benchmark.total());
    for (const auto& v : benchmark.points) {
        for (const auto& p : v) all.push_back(&p);
    }
    std::vector<double> dist(all.size());
    const auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const auto e = memory.nearest_outcome(*all[i]);
            dist[i] = e ? normalized_distance(e->outcome, *all[i]) : 1.0;
        }
    };
    threads = std::max(1U, threads);
    if (threads == 1 || all.size() < 1024) {
        work(0, all.size());
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (all.size() + threads - 1) / threads;
        for (std::size_t b = 0; b < all.size(); b += chunk) pool.emplace_back(work, b, std::min(all.size(), b + chunk));
    }

    // reduce in point order so the result never depends on the thread count
    Evaluation ev;
    std::size_t i = 0;
    double total = 0.0;
    for (std::size_t s = 0; s < kNumSpaces; ++s) {
        double sum = 0.0;
        const std::size_t n = benchmark.points[s].size();
        for (std::size_t k = 0; k < n; ++k, ++i) sum += dist[i];
        ev.per_space[s] = n > 0 ? sum / static_cast<double>(n) : 0.0;
        total += sum;
    }
    ev.global = all.empty() ? 0.0 : total / static_cast<double>(all.size());
    return ev;
}

SizeHistogram policy_size_histogram(const EpisodicMemory& memory, SpaceId space, std::size_t queries, Rng& rng) {
    SizeHistogram hist;
    if (memory.count_in(space) == 0) return hist;
    for (std::size_t q = 0; q < queries; ++q) {
        const OutcomeVector goal = random_outcome(rng, space);
        ++hist[memory.best_policy_for(goal)->size];
    }
    return hist;
}

void write_curves_header(std::ostream& out) {
    out << "episode";
    for (std::size_t s = 0; s < kNumSpaces; ++s) out << ",err_O" << s;
    out << ",global,variant,seed\n";
}

void write_curves(std::ostream& out, const std::vector<Checkpoint>& checkpoints, const std::string& variant,
                  std::uint64_t seed) {
    const auto old_precision = out.precision(12);
    for (const Checkpoint& c : checkpoints) {
        out << c.episode;
        for (double e : c.eval.per_space) out << ',' << e;
        out << ',' << c.eval.global << ',' << variant << ',' << seed << '\n';
    }
    out.precision(old_precision);
}

void write_histogram_header(std::ostream& out) { out << "space,size,count\n"; }

void write_histogram(std::ostream& out, SpaceId space, const SizeHistogram& hist) {
    for (const auto& [size, count] : hist) out << "O" << index_of(space) << ',' << size << ',' << count << '\n';
}

}  // namespace impb
