#ifndef IMPB_EVAL_HPP
#define IMPB_EVAL_HPP

#include <array>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "impb/memory.hpp"
#include "impb/outcome.hpp"
#include "impb/rng.hpp"

namespace impb {

/// Per-space regular grids over [-1, 1]^dim, optionally padded with seeded
/// uniform points in one space.
struct BenchmarkSpec {
    std::array<std::vector<std::size_t>, kNumSpaces> grid;  // points per dimension
    std::size_t pad_count = 0;
    SpaceId pad_space = SpaceId::Drawing;
    std::uint64_t pad_seed = 0;

    /// 100 points per space, 600 in total.
    static BenchmarkSpec desk();
    /// 27,600 points: 14^3 grids for the 3-D spaces, 9^4 for drawings, 100^2
    /// for the character, plus 63 random drawing points.
    static BenchmarkSpec full();

    void validate() const;
};

struct Benchmark {
    std::array<std::vector<OutcomeVector>, kNumSpaces> points;

    std::size_t total() const;
};

Benchmark generate_benchmark(const BenchmarkSpec& spec);

struct Evaluation {
    std::array<double, kNumSpaces> per_space{};  // mean normalized NN distance
    double global = 0.0;                         // mean over every benchmark point
};

/// Mean distance from every benchmark point to its nearest reached outcome of
/// the same space; a space without data contributes distance 1 per point.
Evaluation evaluate(const EpisodicMemory& memory, const Benchmark& benchmark, unsigned threads = 1);

using SizeHistogram = std::map<std::size_t, std::size_t>;

/// Draws `queries` uniform goals in `space` and tallies the policy size chosen
/// by the inverse model for each.
SizeHistogram policy_size_histogram(const EpisodicMemory& memory, SpaceId space, std::size_t queries, Rng& rng);

struct Checkpoint {
    std::size_t episode = 0;
    Evaluation eval;
};

void write_curves_header(std::ostream& out);
void write_curves(std::ostream& out, const std::vector<Checkpoint>& checkpoints, const std::string& variant,
                  std::uint64_t seed);

void write_histogram_header(std::ostream& out);
void write_histogram(std::ostream& out, SpaceId space, const SizeHistogram& hist);

}  // namespace impb

#endif  // IMPB_EVAL_HPP
