#ifndef IMPB_RNG_HPP
#define IMPB_RNG_HPP

#include <random>

namespace impb {

/// Every stochastic component draws from an explicitly seeded engine.
using Rng = std::mt19937_64;

}  // namespace impb

#endif  // IMPB_RNG_HPP
