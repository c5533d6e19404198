#pragma once

// Hand-rolled generators and brute-force oracles shared by the tests.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "ontosim/errors.hpp"
#include "ontosim/fastslow.hpp"
#include "ontosim/ontodyn.hpp"

namespace testkit {

using Rng = std::mt19937_64;

inline std::string fixture(const std::string& name) { return std::string(ONTOSIM_FIXTURES) + "/" + name; }

inline std::uint64_t uniform_int(Rng& rng, std::uint64_t lo, std::uint64_t hi) {
  return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng);
}

inline double uniform_real(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline ontosim::PermutationLaw random_law(Rng& rng, std::size_t size) {
  std::vector<std::uint32_t> image(size);
  std::iota(image.begin(), image.end(), 0u);
  std::shuffle(image.begin(), image.end(), rng);
  return ontosim::PermutationLaw::from_successors(std::move(image));
}

// A law built from prescribed cycle lengths on shuffled states.
inline ontosim::PermutationLaw law_with_cycles(Rng& rng, const std::vector<std::size_t>& lengths) {
  const std::size_t m = std::accumulate(lengths.begin(), lengths.end(), std::size_t{0});
  std::vector<std::uint32_t> states(m);
  std::iota(states.begin(), states.end(), 0u);
  std::shuffle(states.begin(), states.end(), rng);
  std::vector<std::uint32_t> image(m);
  std::size_t pos = 0;
  for (std::size_t len : lengths) {
    for (std::size_t j = 0; j < len; ++j) image[states[pos + j]] = states[pos + (j + 1) % len];
    pos += len;
  }
  return ontosim::PermutationLaw::from_successors(std::move(image));
}

struct ModelShape {
  std::size_t max_slow = 4;
  std::uint32_t min_period = 2;
  std::uint32_t max_period = 30;
  std::size_t max_points = 6;
  std::uint64_t max_ontic = ~std::uint64_t{0};
};

// Draws until the builder accepts the table; conflicting draws are
// discarded rather than repaired.
inline ontosim::OntologicalModel random_model(Rng& rng, const ModelShape& shape) {
  for (;;) {
    const std::size_t n = uniform_int(rng, 2, shape.max_slow);
    std::vector<std::uint32_t> periods(n);
    std::uint64_t ontic = n;
    for (auto& p : periods) {
      p = static_cast<std::uint32_t>(uniform_int(rng, shape.min_period, shape.max_period));
      ontic *= p;
    }
    if (ontic > shape.max_ontic) continue;
    std::vector<ontosim::SpecialPoint> points(uniform_int(rng, 0, shape.max_points));
    for (auto& sp : points) {
      sp.alpha = static_cast<std::uint32_t>(uniform_int(rng, 0, n - 1));
      do sp.beta = static_cast<std::uint32_t>(uniform_int(rng, 0, n - 1));
      while (sp.beta == sp.alpha);
      sp.trigger_alpha = static_cast<std::uint32_t>(uniform_int(rng, 0, periods[sp.alpha] - 1));
      sp.trigger_beta = static_cast<std::uint32_t>(uniform_int(rng, 0, periods[sp.beta] - 1));
    }
    try {
      return ontosim::OntologicalModel::build(n, periods, points);
    } catch (const ontosim::ConflictingSpecialPoints&) {
    }
  }
}

// Orbit length of each state by naive iteration; rank multiset follows.
inline std::vector<std::size_t> naive_ranks(const ontosim::PermutationLaw& law) {
  std::vector<std::size_t> ranks;
  std::vector<bool> seen(law.size(), false);
  for (std::uint32_t s = 0; s < law.size(); ++s) {
    if (seen[s]) continue;
    std::size_t len = 0;
    std::uint32_t k = s;
    do {
      seen[k] = true;
      k = law.image()[k];
      ++len;
    } while (k != s);
    ranks.push_back(len);
  }
  std::sort(ranks.begin(), ranks.end());
  return ranks;
}

}  // namespace testkit
