#pragma once

// Continued-fraction machinery for approximating real couplings by ratios
// of integer counts.

#include <cstdint>
#include <vector>

namespace ontosim {

struct Ratio {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  friend bool operator==(const Ratio&, const Ratio&) = default;
};

// Partial quotients of x >= 0, stopping after max_terms or when the
// remainder vanishes.
std::vector<std::int64_t> continued_fraction(double x, int max_terms = 40);

// Convergents and intermediate fractions of x >= 0 with denominator
// <= max_den, in increasing denominator order. Every best rational
// approximation with denominator <= max_den appears in this list.
std::vector<Ratio> approximation_candidates(double x, std::int64_t max_den);

// Closest fraction to x with denominator <= max_den; ties go to the smaller
// denominator.
Ratio best_rational(double x, std::int64_t max_den);

}  // namespace ontosim
