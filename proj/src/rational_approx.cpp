#include "ontosim/rational_approx.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ontosim {

std::vector<std::int64_t> continued_fraction(double x, int max_terms) {
  if (!(x >= 0.0) || !std::isfinite(x)) throw std::invalid_argument("continued_fraction: x must be finite and >= 0");
  if (x >= 0x1.0p62) throw std::invalid_argument("continued_fraction: x must be < 2^62");
  // A double is exactly M·2^-s; Euclid on (M, 2^s) avoids reciprocal noise.
  int e = 0;
  const double f = std::frexp(x, &e);
  std::uint64_t p = static_cast<std::uint64_t>(std::ldexp(f, 53));
  int s = 53 - e;
  while (s > 0 && (p & 1u) == 0) {
    p >>= 1;
    --s;
  }
  if (s > 62) {
    p >>= (s - 62);
    s = 62;
  }
  std::uint64_t q = std::uint64_t{1} << std::max(s, 0);
  if (s < 0) p <<= -s;
  std::vector<std::int64_t> terms;
  for (int i = 0; i < max_terms && q != 0; ++i) {
    terms.push_back(static_cast<std::int64_t>(p / q));
    const std::uint64_t r = p % q;
    p = q;
    q = r;
  }
  if (terms.empty()) terms.push_back(0);
  return terms;
}

std::vector<Ratio> approximation_candidates(double x, std::int64_t max_den) {
  if (max_den < 1) throw std::invalid_argument("approximation_candidates: max_den must be >= 1");
  std::vector<Ratio> out;
  const std::vector<std::int64_t> a = continued_fraction(x);
  // h_{n-2}, h_{n-1} and k_{n-2}, k_{n-1}.
  std::int64_t h2 = 0, h1 = 1, k2 = 1, k1 = 0;
  for (std::size_t n = 0; n < a.size(); ++n) {
    // Intermediate fractions (h2 + m·h1)/(k2 + m·k1) for m = 1..a_n; m = a_n
    // is the convergent itself. For n = 0 only the convergent is meaningful.
    const std::int64_t first = n == 0 ? a[0] : 1;
    for (std::int64_t m = first; m <= a[n]; ++m) {
      const std::int64_t k = k2 + m * k1;
      if (k > max_den) return out;
      out.push_back({h2 + m * h1, k});
    }
    const std::int64_t h = h2 + a[n] * h1;
    const std::int64_t k = k2 + a[n] * k1;
    h2 = h1;
    h1 = h;
    k2 = k1;
    k1 = k;
  }
  return out;
}

Ratio best_rational(double x, std::int64_t max_den) {
  const std::vector<Ratio> cands = approximation_candidates(x, max_den);
  Ratio best = cands.front();
  double best_err = std::abs(best.value() - x);
  for (const Ratio& r : cands) {
    const double err = std::abs(r.value() - x);
    if (err < best_err) {
      best = r;
      best_err = err;
    }
  }
  return best;
}

}  // namespace ontosim
