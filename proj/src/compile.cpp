#include "ontosim/compile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>

#include "ontosim/errors.hpp"
#include "ontosim/rational_approx.hpp"

namespace ontosim {

TargetHamiltonian TargetHamiltonian::from_matrix(const Eigen::MatrixXcd& h, double tol) {
  if (h.rows() == 0 || h.rows() != h.cols()) throw NotRepresentable("target must be a non-empty square matrix");
  for (Eigen::Index a = 0; a < h.rows(); ++a) {
    if (std::abs(h(a, a)) > tol)
      throw NotRepresentable("target has a nonzero diagonal element at " + std::to_string(a));
    for (Eigen::Index b = 0; b < h.cols(); ++b) {
      if (std::abs(h(a, b).real()) > tol)
        throw NotRepresentable("target element (" + std::to_string(a) + "," + std::to_string(b) +
                               ") has a real part; only i·(real antisymmetric) couplings are representable");
      if (std::abs(h(a, b) - std::conj(h(b, a))) > tol)
        throw NotRepresentable("target is not Hermitian");
    }
  }
  Eigen::MatrixXcd clean(h.rows(), h.cols());
  for (Eigen::Index a = 0; a < h.rows(); ++a)
    for (Eigen::Index b = 0; b < h.cols(); ++b)
      clean(a, b) = a == b ? Complex{} : Complex(0.0, 0.5 * (h(a, b).imag() - h(b, a).imag()));
  return TargetHamiltonian(std::move(clean));
}

namespace {

struct Pair {
  std::uint32_t a;
  std::uint32_t b;
  double magnitude;  // |H[a][b]|
  bool reversed;     // orientation (b, a) reproduces the sign of H[a][b]
};

double achieved(std::int64_t count, std::int64_t den) {
  return kHalfPi * static_cast<double>(count) / static_cast<double>(den);
}

// Even spacing of `count` cells over a rows×cols block, in row-major order.
std::vector<std::pair<std::uint32_t, std::uint32_t>> spread(std::uint64_t rows, std::uint64_t cols,
                                                            std::uint64_t count) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> cells;
  const std::uint64_t total = rows * cols;
  for (std::uint64_t j = 0; j < count; ++j) {
    const std::uint64_t c = j * total / count;
    cells.emplace_back(static_cast<std::uint32_t>(c / cols), static_cast<std::uint32_t>(c % cols));
  }
  return cells;
}

SpecialPoint oriented(const Pair& p, std::uint32_t phase_a, std::uint32_t phase_b) {
  if (p.reversed) return {p.b, p.a, phase_b, phase_a};
  return {p.a, p.b, phase_a, phase_b};
}

struct Factorisation {
  std::uint32_t n0;
  std::uint32_t n1;
  std::int64_t multiple;
};

// Smallest multiple k·q = N0·N1 with 2 <= N1 <= N0 <= max_period; coprime
// factorisations win over smaller multiples without one.
std::optional<Factorisation> realise(std::int64_t q, std::uint32_t max_period,
                                     std::int64_t max_multiple = std::numeric_limits<std::int64_t>::max()) {
  const std::int64_t cap = std::int64_t{max_period} * max_period;
  std::optional<Factorisation> fallback;
  for (std::int64_t k = 1; k <= max_multiple && k * q <= cap; ++k) {
    const std::int64_t d = k * q;
    for (auto n1 = static_cast<std::int64_t>(std::sqrt(static_cast<double>(d))) + 1; n1 >= 2; --n1) {
      if (n1 * n1 > d || d % n1 != 0) continue;
      const std::int64_t n0 = d / n1;
      if (n0 > max_period) break;
      const Factorisation f{static_cast<std::uint32_t>(n0), static_cast<std::uint32_t>(n1), k};
      if (std::gcd(n0, n1) == 1) return f;
      if (!fallback) fallback = f;
    }
  }
  return fallback;
}

CompiledModel two_state(const Pair& pair, double tolerance, std::uint32_t max_period) {
  const double r = pair.magnitude / kHalfPi;
  const std::int64_t cap = std::int64_t{max_period} * max_period;

  auto finish = [&](std::uint32_t n0, std::uint32_t n1, std::int64_t count) {
    const std::uint64_t d = std::uint64_t{n0} * n1;
    std::vector<SpecialPoint> points;
    if (std::gcd(n0, n1) == 1) {
      // Along the joint orbit (t mod N0, t mod N1), which covers the torus.
      for (std::int64_t j = 0; j < count; ++j) {
        const std::uint64_t t = static_cast<std::uint64_t>(j) * d / static_cast<std::uint64_t>(count);
        points.push_back(oriented(pair, static_cast<std::uint32_t>(t % n0),
                                  static_cast<std::uint32_t>(t % n1)));
      }
    } else {
      for (auto [pa, pb] : spread(n0, n1, static_cast<std::uint64_t>(count)))
        points.push_back(oriented(pair, pa, pb));
    }
    PairApproximation approx{0, 1, pair.magnitude, achieved(count, static_cast<std::int64_t>(d)),
                             count, static_cast<std::int64_t>(d), 0.0};
    approx.error = std::abs(approx.achieved - approx.target);
    return CompiledModel{OntologicalModel::build(2, {n0, n1}, std::move(points)), {approx}, approx.error};
  };

  for (const Ratio& c : approximation_candidates(r, cap)) {
    if (c.num == 0 || c.num > c.den) continue;
    if (std::abs(achieved(c.num, c.den) - pair.magnitude) > tolerance) continue;
    if (const auto f = realise(c.den, max_period)) return finish(f->n0, f->n1, c.num * f->multiple);
  }
  // Convergent denominators may be unrealisable (e.g. a large prime); scan
  // every admissible torus size instead.
  for (std::int64_t d = 4; d <= cap; ++d) {
    const std::int64_t count = std::llround(r * static_cast<double>(d));
    if (count < 1 || count > d) continue;
    if (std::abs(achieved(count, d) - pair.magnitude) > tolerance) continue;
    if (const auto f = realise(d, max_period, 1)) return finish(f->n0, f->n1, count);
  }
  throw UnreachableTolerance("no torus with periods <= " + std::to_string(max_period) +
                             " reaches tolerance " + std::to_string(tolerance) + " for |H| = " +
                             std::to_string(pair.magnitude));
}

CompiledModel many_states(std::size_t n, const std::vector<Pair>& pairs, double tolerance,
                          std::uint32_t max_period) {
  std::vector<int> degree(n, 0);
  for (const Pair& p : pairs) {
    ++degree[p.a];
    ++degree[p.b];
  }
  std::vector<std::uint32_t> involved;
  for (std::uint32_t s = 0; s < n; ++s)
    if (degree[s] > 0) involved.push_back(s);

  const std::size_t m = involved.size();
  const std::size_t per_state = std::max<std::size_t>(
      2, static_cast<std::size_t>(std::pow(2.0e6, 1.0 / static_cast<double>(m))));
  std::vector<std::uint32_t> candidates;
  for (std::uint32_t p = max_period; p >= 2 && candidates.size() < per_state; --p) candidates.push_back(p);

  struct Plan {
    std::vector<std::uint32_t> periods;
    std::vector<std::int64_t> counts;
    std::vector<std::pair<std::uint64_t, std::uint64_t>> sides;
    double max_error = std::numeric_limits<double>::infinity();
    int shared_factors = 0;
  };
  std::optional<Plan> best;
  double closest = std::numeric_limits<double>::infinity();

  std::vector<std::uint32_t> periods(n, 2);
  std::vector<std::size_t> pick(m, 0);
  while (true) {
    for (std::size_t i = 0; i < m; ++i) periods[involved[i]] = candidates[pick[i]];

    Plan plan;
    plan.max_error = 0.0;
    bool feasible = true;
    std::vector<std::uint64_t> used(n, 0);
    for (const Pair& p : pairs) {
      const std::int64_t d = std::int64_t{periods[p.a]} * periods[p.b];
      std::int64_t count = std::max<std::int64_t>(1, std::llround(p.magnitude / kHalfPi * static_cast<double>(d)));
      if (count > d) {
        feasible = false;
        break;
      }
      plan.counts.push_back(count);
      plan.max_error = std::max(plan.max_error, std::abs(achieved(count, d) - p.magnitude));
      if (std::gcd(periods[p.a], periods[p.b]) != 1) ++plan.shared_factors;

      std::uint64_t sa = 0, sb = 0;
      const auto root = static_cast<std::uint64_t>(std::ceil(std::sqrt(static_cast<double>(count))));
      if (degree[p.a] == 1 && degree[p.b] == 1) {
        sa = periods[p.a];
        sb = periods[p.b];
      } else if (degree[p.a] == 1) {
        sa = periods[p.a];
        sb = (static_cast<std::uint64_t>(count) + sa - 1) / sa;
      } else if (degree[p.b] == 1) {
        sb = periods[p.b];
        sa = (static_cast<std::uint64_t>(count) + sb - 1) / sb;
      } else {
        sa = sb = root;
      }
      used[p.a] += sa;
      used[p.b] += sb;
      plan.sides.emplace_back(sa, sb);
    }
    if (feasible) {
      for (std::uint32_t s = 0; s < n; ++s)
        if (used[s] > periods[s]) feasible = false;
    }
    if (feasible) {
      closest = std::min(closest, plan.max_error);
      if (plan.max_error <= tolerance &&
          (!best || plan.shared_factors < best->shared_factors ||
           (plan.shared_factors == best->shared_factors && plan.max_error < best->max_error))) {
        plan.periods = periods;
        best = std::move(plan);
        if (best->shared_factors == 0) break;
      }
    }

    std::size_t i = 0;
    while (i < m && ++pick[i] == candidates.size()) pick[i++] = 0;
    if (i == m) break;
  }
  if (!best) {
    throw UnreachableTolerance("no period assignment <= " + std::to_string(max_period) +
                               " reaches tolerance " + std::to_string(tolerance) +
                               " (closest max error " + std::to_string(closest) + ")");
  }

  std::vector<SpecialPoint> points;
  std::vector<PairApproximation> approx;
  std::vector<std::uint32_t> next_free(n, 0);
  double max_error = 0.0;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const Pair& p = pairs[k];
    const auto [sa, sb] = best->sides[k];
    const std::uint32_t base_a = degree[p.a] == 1 ? 0 : next_free[p.a];
    const std::uint32_t base_b = degree[p.b] == 1 ? 0 : next_free[p.b];
    next_free[p.a] += static_cast<std::uint32_t>(sa);
    next_free[p.b] += static_cast<std::uint32_t>(sb);
    const auto count = static_cast<std::uint64_t>(best->counts[k]);
    for (auto [ia, ib] : spread(sa, sb, count)) points.push_back(oriented(p, base_a + ia, base_b + ib));

    const std::int64_t d = std::int64_t{best->periods[p.a]} * best->periods[p.b];
    PairApproximation a{p.a, p.b, p.magnitude, achieved(best->counts[k], d), best->counts[k], d, 0.0};
    a.error = std::abs(a.achieved - a.target);
    max_error = std::max(max_error, a.error);
    approx.push_back(a);
  }
  return CompiledModel{OntologicalModel::build(n, best->periods, std::move(points)), std::move(approx),
                       max_error};
}

}  // namespace

CompiledModel compile_target(const TargetHamiltonian& target, double tolerance,
                             std::uint32_t max_period) {
  if (!(tolerance > 0.0)) throw std::invalid_argument("compile_target: tolerance must be positive");
  if (max_period < 2) throw std::invalid_argument("compile_target: max_period must be >= 2");
  const std::size_t n = target.size();

  std::vector<Pair> pairs;
  for (std::uint32_t a = 0; a < n; ++a) {
    for (std::uint32_t b = a + 1; b < n; ++b) {
      const double c = target.coupling(a, b);
      if (c == 0.0) continue;
      if (std::abs(c) > kHalfPi) {
        throw UnreachableTolerance("|H[" + std::to_string(a) + "][" + std::to_string(b) +
                                   "]| exceeds π/2, the ceiling with every torus point special");
      }
      // σ_y^{[a,b]} contributes -i at (a, b): negative couplings keep the
      // listed orientation, positive ones reverse it.
      pairs.push_back({a, b, std::abs(c), c > 0.0});
    }
  }
  if (pairs.empty()) {
    return CompiledModel{OntologicalModel::build(n, std::vector<std::uint32_t>(n, 2), {}), {}, 0.0};
  }
  if (n == 2) return two_state(pairs.front(), tolerance, max_period);
  return many_states(n, pairs, tolerance, max_period);
}

}  // namespace ontosim
