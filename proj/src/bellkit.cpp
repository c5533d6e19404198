#include "ontosim/bellkit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "ontosim/errors.hpp"
#include "ontosim/philox.hpp"

namespace ontosim {

namespace {

constexpr double kPi = kBellPi;
constexpr double kQuarterPi = kPi / 4.0;

// Sorted, deduplicated cut points inside (lo, hi), with lo and hi added.
std::vector<double> panel_edges(double lo, double hi, std::vector<double> cuts) {
  std::vector<double> edges{lo, hi};
  for (double c : cuts)
    if (c > lo && c < hi) edges.push_back(c);
  std::sort(edges.begin(), edges.end());
  std::vector<double> out;
  for (double e : edges)
    if (out.empty() || e - out.back() > 1e-14) out.push_back(e);
  if (out.back() != hi) out.back() = hi;
  return out;
}

// Every x ≡ offset (mod step) inside [0, period).
void add_lattice(std::vector<double>& cuts, double offset, double step, double period) {
  double x = offset - step * std::floor(offset / step);
  for (; x < period; x += step) cuts.push_back(x);
}

}  // namespace

double normalize_angle(double x) {
  double r = std::fmod(x, kPi);
  if (r < 0.0) r += kPi;
  if (r >= kPi) r = 0.0;
  return r;
}

double complement(double a) { return normalize_angle(a + kPi / 2.0); }

double quantum_correlation(double a, double b) { return std::cos(2.0 * (a - b)); }

int outcome(double setting, double lambda) {
  const double theta = normalize_angle(lambda - setting);
  return (theta < kQuarterPi || theta >= 3.0 * kQuarterPi) ? 1 : -1;
}

int detection(double setting, double lambda) { return outcome(setting, lambda) > 0 ? 1 : 0; }

double integrate_panels(const std::function<double(double)>& f, std::vector<double> cuts) {
  for (int k = 1; k < 16; ++k) cuts.push_back(kPi * k / 16.0);
  const std::vector<double> edges = panel_edges(0.0, kPi, std::move(cuts));
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    sum += boost::math::quadrature::gauss<double, 20>::integrate(f, edges[i], edges[i + 1]);
  return sum;
}

double density_mass(const FactorizedModel& model) {
  std::vector<double> cuts = model.breakpoints ? model.breakpoints(0.0, 0.0) : std::vector<double>{};
  return integrate_panels(model.density, std::move(cuts));
}

double joint_detection(const FactorizedModel& model, double a, double b) {
  std::vector<double> cuts = model.breakpoints ? model.breakpoints(a, b) : std::vector<double>{};
  return integrate_panels(
      [&](double l) { return model.density(l) * model.response_a(a, l) * model.response_b(b, l); },
      std::move(cuts));
}

double factorized_correlation(const FactorizedModel& model, double a, double b) {
  const double mass = density_mass(model);
  if (std::abs(mass - 1.0) > 1e-8)
    throw std::invalid_argument("factorized model: density integrates to " + std::to_string(mass));
  const double abar = complement(a);
  const double bbar = complement(b);
  return joint_detection(model, a, b) + joint_detection(model, abar, bbar) -
         joint_detection(model, a, bbar) - joint_detection(model, abar, b);
}

ChshSettings standard_chsh_settings() {
  return {0.0, kPi / 4.0, kPi / 8.0, 3.0 * kPi / 8.0};
}

ChshResult chsh_score(const CorrelationFn& e, const ChshSettings& s) {
  ChshResult r;
  r.settings = s;
  r.correlations = {e(s.a, s.b), e(s.a, s.b_prime), e(s.a_prime, s.b), e(s.a_prime, s.b_prime)};
  r.score = r.correlations[0] - r.correlations[1] + r.correlations[2] + r.correlations[3];
  r.within_local_bound = std::abs(r.score) <= 2.0 + 1e-9;
  return r;
}

double sine_normalization(double domain) {
  const double lobes = domain / kQuarterPi;
  if (domain <= 0.0 || std::abs(lobes - std::round(lobes)) > 1e-9)
    throw std::invalid_argument("sine density domain must be a positive multiple of π/4");
  // Each lobe of |sin 4x| integrates to 1/2.
  return 1.0 / (0.5 * std::round(lobes));
}

CorrelatedDistribution CorrelatedDistribution::sine_density(double domain) {
  const double c = sine_normalization(domain);
  CorrelatedDistribution d;
  d.domain = domain;
  d.density = [c](double a, double b, double l) { return c * std::abs(std::sin(2.0 * (a + b - 2.0 * l))); };
  d.kinks = [domain](double a, double b) {
    std::vector<double> cuts;
    add_lattice(cuts, 0.5 * (a + b), kQuarterPi, domain);
    return cuts;
  };
  return d;
}

double integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                          std::vector<double> cuts, double abs_tol) {
  const std::vector<double> edges = panel_edges(lo, hi, std::move(cuts));
  double sum = 0.0;
  double err_total = 0.0;
  const double panel_tol = abs_tol / static_cast<double>(edges.size());
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    double err = 0.0;
    double l1 = 0.0;
    sum += boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, edges[i], edges[i + 1], 15,
                                                                         panel_tol, &err, &l1);
    err_total += err;
  }
  if (!(err_total <= abs_tol)) {
    throw QuadratureError("adaptive quadrature did not converge: error estimate " +
                          std::to_string(err_total) + " > " + std::to_string(abs_tol));
  }
  return sum;
}

double conditional_mass(double a, double b, const CorrelatedDistribution& dist) {
  return integrate_adaptive([&](double l) { return dist.density(a, b, l); }, 0.0, dist.domain,
                            dist.kinks(a, b));
}

double correlated_expectation(double a, double b, const CorrelatedDistribution& dist) {
  std::vector<double> cuts = dist.kinks(a, b);
  // Outcome switches sit at setting ± π/4 (mod π/2).
  add_lattice(cuts, a + kQuarterPi, kPi / 2.0, dist.domain);
  add_lattice(cuts, b + kQuarterPi, kPi / 2.0, dist.domain);
  return integrate_adaptive(
      [&](double l) { return dist.density(a, b, l) * outcome(a, l) * outcome(b, l); }, 0.0,
      dist.domain, std::move(cuts));
}

MarginalReport marginal_flatness(Marginal which, std::size_t grid) {
  if (grid == 0) throw std::invalid_argument("marginal_flatness: grid must be positive");
  MarginalReport rep;
  rep.which = which;
  rep.grid = grid;
  const double c = sine_normalization(kPi);
  double lo = 1e300, hi = -1e300, total = 0.0;
  for (std::size_t i = 0; i < grid; ++i) {
    for (std::size_t j = 0; j < grid; ++j) {
      const double u = kPi * (static_cast<double>(i) + 0.5) / static_cast<double>(grid);
      const double v = kPi * (static_cast<double>(j) + 0.5) / static_cast<double>(grid);
      std::function<double(double)> f;
      std::vector<double> cuts;
      switch (which) {
        case Marginal::kLambda:  // (a, b) = (u, v)
          f = [=](double l) { return c * std::abs(std::sin(2.0 * (u + v - 2.0 * l))); };
          add_lattice(cuts, 0.5 * (u + v), kQuarterPi, kPi);
          break;
        case Marginal::kA:  // (b, λ) = (u, v)
          f = [=](double a) { return c * std::abs(std::sin(2.0 * (a + u - 2.0 * v))); };
          add_lattice(cuts, 2.0 * v - u, kPi / 2.0, kPi);
          break;
        case Marginal::kB:  // (a, λ) = (u, v)
          f = [=](double b) { return c * std::abs(std::sin(2.0 * (u + b - 2.0 * v))); };
          add_lattice(cuts, 2.0 * v - u, kPi / 2.0, kPi);
          break;
      }
      const double value = integrate_adaptive(f, 0.0, kPi, std::move(cuts), 1e-10);
      lo = std::min(lo, value);
      hi = std::max(hi, value);
      total += value;
      rep.max_deviation = std::max(rep.max_deviation, std::abs(value - 1.0));
    }
  }
  rep.mean = total / static_cast<double>(grid * grid);
  rep.spread = hi - lo;
  return rep;
}

double sample_lambda(double a, double b, double u_lobe, double u_inner) {
  const double lobe = std::min(3.0, std::floor(4.0 * u_lobe));
  const double y = std::acos(1.0 - 2.0 * u_inner) / 4.0;
  return normalize_angle(0.5 * (a + b) + lobe * kQuarterPi + y);
}

std::vector<Triple> sample_triples(std::uint64_t count, std::uint64_t seed) {
  std::vector<Triple> out;
  out.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    PhiloxStream rng(seed, i);
    Triple t;
    t.a = kPi * rng.uniform();
    t.b = kPi * rng.uniform();
    const double u_lobe = rng.uniform();
    const double u_inner = rng.uniform();
    t.lambda = sample_lambda(t.a, t.b, u_lobe, u_inner);
    t.outcome_a = outcome(t.a, t.lambda);
    t.outcome_b = outcome(t.b, t.lambda);
    out.push_back(t);
  }
  return out;
}

std::vector<double> sample_conditional(double a, double b, std::uint64_t count, std::uint64_t seed) {
  std::vector<double> out;
  out.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    PhiloxStream rng(seed, i);
    const double u_lobe = rng.uniform();
    const double u_inner = rng.uniform();
    out.push_back(sample_lambda(a, b, u_lobe, u_inner));
  }
  return out;
}

std::vector<CorrelationBin> binned_correlation(const std::vector<Triple>& samples, std::size_t bins) {
  if (bins == 0) throw std::invalid_argument("binned_correlation: bins must be positive");
  std::vector<CorrelationBin> out(bins);
  std::vector<double> sums(bins, 0.0);
  const double width = kPi / static_cast<double>(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    out[k].lo = width * static_cast<double>(k);
    out[k].hi = width * static_cast<double>(k + 1);
    out[k].expected = (std::sin(2.0 * out[k].hi) - std::sin(2.0 * out[k].lo)) / (2.0 * width);
  }
  for (const Triple& t : samples) {
    const double d = normalize_angle(t.a - t.b);
    const auto k = std::min(bins - 1, static_cast<std::size_t>(d / width));
    out[k].count += 1;
    sums[k] += t.outcome_a * t.outcome_b;
  }
  for (std::size_t k = 0; k < bins; ++k) {
    if (out[k].count == 0) continue;
    const double n = static_cast<double>(out[k].count);
    out[k].estimate = sums[k] / n;
    out[k].standard_error = std::sqrt(std::max(0.0, 1.0 - out[k].expected * out[k].expected) / n);
  }
  return out;
}

ChshResult monte_carlo_chsh(const ChshSettings& s, std::uint64_t samples_per_pair, std::uint64_t seed) {
  if (samples_per_pair == 0) throw std::invalid_argument("monte_carlo_chsh: no samples");
  const std::array<std::pair<double, double>, 4> pairs{
      {{s.a, s.b}, {s.a, s.b_prime}, {s.a_prime, s.b}, {s.a_prime, s.b_prime}}};
  std::array<double, 4> e{};
  double variance = 0.0;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto [a, b] = pairs[k];
    double sum = 0.0;
    for (std::uint64_t i = 0; i < samples_per_pair; ++i) {
      PhiloxStream rng(seed, (std::uint64_t{k} << 40) + i);
      const double u_lobe = rng.uniform();
      const double u_inner = rng.uniform();
      const double l = sample_lambda(a, b, u_lobe, u_inner);
      sum += outcome(a, l) * outcome(b, l);
    }
    e[k] = sum / static_cast<double>(samples_per_pair);
    variance += std::max(0.0, 1.0 - e[k] * e[k]) / static_cast<double>(samples_per_pair);
  }
  ChshResult r;
  r.settings = s;
  r.correlations = e;
  r.score = e[0] - e[1] + e[2] + e[3];
  r.within_local_bound = std::abs(r.score) <= 2.0 + 1e-9;
  r.standard_error = std::sqrt(variance);
  return r;
}

}  // namespace ontosim
