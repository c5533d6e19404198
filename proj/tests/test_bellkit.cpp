#include <doctest.h>

#include <cmath>

#include <boost/math/distributions/chi_squared.hpp>

#include "ontosim/bellkit.hpp"
#include "support.hpp"

using namespace ontosim;
using testkit::Rng;

namespace {

constexpr double kPi = kBellPi;
constexpr double kDeg = kPi / 180.0;

// ∫|sin u| du from 0 to u, for u of either sign.
double abs_sin_antiderivative(double u) {
  const double k = std::floor(u / kPi);
  return 2.0 * k + (1.0 - std::cos(u - k * kPi));
}

// Mass of C|sin 2(a+b-2λ)| over [x0, x1] with C = 1/2: substitute u = 4λ - 2(a+b).
double sine_mass(double a, double b, double x0, double x1) {
  const double s = 2.0 * (a + b);
  return 0.125 * (abs_sin_antiderivative(4.0 * x1 - s) - abs_sin_antiderivative(4.0 * x0 - s));
}

FactorizedModel uniform_model(std::function<double(double, double)> response) {
  FactorizedModel m;
  m.density = [](double) { return 1.0 / kPi; };
  m.response_a = response;
  m.response_b = response;
  return m;
}

// ρ = (1 + Σ c_k cos(2kλ + φ_k))/π with Σ|c_k| < 1 integrates to exactly 1.
FactorizedModel random_factorized(Rng& rng) {
  const int terms = static_cast<int>(testkit::uniform_int(rng, 0, 3));
  std::vector<double> c, phi;
  double budget = 0.95;
  for (int k = 0; k < terms; ++k) {
    c.push_back(testkit::uniform_real(rng, -budget, budget));
    budget -= std::abs(c.back());
    phi.push_back(testkit::uniform_real(rng, 0, 2 * kPi));
  }
  auto random_response = [&rng]() -> std::function<double(double, double)> {
    switch (testkit::uniform_int(rng, 0, 2)) {
      case 0: {
        const double r = testkit::uniform_real(rng, 0, 1), phase = testkit::uniform_real(rng, 0, 2 * kPi);
        return [r, phase](double s, double l) { return 0.5 * (1 + r * std::cos(2 * (l - s) + phase)); };
      }
      case 1: {
        const double w = testkit::uniform_real(rng, 0.1, kPi - 0.1), shift = testkit::uniform_real(rng, 0, kPi);
        return [w, shift](double s, double l) { return normalize_angle(l - s - shift) < w ? 1.0 : 0.0; };
      }
      default: {
        const double p = testkit::uniform_real(rng, 0, 1);
        return [p](double, double) { return p; };
      }
    }
  };
  FactorizedModel m;
  m.density = [c, phi](double l) {
    double v = 1.0;
    for (std::size_t k = 0; k < c.size(); ++k) v += c[k] * std::cos(2.0 * static_cast<double>(k + 1) * l + phi[k]);
    return v / kPi;
  };
  m.response_a = random_response();
  m.response_b = random_response();
  return m;
}

}  // namespace

TEST_CASE("quantum correlation reaches 2√2 at the standard settings") {
  CHECK(quantum_correlation(0.3, 0.3) == 1.0);
  CHECK(std::abs(quantum_correlation(0.0, kPi / 4)) < 1e-15);
  const ChshResult r = chsh_score(quantum_correlation, standard_chsh_settings());
  CHECK(std::abs(r.score - 2.0 * std::sqrt(2.0)) < 1e-12);
  CHECK_FALSE(r.within_local_bound);
  const ChshSettings s = standard_chsh_settings();
  CHECK(s.a == 0.0);
  CHECK(s.a_prime == doctest::Approx(45 * kDeg));
  CHECK(s.b == doctest::Approx(22.5 * kDeg));
  CHECK(s.b_prime == doctest::Approx(67.5 * kDeg));
}

TEST_CASE("deterministic outcomes flip under the complementary setting") {
  Rng rng(51);
  for (int i = 0; i < 20'000; ++i) {
    const double a = testkit::uniform_real(rng, 0, kPi), l = testkit::uniform_real(rng, 0, kPi);
    CHECK(outcome(complement(a), l) == -outcome(a, l));
    CHECK(detection(a, l) + detection(complement(a), l) == 1);
    const double c = std::cos(2 * (l - a));
    if (std::abs(c) > 1e-9) CHECK(outcome(a, l) == (c > 0 ? 1 : -1));
  }
  CHECK(outcome(0.0, 0.0) == 1);
  CHECK(outcome(0.0, 3 * kPi / 4) == 1);
  CHECK(outcome(0.0, kPi / 4) == -1);
  CHECK(normalize_angle(-0.25) == doctest::Approx(kPi - 0.25));
  CHECK(normalize_angle(7 * kPi + 0.5) == doctest::Approx(0.5));
}

TEST_CASE("factorized models have closed-form correlations") {
  // Malus responses cos²(λ - s) with uniform ρ give E = cos 2(a-b)/2.
  const FactorizedModel malus = uniform_model([](double s, double l) {
    const double c = std::cos(l - s);
    return c * c;
  });
  // Deterministic responses give the sawtooth 1 - 4|a-b|/π on |a-b| <= π/2.
  FactorizedModel sign = uniform_model([](double s, double l) { return static_cast<double>(detection(s, l)); });
  sign.breakpoints = [](double a, double b) {
    std::vector<double> cuts;
    for (double s : {a, b})
      for (int k = 0; k < 4; ++k) cuts.push_back(normalize_angle(s + kPi / 4 + k * kPi / 2));
    return cuts;
  };
  Rng rng(52);
  for (int i = 0; i < 200; ++i) {
    const double a = testkit::uniform_real(rng, 0, kPi), b = testkit::uniform_real(rng, 0, kPi);
    CHECK(std::abs(factorized_correlation(malus, a, b) - 0.5 * std::cos(2 * (a - b))) < 1e-12);
    double d = std::abs(normalize_angle(a - b));
    d = std::min(d, kPi - d);
    CHECK(std::abs(factorized_correlation(sign, a, b) - (1.0 - 4.0 * d / kPi)) < 1e-10);
  }
  CHECK(density_mass(malus) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("unnormalised densities are rejected") {
  FactorizedModel m = uniform_model([](double, double) { return 0.5; });
  m.density = [](double) { return 0.5; };
  CHECK_THROWS_AS(factorized_correlation(m, 0.0, 0.1), std::invalid_argument);
}

TEST_CASE("random factorized models respect the CHSH bound") {
  Rng rng(53);
  for (int i = 0; i < 500; ++i) {
    const FactorizedModel m = random_factorized(rng);
    const auto e = [&m](double a, double b) { return factorized_correlation(m, a, b); };
    ChshSettings s = standard_chsh_settings();
    if (i % 2 == 1) {
      s = {testkit::uniform_real(rng, 0, kPi), testkit::uniform_real(rng, 0, kPi),
           testkit::uniform_real(rng, 0, kPi), testkit::uniform_real(rng, 0, kPi)};
    }
    const ChshResult r = chsh_score(e, s);
    CHECK(std::abs(r.score) <= 2.0 + 1e-9);
    CHECK(r.within_local_bound);
  }
}

TEST_CASE("adaptive quadrature handles kinks") {
  const auto f = [](double x) { return std::abs(std::sin(x)); };
  CHECK(integrate_adaptive(f, 0.0, 3 * kPi, {kPi, 2 * kPi}) == doctest::Approx(6.0).epsilon(1e-12));
  // Without anchors the kinks stall refinement and the error estimate is honest.
  CHECK_THROWS_AS(integrate_adaptive(f, 0.0, 3 * kPi, {}), QuadratureError);
  CHECK(integrate_adaptive([](double x) { return x * x; }, 0.0, 1.0, {}) == doctest::Approx(1.0 / 3).epsilon(1e-14));
}

TEST_CASE("correlated model reproduces cos 2(a-b) on a 64×64 grid") {
  double worst = 0.0;
  for (int i = 0; i < 64; ++i)
    for (int j = 0; j < 64; ++j) {
      const double a = kPi * i / 64, b = kPi * j / 64;
      worst = std::max(worst, std::abs(correlated_expectation(a, b) - std::cos(2 * (a - b))));
    }
  CHECK(worst <= 1e-6);
}

TEST_CASE("correlated expectation is symmetric and depends on a-b only") {
  Rng rng(54);
  for (int i = 0; i < 200; ++i) {
    const double a = testkit::uniform_real(rng, 0, kPi), b = testkit::uniform_real(rng, 0, kPi);
    const double shift = testkit::uniform_real(rng, 0, kPi);
    const double e = correlated_expectation(a, b);
    CHECK(std::abs(e - correlated_expectation(b, a)) < 1e-6);
    CHECK(std::abs(e - correlated_expectation(normalize_angle(a + shift), normalize_angle(b + shift))) < 1e-6);
  }
}

TEST_CASE("normalisation constant depends on the domain") {
  CHECK(sine_normalization(kPi) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(sine_normalization(2 * kPi) == doctest::Approx(0.25).epsilon(1e-15));
  CHECK_THROWS_AS(sine_normalization(1.0), std::invalid_argument);
  Rng rng(55);
  for (int i = 0; i < 50; ++i) {
    const double a = testkit::uniform_real(rng, 0, kPi), b = testkit::uniform_real(rng, 0, kPi);
    CHECK(std::abs(conditional_mass(a, b, CorrelatedDistribution::sine_density()) - 1.0) < 1e-12);
    CHECK(std::abs(conditional_mass(a, b, CorrelatedDistribution::sine_density(2 * kPi)) - 1.0) < 1e-12);
    CHECK(std::abs(sine_mass(a, b, 0.0, kPi) - 1.0) < 1e-12);
  }
}

TEST_CASE("all three single-variable marginals are flat") {
  for (Marginal m : {Marginal::kLambda, Marginal::kA, Marginal::kB}) {
    const MarginalReport r = marginal_flatness(m, 32);
    CHECK(r.max_deviation <= 1e-8);
    CHECK(r.spread <= 1e-8);
    CHECK(r.mean == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("conditional λ samples follow the density (chi-square)") {
  const std::size_t bins = 40;
  const std::uint64_t n = 100'000;
  for (auto [a, b] : {std::pair{0.0, 0.0}, {0.4, 1.3}, {2.9, 0.7}}) {
    const std::vector<double> lambdas = sample_conditional(a, b, n, 77);
    std::vector<double> counts(bins, 0.0);
    for (double l : lambdas) {
      REQUIRE(l >= 0.0);
      REQUIRE(l < kPi);
      counts[std::min<std::size_t>(bins - 1, static_cast<std::size_t>(l / kPi * bins))] += 1;
    }
    double chi2 = 0.0;
    for (std::size_t k = 0; k < bins; ++k) {
      const double expected = n * sine_mass(a, b, kPi * k / bins, kPi * (k + 1) / bins);
      chi2 += (counts[k] - expected) * (counts[k] - expected) / expected;
    }
    const boost::math::chi_squared dist(static_cast<double>(bins - 1));
    CHECK(boost::math::cdf(boost::math::complement(dist, chi2)) > 0.001);
  }
}

TEST_CASE("binned Monte Carlo correlation tracks cos 2(a-b)") {
  const std::vector<Triple> samples = sample_triples(200'000, 2024);
  for (const CorrelationBin& bin : binned_correlation(samples, 16)) {
    REQUIRE(bin.count > 0);
    const double mid = 0.5 * (bin.lo + bin.hi);
    const double width = bin.hi - bin.lo;
    const double oracle = std::sin(width) / width * std::cos(2 * mid);  // bin average of cos 2x
    CHECK(std::abs(bin.expected - oracle) < 1e-12);
    CHECK(std::abs(bin.estimate - bin.expected) <= 4 * bin.standard_error);
  }
}

TEST_CASE("sampling is reproducible from the seed") {
  const auto a = sample_triples(1000, 9);
  const auto b = sample_triples(1000, 9);
  const auto c = sample_triples(1000, 10);
  bool same = true, differ = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    same = same && a[i].lambda == b[i].lambda && a[i].a == b[i].a && a[i].outcome_b == b[i].outcome_b;
    differ = differ || a[i].lambda != c[i].lambda;
  }
  CHECK(same);
  CHECK(differ);
  // A prefix is stable: sample i depends only on (seed, i).
  const auto prefix = sample_triples(10, 9);
  for (std::size_t i = 0; i < prefix.size(); ++i) CHECK(prefix[i].lambda == a[i].lambda);
}

TEST_CASE("Monte Carlo CHSH of the correlated model is near 2√2") {
  const ChshResult r = monte_carlo_chsh(standard_chsh_settings(), 50'000, 3);
  CHECK(r.standard_error > 0.0);
  CHECK(std::abs(r.score - 2.0 * std::sqrt(2.0)) <= 5 * r.standard_error);
  const ChshResult exact = chsh_score([](double a, double b) { return correlated_expectation(a, b); },
                                      standard_chsh_settings());
  CHECK(std::abs(exact.score - 2.0 * std::sqrt(2.0)) < 1e-9);
}
