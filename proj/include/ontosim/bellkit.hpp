#pragma once

// Two-photon polarisation correlations: the quantum prediction, factorised
// hidden-variable models, the CHSH combination, and a three-variable
// density P(a,b,λ) = C|sin 2(a+b-2λ)| paired with deterministic outcomes.
// All angles are radians; polarisation variables live on [0, π).

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

namespace ontosim {

inline constexpr double kBellPi = 3.141592653589793238462643383279;

double normalize_angle(double x);  // into [0, π)
double complement(double a);       // a + π/2, normalised

double quantum_correlation(double a, double b);  // cos 2(a-b)

// Deterministic response ±1: +1 iff (λ - a) mod π lies in [0, π/4) or
// [3π/4, π). Agrees with sign(cos 2(λ-a)) off the measure-zero set
// cos 2(λ-a) = 0, and flips exactly under a → a + π/2.
int outcome(double setting, double lambda);
// 1 if the photon passes the polariser at `setting`, else 0.
int detection(double setting, double lambda);

// ρ(λ) on [0, π) with response probabilities p_A(a,λ), p_B(b,λ) in [0,1].
struct FactorizedModel {
  std::function<double(double)> density;
  std::function<double(double, double)> response_a;  // (setting, λ)
  std::function<double(double, double)> response_b;
  // Optional λ values where ρ or a response is not smooth at these
  // settings; quadrature panels are anchored there.
  std::function<std::vector<double>(double, double)> breakpoints;
};

// Fixed composite Gauss–Legendre rule on [0, π): 16 uniform panels split
// further at `cuts`, 20 nodes per panel.
double integrate_panels(const std::function<double(double)>& f, std::vector<double> cuts);

// ∫ρ dλ with the same rule; FactorizedModel must give 1 within 1e-8.
double density_mass(const FactorizedModel& model);

// P(a,b) = ∫ρ p_A p_B dλ.
double joint_detection(const FactorizedModel& model, double a, double b);

// E = P(a,b) + P(ā,b̄) - P(a,b̄) - P(ā,b). Throws std::invalid_argument if ρ
// is not normalised.
double factorized_correlation(const FactorizedModel& model, double a, double b);

using CorrelationFn = std::function<double(double, double)>;

struct ChshSettings {
  double a = 0.0;
  double a_prime = 0.0;
  double b = 0.0;
  double b_prime = 0.0;
};

// (0°, 45°, 22.5°, 67.5°).
ChshSettings standard_chsh_settings();

struct ChshResult {
  ChshSettings settings;
  // E(a,b), E(a,b'), E(a',b), E(a',b').
  std::array<double, 4> correlations{};
  double score = 0.0;  // E(a,b) - E(a,b') + E(a',b) + E(a',b')
  bool within_local_bound = true;  // |S| <= 2 + 1e-9
  // Standard error on S when the correlations are Monte Carlo estimates.
  double standard_error = 0.0;
};

ChshResult chsh_score(const CorrelationFn& e, const ChshSettings& s);

// Conditional density over λ at fixed settings, with the λ points where it
// is not smooth. The default is C|sin 2(a+b-2λ)| on [0, π) with C = 1/2.
struct CorrelatedDistribution {
  double domain = kBellPi;
  std::function<double(double, double, double)> density;  // (a, b, λ)
  std::function<std::vector<double>(double, double)> kinks;

  static CorrelatedDistribution sine_density(double domain = kBellPi);
};

// C such that C∫|sin 2(a+b-2λ)|dλ = 1 over [0, domain); the domain must be
// a multiple of π/4.
double sine_normalization(double domain);

// Adaptive Gauss–Kronrod on each kink-free panel. Throws QuadratureError
// if the error estimate exceeds abs_tol.
double integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                          std::vector<double> cuts, double abs_tol = 1e-9);

// E(a,b) = ∫ P(λ|a,b) A(a,λ) B(b,λ) dλ.
double correlated_expectation(double a, double b,
                              const CorrelatedDistribution& dist = CorrelatedDistribution::sine_density());

// ∫ P(λ|a,b) dλ over the distribution's domain.
double conditional_mass(double a, double b, const CorrelatedDistribution& dist);

enum class Marginal { kLambda, kA, kB };

struct MarginalReport {
  Marginal which = Marginal::kLambda;
  std::size_t grid = 0;
  double mean = 0.0;
  double max_deviation = 0.0;  // max |value - 1| over the grid
  double spread = 0.0;         // max - min over the grid
};

// Integrates C|sin 2(a+b-2λ)| (C = 1/2) over the named variable on [0, π)
// at grid × grid points of the other two.
MarginalReport marginal_flatness(Marginal which, std::size_t grid = 32);

struct Triple {
  double a = 0.0;
  double b = 0.0;
  double lambda = 0.0;
  int outcome_a = 1;
  int outcome_b = 1;
};

// λ from C|sin 2(a+b-2λ)| by exact inversion on one lobe: pick one of the
// four lobes uniformly, then y = arccos(1 - 2u)/4 inside it.
double sample_lambda(double a, double b, double u_lobe, double u_inner);

// (a, b) uniform on [0, π)², then λ | (a, b). Sample i uses Philox
// substream (seed, i).
std::vector<Triple> sample_triples(std::uint64_t count, std::uint64_t seed);

// λ | (a, b) at fixed settings; sample i uses substream (seed, i).
std::vector<double> sample_conditional(double a, double b, std::uint64_t count, std::uint64_t seed);

struct CorrelationBin {
  double lo = 0.0;  // bin edges in (a - b) mod π
  double hi = 0.0;
  std::uint64_t count = 0;
  double estimate = 0.0;  // mean of A·B
  double expected = 0.0;  // bin average of cos 2(a-b)
  double standard_error = 0.0;
};

std::vector<CorrelationBin> binned_correlation(const std::vector<Triple>& samples, std::size_t bins);

// Monte Carlo CHSH from the correlated model: each setting pair gets
// samples_per_pair draws from λ | (a, b), with substreams offset per pair.
ChshResult monte_carlo_chsh(const ChshSettings& s, std::uint64_t samples_per_pair, std::uint64_t seed);

}  // namespace ontosim
