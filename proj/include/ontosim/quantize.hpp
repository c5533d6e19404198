#pragma once

// Vector representation of a fast/slow machine: the full Hilbert space over
// flat ontic coordinates, the interchange Hamiltonian built from σ_y terms,
// its projection onto the clocks' uniform ground states, and Schrödinger
// propagation by Hermitian eigendecomposition.

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ontosim/fastslow.hpp"
#include "ontosim/ontodyn.hpp"

namespace ontosim {

inline constexpr double kPi = 3.141592653589793238462643383279;
inline constexpr double kHalfPi = kPi / 2.0;

// Pauli σ_y in the ordered basis (first, second).
Eigen::Matrix2cd pauli_y();

// One (π/2)·σ_y^{[α,β]} ⊗ δ_{φα,pα} ⊗ δ_{φβ,pβ} term per special point.
struct InterchangeHamiltonian {
  std::vector<SpecialPoint> terms;
  double weight = kHalfPi;
  // Dense matrix over the full ontic space; empty unless built by
  // build_full_hamiltonian.
  Eigen::MatrixXcd matrix;
};

struct FullHamiltonian {
  Eigen::MatrixXcd fast;  // Σ_i free clock Hamiltonians, spectrum 2π Σ n_i/T_i
  InterchangeHamiltonian interaction;

  Eigen::MatrixXcd total() const { return fast + interaction.matrix; }
};

// Term list only; no size limit.
InterchangeHamiltonian interaction_terms(const OntologicalModel& model);

// Dense H_fast and H_int; requires N·Π N_[α] <= kDenseCap.
FullHamiltonian build_full_hamiltonian(const OntologicalModel& model);

// Free Hamiltonian of a single clock of period T in phase coordinates:
// Σ_n (2πn/T)|n⟩⟨n| with e^{-iH} equal to the +1 phase shift.
Eigen::MatrixXcd clock_hamiltonian(std::size_t period);

// Free-model levels E/2π = Σ_i n_i/T_i, one block per slow state, sorted.
// Unreduced, so each block has a single zero and all others >= 1/max T_i.
std::vector<Fraction> free_levels(const OntologicalModel& model);

// Compares the step map's per-cycle energies n/L with the free levels
// reduced mod 1, both as exact multisets. Requires a model without special
// points and ontic size <= kDenseCap.
struct SumRuleCheck {
  std::size_t levels = 0;
  bool exact_match = false;
  double max_abs_error = 0.0;  // in radians per step, after sorting both
};
SumRuleCheck check_free_sum_rule(const OntologicalModel& model);

// ⟨0|δ_{φ,p}|0⟩ for a clock of period N, summed over phase points with the
// ground-state weight |⟨k|0⟩|² = 1/N held as an exact fraction.
Fraction ground_delta_expectation(std::uint32_t period, std::uint32_t phase);
// The same expectation from the floating ground-state amplitudes 1/√N.
double ground_delta_expectation_numeric(std::uint32_t period, std::uint32_t phase);

struct PairCoupling {
  std::uint32_t a = 0;  // a < b
  std::uint32_t b = 0;
  // Net oriented count: points listed as (a, b) minus points listed (b, a).
  std::int64_t num = 0;
  std::int64_t den = 1;  // N_[a] · N_[b]
  // Count regardless of orientation; equals |num| when orientations agree.
  std::int64_t points = 0;

  Fraction ratio() const { return Fraction(num, den); }
};

// H_eff[a][b] = -i·(π/2)·num/den and H_eff[b][a] = conj.
struct EffectiveHamiltonian {
  Eigen::MatrixXcd matrix;
  std::vector<PairCoupling> couplings;  // ascending (a, b), nonzero points only

  // Matrix rebuilt from the rational table alone.
  Eigen::MatrixXcd from_table(std::size_t slow_count) const;
};

// Per-term ground-state projection: each δ factor contributes its clock's
// floating expectation, untouched clocks contribute ⟨0|0⟩.
EffectiveHamiltonian ground_project(const OntologicalModel& model,
                                    const InterchangeHamiltonian& h_int);

// Projection by explicit vectors in the full space: ⟨α,0…0|H|β,0…0⟩.
// Needs the dense matrix.
Eigen::MatrixXcd ground_project_dense(const OntologicalModel& model,
                                      const Eigen::MatrixXcd& h_int);

// Exact ground expectation of one term as a product over clocks of
// rational expectations (δ factors on the two trigger clocks, ⟨0|0⟩ on the
// rest). Used to certify the table.
Fraction exact_term_weight(const OntologicalModel& model, const SpecialPoint& term);

// Hermitian check: max |H - H†| <= tol · max(1, max|H|).
bool is_hermitian(const Eigen::MatrixXcd& h, double tol = 1e-12);

// e^{-iHt} via eigendecomposition, reusable across times.
class Propagator {
 public:
  // Throws NonHermitian.
  explicit Propagator(const Eigen::MatrixXcd& h);

  Eigen::MatrixXcd operator_at(double t) const;
  Eigen::VectorXcd evolve(const Eigen::VectorXcd& psi, double t) const;
  std::span<const double> energies() const { return energies_; }

 private:
  Eigen::MatrixXcd vectors_;
  std::vector<double> energies_;
};

Eigen::MatrixXcd evolution_operator(const Eigen::MatrixXcd& h, double t);
Eigen::VectorXcd schrodinger_evolve(const Eigen::MatrixXcd& h,
                                    const Eigen::VectorXcd& psi, double t);

// exp(-(π/2)·i·σ_y) computed through the propagator; expected [[0,-1],[1,0]].
Eigen::Matrix2cd classical_interchange_check();

// Ground state of all clocks tensored with slow basis state `slow`, in flat
// coordinates.
Eigen::VectorXcd ground_product_state(const OntologicalModel& model, std::uint32_t slow);

// Ontic-basis probabilities summed per slow state.
std::vector<double> slow_marginals(const OntologicalModel& model,
                                   const Eigen::VectorXcd& psi);

struct DynamicsComparison {
  std::size_t slow_count = 0;
  std::uint64_t horizon = 0;
  // Row-major [t][s] occupation curves.
  std::vector<double> classical;     // exhaustive classical enumeration
  std::vector<double> full_quantum;  // permutation unitary on the product state
  std::vector<double> effective;     // |⟨s|e^{-iH_eff t}|initial⟩|²
  std::vector<double> ensemble;      // Monte Carlo, empty if no samples requested
  std::uint32_t initial_slow = 0;

  double max_classical_vs_quantum = 0.0;
  double max_classical_vs_effective = 0.0;
  double max_classical_vs_ensemble = 0.0;
  // longest clock period · max |H_eff|; small means the clocks are fast.
  double adiabatic_ratio = 0.0;

  // Probability of having left the initial slow state: the mass on all others.
  double departure(const std::vector<double>& curve, std::uint64_t t) const;
};

// The full-quantum curve applies the enumerated step permutation to the
// ground product state (ontic space <= 2^22).
DynamicsComparison compare_dynamics(const OntologicalModel& model, std::uint32_t initial_slow,
                                    std::uint64_t horizon, std::uint64_t sample_count = 0,
                                    std::uint64_t seed = 0);

}  // namespace ontosim
