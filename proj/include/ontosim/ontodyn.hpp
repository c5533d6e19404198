#pragma once

// Finite reversible evolution laws, their orbit structure and the exact
// unitary (Koopman) representation on the ontic basis.

#include <complex>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace ontosim {

using Complex = std::complex<double>;

// Matrix operations on the ontic basis are dense; beyond this size only
// orbit-level operations are offered.
inline constexpr std::size_t kDenseCap = std::size_t{1} << 14;

struct StateId {
  std::uint32_t value = 0;
  friend auto operator<=>(StateId, StateId) = default;
};

// A bijection on {0, ..., M-1}; image()[k] is the successor of state k
// after one time step.
class PermutationLaw {
 public:
  // Throws MalformedLaw on an empty array, an out-of-range entry or a
  // repeated entry.
  static PermutationLaw from_image(std::span<const std::int64_t> image);
  static PermutationLaw from_successors(std::vector<std::uint32_t> image);
  static PermutationLaw identity(std::size_t size);

  std::size_t size() const { return image_.size(); }
  std::span<const std::uint32_t> image() const { return image_; }
  StateId operator()(StateId k) const { return StateId{image_[k.value]}; }

  PermutationLaw inverse() const;
  // (this ∘ first): apply `first`, then this law.
  PermutationLaw after(const PermutationLaw& first) const;
  // The law applied t times; negative t uses the inverse. Exact, by
  // repeated squaring.
  PermutationLaw power(std::int64_t t) const;

  bool is_identity() const;

  friend bool operator==(const PermutationLaw&, const PermutationLaw&) = default;

 private:
  explicit PermutationLaw(std::vector<std::uint32_t> image)
      : image_(std::move(image)) {}
  std::vector<std::uint32_t> image_;
};

struct CycleDecomposition {
  // Each cycle starts at its smallest state; cycles are ordered by that
  // state. Within a cycle, law(cycle[j]) == cycle[(j + 1) % T].
  std::vector<std::vector<std::uint32_t>> cycles;
  // Cycle lengths, ascending.
  std::vector<std::size_t> ranks;

  std::size_t state_count() const;
};

CycleDecomposition decompose(const PermutationLaw& law);
// Validates the raw image first (MalformedLaw on failure).
CycleDecomposition decompose(std::span<const std::int64_t> image);

// L = lcm of the ranks, or nullopt when it does not fit in 64 bits.
std::optional<std::uint64_t> recursion_time(const CycleDecomposition& cycles);

using PermutationMatrix =
    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>;

// Column k carries its single 1 at row image[k]. Throws SizeCapExceeded
// when M > kDenseCap.
PermutationMatrix permutation_matrix(const PermutationLaw& law);

// Energy eigenbasis of one cycle of length T. Column n of `eigenvectors`
// has component e^{+2πinj/T}/√T at cycle position j, so that stepping
// along the cycle multiplies it by eigenphases[n] = e^{-2πin/T} and
// e^{-i·energies[n]} reproduces that phase.
struct CycleSpectrum {
  std::size_t period = 0;
  std::vector<Complex> eigenphases;
  Eigen::MatrixXcd eigenvectors;
  std::vector<double> energies;  // radians per step, 2πn/T
};

// Throws std::invalid_argument for T == 0 and SizeCapExceeded for
// T > kDenseCap.
CycleSpectrum cycle_spectrum(std::size_t cycle_length);

// Energies and eigenphases only, without building eigenvectors; no size cap.
double cycle_energy(std::size_t cycle_length, std::size_t n);
Complex cycle_eigenphase(std::size_t cycle_length, std::size_t n);

// Full M×M orthonormal eigenbasis assembled from every cycle; columns are
// grouped by cycle in decomposition order. `energies` (if given) receives
// the matching 2πn/T values.
Eigen::MatrixXcd spectral_basis(const CycleDecomposition& cycles,
                                std::vector<double>* energies = nullptr);

// Cyclic-shift matrix of a T-cycle in cycle-position coordinates:
// column j has its 1 at row (j + 1) % T.
Eigen::MatrixXcd cyclic_shift(std::size_t cycle_length);

StateId evolve_basis_state(const PermutationLaw& law, StateId k, std::int64_t t);

// (U ψ)[image[k]] = ψ[k]; exact, no arithmetic on amplitudes.
std::vector<Complex> apply_law(const PermutationLaw& law, std::span<const Complex> psi);

}  // namespace ontosim
