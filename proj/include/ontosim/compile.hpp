#pragma once

// Synthesis of fast/slow machines whose ground-projected Hamiltonian
// approximates a prescribed slow-space Hamiltonian of the form i·A with A
// real antisymmetric.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "ontosim/fastslow.hpp"
#include "ontosim/quantize.hpp"

namespace ontosim {

class TargetHamiltonian {
 public:
  // Throws NotRepresentable unless the matrix is square, Hermitian,
  // zero-diagonal and purely imaginary (all within `tol`).
  static TargetHamiltonian from_matrix(const Eigen::MatrixXcd& h, double tol = 1e-12);

  std::size_t size() const { return static_cast<std::size_t>(matrix_.rows()); }
  const Eigen::MatrixXcd& matrix() const { return matrix_; }
  // Im H[a][b]; H = i·A with A = coupling().
  double coupling(std::size_t a, std::size_t b) const {
    return matrix_(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)).imag();
  }

 private:
  explicit TargetHamiltonian(Eigen::MatrixXcd m) : matrix_(std::move(m)) {}
  Eigen::MatrixXcd matrix_;
};

struct PairApproximation {
  std::uint32_t a = 0;
  std::uint32_t b = 0;
  double target = 0.0;    // |H[a][b]|
  double achieved = 0.0;  // (π/2)·count/(N_a·N_b)
  std::int64_t count = 0;
  std::int64_t den = 1;
  double error = 0.0;
};

struct CompiledModel {
  OntologicalModel model;
  std::vector<PairApproximation> pairs;
  double max_error = 0.0;
};

// Throws UnreachableTolerance when no admissible period assignment
// (2 <= N_[α] <= max_period) meets `tolerance` on every nonzero pair.
CompiledModel compile_target(const TargetHamiltonian& target, double tolerance,
                             std::uint32_t max_period);

}  // namespace ontosim
