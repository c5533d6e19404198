#include "ontosim/ontodyn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "ontosim/errors.hpp"

namespace ontosim {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

void require_dense(std::size_t m, const char* what) {
  if (m > kDenseCap) {
    throw SizeCapExceeded(std::string(what) + ": dimension " + std::to_string(m) +
                          " exceeds dense cap " + std::to_string(kDenseCap));
  }
}

}  // namespace

PermutationLaw PermutationLaw::from_image(std::span<const std::int64_t> image) {
  if (image.empty()) throw MalformedLaw("permutation law: empty image");
  if (image.size() > std::numeric_limits<std::uint32_t>::max())
    throw MalformedLaw("permutation law: too many states");
  const auto m = static_cast<std::int64_t>(image.size());
  std::vector<std::uint32_t> out(image.size());
  std::vector<bool> seen(image.size(), false);
  for (std::size_t k = 0; k < image.size(); ++k) {
    const std::int64_t v = image[k];
    if (v < 0 || v >= m) {
      throw MalformedLaw("permutation law: image[" + std::to_string(k) + "] = " +
                         std::to_string(v) + " out of range [0, " +
                         std::to_string(m) + ")");
    }
    if (seen[static_cast<std::size_t>(v)]) {
      throw MalformedLaw("permutation law: state " + std::to_string(v) +
                         " has two predecessors");
    }
    seen[static_cast<std::size_t>(v)] = true;
    out[k] = static_cast<std::uint32_t>(v);
  }
  return PermutationLaw(std::move(out));
}

PermutationLaw PermutationLaw::from_successors(std::vector<std::uint32_t> image) {
  std::vector<std::int64_t> wide(image.begin(), image.end());
  from_image(wide);  // validation only
  return PermutationLaw(std::move(image));
}

PermutationLaw PermutationLaw::identity(std::size_t size) {
  if (size == 0) throw MalformedLaw("permutation law: empty image");
  std::vector<std::uint32_t> image(size);
  std::iota(image.begin(), image.end(), 0u);
  return PermutationLaw(std::move(image));
}

PermutationLaw PermutationLaw::inverse() const {
  std::vector<std::uint32_t> inv(image_.size());
  for (std::size_t k = 0; k < image_.size(); ++k)
    inv[image_[k]] = static_cast<std::uint32_t>(k);
  return PermutationLaw(std::move(inv));
}

PermutationLaw PermutationLaw::after(const PermutationLaw& first) const {
  if (first.size() != size())
    throw std::invalid_argument("permutation law: size mismatch in composition");
  std::vector<std::uint32_t> out(image_.size());
  for (std::size_t k = 0; k < image_.size(); ++k) out[k] = image_[first.image_[k]];
  return PermutationLaw(std::move(out));
}

PermutationLaw PermutationLaw::power(std::int64_t t) const {
  PermutationLaw base = t < 0 ? inverse() : *this;
  // |INT64_MIN| does not fit; the extra factor is one more application.
  std::uint64_t e = t < 0 ? static_cast<std::uint64_t>(-(t + 1)) + 1
                          : static_cast<std::uint64_t>(t);
  PermutationLaw result = identity(size());
  while (e > 0) {
    if (e & 1u) result = base.after(result);
    e >>= 1u;
    if (e > 0) base = base.after(base);
  }
  return result;
}

bool PermutationLaw::is_identity() const {
  for (std::size_t k = 0; k < image_.size(); ++k)
    if (image_[k] != k) return false;
  return true;
}

std::size_t CycleDecomposition::state_count() const {
  return std::accumulate(ranks.begin(), ranks.end(), std::size_t{0});
}

CycleDecomposition decompose(const PermutationLaw& law) {
  CycleDecomposition out;
  const auto image = law.image();
  std::vector<bool> visited(image.size(), false);
  for (std::uint32_t start = 0; start < image.size(); ++start) {
    if (visited[start]) continue;
    std::vector<std::uint32_t> cycle;
    std::uint32_t k = start;
    do {
      visited[k] = true;
      cycle.push_back(k);
      k = image[k];
    } while (k != start);
    out.ranks.push_back(cycle.size());
    out.cycles.push_back(std::move(cycle));
  }
  std::sort(out.ranks.begin(), out.ranks.end());
  return out;
}

CycleDecomposition decompose(std::span<const std::int64_t> image) {
  return decompose(PermutationLaw::from_image(image));
}

std::optional<std::uint64_t> recursion_time(const CycleDecomposition& cycles) {
  std::uint64_t l = 1;
  for (std::size_t r : cycles.ranks) {
    const std::uint64_t g = std::gcd(l, static_cast<std::uint64_t>(r));
    const std::uint64_t factor = r / g;
    if (l > std::numeric_limits<std::uint64_t>::max() / factor) return std::nullopt;
    l *= factor;
  }
  return l;
}

PermutationMatrix permutation_matrix(const PermutationLaw& law) {
  const std::size_t m = law.size();
  require_dense(m, "permutation_matrix");
  PermutationMatrix u = PermutationMatrix::Zero(static_cast<Eigen::Index>(m),
                                                static_cast<Eigen::Index>(m));
  const auto image = law.image();
  for (std::size_t k = 0; k < m; ++k)
    u(static_cast<Eigen::Index>(image[k]), static_cast<Eigen::Index>(k)) = 1;
  return u;
}

double cycle_energy(std::size_t cycle_length, std::size_t n) {
  if (cycle_length == 0) throw std::invalid_argument("cycle length must be positive");
  return kTwoPi * static_cast<double>(n) / static_cast<double>(cycle_length);
}

Complex cycle_eigenphase(std::size_t cycle_length, std::size_t n) {
  return std::polar(1.0, -cycle_energy(cycle_length, n % cycle_length));
}

CycleSpectrum cycle_spectrum(std::size_t cycle_length) {
  if (cycle_length == 0) throw std::invalid_argument("cycle length must be positive");
  require_dense(cycle_length, "cycle_spectrum");
  const std::size_t t = cycle_length;
  CycleSpectrum s;
  s.period = t;
  s.eigenphases.reserve(t);
  s.energies.reserve(t);
  s.eigenvectors.resize(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(t));
  const double amp = 1.0 / std::sqrt(static_cast<double>(t));
  for (std::size_t n = 0; n < t; ++n) {
    s.energies.push_back(cycle_energy(t, n));
    s.eigenphases.push_back(cycle_eigenphase(t, n));
    for (std::size_t j = 0; j < t; ++j) {
      // Reduce n*j mod t first so the angle stays in [0, 2π).
      const double angle = kTwoPi * static_cast<double>((n * j) % t) / static_cast<double>(t);
      s.eigenvectors(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(n)) =
          std::polar(amp, angle);
    }
  }
  return s;
}

Eigen::MatrixXcd spectral_basis(const CycleDecomposition& cycles,
                                std::vector<double>* energies) {
  const std::size_t m = cycles.state_count();
  require_dense(m, "spectral_basis");
  Eigen::MatrixXcd basis = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(m),
                                                  static_cast<Eigen::Index>(m));
  if (energies) energies->clear();
  Eigen::Index column = 0;
  for (const auto& cycle : cycles.cycles) {
    const std::size_t t = cycle.size();
    const double amp = 1.0 / std::sqrt(static_cast<double>(t));
    for (std::size_t n = 0; n < t; ++n, ++column) {
      for (std::size_t j = 0; j < t; ++j) {
        const double angle =
            kTwoPi * static_cast<double>((n * j) % t) / static_cast<double>(t);
        basis(static_cast<Eigen::Index>(cycle[j]), column) = std::polar(amp, angle);
      }
      if (energies) energies->push_back(cycle_energy(t, n));
    }
  }
  return basis;
}

Eigen::MatrixXcd cyclic_shift(std::size_t cycle_length) {
  if (cycle_length == 0) throw std::invalid_argument("cycle length must be positive");
  require_dense(cycle_length, "cyclic_shift");
  const auto t = static_cast<Eigen::Index>(cycle_length);
  Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(t, t);
  for (Eigen::Index j = 0; j < t; ++j) s((j + 1) % t, j) = 1.0;
  return s;
}

StateId evolve_basis_state(const PermutationLaw& law, StateId k, std::int64_t t) {
  if (k.value >= law.size()) throw std::out_of_range("evolve_basis_state: state out of range");
  const auto image = law.image();
  // Orbit length first, so |t| can be arbitrarily large.
  std::int64_t period = 0;
  std::uint32_t s = k.value;
  do {
    s = image[s];
    ++period;
  } while (s != k.value);
  std::int64_t r = t % period;
  if (r < 0) r += period;
  s = k.value;
  for (std::int64_t i = 0; i < r; ++i) s = image[s];
  return StateId{s};
}

std::vector<Complex> apply_law(const PermutationLaw& law, std::span<const Complex> psi) {
  if (psi.size() != law.size()) throw std::invalid_argument("apply: dimension mismatch");
  std::vector<Complex> out(psi.size());
  const auto image = law.image();
  for (std::size_t k = 0; k < psi.size(); ++k) out[image[k]] = psi[k];
  return out;
}

}  // namespace ontosim
