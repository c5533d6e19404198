#include "ontosim/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

#include "ontosim/errors.hpp"

namespace ontosim {

namespace {

constexpr Complex kI{0.0, 1.0};

}  // namespace

Eigen::Matrix2cd pauli_y() {
  Eigen::Matrix2cd s;
  s << 0.0, -kI, kI, 0.0;
  return s;
}

InterchangeHamiltonian interaction_terms(const OntologicalModel& model) {
  InterchangeHamiltonian h;
  h.terms.assign(model.special_points().begin(), model.special_points().end());
  return h;
}

Eigen::MatrixXcd clock_hamiltonian(std::size_t period) {
  const CycleSpectrum spec = cycle_spectrum(period);
  Eigen::VectorXd e(static_cast<Eigen::Index>(period));
  for (std::size_t n = 0; n < period; ++n) e(static_cast<Eigen::Index>(n)) = spec.energies[n];
  return spec.eigenvectors * e.asDiagonal() * spec.eigenvectors.adjoint();
}

std::vector<Fraction> free_levels(const OntologicalModel& model) {
  const auto periods = model.periods();
  const std::uint64_t block = model.phase_space_size();
  if (block * model.slow_count() > kDenseCap)
    throw SizeCapExceeded("free_levels: ontic space exceeds dense cap");
  std::vector<Fraction> out;
  out.reserve(block * model.slow_count());
  std::vector<std::uint32_t> n(periods.size(), 0);
  for (std::uint64_t k = 0; k < block; ++k) {
    Fraction e(0);
    for (std::size_t i = 0; i < periods.size(); ++i)
      e += Fraction(n[i], static_cast<std::int64_t>(periods[i]));
    for (std::size_t s = 0; s < model.slow_count(); ++s) out.push_back(e);
    for (std::size_t i = periods.size(); i-- > 0;) {
      if (++n[i] < periods[i]) break;
      n[i] = 0;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

SumRuleCheck check_free_sum_rule(const OntologicalModel& model) {
  if (!model.special_points().empty())
    throw std::invalid_argument("check_free_sum_rule: model has special points");
  std::vector<Fraction> expected = free_levels(model);
  for (Fraction& f : expected) f -= Fraction(f.numerator() / f.denominator());
  std::sort(expected.begin(), expected.end());

  const CycleDecomposition cycles = decompose(step_law(model, kDenseCap));
  std::vector<Fraction> found;
  found.reserve(expected.size());
  for (const auto& c : cycles.cycles)
    for (std::size_t n = 0; n < c.size(); ++n)
      found.emplace_back(static_cast<std::int64_t>(n), static_cast<std::int64_t>(c.size()));
  std::sort(found.begin(), found.end());

  SumRuleCheck out;
  out.levels = found.size();
  out.exact_match = found == expected;
  if (found.size() == expected.size()) {
    for (std::size_t i = 0; i < found.size(); ++i)
      out.max_abs_error = std::max(out.max_abs_error,
                                   2.0 * kPi * std::abs(boost::rational_cast<double>(found[i] - expected[i])));
  } else {
    out.max_abs_error = std::numeric_limits<double>::infinity();
  }
  return out;
}

FullHamiltonian build_full_hamiltonian(const OntologicalModel& model) {
  const std::uint64_t dim = model.ontic_size();
  if (dim > kDenseCap) {
    throw SizeCapExceeded("build_full_hamiltonian: dimension " + std::to_string(dim) +
                          " exceeds " + std::to_string(kDenseCap));
  }
  const auto d = static_cast<Eigen::Index>(dim);
  const auto periods = model.periods();

  // Stride of clock i in the flat encoding.
  std::vector<std::uint64_t> stride(periods.size(), 1);
  for (std::size_t i = periods.size(); i-- > 1;) stride[i - 1] = stride[i] * periods[i];

  FullHamiltonian full;
  full.fast = Eigen::MatrixXcd::Zero(d, d);
  std::vector<Eigen::MatrixXcd> clocks;
  for (std::uint32_t p : periods) clocks.push_back(clock_hamiltonian(p));
  for (std::uint64_t col = 0; col < dim; ++col) {
    const ClassicalConfig c = model.decode(col);
    for (std::size_t i = 0; i < periods.size(); ++i) {
      const std::uint64_t base = col - std::uint64_t{c.phases[i]} * stride[i];
      for (std::uint32_t k = 0; k < periods[i]; ++k) {
        full.fast(static_cast<Eigen::Index>(base + k * stride[i]), static_cast<Eigen::Index>(col)) +=
            clocks[i](k, c.phases[i]);
      }
    }
  }

  full.interaction = interaction_terms(model);
  Eigen::MatrixXcd& h = full.interaction.matrix;
  h = Eigen::MatrixXcd::Zero(d, d);
  const std::uint64_t phase_space = model.phase_space_size();
  const double w = full.interaction.weight;
  for (std::uint64_t k = 0; k < phase_space; ++k) {
    const ClassicalConfig c = model.decode(k);  // slow = 0 carries the phases
    for (const SpecialPoint& p : full.interaction.terms) {
      if (c.phases[p.alpha] != p.trigger_alpha || c.phases[p.beta] != p.trigger_beta) continue;
      const auto ra = static_cast<Eigen::Index>(std::uint64_t{p.alpha} * phase_space + k);
      const auto rb = static_cast<Eigen::Index>(std::uint64_t{p.beta} * phase_space + k);
      h(ra, rb) += w * -kI;
      h(rb, ra) += w * kI;
    }
  }
  return full;
}

Fraction ground_delta_expectation(std::uint32_t period, std::uint32_t phase) {
  if (period == 0 || phase >= period) throw std::invalid_argument("phase outside clock period");
  const Fraction weight(1, period);  // |1/√N|²
  Fraction sum = 0;
  for (std::uint32_t k = 0; k < period; ++k)
    if (k == phase) sum += weight;
  return sum;
}

double ground_delta_expectation_numeric(std::uint32_t period, std::uint32_t phase) {
  if (period == 0 || phase >= period) throw std::invalid_argument("phase outside clock period");
  const double amp = 1.0 / std::sqrt(static_cast<double>(period));
  double sum = 0.0;
  for (std::uint32_t k = 0; k < period; ++k)
    if (k == phase) sum += amp * amp;
  return sum;
}

Fraction exact_term_weight(const OntologicalModel& model, const SpecialPoint& term) {
  const auto periods = model.periods();
  Fraction w = 1;
  for (std::uint32_t clock = 0; clock < periods.size(); ++clock) {
    if (clock == term.alpha) {
      w *= ground_delta_expectation(periods[clock], term.trigger_alpha);
    } else if (clock == term.beta) {
      w *= ground_delta_expectation(periods[clock], term.trigger_beta);
    } else {
      Fraction norm = 0;
      for (std::uint32_t k = 0; k < periods[clock]; ++k) norm += Fraction(1, periods[clock]);
      w *= norm;
    }
  }
  return w;
}

Eigen::MatrixXcd EffectiveHamiltonian::from_table(std::size_t slow_count) const {
  const auto n = static_cast<Eigen::Index>(slow_count);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (const PairCoupling& c : couplings) {
    const double v = kHalfPi * static_cast<double>(c.num) / static_cast<double>(c.den);
    m(c.a, c.b) = -kI * v;
    m(c.b, c.a) = kI * v;
  }
  return m;
}

EffectiveHamiltonian ground_project(const OntologicalModel& model,
                                    const InterchangeHamiltonian& h_int) {
  const auto n = static_cast<Eigen::Index>(model.slow_count());
  const auto periods = model.periods();
  EffectiveHamiltonian eff;
  eff.matrix = Eigen::MatrixXcd::Zero(n, n);

  std::vector<double> norms(periods.size());
  for (std::size_t i = 0; i < periods.size(); ++i) {
    const double amp = 1.0 / std::sqrt(static_cast<double>(periods[i]));
    double s = 0.0;
    for (std::uint32_t k = 0; k < periods[i]; ++k) s += amp * amp;
    norms[i] = s;
  }
  const Eigen::Matrix2cd sy = pauli_y();

  std::map<std::pair<std::uint32_t, std::uint32_t>, PairCoupling> table;
  for (const SpecialPoint& p : h_int.terms) {
    double w = h_int.weight;
    for (std::uint32_t clock = 0; clock < periods.size(); ++clock) {
      if (clock == p.alpha) {
        w *= ground_delta_expectation_numeric(periods[clock], p.trigger_alpha);
      } else if (clock == p.beta) {
        w *= ground_delta_expectation_numeric(periods[clock], p.trigger_beta);
      } else {
        w *= norms[clock];
      }
    }
    eff.matrix(p.alpha, p.alpha) += w * sy(0, 0);
    eff.matrix(p.alpha, p.beta) += w * sy(0, 1);
    eff.matrix(p.beta, p.alpha) += w * sy(1, 0);
    eff.matrix(p.beta, p.beta) += w * sy(1, 1);

    const std::uint32_t a = std::min(p.alpha, p.beta);
    const std::uint32_t b = std::max(p.alpha, p.beta);
    PairCoupling& c = table[{a, b}];
    c.a = a;
    c.b = b;
    c.den = std::int64_t{periods[a]} * periods[b];
    c.num += p.alpha == a ? 1 : -1;
    c.points += 1;
  }
  for (auto& [key, c] : table) eff.couplings.push_back(c);
  return eff;
}

Eigen::VectorXcd ground_product_state(const OntologicalModel& model, std::uint32_t slow) {
  if (slow >= model.slow_count()) throw std::invalid_argument("unknown slow state");
  const std::uint64_t phase_space = model.phase_space_size();
  const std::uint64_t dim = model.ontic_size();
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
  // Product of per-clock amplitudes 1/√N_i.
  double amp = 1.0;
  for (std::uint32_t p : model.periods()) amp /= std::sqrt(static_cast<double>(p));
  for (std::uint64_t k = 0; k < phase_space; ++k)
    psi(static_cast<Eigen::Index>(std::uint64_t{slow} * phase_space + k)) = amp;
  return psi;
}

Eigen::MatrixXcd ground_project_dense(const OntologicalModel& model,
                                      const Eigen::MatrixXcd& h_int) {
  const auto n = static_cast<Eigen::Index>(model.slow_count());
  if (static_cast<std::uint64_t>(h_int.rows()) != model.ontic_size())
    throw std::invalid_argument("ground_project_dense: dimension mismatch");
  std::vector<Eigen::VectorXcd> ground;
  for (std::uint32_t s = 0; s < model.slow_count(); ++s)
    ground.push_back(ground_product_state(model, s));
  Eigen::MatrixXcd eff(n, n);
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = 0; b < n; ++b)
      eff(a, b) = ground[static_cast<std::size_t>(a)].dot(h_int * ground[static_cast<std::size_t>(b)]);
  return eff;
}

std::vector<double> slow_marginals(const OntologicalModel& model, const Eigen::VectorXcd& psi) {
  const std::uint64_t phase_space = model.phase_space_size();
  std::vector<double> out(model.slow_count(), 0.0);
  for (std::size_t s = 0; s < out.size(); ++s) {
    double acc = 0.0;
    for (std::uint64_t k = 0; k < phase_space; ++k)
      acc += std::norm(psi(static_cast<Eigen::Index>(s * phase_space + k)));
    out[s] = acc;
  }
  return out;
}

bool is_hermitian(const Eigen::MatrixXcd& h, double tol) {
  if (h.rows() != h.cols()) return false;
  if (h.size() == 0) return true;
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  return (h - h.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

Propagator::Propagator(const Eigen::MatrixXcd& h) {
  if (!is_hermitian(h)) throw NonHermitian("Hamiltonian is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
  if (solver.info() != Eigen::Success) throw Error("eigendecomposition failed");
  vectors_ = solver.eigenvectors();
  const Eigen::VectorXd& e = solver.eigenvalues();
  energies_.assign(e.data(), e.data() + e.size());
}

Eigen::MatrixXcd Propagator::operator_at(double t) const {
  Eigen::VectorXcd phases(static_cast<Eigen::Index>(energies_.size()));
  for (std::size_t k = 0; k < energies_.size(); ++k)
    phases(static_cast<Eigen::Index>(k)) = std::polar(1.0, -energies_[k] * t);
  return vectors_ * phases.asDiagonal() * vectors_.adjoint();
}

Eigen::VectorXcd Propagator::evolve(const Eigen::VectorXcd& psi, double t) const {
  if (psi.size() != vectors_.rows()) throw std::invalid_argument("evolve: dimension mismatch");
  Eigen::VectorXcd coeffs = vectors_.adjoint() * psi;
  for (Eigen::Index k = 0; k < coeffs.size(); ++k)
    coeffs(k) *= std::polar(1.0, -energies_[static_cast<std::size_t>(k)] * t);
  return vectors_ * coeffs;
}

Eigen::MatrixXcd evolution_operator(const Eigen::MatrixXcd& h, double t) {
  return Propagator(h).operator_at(t);
}

Eigen::VectorXcd schrodinger_evolve(const Eigen::MatrixXcd& h, const Eigen::VectorXcd& psi,
                                    double t) {
  return Propagator(h).evolve(psi, t);
}

Eigen::Matrix2cd classical_interchange_check() {
  const Eigen::MatrixXcd h = kHalfPi * pauli_y();
  return evolution_operator(h, 1.0);
}

double DynamicsComparison::departure(const std::vector<double>& curve, std::uint64_t t) const {
  double left = 0.0;
  for (std::size_t s = 0; s < slow_count; ++s)
    if (s != initial_slow) left += curve[t * slow_count + s];
  return left;
}

DynamicsComparison compare_dynamics(const OntologicalModel& model, std::uint32_t initial_slow,
                                    std::uint64_t horizon, std::uint64_t sample_count,
                                    std::uint64_t seed) {
  const std::size_t n = model.slow_count();
  DynamicsComparison out;
  out.slow_count = n;
  out.horizon = horizon;
  out.initial_slow = initial_slow;

  const Occupation exact = enumerate_exact(model, initial_slow, horizon);
  out.classical.resize((horizon + 1) * n);
  for (std::uint64_t t = 0; t <= horizon; ++t)
    for (std::size_t s = 0; s < n; ++s) out.classical[t * n + s] = exact.frequency(t, s);

  const PermutationLaw law = step_law(model, std::uint64_t{1} << 22);
  Eigen::VectorXcd psi = ground_product_state(model, initial_slow);
  std::vector<Complex> buffer(psi.data(), psi.data() + psi.size());
  out.full_quantum.resize((horizon + 1) * n);
  for (std::uint64_t t = 0; t <= horizon; ++t) {
    if (t > 0) buffer = apply_law(law, buffer);
    const Eigen::Map<const Eigen::VectorXcd> view(buffer.data(),
                                                  static_cast<Eigen::Index>(buffer.size()));
    const std::vector<double> marg = slow_marginals(model, view);
    std::copy(marg.begin(), marg.end(), out.full_quantum.begin() + static_cast<std::ptrdiff_t>(t * n));
  }

  const EffectiveHamiltonian eff = ground_project(model, interaction_terms(model));
  const Propagator prop(eff.matrix);
  Eigen::VectorXcd start = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(n));
  start(initial_slow) = 1.0;
  out.effective.resize((horizon + 1) * n);
  for (std::uint64_t t = 0; t <= horizon; ++t) {
    const Eigen::VectorXcd v = prop.evolve(start, static_cast<double>(t));
    for (std::size_t s = 0; s < n; ++s)
      out.effective[t * n + s] = std::norm(v(static_cast<Eigen::Index>(s)));
  }

  if (sample_count > 0) {
    const Occupation mc = run_ensemble(model, initial_slow, horizon, sample_count, seed);
    out.ensemble.resize((horizon + 1) * n);
    for (std::uint64_t t = 0; t <= horizon; ++t)
      for (std::size_t s = 0; s < n; ++s) out.ensemble[t * n + s] = mc.frequency(t, s);
  }

  auto max_gap = [](const std::vector<double>& x, const std::vector<double>& y) {
    double m = 0.0;
    for (std::size_t k = 0; k < x.size() && k < y.size(); ++k) m = std::max(m, std::abs(x[k] - y[k]));
    return m;
  };
  out.max_classical_vs_quantum = max_gap(out.classical, out.full_quantum);
  out.max_classical_vs_effective = max_gap(out.classical, out.effective);
  out.max_classical_vs_ensemble = max_gap(out.classical, out.ensemble);

  const auto periods = model.periods();
  const double longest = *std::max_element(periods.begin(), periods.end());
  out.adiabatic_ratio = eff.matrix.size() ? longest * eff.matrix.cwiseAbs().maxCoeff() : 0.0;
  return out;
}

}  // namespace ontosim
