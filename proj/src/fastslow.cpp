#include "ontosim/fastslow.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <thread>

#include "ontosim/errors.hpp"
#include "ontosim/philox.hpp"

namespace ontosim {

namespace {

constexpr std::uint64_t kProductCap = std::uint64_t{1} << 62;

bool touches(const SpecialPoint& p, std::uint32_t s) { return p.alpha == s || p.beta == s; }

bool fires(const SpecialPoint& p, std::span<const std::uint32_t> phases) {
  return phases[p.alpha] == p.trigger_alpha && phases[p.beta] == p.trigger_beta;
}

// Phase required on `clock` by p, or -1 if p does not constrain it.
std::int64_t required_phase(const SpecialPoint& p, std::uint32_t clock) {
  if (p.alpha == clock) return p.trigger_alpha;
  if (p.beta == clock) return p.trigger_beta;
  return -1;
}

bool can_coincide(const SpecialPoint& a, const SpecialPoint& b) {
  for (std::uint32_t clock : {b.alpha, b.beta}) {
    const std::int64_t ra = required_phase(a, clock);
    if (ra >= 0 && ra != required_phase(b, clock)) return false;
  }
  return true;
}

}  // namespace

OntologicalModel OntologicalModel::assemble(std::size_t slow_count,
                                            std::vector<std::uint32_t> periods,
                                            std::vector<SpecialPoint> points,
                                            std::vector<std::string> site_labels) {
  if (slow_count == 0) throw InvalidModel("model: slow_count must be positive");
  if (periods.size() != slow_count) {
    throw InvalidModel("model: expected one clock period per slow state (" +
                       std::to_string(slow_count) + "), got " +
                       std::to_string(periods.size()));
  }
  if (!site_labels.empty() && site_labels.size() != slow_count)
    throw InvalidModel("model: site labels must cover every slow state");

  OntologicalModel m;
  for (std::size_t i = 0; i < periods.size(); ++i) {
    if (periods[i] == 0)
      throw InvalidModel("model: period of clock " + std::to_string(i) + " is zero");
    if (periods[i] < 10) {
      m.warnings_.push_back("clock " + std::to_string(i) + " has period " +
                            std::to_string(periods[i]) +
                            " < 10; fast/slow separation is weak");
    }
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    const SpecialPoint& p = points[i];
    const std::string where = "special point " + std::to_string(i);
    if (p.alpha >= slow_count || p.beta >= slow_count)
      throw InvalidModel(where + ": unknown slow state");
    if (p.alpha == p.beta) throw InvalidModel(where + ": pair members must differ");
    if (p.trigger_alpha >= periods[p.alpha] || p.trigger_beta >= periods[p.beta])
      throw InvalidModel(where + ": trigger phase outside clock period");
  }
  m.periods_ = std::move(periods);
  m.points_ = std::move(points);
  m.site_labels_ = std::move(site_labels);
  m.touching_.resize(slow_count);
  for (std::uint32_t i = 0; i < m.points_.size(); ++i) {
    m.touching_[m.points_[i].alpha].push_back(i);
    m.touching_[m.points_[i].beta].push_back(i);
  }
  m.phase_space_size();  // overflow check
  return m;
}

OntologicalModel OntologicalModel::build(std::size_t slow_count,
                                         std::vector<std::uint32_t> periods,
                                         std::vector<SpecialPoint> points,
                                         std::vector<std::string> site_labels) {
  OntologicalModel m = assemble(slow_count, std::move(periods), std::move(points),
                                std::move(site_labels));
  const auto conflicts = find_conflicts(m);
  if (!conflicts.empty()) {
    const auto [i, j] = conflicts.front();
    throw ConflictingSpecialPoints("special points " + std::to_string(i) + " and " +
                                   std::to_string(j) +
                                   " can fire on the same step and share a slow state");
  }
  return m;
}

OntologicalModel OntologicalModel::unchecked(std::size_t slow_count,
                                             std::vector<std::uint32_t> periods,
                                             std::vector<SpecialPoint> points) {
  return assemble(slow_count, std::move(periods), std::move(points), {});
}

std::uint64_t OntologicalModel::phase_space_size() const {
  std::uint64_t size = 1;
  for (std::uint32_t p : periods_) {
    if (size > kProductCap / p) throw SizeCapExceeded("model: phase space too large");
    size *= p;
  }
  return size;
}

std::uint64_t OntologicalModel::ontic_size() const {
  const std::uint64_t phases = phase_space_size();
  if (phases > kProductCap / slow_count()) throw SizeCapExceeded("model: ontic space too large");
  return phases * slow_count();
}

void OntologicalModel::validate(const ClassicalConfig& config) const {
  if (config.slow >= slow_count())
    throw std::invalid_argument("config: unknown slow state " + std::to_string(config.slow));
  if (config.phases.size() != periods_.size())
    throw std::invalid_argument("config: expected one phase per clock");
  for (std::size_t i = 0; i < periods_.size(); ++i) {
    if (config.phases[i] >= periods_[i])
      throw std::invalid_argument("config: phase of clock " + std::to_string(i) +
                                  " outside its period");
  }
}

FlatIndex OntologicalModel::encode(const ClassicalConfig& config) const {
  validate(config);
  FlatIndex flat = config.slow;
  for (std::size_t i = 0; i < periods_.size(); ++i) flat = flat * periods_[i] + config.phases[i];
  return flat;
}

ClassicalConfig OntologicalModel::decode(FlatIndex flat) const {
  ClassicalConfig c;
  c.phases.resize(periods_.size());
  for (std::size_t i = periods_.size(); i-- > 0;) {
    c.phases[i] = static_cast<std::uint32_t>(flat % periods_[i]);
    flat /= periods_[i];
  }
  if (flat >= slow_count()) throw std::out_of_range("decode: flat index out of range");
  c.slow = static_cast<std::uint32_t>(flat);
  return c;
}

std::vector<std::pair<std::size_t, std::size_t>> find_conflicts(const OntologicalModel& model) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  const auto points = model.special_points();
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      const bool share = touches(points[j], points[i].alpha) || touches(points[j], points[i].beta);
      if (share && can_coincide(points[i], points[j])) out.emplace_back(i, j);
    }
  }
  return out;
}

void advance(const OntologicalModel& model, std::uint32_t& slow,
             std::span<std::uint32_t> phases) {
  const auto periods = model.periods();
  for (std::size_t i = 0; i < phases.size(); ++i) {
    if (++phases[i] == periods[i]) phases[i] = 0;
  }
  const auto points = model.special_points();
  for (std::uint32_t idx : model.points_touching(slow)) {
    const SpecialPoint& p = points[idx];
    if (fires(p, phases)) {
      slow = p.alpha == slow ? p.beta : p.alpha;
      return;
    }
  }
}

ClassicalConfig step(const OntologicalModel& model, const ClassicalConfig& config) {
  model.validate(config);
  ClassicalConfig next = config;
  advance(model, next.slow, next.phases);
  return next;
}

PermutationLaw step_law(const OntologicalModel& model, std::uint64_t cap) {
  const std::uint64_t m = model.ontic_size();
  if (m > cap)
    throw SizeCapExceeded("step map: ontic space " + std::to_string(m) + " exceeds cap " +
                          std::to_string(cap));
  std::vector<std::int64_t> image(m);
  for (FlatIndex k = 0; k < m; ++k) {
    ClassicalConfig c = model.decode(k);
    advance(model, c.slow, c.phases);
    image[k] = static_cast<std::int64_t>(model.encode(c));
  }
  try {
    return PermutationLaw::from_image(image);
  } catch (const MalformedLaw& e) {
    throw NotBijective(std::string("step map is not reversible: ") + e.what());
  }
}

CycleDecomposition check_bijectivity(const OntologicalModel& model) {
  CycleDecomposition cycles = decompose(step_law(model));
  const auto conflicts = find_conflicts(model);
  if (!conflicts.empty()) {
    throw ConflictingSpecialPoints(
        "special points " + std::to_string(conflicts.front().first) + " and " +
        std::to_string(conflicts.front().second) + " fire together on a shared slow state");
  }
  return cycles;
}

namespace {

void require_slow(const OntologicalModel& model, std::uint32_t s) {
  if (s >= model.slow_count())
    throw std::invalid_argument("unknown initial slow state " + std::to_string(s));
}

// Accumulates one trajectory of `horizon` steps into counts.
void trace(const OntologicalModel& model, std::uint32_t slow,
           std::vector<std::uint32_t>& phases, std::uint64_t horizon,
           std::vector<std::uint64_t>& counts) {
  const std::size_t n = model.slow_count();
  counts[slow] += 1;
  for (std::uint64_t t = 1; t <= horizon; ++t) {
    advance(model, slow, phases);
    counts[t * n + slow] += 1;
  }
}

}  // namespace

Occupation run_ensemble(const OntologicalModel& model, std::uint32_t initial_slow,
                        std::uint64_t horizon, std::uint64_t sample_count,
                        std::uint64_t seed, unsigned workers) {
  require_slow(model, initial_slow);
  if (sample_count == 0) throw std::invalid_argument("run_ensemble: sample_count must be >= 1");
  workers = std::max(1u, workers);
  const std::size_t n = model.slow_count();
  const auto periods = model.periods();

  Occupation occ{n, horizon, sample_count, std::vector<std::uint64_t>((horizon + 1) * n, 0)};

  auto run_range = [&](std::uint64_t begin, std::uint64_t end, std::vector<std::uint64_t>& counts) {
    std::vector<std::uint32_t> phases(periods.size());
    for (std::uint64_t i = begin; i < end; ++i) {
      PhiloxStream rng(seed, i);
      for (std::size_t c = 0; c < periods.size(); ++c)
        phases[c] = static_cast<std::uint32_t>(rng.below(periods[c]));
      trace(model, initial_slow, phases, horizon, counts);
    }
  };

  if (workers == 1) {
    run_range(0, sample_count, occ.counts);
    return occ;
  }
  std::vector<std::vector<std::uint64_t>> partial(workers,
                                                  std::vector<std::uint64_t>(occ.counts.size(), 0));
  std::vector<std::thread> pool;
  const std::uint64_t chunk = (sample_count + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::uint64_t begin = std::min(sample_count, w * chunk);
    const std::uint64_t end = std::min(sample_count, begin + chunk);
    pool.emplace_back(run_range, begin, end, std::ref(partial[w]));
  }
  for (auto& th : pool) th.join();
  for (const auto& part : partial)
    for (std::size_t k = 0; k < part.size(); ++k) occ.counts[k] += part[k];
  return occ;
}

Occupation enumerate_exact(const OntologicalModel& model, std::uint32_t initial_slow,
                           std::uint64_t horizon) {
  require_slow(model, initial_slow);
  const std::uint64_t combos = model.phase_space_size();
  if (combos > 1'000'000)
    throw SizeCapExceeded("enumerate_exact: " + std::to_string(combos) +
                          " phase combinations exceed 10^6");
  const std::size_t n = model.slow_count();
  const auto periods = model.periods();
  Occupation occ{n, horizon, combos, std::vector<std::uint64_t>((horizon + 1) * n, 0)};
  std::vector<std::uint32_t> phases(periods.size());
  for (std::uint64_t k = 0; k < combos; ++k) {
    std::uint64_t rest = k;
    for (std::size_t c = periods.size(); c-- > 0;) {
      phases[c] = static_cast<std::uint32_t>(rest % periods[c]);
      rest /= periods[c];
    }
    trace(model, initial_slow, phases, horizon, occ.counts);
  }
  return occ;
}

}  // namespace ontosim
