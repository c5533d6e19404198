#pragma once

// Slow states coupled to fast periodic clocks. Each slow state α owns one
// clock of period N_[α]; a special point on the pair (α, β) swaps the two
// slow states whenever both clocks sit on its trigger phases.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <boost/rational.hpp>

#include "ontosim/ontodyn.hpp"

namespace ontosim {

using Fraction = boost::rational<std::int64_t>;

struct SpecialPoint {
  std::uint32_t alpha = 0;
  std::uint32_t beta = 0;
  std::uint32_t trigger_alpha = 0;  // phase of the clock owned by alpha
  std::uint32_t trigger_beta = 0;   // phase of the clock owned by beta

  friend bool operator==(const SpecialPoint&, const SpecialPoint&) = default;
};

struct ClassicalConfig {
  std::uint32_t slow = 0;
  std::vector<std::uint32_t> phases;  // one per clock, clock id == slow state

  friend bool operator==(const ClassicalConfig&, const ClassicalConfig&) = default;
};

// Flat ontic coordinate: mixed radix, slow state most significant, then
// clock phases by ascending clock id.
using FlatIndex = std::uint64_t;

class OntologicalModel {
 public:
  // Full validation including the static conflict scan: two points that
  // touch a common slow state must not be able to fire on the same step.
  // Throws InvalidModel / ConflictingSpecialPoints.
  static OntologicalModel build(std::size_t slow_count,
                                std::vector<std::uint32_t> periods,
                                std::vector<SpecialPoint> points,
                                std::vector<std::string> site_labels = {});

  // Structural checks only (ranges, α ≠ β). The step rule then resolves
  // simultaneous firings by table order, which need not be reversible.
  static OntologicalModel unchecked(std::size_t slow_count,
                                    std::vector<std::uint32_t> periods,
                                    std::vector<SpecialPoint> points);

  std::size_t slow_count() const { return periods_.size(); }
  std::span<const std::uint32_t> periods() const { return periods_; }
  std::span<const SpecialPoint> special_points() const { return points_; }
  std::span<const std::string> site_labels() const { return site_labels_; }
  // Non-fatal diagnostics from the builder (e.g. short clock periods).
  std::span<const std::string> warnings() const { return warnings_; }

  // Π N_[α]; throws SizeCapExceeded past 2^62.
  std::uint64_t phase_space_size() const;
  // N · Π N_[α].
  std::uint64_t ontic_size() const;

  // Indices into special_points() of points involving slow state s.
  std::span<const std::uint32_t> points_touching(std::uint32_t s) const {
    return touching_[s];
  }

  FlatIndex encode(const ClassicalConfig& config) const;
  ClassicalConfig decode(FlatIndex flat) const;

  // Throws std::invalid_argument for an unknown slow state or a phase
  // outside its period.
  void validate(const ClassicalConfig& config) const;

 private:
  OntologicalModel() = default;
  static OntologicalModel assemble(std::size_t slow_count,
                                   std::vector<std::uint32_t> periods,
                                   std::vector<SpecialPoint> points,
                                   std::vector<std::string> site_labels);

  std::vector<std::uint32_t> periods_;
  std::vector<SpecialPoint> points_;
  std::vector<std::string> site_labels_;
  std::vector<std::string> warnings_;
  std::vector<std::vector<std::uint32_t>> touching_;
};

// Index pairs (i, j), i < j, of special points that can fire on the same
// step while sharing a slow state.
std::vector<std::pair<std::size_t, std::size_t>> find_conflicts(
    const OntologicalModel& model);

// One tick: every clock advances by +1, then the slow state swaps along the
// first special point (table order) that touches it and whose trigger
// matches the new phases.
ClassicalConfig step(const OntologicalModel& model, const ClassicalConfig& config);

// In-place variant without validation, for hot loops.
void advance(const OntologicalModel& model, std::uint32_t& slow,
             std::span<std::uint32_t> phases);

// The step map enumerated over the whole ontic space in flat coordinates.
// Throws NotBijective when the table order rule yields a non-injective map
// and SizeCapExceeded past `cap` states.
PermutationLaw step_law(const OntologicalModel& model, std::uint64_t cap = 1'000'000);

// Enumerates the step map (ontic space <= 10^6), decomposes it, and also
// rejects tables the static scan flags even when the enumerated map
// happens to be bijective.
CycleDecomposition check_bijectivity(const OntologicalModel& model);

struct Occupation {
  std::size_t slow_count = 0;
  std::uint64_t horizon = 0;
  std::uint64_t denominator = 0;  // number of samples or phase combinations
  // counts[t * slow_count + s]: members in slow state s after t steps.
  std::vector<std::uint64_t> counts;

  std::uint64_t count(std::uint64_t t, std::size_t s) const {
    return counts[t * slow_count + s];
  }
  double frequency(std::uint64_t t, std::size_t s) const {
    return static_cast<double>(count(t, s)) / static_cast<double>(denominator);
  }
  Fraction fraction(std::uint64_t t, std::size_t s) const {
    return Fraction(static_cast<std::int64_t>(count(t, s)),
                    static_cast<std::int64_t>(denominator));
  }

  friend bool operator==(const Occupation&, const Occupation&) = default;
};

// Monte Carlo over uniformly drawn initial clock phases. Sample i draws
// from the Philox substream (seed, i), so the result does not depend on
// `workers`.
Occupation run_ensemble(const OntologicalModel& model, std::uint32_t initial_slow,
                        std::uint64_t horizon, std::uint64_t sample_count,
                        std::uint64_t seed, unsigned workers = 1);

// Every initial phase combination exactly once (Π N_[α] <= 10^6).
Occupation enumerate_exact(const OntologicalModel& model, std::uint32_t initial_slow,
                           std::uint64_t horizon);

}  // namespace ontosim
