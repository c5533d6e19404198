#pragma once

// File formats: JSON documents for laws, models, targets and reports; CSV
// tables for spectra and curves. Doubles print in shortest round-trip form.

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "ontosim/bellkit.hpp"
#include "ontosim/compile.hpp"
#include "ontosim/errors.hpp"
#include "ontosim/fastslow.hpp"
#include "ontosim/ontodyn.hpp"
#include "ontosim/quantize.hpp"

namespace ontosim::io {

using nlohmann::json;

class FileNotFound : public Error {
 public:
  using Error::Error;
};

class WriteError : public Error {
 public:
  using Error::Error;
};

std::string format_double(double x);

// Throws FileNotFound or ParseError; write_text throws WriteError.
json read_json(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

// { "size": M, "image": [...] }. Structural problems throw ParseError,
// a non-bijective image throws MalformedLaw.
PermutationLaw law_from_json(const json& doc);
json law_to_json(const PermutationLaw& law);

// { "ranks": [...], "cycles": [[...], ...] }
json cycle_report(const CycleDecomposition& cycles);

// cycle_index, n, energy, re_phase, im_phase
void write_spectrum_csv(std::ostream& out, const CycleDecomposition& cycles);

// { "slow_count": N, "periods": [...], "special_points": [ { "pair": [a,b],
//   "trigger": [p,q] }, ... ], "site_labels": [...] (optional) }
OntologicalModel model_from_json(const json& doc);
json model_to_json(const OntologicalModel& model);

// t, state_0_freq, ..., state_{N-1}_freq
void write_occupation_csv(std::ostream& out, const Occupation& occ);

// { "couplings": [ { "pair": [a,b], "num": n, "den": Na*Nb } ],
//   "matrix": { "re": [[...]], "im": [[...]] } }
json effective_to_json(const EffectiveHamiltonian& eff);

// { "re": [[...]] (optional), "im": [[...]] }. Throws NotRepresentable
// for matrices outside the i·(real antisymmetric) class.
TargetHamiltonian target_from_json(const json& doc);

json compiled_report(const CompiledModel& compiled, const EffectiveHamiltonian& eff);

// t, classical, full_quantum, effective (departure from the initial state)
void write_comparison_csv(std::ostream& out, const DynamicsComparison& cmp);
json comparison_summary(const DynamicsComparison& cmp);

// a_deg, b_deg, E_quant, E_correlated, abs_err over grid × grid settings
// in [0°, 180°); returns the max abs_err.
double write_correlation_grid_csv(std::ostream& out, std::size_t grid);

// { "settings_deg": [...], "S": ..., "bound": 2, "quantum_max": 2.8284271, ... }
json chsh_report(const ChshResult& r);

// a, b, lambda, A, B (angles in degrees)
void write_samples_csv(std::ostream& out, const std::vector<Triple>& samples);

json marginal_report(const std::vector<MarginalReport>& reports);

}  // namespace ontosim::io
