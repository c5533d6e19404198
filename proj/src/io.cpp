#include "ontosim/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

namespace ontosim::io {

namespace {

constexpr double kDeg = kBellPi / 180.0;

std::vector<std::int64_t> int_array(const json& doc, const char* key) {
  if (!doc.contains(key)) throw ParseError(std::string("missing field \"") + key + "\"");
  const json& arr = doc.at(key);
  if (!arr.is_array()) throw ParseError(std::string("field \"") + key + "\" must be an array");
  std::vector<std::int64_t> out;
  for (const json& v : arr) {
    if (!v.is_number_integer()) throw ParseError(std::string("field \"") + key + "\" must hold integers");
    out.push_back(v.get<std::int64_t>());
  }
  return out;
}

std::int64_t int_field(const json& doc, const char* key) {
  if (!doc.contains(key) || !doc.at(key).is_number_integer())
    throw ParseError(std::string("missing or non-integer field \"") + key + "\"");
  return doc.at(key).get<std::int64_t>();
}

std::uint32_t as_u32(std::int64_t v, const char* what) {
  if (v < 0 || v > std::numeric_limits<std::uint32_t>::max())
    throw InvalidModel(std::string(what) + " out of range: " + std::to_string(v));
  return static_cast<std::uint32_t>(v);
}

json matrix_part(const Eigen::MatrixXcd& m, bool imag) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(imag ? m(r, c).imag() : m(r, c).real());
    rows.push_back(row);
  }
  return rows;
}

std::vector<std::vector<double>> real_rows(const json& doc, const char* key) {
  std::vector<std::vector<double>> rows;
  const json& arr = doc.at(key);
  if (!arr.is_array()) throw ParseError(std::string("field \"") + key + "\" must be a matrix");
  for (const json& row : arr) {
    if (!row.is_array()) throw ParseError(std::string("field \"") + key + "\" must be a matrix");
    std::vector<double> r;
    for (const json& v : row) {
      if (!v.is_number()) throw ParseError(std::string("field \"") + key + "\" must hold numbers");
      r.push_back(v.get<double>());
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace

std::string format_double(double x) {
  if (x == 0.0) x = 0.0;  // drop the sign of -0
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFound("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw WriteError("cannot write " + path.string());
  out << text;
  if (!out) throw WriteError("write failed: " + path.string());
}

PermutationLaw law_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("permutation document must be an object");
  const std::vector<std::int64_t> image = int_array(doc, "image");
  if (doc.contains("size") && int_field(doc, "size") != static_cast<std::int64_t>(image.size()))
    throw MalformedLaw("\"size\" disagrees with the length of \"image\"");
  return PermutationLaw::from_image(image);
}

json law_to_json(const PermutationLaw& law) {
  return json{{"size", law.size()},
              {"image", std::vector<std::uint32_t>(law.image().begin(), law.image().end())}};
}

json cycle_report(const CycleDecomposition& cycles) {
  return json{{"ranks", cycles.ranks}, {"cycles", cycles.cycles}};
}

void write_spectrum_csv(std::ostream& out, const CycleDecomposition& cycles) {
  out << "cycle_index,n,energy,re_phase,im_phase\n";
  for (std::size_t c = 0; c < cycles.cycles.size(); ++c) {
    const std::size_t t = cycles.cycles[c].size();
    for (std::size_t n = 0; n < t; ++n) {
      const Complex phase = cycle_eigenphase(t, n);
      out << c << ',' << n << ',' << format_double(cycle_energy(t, n)) << ','
          << format_double(phase.real()) << ',' << format_double(phase.imag()) << '\n';
    }
  }
}

OntologicalModel model_from_json(const json& doc) {
  if (!doc.is_object()) throw ParseError("model document must be an object");
  const std::int64_t n = int_field(doc, "slow_count");
  if (n <= 0) throw InvalidModel("slow_count must be positive");
  std::vector<std::uint32_t> periods;
  for (std::int64_t p : int_array(doc, "periods")) periods.push_back(as_u32(p, "period"));
  std::vector<SpecialPoint> points;
  if (doc.contains("special_points")) {
    const json& arr = doc.at("special_points");
    if (!arr.is_array()) throw ParseError("\"special_points\" must be an array");
    for (const json& sp : arr) {
      if (!sp.is_object()) throw ParseError("special point must be an object");
      const auto pair = int_array(sp, "pair");
      const auto trig = int_array(sp, "trigger");
      if (pair.size() != 2 || trig.size() != 2)
        throw ParseError("special point needs a 2-element \"pair\" and \"trigger\"");
      points.push_back({as_u32(pair[0], "slow state"), as_u32(pair[1], "slow state"),
                        as_u32(trig[0], "trigger"), as_u32(trig[1], "trigger")});
    }
  }
  std::vector<std::string> labels;
  if (doc.contains("site_labels")) {
    try {
      labels = doc.at("site_labels").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
      throw ParseError(std::string("\"site_labels\": ") + e.what());
    }
  }
  return OntologicalModel::build(static_cast<std::size_t>(n), std::move(periods), std::move(points),
                                 std::move(labels));
}

json model_to_json(const OntologicalModel& model) {
  json points = json::array();
  for (const SpecialPoint& p : model.special_points())
    points.push_back({{"pair", {p.alpha, p.beta}}, {"trigger", {p.trigger_alpha, p.trigger_beta}}});
  json doc{{"slow_count", model.slow_count()},
           {"periods", std::vector<std::uint32_t>(model.periods().begin(), model.periods().end())},
           {"special_points", points}};
  if (!model.site_labels().empty())
    doc["site_labels"] = std::vector<std::string>(model.site_labels().begin(), model.site_labels().end());
  return doc;
}

void write_occupation_csv(std::ostream& out, const Occupation& occ) {
  out << 't';
  for (std::size_t s = 0; s < occ.slow_count; ++s) out << ",state_" << s << "_freq";
  out << '\n';
  for (std::uint64_t t = 0; t <= occ.horizon; ++t) {
    out << t;
    for (std::size_t s = 0; s < occ.slow_count; ++s) out << ',' << format_double(occ.frequency(t, s));
    out << '\n';
  }
}

json effective_to_json(const EffectiveHamiltonian& eff) {
  json couplings = json::array();
  for (const PairCoupling& c : eff.couplings)
    couplings.push_back({{"pair", {c.a, c.b}}, {"num", c.num}, {"den", c.den}, {"points", c.points}});
  return json{{"couplings", couplings},
              {"matrix", {{"re", matrix_part(eff.matrix, false)}, {"im", matrix_part(eff.matrix, true)}}}};
}

TargetHamiltonian target_from_json(const json& doc) {
  if (!doc.is_object() || !doc.contains("im")) throw ParseError("target document needs an \"im\" matrix");
  const auto im = real_rows(doc, "im");
  const std::size_t n = im.size();
  std::vector<std::vector<double>> re(n, std::vector<double>(n, 0.0));
  if (doc.contains("re")) re = real_rows(doc, "re");
  if (re.size() != n) throw ParseError("\"re\" and \"im\" must have the same shape");
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t r = 0; r < n; ++r) {
    if (im[r].size() != n || re[r].size() != n) throw ParseError("target matrix must be square");
    for (std::size_t c = 0; c < n; ++c)
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = Complex(re[r][c], im[r][c]);
  }
  return TargetHamiltonian::from_matrix(m);
}

json compiled_report(const CompiledModel& compiled, const EffectiveHamiltonian& eff) {
  json pairs = json::array();
  for (const PairApproximation& p : compiled.pairs) {
    pairs.push_back({{"pair", {p.a, p.b}},
                     {"target", p.target},
                     {"achieved", p.achieved},
                     {"num", p.count},
                     {"den", p.den},
                     {"error", p.error}});
  }
  return json{{"model", model_to_json(compiled.model)},
              {"approximations", pairs},
              {"max_error", compiled.max_error},
              {"effective", effective_to_json(eff)}};
}

void write_comparison_csv(std::ostream& out, const DynamicsComparison& cmp) {
  out << "t,classical,full_quantum,effective\n";
  for (std::uint64_t t = 0; t <= cmp.horizon; ++t) {
    out << t << ',' << format_double(cmp.departure(cmp.classical, t)) << ','
        << format_double(cmp.departure(cmp.full_quantum, t)) << ','
        << format_double(cmp.departure(cmp.effective, t)) << '\n';
  }
}

json comparison_summary(const DynamicsComparison& cmp) {
  json doc{{"horizon", cmp.horizon},
           {"initial_slow", cmp.initial_slow},
           {"max_abs_classical_vs_full_quantum", cmp.max_classical_vs_quantum},
           {"max_abs_classical_vs_effective", cmp.max_classical_vs_effective},
           {"adiabatic_ratio", cmp.adiabatic_ratio}};
  if (!cmp.ensemble.empty()) doc["max_abs_classical_vs_ensemble"] = cmp.max_classical_vs_ensemble;
  return doc;
}

double write_correlation_grid_csv(std::ostream& out, std::size_t grid) {
  out << "a_deg,b_deg,E_quant,E_correlated,abs_err\n";
  double worst = 0.0;
  for (std::size_t i = 0; i < grid; ++i) {
    for (std::size_t j = 0; j < grid; ++j) {
      const double a_deg = 180.0 * static_cast<double>(i) / static_cast<double>(grid);
      const double b_deg = 180.0 * static_cast<double>(j) / static_cast<double>(grid);
      const double eq = quantum_correlation(a_deg * kDeg, b_deg * kDeg);
      const double ec = correlated_expectation(a_deg * kDeg, b_deg * kDeg);
      const double err = std::abs(eq - ec);
      worst = std::max(worst, err);
      out << format_double(a_deg) << ',' << format_double(b_deg) << ',' << format_double(eq) << ','
          << format_double(ec) << ',' << format_double(err) << '\n';
    }
  }
  return worst;
}

json chsh_report(const ChshResult& r) {
  const ChshSettings& s = r.settings;
  json doc{{"settings_deg", {s.a / kDeg, s.a_prime / kDeg, s.b / kDeg, s.b_prime / kDeg}},
           {"correlations", r.correlations},
           {"S", r.score},
           {"bound", 2},
           {"quantum_max", 2.0 * std::sqrt(2.0)},
           {"violates_bound", !r.within_local_bound}};
  if (r.standard_error > 0.0) doc["standard_error"] = r.standard_error;
  return doc;
}

void write_samples_csv(std::ostream& out, const std::vector<Triple>& samples) {
  out << "a,b,lambda,A,B\n";
  for (const Triple& t : samples) {
    out << format_double(t.a / kDeg) << ',' << format_double(t.b / kDeg) << ','
        << format_double(t.lambda / kDeg) << ',' << t.outcome_a << ',' << t.outcome_b << '\n';
  }
}

json marginal_report(const std::vector<MarginalReport>& reports) {
  json arr = json::array();
  for (const MarginalReport& r : reports) {
    const char* name = r.which == Marginal::kLambda ? "lambda" : r.which == Marginal::kA ? "a" : "b";
    arr.push_back({{"integrated_over", name},
                   {"grid", r.grid},
                   {"mean", r.mean},
                   {"max_deviation", r.max_deviation},
                   {"spread", r.spread}});
  }
  return json{{"marginals", arr}, {"normalization_C", sine_normalization(kBellPi)}};
}

}  // namespace ontosim::io
