#include "cli.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "ontosim/io.hpp"

namespace ontosim::cli {

namespace {

using io::json;
namespace fs = std::filesystem;

constexpr double kDeg = kBellPi / 180.0;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Params {
  std::string input;
  std::string output;
  std::string report;
  std::string summary;
  std::string config;
  std::uint64_t seed = 0;
  std::uint64_t samples = 0;
  std::uint64_t horizon = 100;
  double tolerance = 1e-4;
  std::size_t grid = 64;
  std::string settings = "0,45,22.5,67.5";
  std::uint32_t max_period = 200;
  std::uint32_t initial = 0;
  unsigned workers = 1;
  std::set<std::string> given;

  bool has(const std::string& key) const { return given.count(key) > 0; }
};

// A flag that may also come from the config file under `key`.
struct Binding {
  std::string key;
  CLI::Option* option = nullptr;
  std::function<void(const json&)> load;
};

template <typename T>
std::function<void(const json&)> loader(T& target, const std::string& key) {
  return [&target, key](const json& v) {
    if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ParseError("config: \"" + key + "\" must be a string");
      target = v.get<std::string>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ParseError("config: \"" + key + "\" must be a number");
      target = v.get<T>();
    } else {
      if (!v.is_number_integer() || v.get<std::int64_t>() < 0)
        throw ParseError("config: \"" + key + "\" must be a nonnegative integer");
      const auto raw = v.get<std::uint64_t>();
      if (raw > std::numeric_limits<T>::max()) throw UsageError("config: \"" + key + "\" out of range");
      target = static_cast<T>(raw);
    }
  };
}

class Command {
 public:
  Command(CLI::App& app, const std::string& name, const std::string& help, Params& p)
      : sub_(app.add_subcommand(name, help)), p_(p) {
    bind("config", p_.config, "JSON file with default values for any flag");
  }

  template <typename T>
  Command& bind(const std::string& key, T& target, const std::string& help) {
    std::string flag = "--" + key;
    std::replace(flag.begin(), flag.end(), '_', '-');
    CLI::Option* opt = sub_->add_option(flag, target, help);
    if (key != "config") bindings_.push_back({key, opt, loader(target, key)});
    else config_opt_ = opt;
    return *this;
  }

  CLI::App* app() const { return sub_; }
  bool parsed() const { return sub_->parsed(); }

  // Flags win over config values; unknown config keys are an error.
  void merge() {
    json cfg = json::object();
    if (config_opt_->count() > 0) {
      cfg = io::read_json(p_.config);
      if (!cfg.is_object()) throw ParseError("config: top level must be an object");
    }
    std::set<std::string> known{"command"};
    for (const Binding& b : bindings_) known.insert(b.key);
    for (const auto& [key, value] : cfg.items()) {
      std::string k = key;
      std::replace(k.begin(), k.end(), '-', '_');
      if (!known.count(k)) throw UsageError("config: unknown field \"" + key + "\"");
    }
    if (cfg.contains("command") && cfg["command"] != sub_->get_name())
      throw UsageError("config: command field does not match subcommand " + sub_->get_name());
    for (const Binding& b : bindings_) {
      if (b.option->count() > 0) {
        p_.given.insert(b.key);
        continue;
      }
      std::string dashed = b.key;
      std::replace(dashed.begin(), dashed.end(), '_', '-');
      const char* hit = cfg.contains(b.key) ? b.key.c_str() : cfg.contains(dashed) ? dashed.c_str() : nullptr;
      if (hit) {
        b.load(cfg.at(hit));
        p_.given.insert(b.key);
      }
    }
  }

 private:
  CLI::App* sub_;
  Params& p_;
  CLI::Option* config_opt_ = nullptr;
  std::vector<Binding> bindings_;
};

std::array<double, 4> parse_settings(const std::string& text) {
  std::array<double, 4> out{};
  std::size_t count = 0;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (count == 4) throw UsageError("--settings takes exactly four angles");
    const auto first = item.find_first_not_of(' ');
    const auto last = item.find_last_not_of(' ');
    if (first == std::string::npos) throw UsageError("--settings: empty angle");
    const char* b = item.data() + first;
    const char* e = item.data() + last + 1;
    const auto res = std::from_chars(b, e, out[count]);
    if (res.ec != std::errc() || res.ptr != e || !std::isfinite(out[count]))
      throw UsageError("--settings: not a number: " + item);
    ++count;
  }
  if (count != 4) throw UsageError("--settings takes exactly four angles a,a',b,b' in degrees");
  return out;
}

void require(bool ok, const std::string& message) {
  if (!ok) throw UsageError(message);
}

void check_common(const Params& p) {
  require(p.horizon <= 10'000'000, "--horizon must be <= 1e7");
  require(p.samples <= 1'000'000'000, "--samples must be <= 1e9");
  require(p.tolerance > 0.0 && p.tolerance < 1.0, "--tolerance must lie in (0, 1)");
  require(p.grid >= 1 && p.grid <= 1024, "--grid must lie in [1, 1024]");
  require(p.max_period >= 2 && p.max_period <= 10'000, "--max-period must lie in [2, 10000]");
  require(p.workers >= 1 && p.workers <= 256, "--workers must lie in [1, 256]");
}

void require_input(const Params& p) { require(!p.input.empty(), "--input is required"); }

void require_seed_if_stochastic(const Params& p) {
  require(p.samples == 0 || p.has("seed"), "--seed is required when --samples > 0");
}

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    out.flush();
  } else {
    io::write_text(path, text);
  }
}

fs::path output_dir(const Params& p) {
  require(!p.output.empty() && p.output != "-", "--output directory is required");
  std::error_code ec;
  fs::create_directories(p.output, ec);
  if (ec || !fs::is_directory(p.output)) throw io::WriteError("cannot create directory " + p.output);
  return fs::path(p.output);
}

bool is_model(const json& doc) { return doc.is_object() && doc.contains("slow_count"); }

PermutationLaw law_or_step_map(const json& doc, std::uint64_t cap) {
  if (is_model(doc)) return step_law(io::model_from_json(doc), cap);
  const PermutationLaw law = io::law_from_json(doc);
  if (law.size() > cap)
    throw SizeCapExceeded("law of size " + std::to_string(law.size()) + " exceeds cap " + std::to_string(cap));
  return law;
}

void warn(const OntologicalModel& model, std::ostream& err) {
  for (const std::string& w : model.warnings()) err << "warning: " << w << '\n';
}

int cmd_cycles(const Params& p, std::ostream& out) {
  require_input(p);
  const json doc = io::read_json(p.input);
  const CycleDecomposition cycles = decompose(law_or_step_map(doc, 1'000'000));
  json report = io::cycle_report(cycles);
  report["size"] = cycles.state_count();
  const auto rec = recursion_time(cycles);
  report["recursion_time"] = rec ? json(*rec) : json(nullptr);
  emit(p.output, dump(report), out);
  return kOk;
}

int cmd_spectrum(const Params& p, std::ostream& out, std::ostream& err) {
  require_input(p);
  const json doc = io::read_json(p.input);
  std::optional<OntologicalModel> model;
  if (is_model(doc)) {
    model.emplace(io::model_from_json(doc));
    warn(*model, err);
  }
  const CycleDecomposition cycles =
      decompose(model ? step_law(*model, kDenseCap) : law_or_step_map(doc, kDenseCap));
  std::ostringstream csv;
  io::write_spectrum_csv(csv, cycles);
  emit(p.output, csv.str(), out);
  if (!p.summary.empty()) {
    json s{{"levels", cycles.state_count()}, {"cycles", cycles.cycles.size()}, {"ranks", cycles.ranks}};
    if (model && model->special_points().empty()) {
      const SumRuleCheck check = check_free_sum_rule(*model);
      s["free_sum_rule"] = {{"exact_match", check.exact_match}, {"max_abs_error", check.max_abs_error}};
    }
    io::write_text(p.summary, dump(s));
  }
  return kOk;
}

int cmd_simulate(const Params& p, std::ostream& out, std::ostream& err) {
  require_input(p);
  require_seed_if_stochastic(p);
  const OntologicalModel model = io::model_from_json(io::read_json(p.input));
  warn(model, err);
  require(p.initial < model.slow_count(), "--initial must name a slow state of the model");
  const Occupation occ = p.samples == 0
                             ? enumerate_exact(model, p.initial, p.horizon)
                             : run_ensemble(model, p.initial, p.horizon, p.samples, p.seed, p.workers);
  std::ostringstream csv;
  io::write_occupation_csv(csv, occ);
  emit(p.output, csv.str(), out);
  return kOk;
}

int cmd_compile(const Params& p, std::ostream& out) {
  require_input(p);
  const TargetHamiltonian target = io::target_from_json(io::read_json(p.input));
  const CompiledModel compiled = compile_target(target, p.tolerance, p.max_period);
  emit(p.output, dump(io::model_to_json(compiled.model)), out);
  if (!p.report.empty()) {
    const EffectiveHamiltonian eff = ground_project(compiled.model, interaction_terms(compiled.model));
    io::write_text(p.report, dump(io::compiled_report(compiled, eff)));
  }
  return kOk;
}

int cmd_compare(const Params& p, std::ostream& err) {
  require_input(p);
  require_seed_if_stochastic(p);
  require(p.horizon <= 100'000, "compare: --horizon must be <= 1e5");
  const json doc = io::read_json(p.input);
  const fs::path dir = output_dir(p);

  std::optional<CompiledModel> compiled;
  std::optional<OntologicalModel> given;
  if (is_model(doc)) {
    given.emplace(io::model_from_json(doc));
  } else {
    compiled.emplace(compile_target(io::target_from_json(doc), p.tolerance, p.max_period));
  }
  const OntologicalModel& model = compiled ? compiled->model : *given;
  warn(model, err);
  require(p.initial < model.slow_count(), "--initial must name a slow state of the model");

  const EffectiveHamiltonian eff = ground_project(model, interaction_terms(model));
  const DynamicsComparison cmp = compare_dynamics(model, p.initial, p.horizon, p.samples, p.seed);

  json report{{"comparison", io::comparison_summary(cmp)}};
  if (compiled) {
    const json c = io::compiled_report(*compiled, eff);
    report["approximations"] = c["approximations"];
    report["max_error"] = c["max_error"];
    report["tolerance"] = p.tolerance;
  }
  std::ostringstream csv;
  io::write_comparison_csv(csv, cmp);
  io::write_text(dir / "model.json", dump(io::model_to_json(model)));
  io::write_text(dir / "effective.json", dump(io::effective_to_json(eff)));
  io::write_text(dir / "comparison.csv", csv.str());
  io::write_text(dir / "report.json", dump(report));
  return kOk;
}

int cmd_bell(const Params& p) {
  require_seed_if_stochastic(p);
  const std::array<double, 4> deg = parse_settings(p.settings);
  const ChshSettings s{deg[0] * kDeg, deg[1] * kDeg, deg[2] * kDeg, deg[3] * kDeg};
  const fs::path dir = output_dir(p);

  std::ostringstream grid;
  const double worst = io::write_correlation_grid_csv(grid, p.grid);
  io::write_text(dir / "correlation_grid.csv", grid.str());

  const ChshResult correlated = chsh_score([](double a, double b) { return correlated_expectation(a, b); }, s);
  const ChshResult quantum = chsh_score(quantum_correlation, s);
  json chsh = io::chsh_report(correlated);
  chsh["settings_deg"] = deg;  // as given, without a radian round trip
  chsh["S_quantum"] = quantum.score;
  chsh["grid_max_abs_err"] = worst;
  if (p.samples > 0) {
    const ChshResult mc = monte_carlo_chsh(s, p.samples, p.seed);
    chsh["S_monte_carlo"] = mc.score;
    chsh["monte_carlo_standard_error"] = mc.standard_error;
    chsh["samples_per_pair"] = p.samples;
  }
  io::write_text(dir / "chsh.json", dump(chsh));

  std::vector<MarginalReport> marginals;
  for (Marginal m : {Marginal::kLambda, Marginal::kA, Marginal::kB})
    marginals.push_back(marginal_flatness(m, std::min<std::size_t>(p.grid, 32)));
  json mreport = io::marginal_report(marginals);
  mreport["normalization_mass"] = conditional_mass(0.3, 1.1, CorrelatedDistribution::sine_density());
  mreport["normalization_C_two_pi"] = sine_normalization(2.0 * kBellPi);
  io::write_text(dir / "marginals.json", dump(mreport));

  std::ostringstream samples;
  io::write_samples_csv(samples, sample_triples(p.samples, p.seed));
  io::write_text(dir / "samples.csv", samples.str());
  return kOk;
}

int report(std::ostream& err, int code, const std::string& kind, const std::string& what) {
  err << "error (" << kind << "): " << what << '\n';
  return code;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Params p;
  CLI::App app{"Deterministic ontological models, their vector representation, and Bell correlations",
               "ontosim"};
  app.require_subcommand(1);

  Command cycles(app, "cycles", "Cycle decomposition of a permutation law or model step map", p);
  cycles.bind("input", p.input, "law or model JSON").bind("output", p.output, "report path (default stdout)");

  Command spectrum(app, "spectrum", "Per-cycle energies and eigenphases as CSV", p);
  spectrum.bind("input", p.input, "law or model JSON")
      .bind("output", p.output, "CSV path (default stdout)")
      .bind("summary", p.summary, "optional JSON summary with the free-model sum rule");

  Command simulate(app, "simulate", "Slow-state occupation over time", p);
  simulate.bind("input", p.input, "model JSON")
      .bind("output", p.output, "CSV path (default stdout)")
      .bind("initial", p.initial, "initial slow state")
      .bind("horizon", p.horizon, "number of steps")
      .bind("samples", p.samples, "Monte Carlo samples; 0 enumerates all phases exactly")
      .bind("seed", p.seed, "generator seed (required with --samples)")
      .bind("workers", p.workers, "worker threads");

  Command compile(app, "compile", "Compile a target Hamiltonian into a model", p);
  compile.bind("input", p.input, "target JSON")
      .bind("output", p.output, "model path (default stdout)")
      .bind("report", p.report, "optional approximation report path")
      .bind("tolerance", p.tolerance, "max absolute error per coupling")
      .bind("max_period", p.max_period, "largest clock period");

  Command compare(app, "compare", "Classical, full quantum and effective dynamics side by side", p);
  compare.bind("input", p.input, "target or model JSON")
      .bind("output", p.output, "output directory")
      .bind("tolerance", p.tolerance, "compile tolerance")
      .bind("max_period", p.max_period, "largest clock period")
      .bind("initial", p.initial, "initial slow state")
      .bind("horizon", p.horizon, "number of steps")
      .bind("samples", p.samples, "optional Monte Carlo ensemble size")
      .bind("seed", p.seed, "generator seed (required with --samples)");

  Command bell(app, "bell", "Correlation grid, CHSH, marginals and sample dump", p);
  bell.bind("output", p.output, "output directory")
      .bind("grid", p.grid, "grid points per setting axis")
      .bind("settings", p.settings, "a,a',b,b' in degrees")
      .bind("samples", p.samples, "samples for the dump and per CHSH setting pair")
      .bind("seed", p.seed, "generator seed (required with --samples)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, err, err);
    return kUsage;
  }

  try {
    for (Command* c : {&cycles, &spectrum, &simulate, &compile, &compare, &bell}) {
      if (!c->parsed()) continue;
      c->merge();
      check_common(p);
      if (c == &cycles) return cmd_cycles(p, out);
      if (c == &spectrum) return cmd_spectrum(p, out, err);
      if (c == &simulate) return cmd_simulate(p, out, err);
      if (c == &compile) return cmd_compile(p, out);
      if (c == &compare) return cmd_compare(p, err);
      return cmd_bell(p);
    }
    return report(err, kUsage, "usage", "no subcommand");
  } catch (const UsageError& e) {
    return report(err, kUsage, "usage", e.what());
  } catch (const io::FileNotFound& e) {
    return report(err, kFileNotFound, "file not found", e.what());
  } catch (const ParseError& e) {
    return report(err, kParseError, "parse", e.what());
  } catch (const MalformedLaw& e) {
    return report(err, kInvalidModel, "not a bijection", e.what());
  } catch (const InvalidModel& e) {
    return report(err, kInvalidModel, "invalid model", e.what());
  } catch (const SizeCapExceeded& e) {
    return report(err, kSizeCap, "size cap", e.what());
  } catch (const UnreachableTolerance& e) {
    return report(err, kUnreachable, "unreachable tolerance", e.what());
  } catch (const NotRepresentable& e) {
    return report(err, kNotRepresentable, "not representable", e.what());
  } catch (const NonHermitian& e) {
    return report(err, kNotRepresentable, "not representable", e.what());
  } catch (const QuadratureError& e) {
    return report(err, kQuadrature, "quadrature", e.what());
  } catch (const io::WriteError& e) {
    return report(err, kIoError, "io", e.what());
  } catch (const json::exception& e) {
    return report(err, kParseError, "parse", e.what());
  } catch (const std::invalid_argument& e) {
    return report(err, kUsage, "usage", e.what());
  } catch (const std::exception& e) {
    return report(err, kInternal, "internal", e.what());
  }
}

}  // namespace ontosim::cli
