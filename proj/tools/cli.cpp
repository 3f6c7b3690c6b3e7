#include "cli.hpp"

#include "monodromy/errors.hpp"
#include "monodromy/fuchsian.hpp"
#include "monodromy/gate.hpp"
#include "monodromy/io.hpp"
#include "monodromy/kz.hpp"
#include "monodromy/lappo_danilevski.hpp"
#include "monodromy/paths.hpp"
#include "monodromy/universality.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace monodromy::cli {
namespace {

constexpr int kExitInput = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitVerification = 3;

struct RunConfig {
  double tol = 1e-10;
  double unitarity_tol = 1e-8;
  double relation_tol = 1e-6;
  int order = 4;
  std::string lambda = "0.05";
  std::uint64_t seed = 7;
  std::string out;
  std::string format = "json";
};

Complex parse_complex(const std::string& text) {
  std::string s;
  for (char c : text) {
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  }
  auto to_double = [&](const std::string& part) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(part, &used);
    } catch (const std::exception&) {
      throw InputError("cannot parse complex number \"" + text + "\"");
    }
    if (used != part.size() || !std::isfinite(v)) throw InputError("cannot parse complex number \"" + text + "\"");
    return v;
  };
  if (s.empty()) throw InputError("empty complex number");
  if (s.back() != 'i' && s.back() != 'j') return {to_double(s), 0.0};
  s.pop_back();
  std::size_t split = std::string::npos;
  for (std::size_t k = s.size(); k-- > 1;) {
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  }
  auto imag_part = [&](std::string part) {
    if (part.empty() || part == "+") return 1.0;
    if (part == "-") return -1.0;
    return to_double(part);
  };
  if (split == std::string::npos) return {0.0, imag_part(s)};
  return {to_double(s.substr(0, split)), imag_part(s.substr(split))};
}

std::vector<Complex> parse_complex_list(const std::string& text) {
  std::vector<Complex> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_complex(item));
  if (out.empty()) throw InputError("empty list");
  return out;
}

Json resolved_config(const RunConfig& cfg) {
  return Json{{"tol", cfg.tol},
              {"unitarity_tol", cfg.unitarity_tol},
              {"relation_tol", cfg.relation_tol},
              {"order", cfg.order},
              {"lambda", to_json(parse_complex(cfg.lambda))},
              {"seed", cfg.seed},
              {"out", cfg.out},
              {"format", cfg.format}};
}

class Report {
 public:
  Report(std::string command, const RunConfig& cfg) {
    json_["command"] = std::move(command);
    json_["config"] = resolved_config(cfg);
    json_["results"] = Json::object();
    json_["deviations"] = Json::object();
    json_["warnings"] = Json::array();
  }

  Json& config() { return json_["config"]; }
  Json& results() { return json_["results"]; }
  void deviation(const std::string& name, double value, double tolerance) {
    const bool ok = value <= tolerance;
    json_["deviations"][name] = Json{{"value", value}, {"tolerance", tolerance}, {"passed", ok}};
    passed_ = passed_ && ok;
  }
  void warn(const std::string& w) { json_["warnings"].push_back(w); }
  void warn_all(const std::vector<std::string>& ws) {
    for (const auto& w : ws) warn(w);
  }
  bool passed() const { return passed_; }
  Json finish() {
    json_["status"] = passed_ ? "ok" : "verification-failed";
    return json_;
  }

 private:
  Json json_;
  bool passed_ = true;
};

bool is_matrix(const Json& j) { return j.is_object() && j.contains("entries") && j.size() <= 2; }

std::string format_number(const Json& j) {
  std::ostringstream s;
  if (j.is_number_float()) {
    s << std::setprecision(12) << j.get<double>();
  } else {
    s << j.dump();
  }
  return s.str();
}

std::string format_complex(const Json& j) {
  const double re = j.value("re", 0.0);
  const double im = j.value("im", 0.0);
  std::ostringstream s;
  s << std::setprecision(10) << re << (im < 0 || std::signbit(im) ? " - " : " + ") << std::abs(im) << "i";
  return s.str();
}

void render_text(const Json& j, std::ostream& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent), ' ');
  auto scalar = [&](const Json& v) -> std::string {
    if (v.is_object() && v.size() == 2 && v.contains("re") && v.contains("im")) return format_complex(v);
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number()) return format_number(v);
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_null()) return "null";
    return "";
  };
  auto is_scalar = [&](const Json& v) { return !scalar(v).empty() || v.is_string(); };
  if (is_matrix(j)) {
    for (const auto& row : j["entries"]) {
      out << pad;
      for (const auto& z : row) out << "[" << format_complex(z) << "] ";
      out << '\n';
    }
    return;
  }
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (is_scalar(it.value())) {
        out << pad << it.key() << ": " << scalar(it.value()) << '\n';
      } else {
        out << pad << it.key() << ":\n";
        render_text(it.value(), out, indent + 2);
      }
    }
  } else if (j.is_array()) {
    bool all_scalar = true;
    for (const auto& v : j) all_scalar = all_scalar && is_scalar(v);
    if (all_scalar) {
      out << pad;
      for (const auto& v : j) out << scalar(v) << "  ";
      out << '\n';
    } else {
      for (const auto& v : j) {
        out << pad << "-\n";
        render_text(v, out, indent + 2);
      }
    }
  } else {
    out << pad << scalar(j) << '\n';
  }
}

int emit(Report& report, const RunConfig& cfg, std::ostream& out) {
  const bool ok = report.passed();
  const Json j = report.finish();
  if (!cfg.out.empty()) write_json_file(cfg.out, j);
  if (cfg.format == "text") {
    render_text(j, out, 0);
  } else {
    out << j.dump(2) << '\n';
  }
  return ok ? 0 : kExitVerification;
}

const Json& unwrap(const Json& j) { return j.is_object() && j.contains("results") ? j["results"] : j; }

std::vector<PiecewisePath> load_loops(const std::string& file) {
  const Json root = read_json_file(file);
  const Json& j = unwrap(root);
  if (j.is_object() && j.contains("path") && !j.contains("loops")) return {path_from_json(j["path"])};
  if (j.is_object() && j.contains("segments")) return {path_from_json(j)};
  return loops_from_json(j);
}

Json gates_to_json(std::span<const Matrix> mats, const std::string& prefix) {
  Json a = Json::array();
  for (std::size_t k = 0; k < mats.size(); ++k) {
    a.push_back({{"label", prefix + std::to_string(k + 1)}, {"matrix", to_json(mats[k])}});
  }
  return a;
}

Json gate_json(const Matrix& m) { return to_json(m); }

// Option storage for one invocation; subcommand callbacks fill `action`.
class Cli {
 public:
  explicit Cli(std::ostream& out) : out(out) {}

  void add_gate(CLI::App& app);
  void add_paths(CLI::App& app);
  void add_fuchsian(CLI::App& app);
  void add_synth(CLI::App& app);
  void add_pipeline(CLI::App& app);
  void add_kz(CLI::App& app);
  void add_universality(CLI::App& app);

  RunConfig cfg;
  std::function<int()> action;

 private:
  int path_report(const std::string& command, const PiecewisePath& path, const BraidWord& word);
  GateSet load_gates();

  std::ostream& out;

  std::string name;
  std::vector<int> bits;
  int controls = 0;

  int n = 3, i = 1, j = 2;
  bool inverse_letter = false;
  std::string word_text, punctures_text, basepoint_text;
  double radius = 0.25;

  std::string conn_file, loops_file, targets_file;
  bool x4 = false, chern = false, verify = false;
  double branch_lower = 0.0, rep_tol = 1e-7, flat_tol = 1e-10;
  double synth_radius = 0.0, match_tol = 1e-5;

  double spin = 0.5;
  std::string orientation = "ccw";

  std::string gates_file, gate_names;
  int max_length = 16;
  double eps = 0.5;
  std::size_t samples = 200;
  std::size_t budget = 2000000;
};

// --- gate --------------------------------------------------------------------

void Cli::add_gate(CLI::App& app) {
  auto* gate = app.add_subcommand("gate", "Named gates, truth tables, state application");
  gate->require_subcommand(1);

  auto* show = gate->add_subcommand("show", "Print a gate matrix, optionally controlled by k qubits");
  show->add_option("name", name, "X, Y, Z, H, H_std, PHASE:<alpha>, CNOT, CCNOT")->required();
  show->add_option("--controls", controls, "Wrap in k control qubits")->check(CLI::NonNegativeNumber);
  show->callback([&] {
    action = [&] {
      Report report("gate show", cfg);
      const QuantumGate g = controls > 0 ? controlled(parse_gate(name), controls) : parse_gate(name);
      report.results()["name"] = name;
      report.results()["controls"] = controls;
      report.results()["qubits"] = g.qubits();
      report.results()["matrix"] = gate_json(g.matrix());
      report.deviation("unitarity", unitarity_defect(g.matrix()), cfg.unitarity_tol);
      return emit(report, cfg, out);
    };
  });

  auto* truth = gate->add_subcommand("truth-table", "Images of all computational basis states");
  truth->add_option("name", name, "Gate name")->required();
  truth->callback([&] {
    action = [&] {
      Report report("gate truth-table", cfg);
      const QuantumGate g = parse_gate(name);
      Json rows = Json::array();
      const int q = g.qubits();
      for (Eigen::Index b = 0; b < g.dim(); ++b) {
        std::vector<int> in(static_cast<std::size_t>(q));
        for (int k = 0; k < q; ++k) in[k] = static_cast<int>((b >> (q - 1 - k)) & 1);
        const auto s = apply(g, QubitState::basis(in));
        Eigen::Index image = 0;
        s.amplitudes().cwiseAbs().maxCoeff(&image);
        std::vector<int> outbits(static_cast<std::size_t>(q));
        for (int k = 0; k < q; ++k) outbits[k] = static_cast<int>((image >> (q - 1 - k)) & 1);
        rows.push_back({{"in", in}, {"out", outbits}, {"weight", std::norm(s.amplitudes()(image))}});
      }
      report.results()["name"] = name;
      report.results()["table"] = std::move(rows);
      return emit(report, cfg, out);
    };
  });

  auto* apply_cmd = gate->add_subcommand("apply", "Apply a gate to a computational basis state");
  apply_cmd->add_option("name", name, "Gate name")->required();
  apply_cmd->add_option("--bits", bits, "Input bits, leading qubit first")->required()->delimiter(',');
  apply_cmd->callback([&] {
    action = [&] {
      Report report("gate apply", cfg);
      const QuantumGate g = parse_gate(name);
      const auto s = apply(g, QubitState::basis(bits));
      Json amps = Json::array();
      for (Eigen::Index k = 0; k < s.amplitudes().size(); ++k) amps.push_back(to_json(s.amplitudes()(k)));
      report.results()["name"] = name;
      report.results()["input"] = bits;
      report.results()["amplitudes"] = std::move(amps);
      if (s.qubits() == 1) report.results()["expectation"] = expectation_value(s);
      return emit(report, cfg, out);
    };
  });
}

int Cli::path_report(const std::string& command, const PiecewisePath& path, const BraidWord& word) {
  Report report(command, cfg);
  Json letters = Json::array();
  for (const auto& l : word) letters.push_back(l.power * l.generator);
  report.results()["n"] = n;
  report.results()["word"] = std::move(letters);
  report.results()["exponent_sum"] = exponent_sum(word);
  report.results()["clearance"] = min_clearance(path, Divisor::configuration(n));
  report.results()["path"] = to_json(path);
  return emit(report, cfg, out);
}

// --- paths -------------------------------------------------------------------

void Cli::add_paths(CLI::App& app) {
  auto* paths = app.add_subcommand("paths", "Braid paths, pure braids and puncture loops");
  paths->require_subcommand(1);

  auto* braid = paths->add_subcommand("braid", "Half-twist path of the generator sigma_i");
  braid->add_option("--n", n, "Number of strands")->check(CLI::Range(2, 64));
  braid->add_option("--i", i, "Generator index, 1-based");
  braid->add_flag("--inverse", inverse_letter, "Clockwise half-twist");
  braid->callback([&] {
    action = [&] {
      const BraidWord word{BraidLetter{i, inverse_letter ? -1 : 1}};
      if (i < 1 || i >= n) throw InputError("generator index out of range 1.." + std::to_string(n - 1));
      return path_report("paths braid", braid_word_path(n, word), word);
    };
  });

  auto* pure = paths->add_subcommand("pure", "Loop of the pure braid tau_ij");
  pure->add_option("--n", n, "Number of strands")->check(CLI::Range(2, 64));
  pure->add_option("--i", i, "First strand");
  pure->add_option("--j", j, "Second strand");
  pure->callback([&] {
    action = [&] {
      const BraidWord word = pure_braid_word(n, i, j);
      return path_report("paths pure", braid_word_path(n, word), word);
    };
  });

  auto* word_cmd = paths->add_subcommand("word", "Path of a braid word given as signed generator indices");
  word_cmd->add_option("--n", n, "Number of strands")->check(CLI::Range(2, 64));
  word_cmd->add_option("--word", word_text, "e.g. 1,2,-1")->required();
  word_cmd->callback([&] {
    action = [&] {
      BraidWord word;
      std::stringstream in(word_text);
      std::string item;
      while (std::getline(in, item, ',')) {
        int v = 0;
        try {
          v = std::stoi(item);
        } catch (const std::exception&) {
          throw InputError("bad braid letter \"" + item + "\"");
        }
        if (v == 0) throw InputError("braid letters are nonzero");
        word.push_back({std::abs(v), v > 0 ? 1 : -1});
      }
      return path_report("paths word", braid_word_path(n, word), word);
    };
  });

  auto* loops = paths->add_subcommand("loops", "Generator loops around punctures from one basepoint");
  loops->add_option("--punctures", punctures_text, "Comma-separated complex numbers, e.g. 0,1,0.5+1i")->required();
  loops->add_option("--basepoint", basepoint_text, "Common basepoint");
  loops->add_option("--radius", radius, "Circle radius")->check(CLI::PositiveNumber);
  loops->callback([&] {
    action = [&] {
      Report report("paths loops", cfg);
      const auto pts = parse_complex_list(punctures_text);
      const Complex base = basepoint_text.empty() ? Complex(0.0) : parse_complex(basepoint_text);
      const Divisor divisor = Divisor::points(pts);
      std::vector<PiecewisePath> ls;
      Json windings = Json::array();
      for (Complex p : pts) {
        ls.push_back(generator_loop(base, p, radius, divisor));
        Json w = Json::array();
        for (Complex q : pts) w.push_back(std::lround(winding_number(ls.back(), q)));
        windings.push_back(std::move(w));
      }
      report.results()["punctures"] = Json::array();
      for (Complex p : pts) report.results()["punctures"].push_back(to_json(p));
      report.results()["winding_numbers"] = std::move(windings);
      report.results()["loops"] = loops_to_json(ls)["loops"];
      return emit(report, cfg, out);
    };
  });
}

// --- fuchsian ----------------------------------------------------------------

void Cli::add_fuchsian(CLI::App& app) {
  auto* fuchsian = app.add_subcommand("fuchsian", "Monodromy of logarithmic connections");
  fuchsian->require_subcommand(1);


  auto* mono = fuchsian->add_subcommand("monodromy", "Transport around each loop");
  mono->add_option("--conn", conn_file, "Connection file")->required()->check(CLI::ExistingFile);
  mono->add_option("--loops", loops_file, "Loops file")->required()->check(CLI::ExistingFile);
  mono->add_flag("--x4", x4, "Loops realize the four-puncture presentation M1 M2 M3 M4 = I");
  mono->add_flag("--chern", chern, "Also compute the index sum of residue traces");
  mono->add_option("--branch-lower", branch_lower, "Lower end of the logarithm branch window");
  mono->add_option("--rep-tol", rep_tol, "Tolerance of the product relation")->check(CLI::PositiveNumber);
  mono->callback([&] {
    action = [&] {
      Report report("fuchsian monodromy", cfg);
      report.config()["rep_tol"] = rep_tol;
      report.config()["branch_lower"] = branch_lower;
      const auto conn = connection_from_json(unwrap(read_json_file(conn_file)));
      const auto loops = load_loops(loops_file);
      auto rep = monodromy_representation(conn, loops, cfg.tol);
      rep.x4_presentation = x4;
      report.results() = to_json(rep);
      Json unitarity = Json::array();
      for (const auto& m : rep.matrices) unitarity.push_back(unitarity_defect(m));
      report.results()["unitarity_defects"] = std::move(unitarity);
      if (x4) report.deviation("product_relation", product_relation_defect(rep), rep_tol);
      if (chern) {
        const auto c = chern_index(rep, BranchWindow{branch_lower}, rep_tol);
        report.results()["chern_index"] = c.value;
        report.results()["chern_raw"] = to_json(c.raw);
        report.deviation("chern_integrality", c.residual, 1e-6);
      }
      return emit(report, cfg, out);
    };
  });

  auto* flat = fuchsian->add_subcommand("integrability", "Infinitesimal braid relations of a pair connection");
  flat->add_option("--conn", conn_file, "Connection file")->required()->check(CLI::ExistingFile);
  flat->add_option("--flat-tol", flat_tol, "Allowed violation")->check(CLI::PositiveNumber);
  flat->callback([&] {
    action = [&] {
      Report report("fuchsian integrability", cfg);
      report.config()["flat_tol"] = flat_tol;
      const auto conn = connection_from_json(unwrap(read_json_file(conn_file)));
      const auto r = integrability_check(conn);
      Json rel = Json::array();
      for (const auto& v : r.relations) rel.push_back({{"relation", v.relation}, {"norm", v.norm}});
      report.results()["relations"] = std::move(rel);
      report.deviation("integrability", r.max_violation, flat_tol);
      return emit(report, cfg, out);
    };
  });
}

// --- synth / pipeline --------------------------------------------------------

struct TargetInput {
  std::optional<RepresentationFamily> family;  // empty for zero targets
  std::optional<LogFormBasis> forms;
  std::vector<Complex> punctures;
};

TargetInput load_targets(const std::string& file) {
  const Json root = read_json_file(file);
  const Json& j = unwrap(root);
  TargetInput in;
  if (j.contains("punctures")) {
    for (const auto& p : j["punctures"]) in.punctures.push_back(complex_from_json(p));
    in.forms = LogFormBasis::punctures(in.punctures);
  } else if (j.contains("forms")) {
    in.forms = forms_from_json(j["forms"]);
  }
  const bool empty = (j.contains("coefficients") && j["coefficients"].is_array() && j["coefficients"].empty()) ||
                     (j.contains("exponential") && j["exponential"].contains("generators") &&
                      j["exponential"]["generators"].is_array() && j["exponential"]["generators"].empty());
  if (!empty) in.family = family_from_json(j);
  return in;
}

std::vector<PiecewisePath> default_loops(const std::vector<Complex>& punctures, std::optional<Complex> basepoint,
                                         std::optional<double> radius) {
  if (punctures.empty()) throw InputError("loops must be given when the forms are not punctures of the line");
  double separation = std::numeric_limits<double>::infinity();
  double spread = 0.0;
  Complex centroid = 0.0;
  for (std::size_t a = 0; a < punctures.size(); ++a) {
    centroid += punctures[a] / static_cast<double>(punctures.size());
    for (std::size_t b = a + 1; b < punctures.size(); ++b) {
      separation = std::min(separation, std::abs(punctures[a] - punctures[b]));
      spread = std::max(spread, std::abs(punctures[a] - punctures[b]));
    }
  }
  const double r = radius ? *radius : (std::isfinite(separation) ? 0.25 * separation : 0.5);
  const Complex base = basepoint ? *basepoint : centroid - Complex(0.0, std::max(1.0, spread));
  const Divisor divisor = Divisor::points(punctures);
  std::vector<PiecewisePath> loops;
  for (Complex p : punctures) loops.push_back(generator_loop(base, p, r, divisor));
  return loops;
}

Json family_report(const SynthesisResult& s) {
  Json j;
  j["family"] = to_json(s.family);
  j["order_residuals"] = s.order_residuals;
  j["periods"] = to_json(s.periods);
  j["radius_estimate"] = s.family.radius_estimate();
  return j;
}

void Cli::add_synth(CLI::App& app) {

  auto* synth = app.add_subcommand("synth", "Connection with prescribed monodromy series");
  synth->add_option("--targets", targets_file, "Target family file")->required()->check(CLI::ExistingFile);
  synth->add_option("--loops", loops_file, "Loops file (default: generated around the punctures)")
      ->check(CLI::ExistingFile);
  synth->add_option("--basepoint", basepoint_text, "Basepoint of generated loops");
  synth->add_option("--radius", synth_radius, "Radius of generated loops")->check(CLI::PositiveNumber);
  synth->add_flag("--verify", verify, "Transport the synthesized connection at lambda and compare");
  synth->add_option("--match-tol", match_tol, "Allowed monodromy deviation")->check(CLI::PositiveNumber);
  synth->callback([&] {
    action = [&] {
      Report report("synth", cfg);
      report.config()["match_tol"] = match_tol;
      auto in = load_targets(targets_file);
      if (!in.family) throw InputError("synth: target family has no generators");
      if (!in.forms) throw InputError("synth: target file needs \"punctures\" or \"forms\"");
      const auto loops =
          loops_file.empty()
              ? default_loops(in.punctures, basepoint_text.empty() ? std::nullopt
                                                                   : std::optional(parse_complex(basepoint_text)),
                              synth_radius > 0.0 ? std::optional(synth_radius) : std::nullopt)
              : load_loops(loops_file);
      const auto s = synthesize(*in.family, *in.forms, loops, cfg.order, std::min(cfg.tol, 1e-11));
      report.results() = family_report(s);
      report.warn_all(s.warnings);
      if (verify) {
        const auto m = verify_match(*in.family, s.family, parse_complex(cfg.lambda), loops, std::min(cfg.tol, 1e-11));
        report.results()["deviations_per_generator"] = m.deviations;
        report.results()["order_constant"] = m.order_constant;
        report.results()["monodromies"] = gates_to_json(m.monodromies, "M");
        report.warn_all(m.warnings);
        report.deviation("monodromy_match", m.max_deviation, match_tol);
      }
      return emit(report, cfg, out);
    };
  });
}

void Cli::add_pipeline(CLI::App& app) {

  auto* pipe = app.add_subcommand("pipeline", "Targets -> synthesized connection -> monodromy -> density screen");
  pipe->add_option("--targets", targets_file, "Target family file")->required()->check(CLI::ExistingFile);
  pipe->add_option("--loops", loops_file, "Loops file (default: generated around the punctures)")
      ->check(CLI::ExistingFile);
  pipe->add_option("--match-tol", match_tol, "Allowed monodromy deviation")->check(CLI::PositiveNumber);
  pipe->add_option("--maxlen", max_length, "Word length of the density screen")->check(CLI::Range(1, 64));
  pipe->callback([&] {
    action = [&] {
      Report report("pipeline", cfg);
      report.config()["match_tol"] = match_tol;
      report.config()["maxlen"] = max_length;
      auto in = load_targets(targets_file);
      if (!in.family) {
        report.results()["generators"] = 0;
        report.results()["connection"] = "zero";
        report.results()["monodromy"] = "identity";
        report.results()["verdict"] = "trivially-consistent";
        return emit(report, cfg, out);
      }
      if (!in.forms) throw InputError("pipeline: target file needs \"punctures\" or \"forms\"");
      const auto loops = loops_file.empty() ? default_loops(in.punctures, std::nullopt, std::nullopt)
                                            : load_loops(loops_file);
      const Complex lambda = parse_complex(cfg.lambda);
      const double tol = std::min(cfg.tol, 1e-11);
      const auto s = synthesize(*in.family, *in.forms, loops, cfg.order, tol);
      const auto m = verify_match(*in.family, s.family, lambda, loops, tol);
      report.results()["synthesis"] = family_report(s);
      report.results()["deviations_per_generator"] = m.deviations;
      report.results()["monodromies"] = gates_to_json(m.monodromies, "M");
      report.warn_all(s.warnings);
      report.warn_all(m.warnings);
      report.deviation("monodromy_match", m.max_deviation, match_tol);

      double defect = 0.0;
      std::vector<QuantumGate> gates;
      bool power_of_two = true;
      for (const auto& mono : m.monodromies) {
        defect = std::max(defect, unitarity_defect(mono));
        const auto d = mono.rows();
        power_of_two = power_of_two && d >= 2 && (d & (d - 1)) == 0;
      }
      report.results()["unitarity_defect"] = defect;
      std::string density = "not-screened";
      if (power_of_two) {
        for (const auto& mono : m.monodromies) gates.emplace_back(nearest_unitary(mono), 1e-8);
        ScreenOptions opts;
        opts.max_length = max_length;
        const auto screen = density_screen(GateSet(std::move(gates)), opts);
        density = to_string(screen.verdict);
        report.results()["closure_sizes"] = screen.closure_sizes;
      } else {
        report.warn("monodromy dimension is not a power of two; density screen skipped");
      }
      report.results()["density"] = density;
      report.results()["verdict"] = report.passed() ? "consistent" : "inconsistent";
      return emit(report, cfg, out);
    };
  });
}

// --- kz ----------------------------------------------------------------------

void Cli::add_kz(CLI::App& app) {
  auto* kz = app.add_subcommand("kz", "Knizhnik-Zamolodchikov braid gates");
  kz->require_subcommand(1);


  auto common = [&](CLI::App* sub) {
    sub->add_option("--n", n, "Number of points")->check(CLI::Range(2, 8));
    sub->add_option("--spin", spin, "Spin of every module")->check(CLI::NonNegativeNumber);
  };

  auto* braid = kz->add_subcommand("braid", "Braid group generators as gates");
  common(braid);
  braid->add_option("--orientation", orientation, "ccw or cw half-twists")->check(CLI::IsMember({"ccw", "cw"}));
  braid->callback([&] {
    action = [&] {
      Report report("kz braid", cfg);
      report.config()["n"] = n;
      report.config()["spin"] = spin;
      report.config()["orientation"] = orientation;
      const auto sys = build_kz(n, spin, parse_complex(cfg.lambda));
      const auto mats = braid_matrices(sys, cfg.tol,
                                       orientation == "ccw" ? Orientation::Counterclockwise : Orientation::Clockwise);
      report.results()["gates"] = gates_to_json(mats, "B");
      double defect = 0.0;
      for (const auto& b : mats) defect = std::max(defect, unitarity_defect(b));
      report.results()["unitarity_defect"] = defect;
      return emit(report, cfg, out);
    };
  });

  auto* verify_cmd = kz->add_subcommand("verify", "Braid relations, twist identity and unitarity");
  common(verify_cmd);
  verify_cmd->callback([&] {
    action = [&] {
      Report report("kz verify", cfg);
      report.config()["n"] = n;
      report.config()["spin"] = spin;
      const Complex lambda = parse_complex(cfg.lambda);
      const auto sys = build_kz(n, spin, lambda);
      report.deviation("integrability", integrability_check(sys.to_connection()).max_violation, 1e-10);
      for (Orientation o : {Orientation::Counterclockwise, Orientation::Clockwise}) {
        const std::string tag = o == Orientation::Counterclockwise ? "ccw" : "cw";
        const auto mats = braid_matrices(sys, cfg.tol, o);
        const auto r = verify_braid_relations(mats, n);
        Json checks = Json::array();
        for (const auto& c : r.checks) checks.push_back({{"relation", c.relation}, {"deviation", c.deviation}});
        report.results()[tag] = Json{{"gates", gates_to_json(mats, "B")},
                                     {"checks", std::move(checks)},
                                     {"generator_unitarity", r.generator_unitarity},
                                     {"pure_unitarity", r.pure_unitarity}};
        report.deviation(tag + "_braid_relation", r.braid_deviation, cfg.relation_tol);
        if (n >= 4) report.deviation(tag + "_far_commutation", r.commutation_deviation, cfg.relation_tol);
        if (o == Orientation::Counterclockwise) {
          const auto form = invariant_form(mats);
          Json u{{"invariant_forms", form.dimension},
                 {"best_min_eigenvalue", form.min_eigenvalue},
                 {"invariance_defect", form.invariance_defect},
                 {"unitarizable", form.positive()}};
          if (form.positive()) u["unitarized_defect"] = form.unitarity_defect;
          report.results()["unitarization"] = std::move(u);
          if (!form.positive()) report.warn("no positive invariant Hermitian form found; the braid matrices are not unitarizable at this lambda");
          double twist = 0.0;
          for (int i = 1; i < n; ++i) {
            twist = std::max(twist, (mats[i - 1] * mats[i - 1] - full_twist(sys, i, i + 1, cfg.tol)).norm());
          }
          report.deviation("half_twist_squared", twist, cfg.relation_tol);
        }
        if (n == 2) {
          const Matrix expected = expm((Complex(0.0, -kPi) / lambda) * sys.omega(1, 2));
          const Matrix p = flip_operator(sys.modules(), 1);
          report.results()[tag]["distance_to_exp_minus_pi_i_omega"] = Json{
              {"with_flip", (mats[0] - expected).norm()}, {"without_flip", (p * mats[0] - expected).norm()}};
        }
      }
      return emit(report, cfg, out);
    };
  });
}

GateSet Cli::load_gates() {
  if (!gate_names.empty()) {
    std::vector<QuantumGate> gs;
    std::vector<std::string> labels;
    std::stringstream in(gate_names);
    std::string item;
    while (std::getline(in, item, ',')) {
      gs.push_back(parse_gate(item));
      labels.push_back(item);
    }
    return GateSet(std::move(gs), std::move(labels));
  }
  if (gates_file.empty()) throw InputError("give --gates or --names");
  return gateset_from_json(unwrap(read_json_file(gates_file)), cfg.unitarity_tol);
}

// --- universality ------------------------------------------------------------

void Cli::add_universality(CLI::App& app) {
  auto* uni = app.add_subcommand("universality", "Density screening of gate sets");
  uni->require_subcommand(1);

  auto* screen = uni->add_subcommand("screen", "abelian / finite-suspect / dense-likely");
  screen->add_option("--gates", gates_file, "Gate set file")->check(CLI::ExistingFile);
  screen->add_option("--names", gate_names, "Comma-separated gate names instead of a file");
  screen->add_option("--maxlen", max_length, "Closure word length")->check(CLI::Range(1, 64));
  screen->callback([&] {
    action = [&] {
      Report report("universality screen", cfg);
      report.config()["maxlen"] = max_length;
      const GateSet gs = load_gates();
      ScreenOptions opts;
      opts.max_length = max_length;
      const auto r = density_screen(gs, opts);
      report.results()["labels"] = gs.labels();
      report.results()["verdict"] = to_string(r.verdict);
      report.results()["max_commutator"] = r.max_commutator;
      report.results()["closure_sizes"] = r.closure_sizes;
      report.results()["saturated"] = r.saturated;
      report.results()["budget_exhausted"] = r.budget_exhausted;
      return emit(report, cfg, out);
    };
  });

  auto* coverage = uni->add_subcommand("coverage", "Fraction of Haar samples within eps of a short word");
  coverage->add_option("--gates", gates_file, "Gate set file")->check(CLI::ExistingFile);
  coverage->add_option("--names", gate_names, "Comma-separated gate names instead of a file");
  coverage->add_option("--maxlen", max_length, "Word length")->check(CLI::Range(0, 64));
  coverage->add_option("--eps", eps, "Projective distance")->check(CLI::PositiveNumber);
  coverage->add_option("--samples", samples, "Number of Haar samples");
  coverage->add_option("--budget", budget, "Maximum number of enumerated words");
  coverage->callback([&] {
    action = [&] {
      Report report("universality coverage", cfg);
      report.config()["maxlen"] = max_length;
      report.config()["eps"] = eps;
      report.config()["samples"] = samples;
      report.config()["budget"] = budget;
      const GateSet gs = load_gates();
      const auto r = epsilon_net_coverage(gs, max_length, eps, samples, cfg.seed, budget);
      report.results()["labels"] = gs.labels();
      report.results()["coverage"] = r.fraction;
      report.results()["covered"] = r.covered;
      report.results()["words"] = r.words;
      report.results()["partial"] = r.partial;
      if (r.partial) report.warn("word enumeration hit the node budget; coverage is a lower bound");
      return emit(report, cfg, out);
    };
  });
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Cli cli(out);
  RunConfig& cfg = cli.cfg;
  CLI::App app{"Quantum gates as monodromy of logarithmic connections", "monodromy"};
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("--tol", cfg.tol, "Transport tolerance")->check(CLI::PositiveNumber);
  app.add_option("--unitarity-tol", cfg.unitarity_tol, "Unitarity tolerance")->check(CLI::PositiveNumber);
  app.add_option("--relation-tol", cfg.relation_tol, "Relation tolerance")->check(CLI::PositiveNumber);
  app.add_option("--order", cfg.order, "Truncation order K")->check(CLI::PositiveNumber);
  app.add_option("--lambda", cfg.lambda, "Complex parameter, e.g. 0.05 or 3+1i");
  app.add_option("--seed", cfg.seed, "Random seed");
  app.add_option("--out", cfg.out, "Write the JSON report here");
  app.add_option("--format", cfg.format, "stdout format")->check(CLI::IsMember({"json", "text"}));

  cli.add_gate(app);
  cli.add_paths(app);
  cli.add_fuchsian(app);
  cli.add_synth(app);
  cli.add_pipeline(app);
  cli.add_kz(app);
  cli.add_universality(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitInput;
  }
  try {
    parse_complex(cfg.lambda);
    if (!cli.action) throw InputError("no command given");
    return cli.action();
  } catch (const InputError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const nlohmann::json::exception& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const DivisorContactError& e) {
    err << "numerical failure: " << e.what() << " (closest approach " << e.closest_approach() << ")\n";
    return kExitNumerical;
  } catch (const StepUnderflowError& e) {
    err << "numerical failure: " << e.what() << " (closest approach " << e.closest_approach() << ")\n";
    return kExitNumerical;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const VerificationError& e) {
    err << "verification failed: " << e.what() << '\n';
    return kExitVerification;
  }
}

}  // namespace monodromy::cli
