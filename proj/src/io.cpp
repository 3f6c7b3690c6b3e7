#include "monodromy/io.hpp"

#include "monodromy/errors.hpp"

#include <cmath>
#include <fstream>

namespace monodromy {
namespace {

const Json& field(const Json& j, const char* name) {
  if (!j.is_object()) throw InputError(std::string("expected an object holding \"") + name + "\"");
  auto it = j.find(name);
  if (it == j.end()) throw InputError(std::string("missing field \"") + name + "\"");
  return *it;
}

const Json& array_field(const Json& j, const char* name) {
  const Json& a = field(j, name);
  if (!a.is_array()) throw InputError(std::string("field \"") + name + "\" must be an array");
  return a;
}

double number(const Json& j, const char* what) {
  if (!j.is_number()) throw InputError(std::string(what) + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw InputError(std::string(what) + " must be finite");
  return v;
}

std::vector<Matrix> matrices_from_json(const Json& a) {
  if (!a.is_array()) throw InputError("expected an array of matrices");
  std::vector<Matrix> out;
  for (const auto& m : a) out.push_back(matrix_from_json(m));
  return out;
}

Json matrices_to_json(std::span<const Matrix> ms) {
  Json a = Json::array();
  for (const auto& m : ms) a.push_back(to_json(m));
  return a;
}

std::vector<Complex> complex_list(const Json& a) {
  if (!a.is_array()) throw InputError("expected an array of complex numbers");
  std::vector<Complex> out;
  for (const auto& z : a) out.push_back(complex_from_json(z));
  return out;
}

Json complex_list_to_json(std::span<const Complex> zs) {
  Json a = Json::array();
  for (Complex z : zs) a.push_back(to_json(z));
  return a;
}

Json segment_to_json(const PathSegment& seg) {
  Json j;
  if (const auto* line = std::get_if<LineSegment>(&seg)) {
    j["kind"] = "line";
    j["start"] = point_to_json(line->start);
    j["end"] = point_to_json(line->end);
  } else {
    const auto& arc = std::get<ArcSegment>(seg);
    j["kind"] = "arc";
    j["base"] = point_to_json(arc.base);
    Json movers = Json::array();
    for (const auto& m : arc.movers) {
      movers.push_back({{"coord", m.coord}, {"center", to_json(m.center)}, {"radius", m.radius},
                        {"start_angle", m.start_angle}});
    }
    j["movers"] = std::move(movers);
    j["sweep"] = arc.sweep;
  }
  return j;
}

PathSegment segment_from_json(const Json& j) {
  const Json& kind = field(j, "kind");
  if (kind == "line") return LineSegment{point_from_json(field(j, "start")), point_from_json(field(j, "end"))};
  if (kind == "arc") {
    ArcSegment arc;
    arc.base = point_from_json(field(j, "base"));
    for (const auto& m : array_field(j, "movers")) {
      const Json& coord = field(m, "coord");
      if (!coord.is_number_integer()) throw InputError("arc mover coord must be an integer");
      ArcMover mover{coord.get<Eigen::Index>(), complex_from_json(field(m, "center")),
                     number(field(m, "radius"), "arc radius"), number(field(m, "start_angle"), "arc start_angle")};
      if (mover.coord < 0 || mover.coord >= arc.base.size()) throw InputError("arc mover coord out of range");
      if (!(mover.radius > 0.0)) throw InputError("arc radius must be positive");
      arc.movers.push_back(mover);
    }
    arc.sweep = number(field(j, "sweep"), "arc sweep");
    return arc;
  }
  throw InputError("unknown segment kind " + kind.dump());
}

}  // namespace

Json to_json(Complex z) { return Json{{"re", z.real()}, {"im", z.imag()}}; }

Complex complex_from_json(const Json& j) {
  if (j.is_number()) return {number(j, "complex value"), 0.0};
  if (j.is_object()) {
    const double re = j.contains("re") ? number(j["re"], "re") : 0.0;
    const double im = j.contains("im") ? number(j["im"], "im") : 0.0;
    if (!j.contains("re") && !j.contains("im")) throw InputError("complex value needs \"re\" or \"im\"");
    return {re, im};
  }
  throw InputError("complex value must be a number or {\"re\", \"im\"}");
}

Json to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return Json{{"dim", m.rows()}, {"entries", std::move(rows)}};
}

Matrix matrix_from_json(const Json& j) {
  const Json& entries = j.is_array() ? j : array_field(j, "entries");
  const auto n = static_cast<Eigen::Index>(entries.size());
  if (n == 0) throw InputError("matrix has no rows");
  if (j.contains("dim")) {
    const Json& dim = j["dim"];
    if (!dim.is_number_integer() || dim.get<Eigen::Index>() != n) {
      throw InputError("matrix \"dim\" does not match its entries");
    }
  }
  Matrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const Json& row = entries[r];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) throw InputError("matrix must be square");
    for (Eigen::Index c = 0; c < n; ++c) m(r, c) = complex_from_json(row[c]);
  }
  return m;
}

Json point_to_json(const Point& p) {
  Json a = Json::array();
  for (Eigen::Index k = 0; k < p.size(); ++k) a.push_back(to_json(p(k)));
  return a;
}

Point point_from_json(const Json& j) {
  const auto zs = complex_list(j);
  if (zs.empty()) throw InputError("point has no coordinates");
  Point p(static_cast<Eigen::Index>(zs.size()));
  for (std::size_t k = 0; k < zs.size(); ++k) p(static_cast<Eigen::Index>(k)) = zs[k];
  return p;
}

Json to_json(const PiecewisePath& path) {
  Json segs = Json::array();
  for (const auto& s : path.segments()) segs.push_back(segment_to_json(s));
  return Json{{"closed", path.is_closed()}, {"dim", path.dim()}, {"segments", std::move(segs)}};
}

PiecewisePath path_from_json(const Json& j) {
  std::vector<PathSegment> segs;
  for (const auto& s : array_field(j, "segments")) segs.push_back(segment_from_json(s));
  PiecewisePath path(std::move(segs));
  if (j.contains("dim") && (!j["dim"].is_number_integer() || j["dim"].get<Eigen::Index>() != path.dim())) {
    throw InputError("path \"dim\" does not match its segments");
  }
  if (j.value("closed", false) && !path.is_closed()) throw InputError("path is flagged closed but does not close");
  return path;
}

Json loops_to_json(std::span<const PiecewisePath> loops) {
  Json a = Json::array();
  for (const auto& l : loops) a.push_back(to_json(l));
  return Json{{"loops", std::move(a)}};
}

std::vector<PiecewisePath> loops_from_json(const Json& j) {
  const Json& a = j.is_array() ? j : array_field(j, "loops");
  std::vector<PiecewisePath> out;
  for (const auto& p : a) out.push_back(path_from_json(p));
  if (out.empty()) throw InputError("no loops given");
  return out;
}

Json to_json(const AffineForm& h) {
  Json j{{"coeffs", point_to_json(h.coeffs)}, {"constant", to_json(h.constant)}};
  if (h.weight != 1.0) j["weight"] = h.weight;
  return j;
}

AffineForm affine_form_from_json(const Json& j) {
  AffineForm h;
  h.coeffs = point_from_json(field(j, "coeffs"));
  h.constant = j.contains("constant") ? complex_from_json(j["constant"]) : Complex{0.0};
  if (j.contains("weight")) h.weight = number(j["weight"], "form weight");
  return h;
}

Json to_json(const LogFormBasis& forms) {
  Json hs = Json::array();
  for (const auto& h : forms.hyperplanes()) hs.push_back(to_json(h));
  Json j{{"dim", forms.dim()}, {"hyperplanes", std::move(hs)}};
  j["reference"] = forms.reference() ? to_json(*forms.reference()) : Json(nullptr);
  return j;
}

LogFormBasis forms_from_json(const Json& j) {
  if (j.is_object() && j.contains("punctures")) {
    const auto points = complex_list(j["punctures"]);
    return LogFormBasis::punctures(points);
  }
  const Json& dim = field(j, "dim");
  if (!dim.is_number_integer() || dim.get<long>() < 1) throw InputError("forms \"dim\" must be a positive integer");
  std::vector<AffineForm> hs;
  for (const auto& h : array_field(j, "hyperplanes")) hs.push_back(affine_form_from_json(h));
  std::optional<AffineForm> reference;
  if (j.contains("reference") && !j["reference"].is_null()) reference = affine_form_from_json(j["reference"]);
  return LogFormBasis(dim.get<Eigen::Index>(), std::move(hs), std::move(reference));
}

Json to_json(const LogarithmicConnection& conn) {
  Json j;
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, PoleResidues>) {
          j["kind"] = "poles";
          j["poles"] = complex_list_to_json(d.poles);
          j["regular_at_infinity"] = d.regular_at_infinity;
          j["residues"] = matrices_to_json(d.residues);
        } else if constexpr (std::is_same_v<T, PairResidues>) {
          j["kind"] = "pairs";
          j["n"] = d.n;
          j["residues"] = matrices_to_json(d.residues);
        } else {
          j["kind"] = "hyperplanes";
          j["forms"] = to_json(d.forms);
          j["residues"] = matrices_to_json(d.residues);
        }
      },
      conn.data());
  return j;
}

LogarithmicConnection connection_from_json(const Json& j) {
  const Json& kind = field(j, "kind");
  auto residues = matrices_from_json(field(j, "residues"));
  if (kind == "poles") {
    return LogarithmicConnection::poles(complex_list(field(j, "poles")), std::move(residues),
                                        j.value("regular_at_infinity", false));
  }
  if (kind == "pairs") {
    const Json& n = field(j, "n");
    if (!n.is_number_integer()) throw InputError("\"n\" must be an integer");
    return LogarithmicConnection::pairs(n.get<int>(), std::move(residues));
  }
  if (kind == "hyperplanes") return LogarithmicConnection::hyperplanes(forms_from_json(field(j, "forms")), std::move(residues));
  throw InputError("unknown connection kind " + kind.dump());
}

Json to_json(const MonodromyRepresentation& rep) {
  return Json{{"labels", rep.labels},
              {"basepoint", point_to_json(rep.basepoint)},
              {"x4_presentation", rep.x4_presentation},
              {"matrices", matrices_to_json(rep.matrices)}};
}

Json to_json(const RepresentationFamily& family) {
  Json coeffs = Json::array();
  for (const auto& series : family.coefficients()) coeffs.push_back(matrices_to_json(series));
  Json out{{"labels", family.labels()}, {"coefficients", std::move(coeffs)}};
  if (!family.generators_exact().empty()) {
    out["exponential"] = Json{{"generators", matrices_to_json(family.generators_exact())}, {"order", family.order()}};
  }
  return out;
}

RepresentationFamily family_from_json(const Json& j) {
  if (j.is_object() && j.contains("exponential")) {
    const Json& e = j["exponential"];
    const auto generators = matrices_from_json(field(e, "generators"));
    const Json& order = field(e, "order");
    if (!order.is_number_integer()) throw InputError("\"order\" must be an integer");
    return RepresentationFamily::exponential(generators, order.get<int>(),
                                             j.value("labels", std::vector<std::string>{}));
  }
  std::vector<std::vector<Matrix>> coeffs;
  for (const auto& series : array_field(j, "coefficients")) coeffs.push_back(matrices_from_json(series));
  std::vector<std::string> labels;
  if (j.contains("labels")) labels = j["labels"].get<std::vector<std::string>>();
  return RepresentationFamily(std::move(coeffs), std::move(labels));
}

Json to_json(const ConnectionFamily& family) {
  Json coeffs = Json::array();
  for (const auto& series : family.coefficients()) coeffs.push_back(matrices_to_json(series));
  return Json{{"forms", to_json(family.forms())}, {"order", family.order()}, {"coefficients", std::move(coeffs)}};
}

GateSet gateset_from_json(const Json& j, double unitarity_tol) {
  std::vector<QuantumGate> gates;
  std::vector<std::string> labels;
  if (j.is_object() && j.contains("matrices") && !j.contains("gates")) {
    for (auto& m : matrices_from_json(j["matrices"])) gates.emplace_back(std::move(m), unitarity_tol);
    if (j.contains("labels")) labels = j["labels"].get<std::vector<std::string>>();
    return GateSet(std::move(gates), std::move(labels));
  }
  for (const auto& g : array_field(j, "gates")) {
    if (g.is_string()) {
      gates.push_back(parse_gate(g.get<std::string>()));
      labels.push_back(g.get<std::string>());
    } else if (g.is_object() && g.contains("name")) {
      gates.push_back(parse_gate(g["name"].get<std::string>()));
      labels.push_back(g.value("label", g["name"].get<std::string>()));
    } else {
      gates.emplace_back(matrix_from_json(field(g, "matrix")), unitarity_tol);
      labels.push_back(g.value("label", "g" + std::to_string(gates.size())));
    }
  }
  return GateSet(std::move(gates), std::move(labels));
}

Json to_json(const GateSet& gs) {
  Json a = Json::array();
  for (std::size_t k = 0; k < gs.size(); ++k) {
    a.push_back({{"label", gs.labels()[k]}, {"matrix", to_json(gs.generators()[k].matrix())}});
  }
  return Json{{"gates", std::move(a)}};
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace monodromy
