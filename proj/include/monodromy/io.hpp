#pragma once

#include "monodromy/connection.hpp"
#include "monodromy/fuchsian.hpp"
#include "monodromy/lappo_danilevski.hpp"
#include "monodromy/universality.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace monodromy {

using Json = nlohmann::ordered_json;

// All parsers throw InputError with the offending field named.

Json to_json(Complex z);
Complex complex_from_json(const Json& j);  // {"re","im"} or a bare number

/// {"dim": n, "entries": [[{"re","im"}, …], …]}
Json to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);

Json point_to_json(const Point& p);
Point point_from_json(const Json& j);

/// {"closed": bool, "dim": n, "segments": [{"kind": "line" | "arc", …}]}
Json to_json(const PiecewisePath& path);
PiecewisePath path_from_json(const Json& j);

/// {"loops": [path, …]}; a bare array of paths is also accepted.
Json loops_to_json(std::span<const PiecewisePath> loops);
std::vector<PiecewisePath> loops_from_json(const Json& j);

Json to_json(const AffineForm& h);
AffineForm affine_form_from_json(const Json& j);

/// {"dim", "hyperplanes": [...], "reference": form | null}, or
/// {"punctures": [c, …]} for ω_j = dz/(z − s_j).
Json to_json(const LogFormBasis& forms);
LogFormBasis forms_from_json(const Json& j);

/// {"kind": "poles" | "pairs" | "hyperplanes", …, "residues": [matrix, …]}
Json to_json(const LogarithmicConnection& conn);
LogarithmicConnection connection_from_json(const Json& j);

Json to_json(const MonodromyRepresentation& rep);

/// {"labels": [...], "coefficients": [[M_1, …, M_K], …]}, or
/// {"exponential": {"generators": [H, …], "order": K}} for e^{2πiλH_j}.
/// A "forms" or "punctures" entry, if present, is ignored here.
Json to_json(const RepresentationFamily& family);
RepresentationFamily family_from_json(const Json& j);

Json to_json(const ConnectionFamily& family);

/// {"gates": [...]} where each entry is a gate name ("H_std", "PHASE:0.25")
/// or {"label", "matrix"}; a {"labels", "matrices"} pair is also accepted.
GateSet gateset_from_json(const Json& j, double unitarity_tol = 1e-8);
Json to_json(const GateSet& gs);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

}  // namespace monodromy
