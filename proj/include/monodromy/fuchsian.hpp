#pragma once

#include "monodromy/connection.hpp"
#include "monodromy/errors.hpp"
#include "monodromy/integrator.hpp"

#include <string>
#include <vector>

namespace monodromy {

// Conventions
// -----------
// Solutions are columns: dF = Ω F (left action). transport(γ) is the
// fundamental solution F(end) with F(start) = I, so transporting along γ and
// then δ gives transport(δ) · transport(γ).

/// Path-ordered exponential of the connection along the path.
Matrix transport(const LogarithmicConnection& conn, const PiecewisePath& path, double tol = 1e-10,
                 IntegrationStats* stats = nullptr);

struct MonodromyRepresentation {
  std::vector<std::string> labels;
  std::vector<Matrix> matrices;
  Point basepoint;
  /// Loops realize the X₄ presentation, whose relation is M₁M₂M₃M₄ = I.
  bool x4_presentation = false;
};

/// One transport per loop; loops must be closed and share a basepoint.
/// Labels default to "g1", "g2", …
MonodromyRepresentation monodromy_representation(const LogarithmicConnection& conn,
                                                 std::span<const PiecewisePath> loops, double tol = 1e-10,
                                                 std::vector<std::string> labels = {});

/// ‖M₁M₂⋯M_m − I‖_F in label order.
double product_relation_defect(const MonodromyRepresentation& rep);

/// Eigenvalue arguments are mapped into [lower, lower + 2π).
struct BranchWindow {
  double lower = 0.0;
};

class DefectiveMatrixError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class BranchCutError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// E with e^{2πiE} = M for diagonalizable invertible M. Normal inputs are
/// handled through the Schur form, so unitary M gives Hermitian E.
/// Eigenvalues within round-off (1e-13) of the cut are put on its closed
/// side; within 1e-10 of it they raise BranchCutError.
Matrix residue_log(const Matrix& m, BranchWindow window = {});

struct ChernIndex {
  long value = 0;
  double residual = 0.0;  // |Σ tr E_j − value|
  Complex raw;
};

/// Σ_j tr(residue_log(M_j)), rounded. Throws VerificationError if the sum is
/// further than 1e-6 from an integer, or if an X₄-labelled representation
/// violates its relation by more than rep_tol.
ChernIndex chern_index(const MonodromyRepresentation& rep, BranchWindow window = {}, double rep_tol = 1e-7);

/// ‖Ω(u)Ω(v) − Ω(v)Ω(u)‖_F at the point.
double curvature_residual(const LogarithmicConnection& conn, const Point& point, const Point& u,
                          const Point& v);

struct RelationViolation {
  std::string relation;
  double norm = 0.0;
};

struct IntegrabilityReport {
  double max_violation = 0.0;
  std::vector<RelationViolation> relations;

  bool passed(double tol) const { return max_violation <= tol; }
};

/// Infinitesimal braid relations for a configuration-space connection:
/// [Ω_ij, Ω_ik + Ω_jk] = 0 and [Ω_ik, Ω_ij + Ω_jk] = 0 for i<j<k, and
/// [Ω_ij, Ω_kl] = 0 for distinct i, j, k, l.
IntegrabilityReport integrability_check(const LogarithmicConnection& conn);

}  // namespace monodromy
