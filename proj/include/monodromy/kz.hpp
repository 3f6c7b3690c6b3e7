#pragma once

#include "monodromy/connection.hpp"

#include <limits>
#include <string>
#include <vector>

namespace monodromy {

/// Irreducible sl₂ module of spin j in the weight basis m = j, j−1, …, −j,
/// with e = J₊, f = J₋, h = 2J_z.
class SpinModule {
 public:
  explicit SpinModule(double spin);

  double spin() const noexcept { return spin_; }
  Eigen::Index dim() const noexcept { return e_.rows(); }
  const Matrix& e() const noexcept { return e_; }
  const Matrix& f() const noexcept { return f_; }
  const Matrix& h() const noexcept { return h_; }

  /// max of ‖[h,e] − 2e‖, ‖[h,f] + 2f‖, ‖[e,f] − h‖.
  double commutation_defect() const;

  bool operator==(const SpinModule& other) const noexcept { return spin_ == other.spin_; }

 private:
  double spin_;
  Matrix e_, f_, h_;
};

/// e⊗f + f⊗e + ½ h⊗h on Vi⊗Vj. For two spin-½ modules this is P − ½I.
Matrix casimir_omega(const SpinModule& a, const SpinModule& b);

/// max over x ∈ {e, f, h} of ‖[Ω, x⊗1 + 1⊗x]‖_F.
double casimir_defect(const SpinModule& a, const SpinModule& b);

/// x placed on factor i (1-based) of V₁⊗…⊗V_n, identity elsewhere.
Matrix embed(const std::vector<SpinModule>& modules, int i, const Matrix& x);

/// Exchange of tensor factors i and i+1 (1-based); their dimensions must agree.
Matrix flip_operator(const std::vector<SpinModule>& modules, int i);

class KZSystem {
 public:
  KZSystem(std::vector<SpinModule> modules, Complex lambda);

  int n() const noexcept { return static_cast<int>(modules_.size()); }
  const std::vector<SpinModule>& modules() const noexcept { return modules_; }
  Complex lambda() const noexcept { return lambda_; }
  Eigen::Index dim() const noexcept { return dim_; }
  /// Ω_ij on the full tensor product, 1-based i < j.
  const Matrix& omega(int i, int j) const;
  bool identical_modules() const;

  /// Σ_{i<j} (Ω_ij/λ) d log(z_i − z_j).
  LogarithmicConnection to_connection() const;

 private:
  std::vector<SpinModule> modules_;
  Complex lambda_;
  Eigen::Index dim_;
  std::vector<Matrix> omegas_;  // lexicographic pair order
};

/// Builds the system and checks flatness (integrability violation ≤ 1e-10).
KZSystem build_kz(std::vector<SpinModule> modules, Complex lambda);
KZSystem build_kz(int n, double spin, Complex lambda);

/// ln(z₁ − z₂) continued along a path in ℂ², starting on the principal branch.
Complex continued_log_difference(const PiecewisePath& path);

/// e^{(1/λ) L Ω} C for a chosen value L of ln(z₁ − z₂).
Vector two_point_solution(const Matrix& omega, Complex lambda, Complex log_difference, const Vector& c);

/// Same, with L continued along the path to its end point.
Vector two_point_solution(const Matrix& omega, Complex lambda, const PiecewisePath& path, const Vector& c);

enum class Orientation { Counterclockwise, Clockwise };

/// P_{i,i+1} · transport along the half-twist σ_i (σ_i^{-1} for Clockwise)
/// from the default braid basepoint.
Matrix braid_matrix(const KZSystem& sys, int i, double tol = 1e-10,
                    Orientation orientation = Orientation::Counterclockwise);

/// B₁, …, B_{n−1}, computed concurrently.
std::vector<Matrix> braid_matrices(const KZSystem& sys, double tol = 1e-10,
                                   Orientation orientation = Orientation::Counterclockwise);

/// Transport along the pure braid τ_ij (a closed loop, no flip).
Matrix full_twist(const KZSystem& sys, int i, int j, double tol = 1e-10);

/// Matrix of a braid word: the letters act in sequence, so (w₁, …, w_k) ↦ B_{w_k}⋯B_{w₁}.
Matrix word_matrix(std::span<const Matrix> generators, const BraidWord& word);

struct BraidRelationCheck {
  std::string relation;
  double deviation = 0.0;
};

struct BraidRelationReport {
  double braid_deviation = 0.0;        // max ‖B_iB_{i+1}B_i − B_{i+1}B_iB_{i+1}‖_F
  double commutation_deviation = 0.0;  // max ‖B_iB_j − B_jB_i‖_F, |i − j| ≥ 2
  double generator_unitarity = 0.0;    // max unitarity defect of the B_i
  double pure_unitarity = 0.0;         // max unitarity defect of the τ_ij matrices
  std::vector<BraidRelationCheck> checks;

  double max_deviation() const { return std::max(braid_deviation, commutation_deviation); }
  bool passed(double tol) const { return max_deviation() <= tol; }
};

BraidRelationReport verify_braid_relations(std::span<const Matrix> mats, int n);

struct InvariantForm {
  Matrix form;                      // G with B†GB = G for every B, tr G = dim
  double min_eigenvalue = 0.0;      // best found over the invariant forms
  double invariance_defect = 0.0;   // max ‖B†GB − G‖_F
  std::size_t dimension = 0;        // real dimension of the space of invariant forms
  std::vector<Matrix> unitarized;   // G^{1/2} B G^{-1/2}, only when G > 0
  double unitarity_defect = std::numeric_limits<double>::infinity();

  bool positive() const { return !unitarized.empty(); }
};

/// Searches the invariant Hermitian forms of the group generated by `mats`
/// for one with the largest smallest eigenvalue (trace fixed). A positive
/// form is a unitarization.
InvariantForm invariant_form(std::span<const Matrix> mats, int iterations = 4000);

}  // namespace monodromy
