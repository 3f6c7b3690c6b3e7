#pragma once

#include "monodromy/linalg.hpp"
#include "monodromy/paths.hpp"

#include <optional>
#include <variant>
#include <vector>

namespace monodromy {

/// Scalar logarithmic 1-forms ω_j = dh_j/h_j − dh_ref/h_ref for an
/// arrangement of affine hyperplanes h_1..h_m in ℂ^n. An absent reference
/// hyperplane sits at infinity and drops out.
class LogFormBasis {
 public:
  LogFormBasis(Eigen::Index dim, std::vector<AffineForm> hyperplanes,
               std::optional<AffineForm> reference = std::nullopt);

  /// ω_j = dz/(z − s_j) on ℂ.
  static LogFormBasis punctures(std::span<const Complex> points);

  Eigen::Index dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return hyperplanes_.size(); }
  const std::vector<AffineForm>& hyperplanes() const noexcept { return hyperplanes_; }
  const std::optional<AffineForm>& reference() const noexcept { return reference_; }

  /// ω_j(z)(v).
  Complex evaluate(std::size_t j, const Point& z, const Point& v) const;
  /// All ω_j(z)(v) at once; `out` must have size().
  void evaluate_all(const Point& z, const Point& v, std::span<Complex> out) const;

  Divisor divisor() const;

 private:
  Eigen::Index dim_;
  std::vector<AffineForm> hyperplanes_;
  std::optional<AffineForm> reference_;
};

/// One variable: Σ_j A_j dz/(z − s_j).
struct PoleResidues {
  std::vector<Complex> poles;
  std::vector<Matrix> residues;
  bool regular_at_infinity = false;
};

/// Configuration space: Σ_{i<j} Ω_ij d log(z_i − z_j). `residues` is in
/// lexicographic pair order (1,2), (1,3), …, (1,n), (2,3), …
struct PairResidues {
  int n = 2;
  std::vector<Matrix> residues;

  /// 1-based, i < j.
  const Matrix& at(int i, int j) const;
};

/// Σ_j U^j ω_j over a LogFormBasis.
struct HyperplaneResidues {
  LogFormBasis forms;
  std::vector<Matrix> residues;
};

/// Position of the pair (i, j), 1 ≤ i < j ≤ n, in lexicographic order.
std::size_t pair_index(int n, int i, int j);

/// A matrix-valued logarithmic 1-form Ω with constant residues.
class LogarithmicConnection {
 public:
  using Variant = std::variant<PoleResidues, PairResidues, HyperplaneResidues>;

  static LogarithmicConnection poles(std::vector<Complex> poles, std::vector<Matrix> residues,
                                     bool regular_at_infinity = false);
  static LogarithmicConnection pairs(int n, std::vector<Matrix> residues);
  static LogarithmicConnection hyperplanes(LogFormBasis forms, std::vector<Matrix> residues);

  const Variant& data() const noexcept { return data_; }
  Eigen::Index matrix_dim() const noexcept { return matrix_dim_; }
  Eigen::Index ambient_dim() const noexcept { return ambient_dim_; }

  /// Ω at z contracted with the tangent vector v.
  Matrix contract(const Point& z, const Point& v) const;

  Divisor divisor() const;

 private:
  explicit LogarithmicConnection(Variant data);

  Variant data_;
  Eigen::Index matrix_dim_ = 0;
  Eigen::Index ambient_dim_ = 1;
};

}  // namespace monodromy
