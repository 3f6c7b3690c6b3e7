#pragma once

#include "monodromy/connection.hpp"

#include <initializer_list>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace monodromy {

// Iterated integrals follow Chen's ordering: for the word (j₁, …, j_k)
//   ∫_γ ω_{j₁}⋯ω_{j_k} = ∫_{0<t₁<⋯<t_k<1} ω_{j₁}(t₁)⋯ω_{j_k}(t_k),
// so the first form is integrated first. With left action dF = ΩF the
// word (j₁, …, j_k) multiplies the residues as U^{j_k}⋯U^{j₁}.

/// Words of length 1..depth over m letters, numbered length by length and
/// lexicographically within a length (first letter most significant).
class WordIndex {
 public:
  WordIndex(std::size_t letters, int depth);

  std::size_t letters() const noexcept { return letters_; }
  int depth() const noexcept { return depth_; }
  std::size_t size() const noexcept { return offsets_.back(); }

  std::size_t index(std::span<const std::size_t> word) const;
  std::vector<std::size_t> word(std::size_t index) const;
  int length(std::size_t index) const;
  /// Index of the word without its last letter; npos for single letters.
  std::size_t prefix(std::size_t index) const;
  std::size_t last_letter(std::size_t index) const;

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

 private:
  std::size_t letters_;
  int depth_;
  std::vector<std::size_t> offsets_;  // offsets_[p-1] = first index of length p
};

/// All iterated integrals of a path up to a given depth.
struct ChenSignature {
  WordIndex words;
  std::vector<Complex> values;

  Complex at(std::span<const std::size_t> word) const { return values[words.index(word)]; }
  Complex at(std::initializer_list<std::size_t> word) const {
    return at(std::span<const std::size_t>(word.begin(), word.size()));
  }
};

/// ∫_γ ω_{j₁}⋯ω_{j_k} via the (k+1)-dimensional triangular system
/// y₀ = 1, y_p' = ω_{j_p} y_{p−1}.
Complex chen_integral(const LogFormBasis& forms, std::span<const std::size_t> word, const PiecewisePath& path,
                      double tol = 1e-11);

/// Every word up to `depth` in one integration over the word tree.
ChenSignature chen_signature(const LogFormBasis& forms, const PiecewisePath& path, int depth,
                             double tol = 1e-11);

/// ρ_λ(γ_j) = 1 + Σ_k λ^k M_k^j for each generator j.
class RepresentationFamily {
 public:
  /// coefficients[j][k-1] = M_k^j.
  RepresentationFamily(std::vector<std::vector<Matrix>> coefficients, std::vector<std::string> labels = {});

  /// Targets e^{2πiλH_j}, expanded to `order`. evaluate() returns the exact exponential.
  static RepresentationFamily exponential(std::span<const Matrix> generators, int order,
                                          std::vector<std::string> labels = {});

  std::size_t generators() const noexcept { return coefficients_.size(); }
  int order() const noexcept { return static_cast<int>(coefficients_.front().size()); }
  Eigen::Index dim() const noexcept { return coefficients_.front().front().rows(); }
  const Matrix& coefficient(std::size_t j, int k) const { return coefficients_.at(j).at(k - 1); }
  const std::vector<std::vector<Matrix>>& coefficients() const noexcept { return coefficients_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  /// Empty unless built by exponential().
  const std::vector<Matrix>& generators_exact() const noexcept { return exact_; }

  Matrix evaluate(std::size_t j, Complex lambda) const;

 private:
  std::vector<std::vector<Matrix>> coefficients_;
  std::vector<std::string> labels_;
  std::vector<Matrix> exact_;
};

/// Ω(λ) = Σ_j U^j(λ) ω_j with U^j(λ) = Σ_k λ^k U_k^j.
class ConnectionFamily {
 public:
  /// coefficients[j][k-1] = U_k^j.
  ConnectionFamily(LogFormBasis forms, std::vector<std::vector<Matrix>> coefficients);

  const LogFormBasis& forms() const noexcept { return forms_; }
  int order() const noexcept { return static_cast<int>(coefficients_.front().size()); }
  Eigen::Index dim() const noexcept { return coefficients_.front().front().rows(); }
  const Matrix& coefficient(std::size_t j, int k) const { return coefficients_.at(j).at(k - 1); }
  const std::vector<std::vector<Matrix>>& coefficients() const noexcept { return coefficients_; }

  /// Convergence radius guess from the trailing coefficients (ratio test,
  /// root test when only one order exists). Infinite if they vanish.
  double radius_estimate() const;

 private:
  LogFormBasis forms_;
  std::vector<std::vector<Matrix>> coefficients_;
};

/// Residues U^j(λ) summed from the truncated series.
LogarithmicConnection evaluate_at(const ConnectionFamily& family, Complex lambda);

/// Monodromy series coefficients C_1..C_order of the family around a loop
/// with the given signature: C_k = Σ over words and compositions of k.
/// Index 0 of the result is the identity.
std::vector<Matrix> peano_coefficients(const std::vector<std::vector<Matrix>>& residue_series,
                                       const ChenSignature& signature, int order);

struct SynthesisResult {
  ConnectionFamily family;
  /// max_j ‖C_k^j − M_k^j‖_F after re-expanding the synthesized family, k = 1..K.
  std::vector<double> order_residuals;
  /// P_jl = ∫_{γ_j} ω_l.
  Matrix periods;
  std::vector<std::string> warnings;
};

/// Solves Σ_l P_jl U_k^l = M_k^j − (terms built from U_1..U_{k−1}) order by
/// order, k = 1..order.
SynthesisResult synthesize(const RepresentationFamily& targets, const LogFormBasis& forms,
                           std::span<const PiecewisePath> loops, int order, double tol = 1e-11);

struct MatchReport {
  Complex lambda;
  int order = 0;
  std::vector<double> deviations;  // ‖M_numeric − ρ_λ(γ_j)‖_F per generator
  double max_deviation = 0.0;
  double order_constant = 0.0;  // max_deviation / |λ|^{order+1}
  double radius_estimate = 0.0;
  std::vector<Matrix> monodromies;
  std::vector<std::string> warnings;
};

/// Forward transport of evaluate_at(family, λ) around each loop compared with
/// the target family at λ.
MatchReport verify_match(const RepresentationFamily& targets, const ConnectionFamily& family, Complex lambda,
                         std::span<const PiecewisePath> loops, double tol = 1e-11);

/// |λ| limits and first-order target sizes that the synthesis expects.
std::vector<std::string> closeness_warnings(const RepresentationFamily& targets, Complex lambda,
                                            double radius = std::numeric_limits<double>::infinity());

}  // namespace monodromy
