#pragma once

#include "monodromy/linalg.hpp"

#include <array>
#include <initializer_list>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace monodromy {

inline constexpr double kDefaultUnitarityTol = 1e-10;

/// A unitary 2^k × 2^k matrix acting on k qubits. Validated on construction.
class QuantumGate {
 public:
  explicit QuantumGate(Matrix matrix, double unitarity_tol = kDefaultUnitarityTol);

  const Matrix& matrix() const noexcept { return matrix_; }
  int qubits() const noexcept { return qubits_; }
  Eigen::Index dim() const noexcept { return matrix_.rows(); }

  QuantumGate operator*(const QuantumGate& rhs) const;
  QuantumGate adjoint() const;

 private:
  Matrix matrix_;
  int qubits_;
};

/// Normalized amplitude vector of an n-qubit register; basis index bits are
/// ordered d_0 d_1 … d_{n-1} with d_0 most significant.
class QubitState {
 public:
  explicit QubitState(Vector amplitudes, double norm_tol = 1e-10);

  /// Computational basis state |bits⟩ (bits[0] is the leading qubit).
  static QubitState basis(std::span<const int> bits);
  static QubitState basis(std::initializer_list<int> bits) {
    return basis(std::span<const int>(bits.begin(), bits.size()));
  }

  const Vector& amplitudes() const noexcept { return amplitudes_; }
  int qubits() const noexcept { return qubits_; }

 private:
  Vector amplitudes_;
  int qubits_;
};

enum class GateName { X, Y, Z, Phase, H, HStd };

/// Literal single-qubit matrices. `H` is the form
/// (1/√2)[[1,1],[−1,1]], `HStd` the conventional (1/√2)[[1,1],[1,−1]],
/// `Phase` is diag(1, e^{iπα}).
QuantumGate named_gate(GateName name, std::optional<double> param = std::nullopt);

/// Λ_k(U): controls are the k leading qubits, U acts on the trailing register
/// iff every control bit is 1.
QuantumGate controlled(const QuantumGate& u, int k);

/// Kronecker product in list order.
QuantumGate tensor(std::span<const QuantumGate> gates);

QubitState apply(const QuantumGate& g, const QubitState& s);

/// ⟨N⟩ = |β|² for a single qubit α|0⟩ + β|1⟩.
double expectation_value(const QubitState& s);

QuantumGate cnot();
QuantumGate ccnot();

/// |0⟩⟨0|⊗1 + |1⟩⟨1|⊗σ_x assembled from projectors.
QuantumGate cnot_from_projectors();

/// Coefficients (x, y, z) with U = xσ_x + yσ_y + zσ_z for a traceless
/// Hermitian unitary 2×2 U. Throws InputError if U is not of that kind.
std::array<double, 3> pauli_decompose(const Matrix& u, double tol = 1e-10);

/// Parses a CLI gate name: X, Y, Z, H, H_std, PHASE:<alpha>, CNOT, CCNOT.
QuantumGate parse_gate(std::string_view spec);

}  // namespace monodromy
