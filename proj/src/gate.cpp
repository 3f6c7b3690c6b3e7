#include "monodromy/gate.hpp"

#include "monodromy/errors.hpp"

#include <cmath>
#include <string>

namespace monodromy {
namespace {

int log2_exact(Eigen::Index dim) {
  int k = 0;
  Eigen::Index d = 1;
  while (d < dim) {
    d *= 2;
    ++k;
  }
  return d == dim ? k : -1;
}

Matrix from_rows(std::initializer_list<std::initializer_list<Complex>> rows) {
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : rows) {
    Eigen::Index j = 0;
    for (const auto& v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

}  // namespace

QuantumGate::QuantumGate(Matrix matrix, double unitarity_tol) : matrix_(std::move(matrix)) {
  require_square_finite(matrix_, "QuantumGate");
  qubits_ = log2_exact(matrix_.rows());
  if (qubits_ < 0) {
    throw InputError("QuantumGate: dimension " + std::to_string(matrix_.rows()) +
                     " is not a power of two");
  }
  const double defect = unitarity_defect(matrix_);
  if (!(defect <= unitarity_tol)) {
    throw InputError("QuantumGate: matrix is not unitary (defect " + std::to_string(defect) + ")");
  }
}

QuantumGate QuantumGate::operator*(const QuantumGate& rhs) const {
  if (dim() != rhs.dim()) throw InputError("QuantumGate product: dimension mismatch");
  // Unitarity defects add under products; allow for a few ulps of drift.
  return QuantumGate(matrix_ * rhs.matrix_, 1e-9);
}

QuantumGate QuantumGate::adjoint() const { return QuantumGate(matrix_.adjoint()); }

QubitState::QubitState(Vector amplitudes, double norm_tol) : amplitudes_(std::move(amplitudes)) {
  qubits_ = log2_exact(amplitudes_.size());
  if (amplitudes_.size() == 0 || qubits_ < 0) {
    throw InputError("QubitState: length must be a power of two");
  }
  if (!amplitudes_.allFinite()) throw InputError("QubitState: non-finite amplitude");
  const double n2 = amplitudes_.squaredNorm();
  if (std::abs(n2 - 1.0) > norm_tol) {
    throw InputError("QubitState: amplitudes not normalized (sum |c|^2 = " + std::to_string(n2) + ")");
  }
}

QubitState QubitState::basis(std::span<const int> bits) {
  if (bits.empty()) throw InputError("QubitState::basis: need at least one qubit");
  Eigen::Index index = 0;
  for (int b : bits) {
    if (b != 0 && b != 1) throw InputError("QubitState::basis: bits must be 0 or 1");
    index = 2 * index + b;
  }
  Vector v = Vector::Zero(Eigen::Index{1} << bits.size());
  v(index) = 1.0;
  return QubitState(std::move(v));
}

QuantumGate named_gate(GateName name, std::optional<double> param) {
  const double s = 1.0 / std::sqrt(2.0);
  const Complex i{0.0, 1.0};
  switch (name) {
    case GateName::X:
      return QuantumGate(from_rows({{0, 1}, {1, 0}}));
    case GateName::Y:
      return QuantumGate(from_rows({{0, -i}, {i, 0}}));
    case GateName::Z:
      return QuantumGate(from_rows({{1, 0}, {0, -1}}));
    case GateName::Phase: {
      if (!param) throw InputError("PHASE gate requires a parameter alpha");
      return QuantumGate(from_rows({{1, 0}, {0, std::exp(i * (kPi * *param))}}));
    }
    case GateName::H:
      return QuantumGate(from_rows({{s, s}, {-s, s}}));
    case GateName::HStd:
      return QuantumGate(from_rows({{s, s}, {s, -s}}));
  }
  throw InputError("unknown gate name");
}

QuantumGate controlled(const QuantumGate& u, int k) {
  if (k < 0) throw InputError("controlled: number of controls must be nonnegative");
  if (k == 0) return u;
  const Eigen::Index controls = Eigen::Index{1} << k;
  const Eigen::Index d = u.dim();
  Matrix m = identity(controls * d);
  // The all-ones control pattern is the last block on the diagonal.
  m.bottomRightCorner(d, d) = u.matrix();
  return QuantumGate(std::move(m));
}

QuantumGate tensor(std::span<const QuantumGate> gates) {
  if (gates.empty()) throw InputError("tensor: empty gate list");
  Matrix m = gates.front().matrix();
  for (std::size_t i = 1; i < gates.size(); ++i) m = kron(m, gates[i].matrix());
  return QuantumGate(std::move(m), 1e-9);
}

QubitState apply(const QuantumGate& g, const QubitState& s) {
  if (g.dim() != s.amplitudes().size()) {
    throw InputError("apply: gate acts on " + std::to_string(g.qubits()) + " qubits, state has " +
                     std::to_string(s.qubits()));
  }
  return QubitState(g.matrix() * s.amplitudes(), 1e-9);
}

double expectation_value(const QubitState& s) {
  if (s.amplitudes().size() != 2) throw InputError("expectation_value: state must be a single qubit");
  return std::norm(s.amplitudes()(1));
}

QuantumGate cnot() { return controlled(named_gate(GateName::X), 1); }

QuantumGate ccnot() { return controlled(named_gate(GateName::X), 2); }

QuantumGate cnot_from_projectors() {
  Matrix p0 = Matrix::Zero(2, 2);
  Matrix p1 = Matrix::Zero(2, 2);
  p0(0, 0) = 1.0;
  p1(1, 1) = 1.0;
  return QuantumGate(kron(p0, identity(2)) + kron(p1, named_gate(GateName::X).matrix()));
}

std::array<double, 3> pauli_decompose(const Matrix& u, double tol) {
  if (u.rows() != 2 || u.cols() != 2) throw InputError("pauli_decompose: need a 2x2 matrix");
  if ((u - u.adjoint()).norm() > tol) throw InputError("pauli_decompose: matrix is not Hermitian");
  if (std::abs(u.trace()) > tol) throw InputError("pauli_decompose: matrix is not traceless");
  if (unitarity_defect(u) > tol) throw InputError("pauli_decompose: matrix is not unitary");
  // tr(σ_a σ_b) = 2δ_ab
  const double x = 0.5 * (named_gate(GateName::X).matrix() * u).trace().real();
  const double y = 0.5 * (named_gate(GateName::Y).matrix() * u).trace().real();
  const double z = 0.5 * (named_gate(GateName::Z).matrix() * u).trace().real();
  return {x, y, z};
}

QuantumGate parse_gate(std::string_view spec) {
  if (spec == "X") return named_gate(GateName::X);
  if (spec == "Y") return named_gate(GateName::Y);
  if (spec == "Z") return named_gate(GateName::Z);
  if (spec == "H" || spec == "H_paper") return named_gate(GateName::H);
  if (spec == "H_std") return named_gate(GateName::HStd);
  if (spec == "CNOT") return cnot();
  if (spec == "CCNOT") return ccnot();
  if (spec.starts_with("PHASE")) {
    const auto colon = spec.find(':');
    if (colon == std::string_view::npos || colon + 1 >= spec.size()) {
      throw InputError("PHASE gate requires a parameter, e.g. PHASE:0.25");
    }
    const std::string arg(spec.substr(colon + 1));
    std::size_t used = 0;
    double alpha = 0.0;
    try {
      alpha = std::stod(arg, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != arg.size()) throw InputError("PHASE: cannot parse alpha '" + arg + "'");
    return named_gate(GateName::Phase, alpha);
  }
  throw InputError("unknown gate name '" + std::string(spec) + "'");
}

}  // namespace monodromy
