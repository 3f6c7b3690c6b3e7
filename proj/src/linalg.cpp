#include "monodromy/linalg.hpp"

#include "monodromy/errors.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <string>

namespace monodromy {

void require_square_finite(const Matrix& m, const char* what) {
  if (m.rows() == 0 || m.rows() != m.cols()) {
    throw InputError(std::string(what) + ": expected a non-empty square matrix, got " +
                     std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  if (!m.allFinite()) {
    throw InputError(std::string(what) + ": matrix has non-finite entries");
  }
}

Matrix identity(Eigen::Index dim) { return Matrix::Identity(dim, dim); }

double frobenius(const Matrix& m) { return m.norm(); }

Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

double unitarity_defect(const Matrix& u) {
  return (u.adjoint() * u - identity(u.cols())).norm();
}

double projective_distance(const Matrix& a, const Matrix& b) {
  const double overlap = std::abs((b.adjoint() * a).trace());
  const double sq = a.squaredNorm() + b.squaredNorm() - 2.0 * overlap;
  return std::sqrt(std::max(0.0, sq));
}

Matrix expm(const Matrix& m) { return m.exp(); }

Matrix nearest_unitary(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

}  // namespace monodromy
