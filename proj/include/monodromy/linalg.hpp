#pragma once

#include <Eigen/Dense>

#include <complex>
#include <numbers>
#include <span>

namespace monodromy {

using Complex = std::complex<double>;

/// Dense complex square matrix: gates, residues, monodromies all use it.
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr double kPi = std::numbers::pi;
inline constexpr Complex kTwoPiI{0.0, 2.0 * std::numbers::pi};

/// Throws InputError unless `m` is square, non-empty and has finite entries.
void require_square_finite(const Matrix& m, const char* what);

Matrix identity(Eigen::Index dim);
double frobenius(const Matrix& m);
Matrix commutator(const Matrix& a, const Matrix& b);

/// Kronecker product; `a` is the slow (most significant) index.
Matrix kron(const Matrix& a, const Matrix& b);

/// ‖U†U − I‖_F.
double unitarity_defect(const Matrix& u);

/// min over θ of ‖a − e^{iθ} b‖_F, which has the closed form
/// sqrt(‖a‖² + ‖b‖² − 2|tr(b†a)|).
double projective_distance(const Matrix& a, const Matrix& b);

/// Matrix exponential (scaling and squaring Padé).
Matrix expm(const Matrix& m);

/// Nearest unitary in Frobenius norm (polar factor from the SVD).
Matrix nearest_unitary(const Matrix& m);

}  // namespace monodromy
