#include "monodromy/kz.hpp"

#include "monodromy/errors.hpp"
#include "monodromy/fuchsian.hpp"
#include "monodromy/parallel.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <cmath>

namespace monodromy {
namespace {

Matrix kron_all(const std::vector<Matrix>& factors) {
  Matrix out = factors.front();
  for (std::size_t k = 1; k < factors.size(); ++k) out = kron(out, factors[k]);
  return out;
}

// a on factor i, b on factor j, identity elsewhere.
Matrix embed_pair(const std::vector<SpinModule>& modules, int i, const Matrix& a, int j, const Matrix& b) {
  std::vector<Matrix> factors;
  for (int k = 1; k <= static_cast<int>(modules.size()); ++k) {
    if (k == i) {
      factors.push_back(a);
    } else if (k == j) {
      factors.push_back(b);
    } else {
      factors.push_back(identity(modules[k - 1].dim()));
    }
  }
  return kron_all(factors);
}

}  // namespace

SpinModule::SpinModule(double spin) : spin_(spin) {
  const double twice = 2.0 * spin;
  if (!(spin >= 0.0) || std::abs(twice - std::round(twice)) > 1e-12 || twice > 64) {
    throw InputError("spin must be a nonnegative half-integer, got " + std::to_string(spin));
  }
  const int d = static_cast<int>(std::lround(twice)) + 1;
  spin_ = 0.5 * (d - 1);
  e_ = Matrix::Zero(d, d);
  f_ = Matrix::Zero(d, d);
  h_ = Matrix::Zero(d, d);
  for (int k = 0; k < d; ++k) {
    const double m = spin_ - k;
    h_(k, k) = 2.0 * m;
    if (k > 0) e_(k - 1, k) = std::sqrt((spin_ - m) * (spin_ + m + 1.0));
    if (k + 1 < d) f_(k + 1, k) = std::sqrt((spin_ + m) * (spin_ - m + 1.0));
  }
}

double SpinModule::commutation_defect() const {
  return std::max({(commutator(h_, e_) - 2.0 * e_).norm(), (commutator(h_, f_) + 2.0 * f_).norm(),
                   (commutator(e_, f_) - h_).norm()});
}

Matrix casimir_omega(const SpinModule& a, const SpinModule& b) {
  return kron(a.e(), b.f()) + kron(a.f(), b.e()) + 0.5 * kron(a.h(), b.h());
}

double casimir_defect(const SpinModule& a, const SpinModule& b) {
  const Matrix omega = casimir_omega(a, b);
  const Matrix ia = identity(a.dim());
  const Matrix ib = identity(b.dim());
  double worst = 0.0;
  for (auto [x, y] : {std::pair{&a.e(), &b.e()}, std::pair{&a.f(), &b.f()}, std::pair{&a.h(), &b.h()}}) {
    worst = std::max(worst, commutator(omega, kron(*x, ib) + kron(ia, *y)).norm());
  }
  return worst;
}

Matrix embed(const std::vector<SpinModule>& modules, int i, const Matrix& x) {
  if (i < 1 || i > static_cast<int>(modules.size())) throw InputError("embed: factor index out of range");
  if (x.rows() != modules[i - 1].dim() || x.cols() != x.rows()) throw InputError("embed: operator has wrong size");
  std::vector<Matrix> factors;
  for (int k = 1; k <= static_cast<int>(modules.size()); ++k) {
    factors.push_back(k == i ? x : identity(modules[k - 1].dim()));
  }
  return kron_all(factors);
}

Matrix flip_operator(const std::vector<SpinModule>& modules, int i) {
  const int n = static_cast<int>(modules.size());
  if (i < 1 || i >= n) throw InputError("flip_operator: factor index out of range");
  if (modules[i - 1].dim() != modules[i].dim()) throw InputError("flip_operator: factors differ in dimension");
  std::vector<Eigen::Index> dims;
  Eigen::Index total = 1;
  for (const auto& m : modules) {
    dims.push_back(m.dim());
    total *= m.dim();
  }
  Matrix p = Matrix::Zero(total, total);
  std::vector<Eigen::Index> digits(static_cast<std::size_t>(n));
  for (Eigen::Index col = 0; col < total; ++col) {
    Eigen::Index rest = col;
    for (int k = n - 1; k >= 0; --k) {
      digits[k] = rest % dims[k];
      rest /= dims[k];
    }
    std::swap(digits[i - 1], digits[i]);
    Eigen::Index row = 0;
    for (int k = 0; k < n; ++k) row = row * dims[k] + digits[k];
    p(row, col) = 1.0;
  }
  return p;
}

KZSystem::KZSystem(std::vector<SpinModule> modules, Complex lambda)
    : modules_(std::move(modules)), lambda_(lambda), dim_(1) {
  if (modules_.size() < 2) throw InputError("KZ system needs at least two points");
  if (!std::isfinite(lambda.real()) || !std::isfinite(lambda.imag()) || lambda == Complex(0.0)) {
    throw InputError("KZ coupling lambda must be finite and nonzero");
  }
  for (const auto& m : modules_) dim_ *= m.dim();
  const int count = n();
  for (int i = 1; i <= count; ++i) {
    for (int j = i + 1; j <= count; ++j) {
      const SpinModule& a = modules_[i - 1];
      const SpinModule& b = modules_[j - 1];
      omegas_.push_back(embed_pair(modules_, i, a.e(), j, b.f()) + embed_pair(modules_, i, a.f(), j, b.e()) +
                        0.5 * embed_pair(modules_, i, a.h(), j, b.h()));
    }
  }
}

const Matrix& KZSystem::omega(int i, int j) const { return omegas_.at(pair_index(n(), i, j)); }

bool KZSystem::identical_modules() const {
  for (const auto& m : modules_) {
    if (!(m == modules_.front())) return false;
  }
  return true;
}

LogarithmicConnection KZSystem::to_connection() const {
  std::vector<Matrix> residues;
  for (const auto& o : omegas_) residues.push_back(o / lambda_);
  return LogarithmicConnection::pairs(n(), std::move(residues));
}

KZSystem build_kz(std::vector<SpinModule> modules, Complex lambda) {
  KZSystem sys(std::move(modules), lambda);
  const auto report = integrability_check(sys.to_connection());
  if (!report.passed(1e-10 * std::max(1.0, 1.0 / std::abs(lambda)))) {
    throw VerificationError("build_kz: connection is not flat (violation " + std::to_string(report.max_violation) +
                            ")");
  }
  return sys;
}

KZSystem build_kz(int n, double spin, Complex lambda) {
  if (n < 2) throw InputError("KZ system needs n >= 2");
  return build_kz(std::vector<SpinModule>(static_cast<std::size_t>(n), SpinModule(spin)), lambda);
}

Complex continued_log_difference(const PiecewisePath& path) {
  if (path.dim() != 2) throw InputError("two-point continuation needs a path in C^2");
  constexpr int kArcSamples = 4096;
  auto diff = [](const Point& z) { return z(0) - z(1); };
  const Complex w0 = diff(path.start());
  if (std::abs(w0) < 1e-14) throw InputError("two-point continuation: path starts on z1 = z2");
  Complex log = std::log(w0);
  Divisor divisor = Divisor::configuration(2);
  if (min_clearance(path, divisor) < 1e-12) {
    throw DivisorContactError("two-point continuation: path meets z1 = z2", min_clearance(path, divisor));
  }
  for (const auto& seg : path.segments()) {
    if (std::holds_alternative<LineSegment>(seg)) {
      // z1 − z2 is affine along a line and avoids 0, so its argument moves by less than π.
      log += std::log(diff(segment_point(seg, 1.0)) / diff(segment_point(seg, 0.0)));
    } else {
      Complex prev = diff(segment_point(seg, 0.0));
      for (int k = 1; k <= kArcSamples; ++k) {
        const Complex next = diff(segment_point(seg, double(k) / kArcSamples));
        log += std::log(next / prev);
        prev = next;
      }
    }
  }
  return log;
}

Vector two_point_solution(const Matrix& omega, Complex lambda, Complex log_difference, const Vector& c) {
  require_square_finite(omega, "two_point_solution");
  if (c.size() != omega.rows()) throw InputError("two_point_solution: vector has wrong size");
  if (lambda == Complex(0.0)) throw InputError("two_point_solution: lambda must be nonzero");
  return expm((log_difference / lambda) * omega) * c;
}

Vector two_point_solution(const Matrix& omega, Complex lambda, const PiecewisePath& path, const Vector& c) {
  return two_point_solution(omega, lambda, continued_log_difference(path), c);
}

Matrix braid_matrix(const KZSystem& sys, int i, double tol, Orientation orientation) {
  if (!sys.identical_modules()) throw InputError("braid_matrix: braiding needs identical modules");
  const int n = sys.n();
  if (i < 1 || i >= n) throw InputError("braid_matrix: generator index out of range");
  const BraidWord word{BraidLetter{i, orientation == Orientation::Counterclockwise ? 1 : -1}};
  const Matrix t = transport(sys.to_connection(), braid_word_path(n, word), tol);
  return flip_operator(sys.modules(), i) * t;
}

std::vector<Matrix> braid_matrices(const KZSystem& sys, double tol, Orientation orientation) {
  const std::size_t count = static_cast<std::size_t>(sys.n() - 1);
  std::vector<Matrix> out(count);
  parallel_for(count, [&](std::size_t k) { out[k] = braid_matrix(sys, static_cast<int>(k) + 1, tol, orientation); });
  return out;
}

Matrix full_twist(const KZSystem& sys, int i, int j, double tol) {
  return transport(sys.to_connection(), braid_word_path(sys.n(), pure_braid_word(sys.n(), i, j)), tol);
}

Matrix word_matrix(std::span<const Matrix> generators, const BraidWord& word) {
  if (generators.empty()) throw InputError("word_matrix: no generators");
  Matrix out = identity(generators.front().rows());
  for (const auto& letter : word) {
    if (letter.generator < 1 || letter.generator > static_cast<int>(generators.size())) {
      throw InputError("word_matrix: generator index out of range");
    }
    const Matrix& b = generators[letter.generator - 1];
    if (letter.power == 1) {
      out = b * out;
    } else if (letter.power == -1) {
      out = b.inverse() * out;
    } else {
      throw InputError("word_matrix: letters must have power +1 or -1");
    }
  }
  return out;
}

BraidRelationReport verify_braid_relations(std::span<const Matrix> mats, int n) {
  if (n < 2) throw InputError("verify_braid_relations: need n >= 2");
  if (static_cast<int>(mats.size()) != n - 1) {
    throw InputError("verify_braid_relations: expected " + std::to_string(n - 1) + " matrices");
  }
  for (const auto& m : mats) {
    require_square_finite(m, "verify_braid_relations");
    if (m.rows() != mats.front().rows()) throw InputError("verify_braid_relations: matrices differ in size");
  }
  BraidRelationReport report;
  for (int i = 1; i + 1 <= n - 1; ++i) {
    const Matrix& a = mats[i - 1];
    const Matrix& b = mats[i];
    const double dev = (a * b * a - b * a * b).norm();
    report.braid_deviation = std::max(report.braid_deviation, dev);
    report.checks.push_back({"s" + std::to_string(i) + " s" + std::to_string(i + 1) + " s" + std::to_string(i) +
                                 " = s" + std::to_string(i + 1) + " s" + std::to_string(i) + " s" +
                                 std::to_string(i + 1),
                             dev});
  }
  for (int i = 1; i <= n - 1; ++i) {
    for (int j = i + 2; j <= n - 1; ++j) {
      const double dev = commutator(mats[i - 1], mats[j - 1]).norm();
      report.commutation_deviation = std::max(report.commutation_deviation, dev);
      report.checks.push_back({"s" + std::to_string(i) + " s" + std::to_string(j) + " = s" + std::to_string(j) +
                                   " s" + std::to_string(i),
                               dev});
    }
  }
  for (const auto& m : mats) report.generator_unitarity = std::max(report.generator_unitarity, unitarity_defect(m));
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      report.pure_unitarity =
          std::max(report.pure_unitarity, unitarity_defect(word_matrix(mats, pure_braid_word(n, i, j))));
    }
  }
  return report;
}

InvariantForm invariant_form(std::span<const Matrix> mats, int iterations) {
  if (mats.empty()) throw InputError("invariant_form: no matrices");
  const Eigen::Index d = mats.front().rows();
  for (const auto& m : mats) {
    require_square_finite(m, "invariant_form");
    if (m.rows() != d) throw InputError("invariant_form: matrices differ in size");
  }
  // Orthonormal real basis of the Hermitian d×d matrices.
  std::vector<Matrix> herm;
  const double s = 1.0 / std::sqrt(2.0);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = a; b < d; ++b) {
      Matrix e = Matrix::Zero(d, d);
      if (a == b) {
        e(a, a) = 1.0;
        herm.push_back(e);
        continue;
      }
      e(a, b) = s;
      e(b, a) = s;
      herm.push_back(e);
      e(a, b) = Complex(0.0, s);
      e(b, a) = Complex(0.0, -s);
      herm.push_back(e);
    }
  }
  const auto p = static_cast<Eigen::Index>(herm.size());
  const Eigen::Index block = 2 * d * d;
  Eigen::MatrixXd a(block * static_cast<Eigen::Index>(mats.size()), p);
  for (std::size_t m = 0; m < mats.size(); ++m) {
    for (Eigen::Index k = 0; k < p; ++k) {
      const Matrix r = mats[m].adjoint() * herm[k] * mats[m] - herm[k];
      for (Eigen::Index e = 0; e < d * d; ++e) {
        a(static_cast<Eigen::Index>(m) * block + e, k) = r.data()[e].real();
        a(static_cast<Eigen::Index>(m) * block + d * d + e, k) = r.data()[e].imag();
      }
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cutoff = 1e-9 * std::max(1.0, sv(0));
  std::vector<Matrix> basis;
  for (Eigen::Index k = 0; k < p; ++k) {
    if (k < sv.size() && sv(k) > cutoff) continue;
    Matrix h = Matrix::Zero(d, d);
    for (Eigen::Index l = 0; l < p; ++l) h += svd.matrixV()(l, k) * herm[l];
    basis.push_back(std::move(h));
  }

  InvariantForm out;
  out.dimension = basis.size();
  out.min_eigenvalue = -std::numeric_limits<double>::infinity();
  const auto r = static_cast<Eigen::Index>(basis.size());
  Eigen::VectorXd trace(r);
  for (Eigen::Index k = 0; k < r; ++k) trace(k) = basis[k].trace().real();
  if (r == 0 || trace.norm() < 1e-12) {
    out.form = Matrix::Zero(d, d);
    return out;
  }
  const double target = static_cast<double>(d);
  auto form_of = [&](const Eigen::VectorXd& c) {
    Matrix g = Matrix::Zero(d, d);
    for (Eigen::Index k = 0; k < r; ++k) g += c(k) * basis[k];
    return Matrix(0.5 * (g + g.adjoint()));
  };
  // Projected supergradient ascent on the smallest eigenvalue, trace fixed.
  Eigen::VectorXd c = trace * (target / trace.squaredNorm());
  Eigen::VectorXd best = c;
  for (int it = 0; it < iterations; ++it) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(form_of(c));
    const double lowest = eig.eigenvalues()(0);
    if (lowest > out.min_eigenvalue) {
      out.min_eigenvalue = lowest;
      best = c;
    }
    const Vector v = eig.eigenvectors().col(0);
    Eigen::VectorXd g(r);
    for (Eigen::Index k = 0; k < r; ++k) g(k) = (v.adjoint() * basis[k] * v)(0, 0).real();
    g -= trace * (trace.dot(g) / trace.squaredNorm());
    if (g.norm() < 1e-14) break;
    c += (0.5 / std::sqrt(1.0 + it)) * g / g.norm();
    c -= trace * ((trace.dot(c) - target) / trace.squaredNorm());
  }
  out.form = form_of(best);
  for (const auto& m : mats) {
    out.invariance_defect = std::max(out.invariance_defect, (m.adjoint() * out.form * m - out.form).norm());
  }
  if (out.min_eigenvalue > 1e-6) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(out.form);
    const Matrix root = eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().asDiagonal() * eig.eigenvectors().adjoint();
    const Matrix root_inv =
        eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() * eig.eigenvectors().adjoint();
    out.unitarity_defect = 0.0;
    for (const auto& m : mats) {
      out.unitarized.push_back(root * m * root_inv);
      out.unitarity_defect = std::max(out.unitarity_defect, unitarity_defect(out.unitarized.back()));
    }
  }
  return out;
}

}  // namespace monodromy
