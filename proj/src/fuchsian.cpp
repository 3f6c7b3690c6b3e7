#include "monodromy/fuchsian.hpp"

#include "monodromy/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <sstream>

namespace monodromy {
namespace {

constexpr double kCutSnap = 1e-13;
constexpr double kCutGuard = 1e-10;

std::string format_complex(Complex z) {
  std::ostringstream s;
  s.precision(6);
  s << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
  return s.str();
}

// Jordan-structure diagnostic: algebraic vs geometric multiplicity per cluster.
std::string jordan_diagnostic(const Matrix& m, const Vector& eigenvalues) {
  std::ostringstream out;
  const double scale = std::max(1.0, m.norm());
  std::vector<bool> used(static_cast<std::size_t>(eigenvalues.size()), false);
  for (Eigen::Index a = 0; a < eigenvalues.size(); ++a) {
    if (used[a]) continue;
    int algebraic = 0;
    for (Eigen::Index b = a; b < eigenvalues.size(); ++b) {
      if (!used[b] && std::abs(eigenvalues(a) - eigenvalues(b)) < 1e-6 * scale) {
        used[b] = true;
        ++algebraic;
      }
    }
    const Matrix shifted = m - eigenvalues(a) * identity(m.rows());
    Eigen::JacobiSVD<Matrix> svd(shifted);
    const auto& sv = svd.singularValues();
    int geometric = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k) {
      if (sv(k) < 1e-7 * scale) ++geometric;
    }
    out << " eigenvalue " << format_complex(eigenvalues(a)) << ": algebraic multiplicity " << algebraic
        << ", geometric multiplicity " << geometric << ";";
  }
  return out.str();
}

Complex branch_log(Complex d, const BranchWindow& window) {
  const double upper = window.lower + 2.0 * kPi;
  double phi = std::arg(d);
  phi -= 2.0 * kPi * std::floor((phi - window.lower) / (2.0 * kPi));
  if (phi < window.lower) phi += 2.0 * kPi;
  if (phi >= upper) phi -= 2.0 * kPi;
  const double below = upper - phi;
  const double above = phi - window.lower;
  if (above < kCutSnap || below < kCutSnap) {
    phi = window.lower;
  } else if (above < kCutGuard || below < kCutGuard) {
    std::ostringstream msg;
    msg << "residue_log: eigenvalue " << format_complex(d) << " lies within " << kCutGuard
        << " of the branch cut at argument " << window.lower << "; choose a shifted window";
    throw BranchCutError(msg.str());
  }
  return Complex(std::log(std::abs(d)), phi);
}

}  // namespace

Matrix transport(const LogarithmicConnection& conn, const PiecewisePath& path, double tol,
                 IntegrationStats* stats) {
  if (path.dim() != conn.ambient_dim()) {
    throw InputError("transport: path lives in C^" + std::to_string(path.dim()) + ", connection in C^" +
                     std::to_string(conn.ambient_dim()));
  }
  const Eigen::Index d = conn.matrix_dim();
  State y0(static_cast<std::size_t>(d * d), Complex{0.0});
  for (Eigen::Index k = 0; k < d; ++k) y0[static_cast<std::size_t>(k * d + k)] = 1.0;

  auto rhs = [&conn, d](const Point& z, const Point& v, const State& y, State& dy) {
    const Matrix a = conn.contract(z, v);
    Eigen::Map<const Matrix> f(y.data(), d, d);
    Eigen::Map<Matrix> df(dy.data(), d, d);
    df.noalias() = a * f;
  };
  IntegrationOptions opts;
  opts.tol = tol;
  const State y = integrate_along(path, conn.divisor(), rhs, std::move(y0), opts, stats);
  return Eigen::Map<const Matrix>(y.data(), d, d);
}

MonodromyRepresentation monodromy_representation(const LogarithmicConnection& conn,
                                                 std::span<const PiecewisePath> loops, double tol,
                                                 std::vector<std::string> labels) {
  if (loops.empty()) throw InputError("monodromy_representation: no loops");
  if (labels.empty()) {
    for (std::size_t k = 0; k < loops.size(); ++k) labels.push_back("g" + std::to_string(k + 1));
  }
  if (labels.size() != loops.size()) throw InputError("monodromy_representation: label count mismatch");
  const Point base = loops.front().start();
  for (std::size_t k = 0; k < loops.size(); ++k) {
    if (!loops[k].is_closed()) throw InputError("monodromy_representation: loop " + labels[k] + " is not closed");
    if ((loops[k].start() - base).cwiseAbs().maxCoeff() > 1e-9) {
      throw InputError("monodromy_representation: loop " + labels[k] + " does not start at the common basepoint");
    }
  }
  MonodromyRepresentation rep;
  rep.labels = std::move(labels);
  rep.basepoint = base;
  rep.matrices.resize(loops.size());
  parallel_for(loops.size(), [&](std::size_t k) { rep.matrices[k] = transport(conn, loops[k], tol); });
  return rep;
}

double product_relation_defect(const MonodromyRepresentation& rep) {
  if (rep.matrices.empty()) return 0.0;
  Matrix p = identity(rep.matrices.front().rows());
  for (const auto& m : rep.matrices) p = p * m;
  return (p - identity(p.rows())).norm();
}

Matrix residue_log(const Matrix& m, BranchWindow window) {
  require_square_finite(m, "residue_log");
  const Eigen::Index n = m.rows();
  const double scale = std::max(1.0, m.norm());

  Matrix basis;
  Matrix basis_inverse;
  Vector eigenvalues;
  Eigen::ComplexSchur<Matrix> schur(m);
  const Matrix& t = schur.matrixT();
  const double off_diagonal = t.triangularView<Eigen::StrictlyUpper>().toDenseMatrix().norm();
  if (off_diagonal <= 1e-10 * scale) {
    // Normal matrix: unitary eigenbasis.
    basis = schur.matrixU();
    basis_inverse = basis.adjoint();
    eigenvalues = t.diagonal();
  } else {
    Eigen::ComplexEigenSolver<Matrix> eig(m);
    eigenvalues = eig.eigenvalues();
    basis = eig.eigenvectors();
    Eigen::JacobiSVD<Matrix> svd(basis);
    const auto& sv = svd.singularValues();
    const double cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1)
                                                 : std::numeric_limits<double>::infinity();
    if (!(cond < 1e8)) {
      throw DefectiveMatrixError("residue_log: matrix is not diagonalizable within tolerance (eigenbasis condition " +
                                 std::to_string(cond) + ");" + jordan_diagnostic(m, eigenvalues));
    }
    basis_inverse = basis.inverse();
  }

  Vector exponents(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (std::abs(eigenvalues(k)) < 1e-14 * scale) throw InputError("residue_log: matrix is singular");
    exponents(k) = branch_log(eigenvalues(k), window) / kTwoPiI;
  }
  return basis * exponents.asDiagonal() * basis_inverse;
}

ChernIndex chern_index(const MonodromyRepresentation& rep, BranchWindow window, double rep_tol) {
  if (rep.x4_presentation) {
    const double defect = product_relation_defect(rep);
    if (defect > rep_tol) {
      throw VerificationError("chern_index: representation violates M1M2M3M4 = I by " + std::to_string(defect));
    }
  }
  Complex sum = 0.0;
  for (const auto& m : rep.matrices) sum += residue_log(m, window).trace();
  ChernIndex out;
  out.raw = sum;
  out.value = std::lround(sum.real());
  out.residual = std::abs(sum - Complex(static_cast<double>(out.value), 0.0));
  if (out.residual > 1e-6) {
    throw VerificationError("chern_index: sum of traces " + format_complex(sum) +
                            " is not an integer; branch choices are inconsistent");
  }
  return out;
}

double curvature_residual(const LogarithmicConnection& conn, const Point& point, const Point& u,
                          const Point& v) {
  const Eigen::Index n = conn.ambient_dim();
  if (point.size() != n || u.size() != n || v.size() != n) {
    throw InputError("curvature_residual: point and tangent vectors must live in C^" + std::to_string(n));
  }
  const double d = conn.divisor().distance(point);
  if (d < 1e-12) throw DivisorContactError("curvature_residual: point lies on the divisor", d);
  return commutator(conn.contract(point, u), conn.contract(point, v)).norm();
}

IntegrabilityReport integrability_check(const LogarithmicConnection& conn) {
  const auto* pairs = std::get_if<PairResidues>(&conn.data());
  if (!pairs) throw InputError("integrability_check: needs a configuration-space (pair) connection");
  const int n = pairs->n;
  IntegrabilityReport report;
  auto record = [&](std::string name, double norm) {
    report.max_violation = std::max(report.max_violation, norm);
    report.relations.push_back({std::move(name), norm});
  };
  auto label = [](int i, int j) { return std::to_string(i) + std::to_string(j); };
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      for (int k = j + 1; k <= n; ++k) {
        const Matrix& ij = pairs->at(i, j);
        const Matrix& ik = pairs->at(i, k);
        const Matrix& jk = pairs->at(j, k);
        const std::string a = label(i, j), b = label(i, k), c = label(j, k);
        record("[O" + a + ", O" + b + " + O" + c + "]", commutator(ij, ik + jk).norm());
        record("[O" + b + ", O" + a + " + O" + c + "]", commutator(ik, ij + jk).norm());
        record("[O" + a + " + O" + b + ", O" + c + "]", commutator(ij + ik, jk).norm());
      }
    }
  }
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      for (int k = 1; k <= n; ++k) {
        for (int l = k + 1; l <= n; ++l) {
          if (k == i || k == j || l == i || l == j) continue;
          if (std::make_pair(k, l) < std::make_pair(i, j)) continue;
          record("[O" + label(i, j) + ", O" + label(k, l) + "]",
                 commutator(pairs->at(i, j), pairs->at(k, l)).norm());
        }
      }
    }
  }
  return report;
}

}  // namespace monodromy
