#include "monodromy/connection.hpp"

#include "monodromy/errors.hpp"

#include <string>

namespace monodromy {
namespace {

Eigen::Index common_dim(const std::vector<Matrix>& mats, const char* what) {
  if (mats.empty()) throw InputError(std::string(what) + ": no residue matrices");
  for (const auto& m : mats) {
    require_square_finite(m, what);
    if (m.rows() != mats.front().rows()) {
      throw InputError(std::string(what) + ": residue matrices differ in dimension");
    }
  }
  return mats.front().rows();
}

Complex log_derivative(const AffineForm& h, const Point& z, const Point& v) {
  return h.linear(v) / h(z);
}

}  // namespace

LogFormBasis::LogFormBasis(Eigen::Index dim, std::vector<AffineForm> hyperplanes,
                           std::optional<AffineForm> reference)
    : dim_(dim), hyperplanes_(std::move(hyperplanes)), reference_(std::move(reference)) {
  if (dim < 1) throw InputError("form basis: ambient dimension must be positive");
  if (hyperplanes_.empty()) throw InputError("form basis: no hyperplanes");
  auto check = [dim](const AffineForm& h) {
    if (h.coeffs.size() != dim) throw InputError("form basis: hyperplane has wrong dimension");
    if (!(h.coeffs.norm() > 0.0)) throw InputError("form basis: degenerate hyperplane");
  };
  for (const auto& h : hyperplanes_) check(h);
  if (reference_) check(*reference_);
}

LogFormBasis LogFormBasis::punctures(std::span<const Complex> points) {
  std::vector<AffineForm> hs;
  for (Complex s : points) hs.push_back(AffineForm{Vector::Ones(1), -s, 1.0});
  // Validates distinctness.
  (void)Divisor::points({points.begin(), points.end()});
  return LogFormBasis(1, std::move(hs));
}

Complex LogFormBasis::evaluate(std::size_t j, const Point& z, const Point& v) const {
  Complex w = log_derivative(hyperplanes_.at(j), z, v);
  if (reference_) w -= log_derivative(*reference_, z, v);
  return w;
}

void LogFormBasis::evaluate_all(const Point& z, const Point& v, std::span<Complex> out) const {
  const Complex ref = reference_ ? log_derivative(*reference_, z, v) : Complex{0.0};
  for (std::size_t j = 0; j < hyperplanes_.size(); ++j) out[j] = log_derivative(hyperplanes_[j], z, v) - ref;
}

Divisor LogFormBasis::divisor() const {
  std::vector<AffineForm> all = hyperplanes_;
  if (reference_) all.push_back(*reference_);
  if (dim_ == 1 && !reference_) {
    std::vector<Complex> pts;
    for (const auto& h : hyperplanes_) pts.push_back(-h.constant / h.coeffs(0));
    return Divisor::points(std::move(pts));
  }
  return Divisor::hyperplanes(dim_, std::move(all));
}

const Matrix& PairResidues::at(int i, int j) const { return residues.at(pair_index(n, i, j)); }

std::size_t pair_index(int n, int i, int j) {
  if (!(1 <= i && i < j && j <= n)) {
    throw InputError("pair index (" + std::to_string(i) + "," + std::to_string(j) + ") invalid for n=" +
                     std::to_string(n));
  }
  // pairs before row i: Σ_{r<i} (n − r)
  std::size_t idx = 0;
  for (int r = 1; r < i; ++r) idx += static_cast<std::size_t>(n - r);
  return idx + static_cast<std::size_t>(j - i - 1);
}

LogarithmicConnection::LogarithmicConnection(Variant data) : data_(std::move(data)) {}

LogarithmicConnection LogarithmicConnection::poles(std::vector<Complex> poles, std::vector<Matrix> residues,
                                                   bool regular_at_infinity) {
  if (poles.size() != residues.size()) throw InputError("connection: number of poles and residues differ");
  (void)Divisor::points(poles);
  const Eigen::Index d = common_dim(residues, "connection");
  if (regular_at_infinity) {
    Matrix sum = Matrix::Zero(d, d);
    for (const auto& a : residues) sum += a;
    if (sum.norm() > 1e-12) {
      throw InputError("connection: residues must sum to zero to be regular at infinity (|sum| = " +
                       std::to_string(sum.norm()) + ")");
    }
  }
  LogarithmicConnection c(PoleResidues{std::move(poles), std::move(residues), regular_at_infinity});
  c.matrix_dim_ = d;
  c.ambient_dim_ = 1;
  return c;
}

LogarithmicConnection LogarithmicConnection::pairs(int n, std::vector<Matrix> residues) {
  if (n < 2) throw InputError("connection: configuration space needs n >= 2");
  const std::size_t expected = static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2;
  if (residues.size() != expected) {
    throw InputError("connection: expected " + std::to_string(expected) + " pair residues, got " +
                     std::to_string(residues.size()));
  }
  const Eigen::Index d = common_dim(residues, "connection");
  LogarithmicConnection c(PairResidues{n, std::move(residues)});
  c.matrix_dim_ = d;
  c.ambient_dim_ = n;
  return c;
}

LogarithmicConnection LogarithmicConnection::hyperplanes(LogFormBasis forms, std::vector<Matrix> residues) {
  if (forms.size() != residues.size()) throw InputError("connection: number of forms and residues differ");
  const Eigen::Index d = common_dim(residues, "connection");
  const Eigen::Index n = forms.dim();
  LogarithmicConnection c(HyperplaneResidues{std::move(forms), std::move(residues)});
  c.matrix_dim_ = d;
  c.ambient_dim_ = n;
  return c;
}

Matrix LogarithmicConnection::contract(const Point& z, const Point& v) const {
  Matrix out = Matrix::Zero(matrix_dim_, matrix_dim_);
  if (const auto* p = std::get_if<PoleResidues>(&data_)) {
    for (std::size_t j = 0; j < p->poles.size(); ++j) out += (v(0) / (z(0) - p->poles[j])) * p->residues[j];
  } else if (const auto* q = std::get_if<PairResidues>(&data_)) {
    std::size_t k = 0;
    for (int i = 0; i < q->n; ++i) {
      for (int j = i + 1; j < q->n; ++j, ++k) {
        out += ((v(i) - v(j)) / (z(i) - z(j))) * q->residues[k];
      }
    }
  } else {
    const auto& h = std::get<HyperplaneResidues>(data_);
    std::vector<Complex> w(h.forms.size());
    h.forms.evaluate_all(z, v, w);
    for (std::size_t j = 0; j < w.size(); ++j) out += w[j] * h.residues[j];
  }
  return out;
}

Divisor LogarithmicConnection::divisor() const {
  if (const auto* p = std::get_if<PoleResidues>(&data_)) return Divisor::points(p->poles);
  if (const auto* q = std::get_if<PairResidues>(&data_)) return Divisor::configuration(q->n);
  return std::get<HyperplaneResidues>(data_).forms.divisor();
}

}  // namespace monodromy
