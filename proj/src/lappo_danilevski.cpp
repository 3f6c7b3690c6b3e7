#include "monodromy/lappo_danilevski.hpp"

#include "monodromy/errors.hpp"
#include "monodromy/fuchsian.hpp"
#include "monodromy/integrator.hpp"
#include "monodromy/parallel.hpp"

#include <cmath>
#include <sstream>

namespace monodromy {
namespace {

constexpr double kMaxLambda = 0.1;

void check_loops(const LogFormBasis& forms, std::span<const PiecewisePath> loops, std::size_t expected) {
  if (loops.size() != expected) {
    throw InputError("expected " + std::to_string(expected) + " loops, got " + std::to_string(loops.size()));
  }
  for (std::size_t j = 0; j < loops.size(); ++j) {
    if (loops[j].dim() != forms.dim()) throw InputError("loop " + std::to_string(j + 1) + " has wrong dimension");
    if (!loops[j].is_closed()) throw InputError("loop " + std::to_string(j + 1) + " is not closed");
    if ((loops[j].start() - loops.front().start()).cwiseAbs().maxCoeff() > 1e-9) {
      throw InputError("loops do not share a basepoint");
    }
  }
}

void check_series(const std::vector<std::vector<Matrix>>& coeffs, const char* what) {
  if (coeffs.empty()) throw InputError(std::string(what) + ": no generators");
  const std::size_t order = coeffs.front().size();
  if (order == 0) throw InputError(std::string(what) + ": truncation order must be at least 1");
  const Eigen::Index d = coeffs.front().front().rows();
  for (const auto& series : coeffs) {
    if (series.size() != order) throw InputError(std::string(what) + ": generators have different orders");
    for (const auto& m : series) {
      require_square_finite(m, what);
      if (m.rows() != d) throw InputError(std::string(what) + ": coefficient dimensions differ");
    }
  }
}

// Polynomial in λ with matrix coefficients, truncated at `order`.
using MatrixPoly = std::vector<Matrix>;

// (U(λ) · p(λ)) truncated, where U has no constant term.
MatrixPoly left_multiply(const std::vector<Matrix>& series, const MatrixPoly& p, int order) {
  const Eigen::Index d = p.front().rows();
  MatrixPoly out(static_cast<std::size_t>(order + 1), Matrix::Zero(d, d));
  const int available = static_cast<int>(series.size());
  for (int a = 1; a <= std::min(order, available); ++a) {
    for (int b = 0; a + b <= order; ++b) {
      if (p[b].isZero(0.0)) continue;
      out[a + b].noalias() += series[a - 1] * p[b];
    }
  }
  return out;
}

}  // namespace

WordIndex::WordIndex(std::size_t letters, int depth) : letters_(letters), depth_(depth) {
  if (letters == 0) throw InputError("WordIndex: empty alphabet");
  if (depth < 1) throw InputError("WordIndex: depth must be at least 1");
  std::size_t offset = 0;
  std::size_t count = 1;
  offsets_.push_back(0);
  for (int p = 1; p <= depth; ++p) {
    count *= letters;
    offset += count;
    offsets_.push_back(offset);
  }
}

std::size_t WordIndex::index(std::span<const std::size_t> word) const {
  if (word.empty() || static_cast<int>(word.size()) > depth_) throw InputError("WordIndex: word length out of range");
  std::size_t code = 0;
  for (std::size_t l : word) {
    if (l >= letters_) throw InputError("WordIndex: letter out of range");
    code = code * letters_ + l;
  }
  return offsets_[word.size() - 1] + code;
}

int WordIndex::length(std::size_t index) const {
  for (int p = 1; p <= depth_; ++p) {
    if (index < offsets_[p]) return p;
  }
  throw InputError("WordIndex: index out of range");
}

std::vector<std::size_t> WordIndex::word(std::size_t index) const {
  const int p = length(index);
  std::size_t code = index - offsets_[p - 1];
  std::vector<std::size_t> w(static_cast<std::size_t>(p));
  for (int k = p - 1; k >= 0; --k) {
    w[k] = code % letters_;
    code /= letters_;
  }
  return w;
}

std::size_t WordIndex::prefix(std::size_t index) const {
  const int p = length(index);
  if (p == 1) return npos;
  return offsets_[p - 2] + (index - offsets_[p - 1]) / letters_;
}

std::size_t WordIndex::last_letter(std::size_t index) const {
  return (index - offsets_[length(index) - 1]) % letters_;
}

Complex chen_integral(const LogFormBasis& forms, std::span<const std::size_t> word, const PiecewisePath& path,
                      double tol) {
  if (word.empty()) throw InputError("chen_integral: empty word");
  for (std::size_t l : word) {
    if (l >= forms.size()) throw InputError("chen_integral: form index out of range");
  }
  if (path.dim() != forms.dim()) throw InputError("chen_integral: path has wrong dimension");
  const std::size_t k = word.size();
  State y0(k + 1, Complex{0.0});
  y0[0] = 1.0;
  auto rhs = [&](const Point& z, const Point& v, const State& y, State& dy) {
    dy[0] = 0.0;
    for (std::size_t p = 1; p <= k; ++p) dy[p] = forms.evaluate(word[p - 1], z, v) * y[p - 1];
  };
  IntegrationOptions opts;
  opts.tol = tol;
  return integrate_along(path, forms.divisor(), rhs, std::move(y0), opts)[k];
}

ChenSignature chen_signature(const LogFormBasis& forms, const PiecewisePath& path, int depth, double tol) {
  if (path.dim() != forms.dim()) throw InputError("chen_signature: path has wrong dimension");
  WordIndex words(forms.size(), depth);
  const std::size_t n = words.size();
  std::vector<std::size_t> parent(n);
  std::vector<std::size_t> last(n);
  for (std::size_t w = 0; w < n; ++w) {
    const std::size_t p = words.prefix(w);
    // state slot 0 holds the empty word
    parent[w] = p == WordIndex::npos ? 0 : p + 1;
    last[w] = words.last_letter(w);
  }
  State y0(n + 1, Complex{0.0});
  y0[0] = 1.0;
  std::vector<Complex> omega(forms.size());
  auto rhs = [&](const Point& z, const Point& v, const State& y, State& dy) {
    forms.evaluate_all(z, v, omega);
    dy[0] = 0.0;
    for (std::size_t w = 0; w < n; ++w) dy[w + 1] = omega[last[w]] * y[parent[w]];
  };
  IntegrationOptions opts;
  opts.tol = tol;
  State y = integrate_along(path, forms.divisor(), rhs, std::move(y0), opts);
  return ChenSignature{std::move(words), std::vector<Complex>(y.begin() + 1, y.end())};
}

RepresentationFamily::RepresentationFamily(std::vector<std::vector<Matrix>> coefficients,
                                           std::vector<std::string> labels)
    : coefficients_(std::move(coefficients)), labels_(std::move(labels)) {
  check_series(coefficients_, "representation family");
  if (labels_.empty()) {
    for (std::size_t j = 0; j < coefficients_.size(); ++j) labels_.push_back("g" + std::to_string(j + 1));
  }
  if (labels_.size() != coefficients_.size()) throw InputError("representation family: label count mismatch");
}

RepresentationFamily RepresentationFamily::exponential(std::span<const Matrix> generators, int order,
                                                       std::vector<std::string> labels) {
  if (order < 1) throw InputError("exponential family: order must be at least 1");
  std::vector<std::vector<Matrix>> coeffs;
  for (const auto& h : generators) {
    require_square_finite(h, "exponential family");
    std::vector<Matrix> series;
    Matrix term = identity(h.rows());
    for (int k = 1; k <= order; ++k) {
      term = term * (kTwoPiI * h) / static_cast<double>(k);
      series.push_back(term);
    }
    coeffs.push_back(std::move(series));
  }
  RepresentationFamily family(std::move(coeffs), std::move(labels));
  family.exact_.assign(generators.begin(), generators.end());
  return family;
}

Matrix RepresentationFamily::evaluate(std::size_t j, Complex lambda) const {
  if (!exact_.empty()) return expm(kTwoPiI * lambda * exact_.at(j));
  const auto& series = coefficients_.at(j);
  Matrix out = identity(dim());
  Complex power = 1.0;
  for (const auto& m : series) {
    power *= lambda;
    out += power * m;
  }
  return out;
}

ConnectionFamily::ConnectionFamily(LogFormBasis forms, std::vector<std::vector<Matrix>> coefficients)
    : forms_(std::move(forms)), coefficients_(std::move(coefficients)) {
  check_series(coefficients_, "connection family");
  if (coefficients_.size() != forms_.size()) throw InputError("connection family: one residue series per form");
}

double ConnectionFamily::radius_estimate() const {
  double largest = 0.0;
  for (const auto& series : coefficients_) {
    for (const auto& u : series) largest = std::max(largest, u.norm());
  }
  const double zero = 1e-9 * std::max(largest, 1e-300);
  const int k = order();
  double radius = std::numeric_limits<double>::infinity();
  for (const auto& series : coefficients_) {
    const double last = series[k - 1].norm();
    if (last <= zero) continue;
    if (k >= 2 && series[k - 2].norm() > zero) {
      radius = std::min(radius, series[k - 2].norm() / last);
    } else {
      radius = std::min(radius, std::pow(last, -1.0 / k));
    }
  }
  return radius;
}

LogarithmicConnection evaluate_at(const ConnectionFamily& family, Complex lambda) {
  std::vector<Matrix> residues;
  for (const auto& series : family.coefficients()) {
    Matrix u = Matrix::Zero(family.dim(), family.dim());
    Complex power = 1.0;
    for (const auto& coeff : series) {
      power *= lambda;
      u += power * coeff;
    }
    residues.push_back(std::move(u));
  }
  return LogarithmicConnection::hyperplanes(family.forms(), std::move(residues));
}

std::vector<Matrix> peano_coefficients(const std::vector<std::vector<Matrix>>& residue_series,
                                       const ChenSignature& signature, int order) {
  if (order < 1) throw InputError("peano_coefficients: order must be at least 1");
  if (order > signature.words.depth()) throw InputError("peano_coefficients: signature too shallow for order");
  if (residue_series.size() != signature.words.letters()) {
    throw InputError("peano_coefficients: one residue series per form required");
  }
  const Eigen::Index d = residue_series.front().front().rows();
  const std::size_t m = residue_series.size();
  MatrixPoly total(static_cast<std::size_t>(order + 1), Matrix::Zero(d, d));
  total[0] = identity(d);

  // Depth-first over words; the product for a word extends its prefix's on the left.
  MatrixPoly unit(static_cast<std::size_t>(order + 1), Matrix::Zero(d, d));
  unit[0] = identity(d);
  std::vector<std::size_t> word;
  auto visit = [&](auto&& self, const MatrixPoly& prefix_product) -> void {
    if (static_cast<int>(word.size()) >= order) return;
    for (std::size_t l = 0; l < m; ++l) {
      word.push_back(l);
      MatrixPoly product = left_multiply(residue_series[l], prefix_product, order);
      const Complex integral = signature.at(word);
      for (int k = 1; k <= order; ++k) total[k] += integral * product[k];
      self(self, product);
      word.pop_back();
    }
  };
  visit(visit, unit);
  return total;
}

SynthesisResult synthesize(const RepresentationFamily& targets, const LogFormBasis& forms,
                           std::span<const PiecewisePath> loops, int order, double tol) {
  if (order < 1) throw InputError("synthesize: order must be at least 1");
  if (order > targets.order()) {
    throw InputError("synthesize: targets only known to order " + std::to_string(targets.order()));
  }
  const std::size_t m = targets.generators();
  if (forms.size() != m) throw InputError("synthesize: need one form per generator");
  check_loops(forms, loops, m);

  std::vector<ChenSignature> signatures(m, ChenSignature{WordIndex(m, 1), {}});
  parallel_for(m, [&](std::size_t j) { signatures[j] = chen_signature(forms, loops[j], order, tol); });

  Matrix periods(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t l = 0; l < m; ++l) periods(j, l) = signatures[j].at({l});
  }
  Eigen::FullPivLU<Matrix> lu(periods);
  if (!lu.isInvertible() || lu.rcond() < 1e-8) {
    throw InputError("synthesize: loops do not separate the forms (period matrix is singular)");
  }
  const Matrix inverse_periods = lu.inverse();

  const Eigen::Index d = targets.dim();
  std::vector<std::vector<Matrix>> u(m, std::vector<Matrix>(static_cast<std::size_t>(order), Matrix::Zero(d, d)));
  for (int k = 1; k <= order; ++k) {
    std::vector<Matrix> rhs(m);
    parallel_for(m, [&](std::size_t j) {
      // U_k is still zero here, so C_k collects only the q ≥ 2 terms.
      rhs[j] = targets.coefficient(j, k) - peano_coefficients(u, signatures[j], k)[k];
    });
    for (std::size_t l = 0; l < m; ++l) {
      Matrix acc = Matrix::Zero(d, d);
      for (std::size_t j = 0; j < m; ++j) acc += inverse_periods(l, j) * rhs[j];
      u[l][k - 1] = std::move(acc);
    }
  }

  std::vector<double> residuals(static_cast<std::size_t>(order), 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    const auto c = peano_coefficients(u, signatures[j], order);
    for (int k = 1; k <= order; ++k) {
      residuals[k - 1] = std::max(residuals[k - 1], (c[k] - targets.coefficient(j, k)).norm());
    }
  }
  ConnectionFamily family(forms, std::move(u));
  auto warnings = closeness_warnings(targets, 0.0);
  return SynthesisResult{std::move(family), std::move(residuals), std::move(periods), std::move(warnings)};
}

std::vector<std::string> closeness_warnings(const RepresentationFamily& targets, Complex lambda, double radius) {
  std::vector<std::string> out;
  for (std::size_t j = 0; j < targets.generators(); ++j) {
    const double n = targets.coefficient(j, 1).norm();
    if (n > 1.0) {
      std::ostringstream s;
      s << "first-order target of " << targets.labels()[j] << " has norm " << n << " > 1";
      out.push_back(s.str());
    }
  }
  if (std::abs(lambda) > kMaxLambda) {
    std::ostringstream s;
    s << "|lambda| = " << std::abs(lambda) << " exceeds " << kMaxLambda;
    out.push_back(s.str());
  }
  if (std::abs(lambda) >= radius) {
    std::ostringstream s;
    s << "|lambda| = " << std::abs(lambda) << " is beyond the estimated radius " << radius;
    out.push_back(s.str());
  }
  return out;
}

MatchReport verify_match(const RepresentationFamily& targets, const ConnectionFamily& family, Complex lambda,
                         std::span<const PiecewisePath> loops, double tol) {
  const std::size_t m = targets.generators();
  if (family.coefficients().size() != m) throw InputError("verify_match: generator count mismatch");
  if (family.dim() != targets.dim()) throw InputError("verify_match: matrix dimension mismatch");
  check_loops(family.forms(), loops, m);

  MatchReport report;
  report.lambda = lambda;
  report.order = family.order();
  report.radius_estimate = family.radius_estimate();
  report.warnings = closeness_warnings(targets, lambda, report.radius_estimate);

  const LogarithmicConnection conn = evaluate_at(family, lambda);
  report.monodromies.resize(m);
  report.deviations.resize(m);
  parallel_for(m, [&](std::size_t j) {
    report.monodromies[j] = transport(conn, loops[j], tol);
    report.deviations[j] = (report.monodromies[j] - targets.evaluate(j, lambda)).norm();
  });
  for (double dev : report.deviations) report.max_deviation = std::max(report.max_deviation, dev);
  const double scale = std::pow(std::abs(lambda), report.order + 1);
  report.order_constant = scale > 0.0 ? report.max_deviation / scale : 0.0;
  return report;
}

}  // namespace monodromy
