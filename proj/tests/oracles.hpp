#pragma once

// Reference computations used by the tests. Nothing here calls the library's
// numerics; only its value types are shared.

#include "monodromy/linalg.hpp"
#include "monodromy/paths.hpp"

#include <Eigen/QR>

#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

using monodromy::Complex;
using monodromy::Matrix;
using monodromy::Vector;

inline constexpr double kPi = 3.141592653589793238462643383279502884;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(gen_); }
  Complex complex_normal() { return {normal(), normal()}; }

  Matrix gaussian(Eigen::Index d) {
    Matrix m(d, d);
    for (Eigen::Index r = 0; r < d; ++r) {
      for (Eigen::Index c = 0; c < d; ++c) m(r, c) = complex_normal();
    }
    return m;
  }

  /// Hermitian with Frobenius norm `norm`.
  Matrix hermitian(Eigen::Index d, double norm) {
    Matrix g = gaussian(d);
    Matrix h = 0.5 * (g + g.adjoint());
    return h * (norm / h.norm());
  }

  Matrix traceless_hermitian(Eigen::Index d, double norm) {
    Matrix h = hermitian(d, 1.0);
    h -= (h.trace() / static_cast<double>(d)) * Matrix::Identity(d, d);
    return h * (norm / h.norm());
  }

  /// Haar unitary: QR of a Gaussian with the R-diagonal phases removed.
  Matrix unitary(Eigen::Index d) {
    Eigen::HouseholderQR<Matrix> qr(gaussian(d));
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR();
    for (Eigen::Index k = 0; k < d; ++k) q.col(k) *= std::polar(1.0, std::arg(r(k, k)));
    return q;
  }

  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

/// Taylor series with scaling and squaring.
inline Matrix taylor_expm(const Matrix& a) {
  const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  while (norm / std::pow(2.0, squarings) > 0.25) ++squarings;
  const Matrix scaled = a / std::pow(2.0, squarings);
  Matrix term = Matrix::Identity(a.rows(), a.cols());
  Matrix sum = term;
  for (int k = 1; k < 40; ++k) {
    term = term * scaled / static_cast<double>(k);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return out;
}

inline Matrix pauli(char which) {
  Matrix m(2, 2);
  switch (which) {
    case 'x':
      m << 0, 1, 1, 0;
      break;
    case 'y':
      m << 0, Complex(0, -1), Complex(0, 1), 0;
      break;
    default:
      m << 1, 0, 0, -1;
  }
  return m;
}

/// Swap of two equal factors of dimension d.
inline Matrix swap(Eigen::Index d) {
  Matrix p = Matrix::Zero(d * d, d * d);
  for (Eigen::Index a = 0; a < d; ++a) {
    for (Eigen::Index b = 0; b < d; ++b) p(b * d + a, a * d + b) = 1.0;
  }
  return p;
}

/// Brute-force min over a θ grid refined by golden section.
inline double projective_distance_search(const Matrix& a, const Matrix& b) {
  auto f = [&](double t) { return (a - std::polar(1.0, t) * b).norm(); };
  double best_t = 0.0;
  double best = f(0.0);
  for (int k = 1; k < 3600; ++k) {
    const double t = 2.0 * kPi * k / 3600.0;
    if (f(t) < best) {
      best = f(t);
      best_t = t;
    }
  }
  double lo = best_t - 2.0 * kPi / 3600.0;
  double hi = best_t + 2.0 * kPi / 3600.0;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 100; ++it) {
    const double x1 = hi - g * (hi - lo);
    const double x2 = lo + g * (hi - lo);
    if (f(x1) < f(x2)) {
      hi = x2;
    } else {
      lo = x1;
    }
  }
  return f(0.5 * (lo + hi));
}

/// Gauss-Legendre nodes and weights on [0, 1].
inline void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(static_cast<std::size_t>(n), 0.0);
  w.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < n; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    x[i] = 0.5 * (1.0 - z);
    w[i] = 1.0 / ((1.0 - z * z) * dp * dp);
  }
}

/// Samples z(t) and z'(t) of a segment without the library's evaluators.
struct SegmentEval {
  monodromy::Point z;
  monodromy::Point dz;
};

inline SegmentEval eval_segment(const monodromy::PathSegment& seg, double t) {
  if (const auto* line = std::get_if<monodromy::LineSegment>(&seg)) {
    return {line->start + t * (line->end - line->start), line->end - line->start};
  }
  const auto& arc = std::get<monodromy::ArcSegment>(seg);
  SegmentEval e{arc.base, monodromy::Point::Zero(arc.base.size())};
  for (const auto& m : arc.movers) {
    const double theta = m.start_angle + arc.sweep * t;
    e.z(m.coord) = m.center + std::polar(m.radius, theta);
    e.dz(m.coord) = Complex(0.0, arc.sweep) * std::polar(m.radius, theta);
  }
  return e;
}

/// ∫_γ f(z)(dz) by composite Gauss-Legendre (pieces per segment).
inline Complex line_integral(const monodromy::PiecewisePath& path,
                             const std::function<Complex(const monodromy::Point&, const monodromy::Point&)>& f,
                             int pieces = 400, int order = 12) {
  std::vector<double> x, w;
  gauss_legendre(order, x, w);
  Complex total = 0.0;
  for (const auto& seg : path.segments()) {
    for (int p = 0; p < pieces; ++p) {
      for (int k = 0; k < order; ++k) {
        const double t = (p + x[k]) / pieces;
        const auto e = eval_segment(seg, t);
        total += (w[k] / pieces) * f(e.z, e.dz);
      }
    }
  }
  return total;
}

/// Winding number of a planar path around `point` from dense argument increments.
inline double winding(const monodromy::PiecewisePath& path, Complex point, int per_segment = 20000) {
  double total = 0.0;
  for (const auto& seg : path.segments()) {
    Complex prev = eval_segment(seg, 0.0).z(0) - point;
    for (int k = 1; k <= per_segment; ++k) {
      const Complex next = eval_segment(seg, double(k) / per_segment).z(0) - point;
      total += std::arg(next / prev);
      prev = next;
    }
  }
  return total / (2.0 * kPi);
}

/// Iterated integrals of all words over `m` scalar forms up to `depth`: a
/// fixed-step RK4 march of y_w' = ω_last(w) y_prefix(w).
inline std::vector<std::vector<Complex>> iterated_integrals_rk4(
    const monodromy::PiecewisePath& path, int m, int depth,
    const std::function<Complex(int, const monodromy::Point&, const monodromy::Point&)>& form,
    int steps_per_segment = 4000) {
  // Words encoded in base m with lengths 1..depth; state[0] is the empty word.
  std::vector<int> len{0};
  std::vector<int> last{-1};
  std::vector<std::size_t> parent{0};
  std::vector<std::vector<int>> words{{}};
  for (int l = 1; l <= depth; ++l) {
    const std::size_t count = words.size();
    for (std::size_t p = 0; p < count; ++p) {
      if (len[p] != l - 1) continue;
      for (int a = 0; a < m; ++a) {
        auto w = words[p];
        w.push_back(a);
        words.push_back(w);
        len.push_back(l);
        last.push_back(a);
        parent.push_back(p);
      }
    }
  }
  const std::size_t n = words.size();
  std::vector<Complex> y(n, 0.0);
  y[0] = 1.0;
  auto deriv = [&](const monodromy::PathSegment& seg, double t, const std::vector<Complex>& s) {
    const auto e = eval_segment(seg, t);
    std::vector<Complex> om(static_cast<std::size_t>(m));
    for (int a = 0; a < m; ++a) om[a] = form(a, e.z, e.dz);
    std::vector<Complex> d(n, 0.0);
    for (std::size_t k = 1; k < n; ++k) d[k] = om[last[k]] * s[parent[k]];
    return d;
  };
  for (const auto& seg : path.segments()) {
    const double h = 1.0 / steps_per_segment;
    for (int k = 0; k < steps_per_segment; ++k) {
      const double t = k * h;
      auto add = [&](const std::vector<Complex>& a, const std::vector<Complex>& b, double c) {
        std::vector<Complex> r(n);
        for (std::size_t i = 0; i < n; ++i) r[i] = a[i] + c * b[i];
        return r;
      };
      const auto k1 = deriv(seg, t, y);
      const auto k2 = deriv(seg, t + h / 2, add(y, k1, h / 2));
      const auto k3 = deriv(seg, t + h / 2, add(y, k2, h / 2));
      const auto k4 = deriv(seg, t + h, add(y, k3, h));
      for (std::size_t i = 0; i < n; ++i) y[i] += h / 6 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
  }
  // Return indexed by [length][code] with code base m, first letter most significant.
  std::vector<std::vector<Complex>> out(static_cast<std::size_t>(depth + 1));
  for (int l = 0; l <= depth; ++l) out[l].assign(static_cast<std::size_t>(std::pow(m, l)), 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t code = 0;
    for (int a : words[k]) code = code * m + a;
    out[len[k]][code] = y[k];
  }
  return out;
}

}  // namespace oracle
