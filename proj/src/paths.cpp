#include "monodromy/paths.hpp"

#include "monodromy/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace monodromy {
namespace {

constexpr Complex kI{0.0, 1.0};

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

Eigen::Index segment_dim(const PathSegment& seg) {
  return std::visit(Overloaded{[](const LineSegment& l) { return l.start.size(); },
                               [](const ArcSegment& a) { return a.base.size(); }},
                    seg);
}

void validate_segment(const PathSegment& seg) {
  std::visit(Overloaded{[](const LineSegment& l) {
                          if (l.start.size() == 0 || l.start.size() != l.end.size()) {
                            throw InputError("line segment: endpoint dimensions differ");
                          }
                          if (!l.start.allFinite() || !l.end.allFinite()) {
                            throw InputError("line segment: non-finite endpoint");
                          }
                        },
                        [](const ArcSegment& a) {
                          if (a.base.size() == 0 || !a.base.allFinite()) {
                            throw InputError("arc segment: invalid base point");
                          }
                          if (a.movers.empty()) throw InputError("arc segment: no moving coordinate");
                          if (!std::isfinite(a.sweep)) throw InputError("arc segment: non-finite sweep");
                          for (const auto& m : a.movers) {
                            if (m.coord < 0 || m.coord >= a.base.size()) {
                              throw InputError("arc segment: coordinate index out of range");
                            }
                            if (!(m.radius > 0.0) || !std::isfinite(m.radius)) {
                              throw InputError("arc segment: radius must be positive");
                            }
                            if (!std::isfinite(m.center.real()) || !std::isfinite(m.center.imag()) ||
                                !std::isfinite(m.start_angle)) {
                              throw InputError("arc segment: non-finite center or angle");
                            }
                          }
                        }},
             seg);
}

bool points_close(const Point& a, const Point& b, double tol) {
  const double scale = std::max({1.0, a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff()});
  return (a - b).cwiseAbs().maxCoeff() <= tol * scale;
}

// min over t ∈ [0,1] of |p + q t|
double min_on_line(Complex p, Complex q) {
  const double qq = std::norm(q);
  if (qq == 0.0) return std::abs(p);
  const double t = std::clamp(-(std::conj(q) * p).real() / qq, 0.0, 1.0);
  return std::abs(p + q * t);
}

// min over θ between 0 and sweep of |c + r e^{iθ}|
double min_on_arc(Complex c, Complex r, double sweep) {
  const double end_value = std::abs(c + r * std::exp(kI * sweep));
  double best = std::min(std::abs(c + r), end_value);
  if (std::abs(r) == 0.0 || std::abs(c) == 0.0) return best;
  const double critical = std::arg(-c) - std::arg(r);
  const double lo = std::min(0.0, sweep);
  const double hi = std::max(0.0, sweep);
  bool inside = hi - lo >= 2.0 * kPi;
  if (!inside) {
    double theta = critical - 2.0 * kPi * std::floor((critical - lo) / (2.0 * kPi));
    inside = theta <= hi;
  }
  if (inside) best = std::min(best, std::abs(std::abs(c) - std::abs(r)));
  return best;
}

double component_min(const PathSegment& seg, const AffineForm& h) {
  return std::visit(
      Overloaded{[&](const LineSegment& l) {
                   return min_on_line(h(l.start), h.linear(l.end - l.start)) * h.weight;
                 },
                 [&](const ArcSegment& a) {
                   // h(z(t)) = C + R e^{i sweep t}
                   Complex c = h(a.base);
                   Complex r = 0.0;
                   for (const auto& m : a.movers) {
                     const Complex ak = h.coeffs(m.coord);
                     c += ak * (m.center - a.base(m.coord));
                     r += ak * m.radius * std::exp(kI * m.start_angle);
                   }
                   return min_on_arc(c, r, a.sweep) * h.weight;
                 }},
      seg);
}

}  // namespace

Point point1(Complex z) {
  Point p(1);
  p(0) = z;
  return p;
}

Point segment_point(const PathSegment& seg, double t) {
  return std::visit(Overloaded{[t](const LineSegment& l) -> Point { return l.start + t * (l.end - l.start); },
                               [t](const ArcSegment& a) -> Point {
                                 Point z = a.base;
                                 for (const auto& m : a.movers) {
                                   z(m.coord) = m.center + m.radius * std::exp(kI * (m.start_angle + a.sweep * t));
                                 }
                                 return z;
                               }},
                    seg);
}

Point segment_velocity(const PathSegment& seg, double t) {
  return std::visit(Overloaded{[](const LineSegment& l) -> Point { return l.end - l.start; },
                               [t](const ArcSegment& a) -> Point {
                                 Point v = Point::Zero(a.base.size());
                                 for (const auto& m : a.movers) {
                                   v(m.coord) = kI * a.sweep * m.radius *
                                                std::exp(kI * (m.start_angle + a.sweep * t));
                                 }
                                 return v;
                               }},
                    seg);
}

PathSegment reversed(const PathSegment& seg) {
  return std::visit(Overloaded{[](const LineSegment& l) -> PathSegment { return LineSegment{l.end, l.start}; },
                               [](const ArcSegment& a) -> PathSegment {
                                 ArcSegment r = a;
                                 for (auto& m : r.movers) m.start_angle += a.sweep;
                                 r.sweep = -a.sweep;
                                 r.base = segment_point(a, 1.0);
                                 return r;
                               }},
                    seg);
}

PiecewisePath::PiecewisePath(std::vector<PathSegment> segments) : segments_(std::move(segments)) {
  if (segments_.empty()) throw InputError("path: no segments");
  dim_ = segment_dim(segments_.front());
  for (std::size_t k = 0; k < segments_.size(); ++k) {
    validate_segment(segments_[k]);
    if (segment_dim(segments_[k]) != dim_) throw InputError("path: segments of different dimension");
    if (k > 0) {
      const Point prev_end = segment_point(segments_[k - 1], 1.0);
      const Point next_start = segment_point(segments_[k], 0.0);
      if (!points_close(prev_end, next_start, kJointTol)) {
        throw InputError("path: discontinuity at joint " + std::to_string(k) + " (gap " +
                         std::to_string((prev_end - next_start).norm()) + ")");
      }
    }
  }
}

Point PiecewisePath::start() const { return segment_point(segments_.front(), 0.0); }
Point PiecewisePath::end() const { return segment_point(segments_.back(), 1.0); }

bool PiecewisePath::is_closed(double tol) const { return points_close(start(), end(), tol); }

std::vector<Point> PiecewisePath::sample(int per_segment) const {
  if (per_segment < 1) throw InputError("sample: need at least one interval per segment");
  std::vector<Point> out;
  out.reserve(segments_.size() * static_cast<std::size_t>(per_segment + 1));
  for (const auto& seg : segments_) {
    for (int k = 0; k <= per_segment; ++k) out.push_back(segment_point(seg, double(k) / per_segment));
  }
  return out;
}

PiecewisePath concat(const PiecewisePath& p, const PiecewisePath& q) {
  if (p.dim() != q.dim()) throw InputError("concat: paths live in different dimensions");
  if (!points_close(p.end(), q.start(), kJointTol)) {
    throw InputError("concat: second path does not start where the first ends");
  }
  std::vector<PathSegment> segs = p.segments();
  segs.insert(segs.end(), q.segments().begin(), q.segments().end());
  return PiecewisePath(std::move(segs));
}

PiecewisePath concat(std::span<const PiecewisePath> paths) {
  if (paths.empty()) throw InputError("concat: empty path list");
  PiecewisePath out = paths.front();
  for (std::size_t k = 1; k < paths.size(); ++k) out = concat(out, paths[k]);
  return out;
}

PiecewisePath invert(const PiecewisePath& p) {
  std::vector<PathSegment> segs;
  segs.reserve(p.segments().size());
  for (auto it = p.segments().rbegin(); it != p.segments().rend(); ++it) segs.push_back(reversed(*it));
  return PiecewisePath(std::move(segs));
}

Divisor Divisor::points(std::vector<Complex> punctures, double min_separation) {
  for (std::size_t a = 0; a < punctures.size(); ++a) {
    if (!std::isfinite(punctures[a].real()) || !std::isfinite(punctures[a].imag())) {
      throw InputError("divisor: non-finite puncture");
    }
    for (std::size_t b = a + 1; b < punctures.size(); ++b) {
      if (std::abs(punctures[a] - punctures[b]) <= min_separation) {
        throw InputError("divisor: punctures " + std::to_string(a) + " and " + std::to_string(b) +
                         " coincide");
      }
    }
  }
  Divisor d;
  d.kind_ = Kind::Points;
  d.dim_ = 1;
  for (Complex s : punctures) d.components_.push_back(AffineForm{Vector::Ones(1), -s, 1.0});
  d.punctures_ = std::move(punctures);
  return d;
}

Divisor Divisor::configuration(int n) {
  if (n < 2) throw InputError("configuration divisor needs n >= 2");
  Divisor d;
  d.kind_ = Kind::Configuration;
  d.dim_ = n;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      Vector c = Vector::Zero(n);
      c(i) = 1.0;
      c(j) = -1.0;
      d.components_.push_back(AffineForm{std::move(c), 0.0, 1.0});
    }
  }
  return d;
}

Divisor Divisor::hyperplanes(Eigen::Index dim, std::vector<AffineForm> forms) {
  Divisor d;
  d.kind_ = Kind::Hyperplanes;
  d.dim_ = dim;
  for (auto& f : forms) {
    if (f.coeffs.size() != dim) throw InputError("divisor: hyperplane dimension mismatch");
    const double n = f.coeffs.norm();
    if (!(n > 0.0)) throw InputError("divisor: degenerate hyperplane");
    f.weight = 1.0 / n;
  }
  d.components_ = std::move(forms);
  return d;
}

double Divisor::distance(const Point& z) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& h : components_) best = std::min(best, std::abs(h(z)) * h.weight);
  return best;
}

double min_clearance(const PiecewisePath& path, const Divisor& divisor) {
  if (path.dim() != divisor.dim()) throw InputError("min_clearance: path and divisor dimensions differ");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& seg : path.segments()) {
    for (const auto& h : divisor.components()) best = std::min(best, component_min(seg, h));
  }
  return best;
}

void require_clearance(const PiecewisePath& path, const Divisor& divisor, double clearance) {
  const double d = min_clearance(path, divisor);
  if (d < clearance) {
    throw InputError("path passes within " + std::to_string(d) + " of the divisor (clearance " +
                     std::to_string(clearance) + " required)");
  }
}

PiecewisePath generator_loop(Complex basepoint, Complex puncture, double radius) {
  if (!(radius > 0.0)) throw InputError("generator_loop: radius must be positive");
  const double gap = std::abs(basepoint - puncture);
  if (!(gap > radius)) throw InputError("generator_loop: basepoint lies inside the loop circle");
  const double angle = std::arg(basepoint - puncture);
  const Complex touch = puncture + radius * std::exp(kI * angle);
  ArcSegment circle{point1(touch), {ArcMover{0, puncture, radius, angle}}, 2.0 * kPi};
  return PiecewisePath({LineSegment{point1(basepoint), point1(touch)}, circle,
                        LineSegment{point1(touch), point1(basepoint)}});
}

PiecewisePath generator_loop(Complex basepoint, Complex puncture, double radius,
                             const Divisor& punctures, double clearance) {
  for (Complex s : punctures.punctures()) {
    const double d = std::abs(s - puncture);
    if (d > 1e-9 && !(radius < 0.5 * d)) {
      throw InputError("generator_loop: radius too large, loop would reach another puncture");
    }
  }
  PiecewisePath loop = generator_loop(basepoint, puncture, radius);
  // The enclosed puncture is at distance `radius` by construction; check the rest.
  std::vector<Complex> others;
  for (Complex s : punctures.punctures()) {
    if (std::abs(s - puncture) > 1e-9) others.push_back(s);
  }
  if (!others.empty()) require_clearance(loop, Divisor::points(others), clearance);
  if (radius < clearance) {
    throw InputError("generator_loop: radius below the required clearance");
  }
  return loop;
}

std::vector<PiecewisePath> generator_loops(Complex basepoint, std::span<const Complex> punctures,
                                           double radius) {
  const Divisor divisor = Divisor::points({punctures.begin(), punctures.end()});
  std::vector<PiecewisePath> loops;
  for (Complex s : punctures) loops.push_back(generator_loop(basepoint, s, radius, divisor));
  return loops;
}

double winding_number(const PiecewisePath& path, Complex point) {
  if (path.dim() != 1) throw InputError("winding_number: path must be planar");
  constexpr int kArcSamples = 2048;
  double total = 0.0;
  auto step = [&](Complex a, Complex b) {
    if (std::abs(a - point) < 1e-14 || std::abs(b - point) < 1e-14) {
      throw InputError("winding_number: path passes through the point");
    }
    total += std::arg((b - point) / (a - point));
  };
  for (const auto& seg : path.segments()) {
    if (const auto* line = std::get_if<LineSegment>(&seg)) {
      if (min_on_line(line->start(0) - point, line->end(0) - line->start(0)) < 1e-14) {
        throw InputError("winding_number: path passes through the point");
      }
      step(line->start(0), line->end(0));
    } else {
      Complex prev = segment_point(seg, 0.0)(0);
      for (int k = 1; k <= kArcSamples; ++k) {
        const Complex next = segment_point(seg, double(k) / kArcSamples)(0);
        step(prev, next);
        prev = next;
      }
    }
  }
  return total / (2.0 * kPi);
}

int exponent_sum(const BraidWord& word) {
  int s = 0;
  for (const auto& l : word) s += l.power;
  return s;
}

BraidWord inverse(const BraidWord& word) {
  BraidWord out(word.rbegin(), word.rend());
  for (auto& l : out) l.power = -l.power;
  return out;
}

Point default_braid_basepoint(int n) {
  Point p(n);
  for (int k = 0; k < n; ++k) p(k) = double(k + 1);
  return p;
}

PiecewisePath braid_word_path(int n, const BraidWord& word, const std::optional<Point>& basepoint) {
  if (n < 2) throw InputError("braid path: need n >= 2 strands");
  if (word.empty()) throw InputError("braid path: empty word");
  const Point base = basepoint ? *basepoint : default_braid_basepoint(n);
  if (base.size() != n) throw InputError("braid path: basepoint has wrong dimension");
  std::vector<double> slots(n);
  for (int k = 0; k < n; ++k) {
    if (std::abs(base(k).imag()) > 1e-12) throw InputError("braid path: basepoint must be real");
    slots[k] = base(k).real();
    if (k > 0 && !(slots[k] > slots[k - 1])) {
      throw InputError("braid path: basepoint coordinates must be strictly increasing");
    }
  }

  auto holder = [&](const Point& z, double slot) {
    const double tol = 1e-6 * std::max(1.0, std::abs(slot));
    for (Eigen::Index c = 0; c < z.size(); ++c) {
      if (std::abs(z(c) - slot) < tol) return c;
    }
    throw NumericalError("braid path: lost track of the strand at slot " + std::to_string(slot));
  };

  std::vector<PathSegment> segs;
  Point cur = base;
  for (const auto& letter : word) {
    if (letter.generator < 1 || letter.generator > n - 1) {
      throw InputError("braid path: generator index " + std::to_string(letter.generator) +
                       " out of range 1.." + std::to_string(n - 1));
    }
    if (letter.power != 1 && letter.power != -1) throw InputError("braid path: letters must have power +-1");
    const double left = slots[letter.generator - 1];
    const double right = slots[letter.generator];
    const Eigen::Index a = holder(cur, left);
    const Eigen::Index b = holder(cur, right);
    const Complex center = 0.5 * (left + right);
    const double r = 0.5 * (right - left);
    const double sweep = letter.power * kPi;
    segs.push_back(ArcSegment{cur, {ArcMover{a, center, r, kPi}, ArcMover{b, center, r, 0.0}}, sweep});
    cur(a) = right;
    cur(b) = left;
  }
  return PiecewisePath(std::move(segs));
}

PiecewisePath braid_generator_path(int n, int i, const std::optional<Point>& basepoint) {
  if (i < 1 || i > n - 1) {
    throw InputError("braid generator index " + std::to_string(i) + " out of range 1.." + std::to_string(n - 1));
  }
  return braid_word_path(n, {BraidLetter{i, 1}}, basepoint);
}

BraidWord pure_braid_word(int n, int i, int j) {
  if (!(1 <= i && i < j && j <= n)) {
    throw InputError("pure braid: need 1 <= i < j <= n, got i=" + std::to_string(i) + " j=" + std::to_string(j));
  }
  BraidWord w;
  for (int g = j - 1; g > i; --g) w.push_back({g, 1});
  w.push_back({i, 1});
  w.push_back({i, 1});
  for (int g = i + 1; g < j; ++g) w.push_back({g, -1});
  return w;
}

}  // namespace monodromy
