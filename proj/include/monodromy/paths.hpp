#pragma once

#include "monodromy/linalg.hpp"

#include <optional>
#include <variant>
#include <vector>

namespace monodromy {

/// A point of ℂ^n. One-variable paths use n = 1.
using Point = Vector;

Point point1(Complex z);

struct LineSegment {
  Point start;
  Point end;
};

/// One coordinate moving on a circle: z_coord(t) = center + radius·e^{i(start_angle + sweep·t)}.
struct ArcMover {
  Eigen::Index coord = 0;
  Complex center;
  double radius = 0.0;
  double start_angle = 0.0;
};

/// Several coordinates sweeping circles with one shared angle; all other
/// coordinates stay at `base`.
struct ArcSegment {
  Point base;
  std::vector<ArcMover> movers;
  double sweep = 0.0;  // signed total angle, positive = counterclockwise
};

using PathSegment = std::variant<LineSegment, ArcSegment>;

/// Position and parameter derivative on a segment, t ∈ [0, 1].
Point segment_point(const PathSegment& seg, double t);
Point segment_velocity(const PathSegment& seg, double t);
PathSegment reversed(const PathSegment& seg);

inline constexpr double kJointTol = 1e-12;

/// A contour in ℂ^n made of line and arc segments that join continuously.
class PiecewisePath {
 public:
  explicit PiecewisePath(std::vector<PathSegment> segments);

  const std::vector<PathSegment>& segments() const noexcept { return segments_; }
  Eigen::Index dim() const noexcept { return dim_; }
  Point start() const;
  Point end() const;
  bool is_closed(double tol = 1e-9) const;

  /// `per_segment` + 1 samples per segment, joints repeated.
  std::vector<Point> sample(int per_segment) const;

 private:
  std::vector<PathSegment> segments_;
  Eigen::Index dim_;
};

/// Fails with InputError unless q starts where p ends.
PiecewisePath concat(const PiecewisePath& p, const PiecewisePath& q);
PiecewisePath concat(std::span<const PiecewisePath> paths);
PiecewisePath invert(const PiecewisePath& p);

/// h(z) = coeffs·z + constant, contributing |h(z)|·weight to divisor distances.
struct AffineForm {
  Vector coeffs;
  Complex constant;
  double weight = 1.0;

  /// Bilinear (unconjugated) coeffs·z.
  Complex linear(const Point& z) const { return coeffs.cwiseProduct(z).sum(); }
  Complex operator()(const Point& z) const { return linear(z) + constant; }
};

/// Union of hyperplanes {h = 0}: punctures of ℂ, the diagonals z_i = z_j of
/// ℂ^n, or a general arrangement.
class Divisor {
 public:
  enum class Kind { Points, Configuration, Hyperplanes };

  static Divisor points(std::vector<Complex> punctures, double min_separation = 1e-9);
  /// The arrangement {z_i = z_j}; distance is measured as min |z_i − z_j|.
  static Divisor configuration(int n);
  /// Distances use |h(z)| / ‖coeffs‖.
  static Divisor hyperplanes(Eigen::Index dim, std::vector<AffineForm> forms);

  Kind kind() const noexcept { return kind_; }
  Eigen::Index dim() const noexcept { return dim_; }
  const std::vector<AffineForm>& components() const noexcept { return components_; }
  const std::vector<Complex>& punctures() const noexcept { return punctures_; }

  double distance(const Point& z) const;

 private:
  Kind kind_ = Kind::Points;
  Eigen::Index dim_ = 1;
  std::vector<AffineForm> components_;
  std::vector<Complex> punctures_;
};

/// Exact minimum of the divisor distance along the path (every component
/// restricted to a line or arc segment is affine or circular in t).
double min_clearance(const PiecewisePath& path, const Divisor& divisor);

inline constexpr double kDefaultClearance = 0.05;

/// Throws InputError if the path comes closer than `clearance` to the divisor.
void require_clearance(const PiecewisePath& path, const Divisor& divisor,
                       double clearance = kDefaultClearance);

/// Approach segment, one counterclockwise circle around `puncture`, return.
PiecewisePath generator_loop(Complex basepoint, Complex puncture, double radius);

/// As above, also checking the radius against the other punctures and the
/// clearance of the whole loop.
PiecewisePath generator_loop(Complex basepoint, Complex puncture, double radius,
                             const Divisor& punctures, double clearance = kDefaultClearance);

/// One generator loop per puncture from a shared basepoint, in input order.
std::vector<PiecewisePath> generator_loops(Complex basepoint, std::span<const Complex> punctures,
                                           double radius);

/// Winding number of a planar (n = 1) closed path around `point`, summed from
/// argument increments. Not rounded.
double winding_number(const PiecewisePath& path, Complex point);

// --- braids ----------------------------------------------------------------

/// σ_generator^power with power ±1; generators are 1-based.
struct BraidLetter {
  int generator = 1;
  int power = 1;
  bool operator==(const BraidLetter&) const = default;
};
using BraidWord = std::vector<BraidLetter>;

int exponent_sum(const BraidWord& word);
BraidWord inverse(const BraidWord& word);

/// (1, 2, …, n).
Point default_braid_basepoint(int n);

/// Path in ℂ^n following the word letter by letter, starting at `basepoint`
/// (strictly increasing real coordinates; default (1, …, n)). σ_g exchanges
/// the points currently sitting at slots g and g+1 by counterclockwise
/// half-circles about their midpoint; σ_g^{-1} runs clockwise.
PiecewisePath braid_word_path(int n, const BraidWord& word,
                              const std::optional<Point>& basepoint = std::nullopt);

PiecewisePath braid_generator_path(int n, int i, const std::optional<Point>& basepoint = std::nullopt);

/// τ_ij = (σ_{j−1}…σ_{i+1}) σ_i² (σ_{i+1}^{-1}…σ_{j−1}^{-1}), so τ_{i,i+1} = σ_i².
BraidWord pure_braid_word(int n, int i, int j);

}  // namespace monodromy
