#include "monodromy/errors.hpp"
#include "monodromy/fuchsian.hpp"
#include "monodromy/kz.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace monodromy;

namespace {

Matrix scalar(Complex a) { return Matrix::Constant(1, 1, a); }

Matrix diag2(Complex a, Complex b) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

LogarithmicConnection single_pole(const Matrix& a) { return LogarithmicConnection::poles({0.0}, {a}); }

// Winding w around 0: approach from `base`, then |w| full circles.
PiecewisePath wound_loop(int w, double radius = 0.5, Complex base = 2.0) {
  PiecewisePath one = generator_loop(base, 0.0, radius);
  if (w < 0) one = invert(one);
  std::vector<PiecewisePath> parts(static_cast<std::size_t>(std::abs(w)), one);
  return concat(parts);
}

}  // namespace

TEST_CASE("zero connection transports to the identity") {
  const auto conn = LogarithmicConnection::poles({0.0, 1.0}, {Matrix::Zero(3, 3), Matrix::Zero(3, 3)});
  const auto path = PiecewisePath({LineSegment{point1(Complex(0.5, -1)), point1(Complex(2, 3))}});
  CHECK((transport(conn, path) - Matrix::Identity(3, 3)).norm() == 0.0);
}

TEST_CASE("scalar monodromy around a single pole") {
  oracle::Rng rng(1);
  for (int trial = 0; trial < 10; ++trial) {
    const Complex a(rng.uniform(-2, 2), rng.uniform(-0.5, 0.5));
    const Matrix m = transport(single_pole(scalar(a)), wound_loop(1));
    CHECK(std::abs(m(0, 0) - std::exp(2.0 * oracle::kPi * Complex(0, 1) * a)) < 1e-9);
  }
}

TEST_CASE("open path transport is (z1/z0)^a") {
  const Complex a(0.7, 0.2);
  const Point z0 = point1(Complex(1.0, 0.3));
  const Point z1 = point1(Complex(-0.4, 2.0));
  const PiecewisePath path({LineSegment{z0, z1}});
  const Matrix m = transport(single_pole(scalar(a)), path);
  // The segment avoids the negative real axis cut of log, so principal logs continue correctly.
  const Complex expected = std::exp(a * (std::log(z1(0)) - std::log(z0(0))));
  CHECK(std::abs(m(0, 0) - expected) < 1e-10);
}

TEST_CASE("matrix single pole monodromy is e^{2 pi i w A}") {
  oracle::Rng rng(2);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix a = rng.hermitian(2, rng.uniform(0.1, 1.0));
    for (int w : {-2, -1, 1, 2}) {
      const Matrix m = transport(single_pole(a), wound_loop(w), 1e-11);
      const Matrix expected = oracle::taylor_expm(Complex(0, 2.0 * oracle::kPi * w) * a);
      CHECK((m - expected).norm() < 1e-8);
      CHECK(unitarity_defect(m) < 1e-8);
    }
  }
}

TEST_CASE("transport is multiplicative and inverts") {
  oracle::Rng rng(3);
  const auto conn =
      LogarithmicConnection::poles({0.0, 1.0, Complex(0, 1)}, {rng.gaussian(2) * 0.4, rng.gaussian(2) * 0.4,
                                                              rng.gaussian(2) * 0.4});
  const PiecewisePath p({LineSegment{point1(Complex(-1, -1)), point1(Complex(2, -0.5))}});
  const PiecewisePath q({ArcSegment{point1(Complex(2, -0.5)), {{0, Complex(0.5, 0.5), std::abs(Complex(1.5, -1)),
                                                                 std::arg(Complex(1.5, -1))}},
                                    1.3}});
  const double tol = 1e-11;
  const Matrix mp = transport(conn, p, tol);
  const Matrix mq = transport(conn, q, tol);
  const Matrix mpq = transport(conn, concat(p, q), tol);
  CHECK((mpq - mq * mp).norm() < 1e-9);
  CHECK((transport(conn, invert(p), tol) * mp - Matrix::Identity(2, 2)).norm() < 1e-9);
}

TEST_CASE("homotopic loops give the same monodromy") {
  oracle::Rng rng(4);
  const Matrix a = rng.hermitian(2, 0.8);
  const Matrix b = rng.hermitian(2, 0.8);
  const auto conn = LogarithmicConnection::poles({0.0, 3.0}, {a, b});
  const Matrix small = transport(conn, generator_loop(Complex(1.5, -1.5), 0.0, 0.3), 1e-11);
  const Matrix large = transport(conn, generator_loop(Complex(1.5, -1.5), 0.0, 0.7), 1e-11);
  // Same homotopy class through a different approach: detour below, then around.
  const PiecewisePath detour({LineSegment{point1(Complex(1.5, -1.5)), point1(Complex(0.5, -2.0))}});
  const auto wiggle = concat(std::vector<PiecewisePath>{
      detour, generator_loop(Complex(0.5, -2.0), 0.0, 0.5), invert(detour)});
  const Matrix shaped = transport(conn, wiggle, 1e-11);
  CHECK((small - large).norm() < 2e-9);
  CHECK((small - shaped).norm() < 2e-9);
}

TEST_CASE("monodromy representation") {
  SUBCASE("diagonal residues decouple") {
    const std::vector<Complex> pts{0.0, 1.0};
    const auto conn = LogarithmicConnection::poles(pts, {diag2(0.3, -0.1), diag2(0.25, 0.6)});
    const auto loops = generator_loops(Complex(0.5, -1.0), pts, 0.25);
    const auto rep = monodromy_representation(conn, loops);
    REQUIRE(rep.matrices.size() == 2);
    CHECK(rep.labels == std::vector<std::string>{"g1", "g2"});
    const auto e = [](double x) { return std::exp(Complex(0, 2.0 * oracle::kPi * x)); };
    CHECK((rep.matrices[0] - diag2(e(0.3), e(-0.1))).norm() < 1e-9);
    CHECK((rep.matrices[1] - diag2(e(0.25), e(0.6))).norm() < 1e-9);
  }
  SUBCASE("four generators satisfy the product relation") {
    oracle::Rng rng(5);
    std::vector<Matrix> res(4);
    res[3] = Matrix::Zero(2, 2);
    for (int j = 0; j < 3; ++j) {
      res[j] = rng.traceless_hermitian(2, 0.6);
      res[3] -= res[j];
    }
    const std::vector<Complex> pts{Complex(0, 1), Complex(1, 0), Complex(0, -1), Complex(-1, 0)};
    const auto conn = LogarithmicConnection::poles(pts, res, true);
    const auto rep = monodromy_representation(conn, generator_loops(0.0, pts, 0.3), 1e-11);
    CHECK(product_relation_defect(rep) < 1e-7);
    for (const auto& m : rep.matrices) CHECK(std::abs(m.determinant() - 1.0) < 1e-8);
  }
  SUBCASE("there and back is trivial") {
    oracle::Rng rng(6);
    const auto loop = generator_loop(2.0, 0.0, 0.5);
    std::vector<PiecewisePath> loops{concat(loop, invert(loop))};
    const auto rep = monodromy_representation(single_pole(rng.hermitian(2, 1.5)), loops);
    CHECK((rep.matrices[0] - Matrix::Identity(2, 2)).norm() < 1e-9);

    // Non-normal residue: round-off grows with the condition number of the half-way monodromy.
    const auto conn = single_pole(rng.gaussian(2));
    const Eigen::JacobiSVD<Matrix> svd(transport(conn, loop));
    const double cond = svd.singularValues()(0) / svd.singularValues()(1);
    const auto skew = monodromy_representation(conn, loops);
    CHECK((skew.matrices[0] - Matrix::Identity(2, 2)).norm() < 1e-12 * cond);
  }
  SUBCASE("loops must share a basepoint") {
    const auto conn = single_pole(scalar(0.5));
    std::vector<PiecewisePath> loops{generator_loop(2.0, 0.0, 0.5), generator_loop(3.0, 0.0, 0.5)};
    CHECK_THROWS_AS(monodromy_representation(conn, loops), InputError);
  }
  CHECK_THROWS_AS(LogarithmicConnection::poles({0.0}, {Matrix::Identity(2, 2)}, true), InputError);
}

TEST_CASE("paths through a pole are rejected") {
  const auto conn = single_pole(scalar(0.5));
  const PiecewisePath through({LineSegment{point1(-1.0), point1(1.0)}});
  CHECK_THROWS_AS(transport(conn, through), DivisorContactError);
}

TEST_CASE("residue logarithm") {
  CHECK(residue_log(Matrix::Identity(2, 2)).norm() == 0.0);
  CHECK((residue_log(diag2(1.0, -1.0)) - diag2(0.0, 0.5)).norm() < 1e-15);

  oracle::Rng rng(7);
  for (int trial = 0; trial < 100; ++trial) {
    Matrix u = rng.unitary(2);
    u /= std::sqrt(u.determinant());
    const Matrix e = residue_log(u);
    CHECK((oracle::taylor_expm(Complex(0, 2.0 * oracle::kPi) * e) - u).norm() < 1e-10);
    CHECK((e - e.adjoint()).norm() < 1e-12);
    const Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (e + e.adjoint()));
    CHECK(es.eigenvalues().minCoeff() >= -1e-12);
    CHECK(es.eigenvalues().maxCoeff() < 1.0);
  }

  // Non-normal but diagonalizable.
  Matrix m(2, 2);
  m << Complex(0, 1), 2.0, 0.0, -1.0;
  CHECK((oracle::taylor_expm(Complex(0, 2.0 * oracle::kPi) * residue_log(m)) - m).norm() < 1e-10);

  Matrix jordan(2, 2);
  jordan << 1.0, 1.0, 0.0, 1.0;
  CHECK_THROWS_AS(residue_log(jordan), DefectiveMatrixError);
  CHECK_THROWS_AS(residue_log(Matrix::Zero(2, 2)), InputError);
  CHECK_THROWS_AS(residue_log(diag2(std::polar(1.0, -1e-11), 1.0)), BranchCutError);
  CHECK_NOTHROW(residue_log(diag2(std::polar(1.0, -1e-11), 1.0), BranchWindow{-1.0}));
}

TEST_CASE("chern index") {
  MonodromyRepresentation rep;
  rep.matrices.assign(4, Matrix::Identity(2, 2));
  rep.x4_presentation = true;
  CHECK(chern_index(rep).value == 0);

  rep.matrices[0] = rep.matrices[1] = -Matrix::Identity(2, 2);
  const auto two = chern_index(rep);
  CHECK(two.value == 2);
  CHECK(two.residual < 1e-14);

  oracle::Rng rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    MonodromyRepresentation r;
    r.x4_presentation = true;
    for (int j = 0; j < 3; ++j) {
      Matrix u = rng.unitary(2);
      r.matrices.push_back(u / std::sqrt(u.determinant()));
    }
    r.matrices.push_back((r.matrices[0] * r.matrices[1] * r.matrices[2]).inverse());
    const auto c = chern_index(r);
    CHECK(c.residual < 1e-8);
  }

  rep.matrices[0] = diag2(Complex(0, 1), 1.0);
  CHECK_THROWS_AS(chern_index(rep), VerificationError);
}

TEST_CASE("curvature and integrability") {
  const auto scalar_conn = LogarithmicConnection::poles({0.0, 1.0}, {scalar(0.3), scalar(2.0)});
  CHECK(curvature_residual(scalar_conn, point1(Complex(0.3, 0.4)), point1(1.0), point1(Complex(0, 1))) == 0.0);

  oracle::Rng rng(9);
  const Matrix x = rng.gaussian(2);
  const auto commuting = LogarithmicConnection::pairs(3, {x, 2.0 * x, -0.5 * x});
  Point z(3), u(3), v(3);
  z << Complex(0, 0), Complex(1, 0.2), Complex(-0.3, 1.4);
  u << 1.0, Complex(0, 1), 0.3;
  v << Complex(0.2, 0.1), -1.0, 2.0;
  CHECK(curvature_residual(commuting, z, u, v) < 1e-12);
  CHECK(integrability_check(commuting).max_violation < 1e-12);

  CHECK(integrability_check(LogarithmicConnection::pairs(2, {x})).max_violation == 0.0);

  const auto bad = LogarithmicConnection::pairs(3, {oracle::pauli('x'), oracle::pauli('z'), Matrix::Zero(2, 2)});
  const Matrix comm = oracle::pauli('x') * oracle::pauli('z') - oracle::pauli('z') * oracle::pauli('x');
  CHECK(integrability_check(bad).max_violation == doctest::Approx(comm.norm()).epsilon(1e-14));
  CHECK(comm.norm() == doctest::Approx(2.0 * std::sqrt(2.0)));
  CHECK_FALSE(integrability_check(bad).passed(1e-12));

  CHECK_THROWS_AS(integrability_check(scalar_conn), InputError);
}

TEST_CASE("KZ curvature vanishes at random points iff the symbolic check passes") {
  const auto kz = build_kz(3, 0.5, 3.0).to_connection();
  CHECK(integrability_check(kz).max_violation <= 1e-13);
  oracle::Rng rng(10);
  for (int trial = 0; trial < 20; ++trial) {
    Point z(3), u(3), v(3);
    for (int k = 0; k < 3; ++k) {
      z(k) = rng.complex_normal();
      u(k) = rng.complex_normal();
      v(k) = rng.complex_normal();
    }
    CHECK(curvature_residual(kz, z, u, v) <= 1e-12);
  }
  // A generic random pair family fails both.
  const auto generic = LogarithmicConnection::pairs(3, {rng.gaussian(2), rng.gaussian(2), rng.gaussian(2)});
  Point z(3), u(3), v(3);
  z << 0.0, 1.0, Complex(0, 1);
  u << 1.0, 0.0, 0.0;
  v << 0.0, 0.0, 1.0;
  CHECK(curvature_residual(generic, z, u, v) > 1e-3);
  CHECK(integrability_check(generic).max_violation > 1e-3);
}

TEST_CASE("hyperplane connection transport matches the scalar closed form") {
  // ω = d log(z₁ − z₂) on ℂ² along a path that turns z₁ − z₂ once around 0.
  AffineForm h{Vector::Zero(2), 0.0};
  h.coeffs << 1.0, -1.0;
  const LogFormBasis forms(2, {h});
  const auto conn = LogarithmicConnection::hyperplanes(forms, {scalar(0.35)});
  Point base(2);
  base << 1.0, 0.0;
  const PiecewisePath loop({ArcSegment{base, {{0, 0.0, 1.0, 0.0}}, 2.0 * oracle::kPi}});
  const Matrix m = transport(conn, loop);
  CHECK(std::abs(m(0, 0) - std::exp(Complex(0, 2.0 * oracle::kPi * 0.35))) < 1e-9);
}
