#include "monodromy/errors.hpp"
#include "monodromy/fuchsian.hpp"
#include "monodromy/kz.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace monodromy;

namespace {

const Complex kI(0.0, 1.0);

Matrix printed_omega12() {
  Matrix m(4, 4);
  m << 0.5, 0, 0, 0,  //
      0, -0.5, 1, 0,  //
      0, 1, -0.5, 0,  //
      0, 0, 0, 0.5;
  return m;
}

Matrix expm_oracle(const Matrix& a) { return oracle::taylor_expm(a); }

}  // namespace

TEST_CASE("spin modules") {
  for (double j : {0.0, 0.5, 1.0, 1.5, 2.0}) {
    const SpinModule v(j);
    CHECK(v.dim() == static_cast<Eigen::Index>(2 * j + 1));
    CHECK(v.commutation_defect() <= 1e-12);
    CHECK(v.h().isApprox(v.h().adjoint()));
    CHECK((v.e().adjoint() - v.f()).norm() < 1e-15);
  }
  CHECK_THROWS_AS(SpinModule(0.3), InputError);
  CHECK_THROWS_AS(SpinModule(-0.5), InputError);
}

TEST_CASE("Casimir operator for two spin-1/2 factors is the printed matrix") {
  const SpinModule half(0.5);
  const Matrix omega = casimir_omega(half, half);
  CHECK(omega == printed_omega12());
  CHECK(omega == oracle::swap(2) - 0.5 * Matrix::Identity(4, 4));
  const Eigen::SelfAdjointEigenSolver<Matrix> es(omega);
  CHECK(es.eigenvalues()(0) == doctest::Approx(-1.5));
  for (int k = 1; k < 4; ++k) CHECK(es.eigenvalues()(k) == doctest::Approx(0.5));
}

TEST_CASE("Casimir commutes with the diagonal action") {
  for (double a : {0.5, 1.0, 1.5, 2.0}) {
    for (double b : {0.5, 1.0, 1.5, 2.0}) {
      const SpinModule va(a), vb(b);
      CHECK(casimir_defect(va, vb) <= 1e-12);
      // Independent check against Δ(x) built here.
      const Matrix omega = casimir_omega(va, vb);
      const Matrix ia = Matrix::Identity(va.dim(), va.dim()), ib = Matrix::Identity(vb.dim(), vb.dim());
      for (int which = 0; which < 3; ++which) {
        const Matrix& xa = which == 0 ? va.e() : which == 1 ? va.f() : va.h();
        const Matrix& xb = which == 0 ? vb.e() : which == 1 ? vb.f() : vb.h();
        const Matrix delta = oracle::kron(xa, ib) + oracle::kron(ia, xb);
        CHECK((omega * delta - delta * omega).norm() <= 1e-12);
      }
      CHECK((omega - omega.adjoint()).norm() < 1e-14);
    }
  }
}

TEST_CASE("KZ system operators") {
  const auto sys = build_kz(4, 0.5, 3.0);
  CHECK(sys.dim() == 16);
  CHECK(sys.identical_modules());
  oracle::Rng rng(1);
  for (int i = 1; i <= 4; ++i) {
    for (int j = i + 1; j <= 4; ++j) {
      const Matrix& o = sys.omega(i, j);
      CHECK((o - o.adjoint()).norm() < 1e-14);
      for (int k = 1; k <= 4; ++k) {
        if (k == i || k == j) continue;
        const Matrix x = embed(sys.modules(), k, rng.gaussian(2));
        CHECK((o * x - x * o).norm() < 1e-12);
      }
    }
  }
  // Ω_12 on (ℂ²)^{⊗3} is printed Ω ⊗ I.
  const auto three = build_kz(3, 0.5, 2.0);
  CHECK((three.omega(1, 2) - oracle::kron(printed_omega12(), Matrix::Identity(2, 2))).norm() == 0.0);
  // Ω_23 = I ⊗ printed Ω.
  CHECK((three.omega(2, 3) - oracle::kron(Matrix::Identity(2, 2), printed_omega12())).norm() == 0.0);

  const auto conn = three.to_connection();
  const auto& pairs = std::get<PairResidues>(conn.data());
  CHECK((pairs.at(1, 3) - three.omega(1, 3) / 2.0).norm() < 1e-15);

  CHECK_THROWS_AS(build_kz(3, 0.5, 0.0), InputError);
  CHECK_THROWS_AS(build_kz(1, 0.5, 1.0), InputError);
}

TEST_CASE("KZ flatness") {
  for (int n : {2, 3, 4}) {
    const auto sys = build_kz(n, 0.5, Complex(3.0, 1.0));
    CHECK(integrability_check(sys.to_connection()).max_violation <= 1e-12);
  }
  const auto mixed = build_kz({SpinModule(0.5), SpinModule(1.0), SpinModule(0.5)}, 4.0);
  CHECK(integrability_check(mixed.to_connection()).max_violation <= 1e-12);
  CHECK_FALSE(mixed.identical_modules());
  CHECK_THROWS_AS(braid_matrix(mixed, 1), InputError);
}

TEST_CASE("two-point closed form") {
  const Matrix omega = printed_omega12();
  oracle::Rng rng(2);
  Vector c(4);
  for (int k = 0; k < 4; ++k) c(k) = rng.complex_normal();

  Point unit(2);
  unit << 1.0, 0.0;
  CHECK((two_point_solution(omega, 3.0, 0.0, c) - c).norm() == 0.0);

  for (Complex lambda : {Complex(2.0, 0.0), Complex(3.0, 1.0)}) {
    const auto sys = build_kz(2, 0.5, lambda);
    Point a(2), b(2), mid(2);
    a << Complex(1.0, 0.2), Complex(-0.3, 0.1);
    mid << Complex(0.1, 1.5), Complex(0.4, -0.6);
    b << Complex(-1.2, 0.4), Complex(0.2, 1.1);
    const PiecewisePath path({LineSegment{a, mid}, LineSegment{mid, b}});
    const Matrix f = transport(sys.to_connection(), path, 1e-12);
    const Vector start = two_point_solution(omega, lambda, std::log(a(0) - a(1)), c);
    const Vector expected = two_point_solution(omega, lambda, path, c);
    CHECK((f * start - expected).norm() < 1e-9);

    // z₁ circles z₂ once counterclockwise.
    const PiecewisePath loop({ArcSegment{unit, {{0, 0.0, 1.0, 0.0}}, 2.0 * oracle::kPi}});
    const Matrix full = transport(sys.to_connection(), loop, 1e-12);
    CHECK((full - expm_oracle(2.0 * oracle::kPi * kI / lambda * omega)).norm() < 1e-8);
    CHECK(std::abs(continued_log_difference(loop) - 2.0 * oracle::kPi * kI) < 1e-12);
  }

  Point same(2);
  same << 1.0, 1.0;
  CHECK_THROWS_AS(continued_log_difference(PiecewisePath({LineSegment{same, unit}})), InputError);
}

TEST_CASE("n = 2 braid matrix and both orientations") {
  const Complex lambda = 3.0;
  const auto sys = build_kz(2, 0.5, lambda);
  const Matrix omega = printed_omega12();
  const Matrix p = oracle::swap(2);
  const Matrix ccw = braid_matrix(sys, 1, 1e-12);
  const Matrix cw = braid_matrix(sys, 1, 1e-12, Orientation::Clockwise);
  CHECK((ccw - p * expm_oracle(kI * oracle::kPi / lambda * omega)).norm() < 1e-9);
  CHECK((p * cw - expm_oracle(-kI * oracle::kPi / lambda * omega)).norm() < 1e-9);
  CHECK((ccw * cw - Matrix::Identity(4, 4)).norm() < 1e-9);
  CHECK((ccw * ccw - full_twist(sys, 1, 2, 1e-12)).norm() < 1e-9);
  CHECK((ccw * ccw - expm_oracle(2.0 * kI * oracle::kPi / lambda * omega)).norm() < 1e-9);
}

TEST_CASE("braid relations of the n = 3 and n = 4 KZ gates") {
  const auto sys3 = build_kz(3, 0.5, 3.0);
  for (auto o : {Orientation::Counterclockwise, Orientation::Clockwise}) {
    const auto b = braid_matrices(sys3, 1e-11, o);
    REQUIRE(b.size() == 2);
    const auto report = verify_braid_relations(b, 3);
    CHECK(report.braid_deviation <= 1e-6);
    CHECK((b[0] * b[1] * b[0] - b[1] * b[0] * b[1]).norm() <= 1e-6);
  }
  const auto b3 = braid_matrices(sys3, 1e-11);
  for (int i = 1; i <= 2; ++i) {
    CHECK((b3[i - 1] * b3[i - 1] - full_twist(sys3, i, i + 1, 1e-11)).norm() <= 1e-6);
  }
  // τ₁₃ through its word in the generators.
  const Matrix t13 = word_matrix(b3, pure_braid_word(3, 1, 3));
  CHECK((t13 - full_twist(sys3, 1, 3, 1e-11)).norm() <= 1e-6);

  const auto sys4 = build_kz(4, 0.5, 3.0);
  const auto b4 = braid_matrices(sys4, 1e-11);
  const auto report4 = verify_braid_relations(b4, 4);
  CHECK(report4.braid_deviation <= 1e-6);
  CHECK(report4.commutation_deviation <= 1e-6);
  CHECK((b4[0] * b4[2] - b4[2] * b4[0]).norm() <= 1e-6);
}

TEST_CASE("verify_braid_relations on hand-made inputs") {
  const std::vector<Matrix> ids(3, Matrix::Identity(2, 2));
  const auto trivial = verify_braid_relations(ids, 4);
  CHECK(trivial.max_deviation() == 0.0);
  CHECK(trivial.generator_unitarity == 0.0);

  const std::vector<Matrix> xz{oracle::pauli('x'), oracle::pauli('z')};
  const auto bad = verify_braid_relations(xz, 3);
  const Matrix lhs = oracle::pauli('x') * oracle::pauli('z') * oracle::pauli('x');
  const Matrix rhs = oracle::pauli('z') * oracle::pauli('x') * oracle::pauli('z');
  CHECK(bad.braid_deviation == doctest::Approx((lhs - rhs).norm()).epsilon(1e-14));
  CHECK(bad.braid_deviation == doctest::Approx(2.0));
  CHECK_FALSE(bad.passed(1e-6));
  CHECK_THROWS_AS(verify_braid_relations(xz, 4), InputError);
}

TEST_CASE("invariant Hermitian forms") {
  SUBCASE("unitary inputs keep the identity form") {
    oracle::Rng rng(3);
    const std::vector<Matrix> us{rng.unitary(3), rng.unitary(3)};
    const auto form = invariant_form(us);
    REQUIRE(form.positive());
    CHECK(form.min_eigenvalue == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(form.unitarity_defect < 1e-8);
  }
  SUBCASE("a conjugated unitary pair is unitarized") {
    oracle::Rng rng(4);
    const Matrix s = rng.gaussian(2) + 2.0 * Matrix::Identity(2, 2);
    const Matrix si = s.inverse();
    const std::vector<Matrix> ms{s * rng.unitary(2) * si, s * rng.unitary(2) * si};
    const auto form = invariant_form(ms);
    REQUIRE(form.positive());
    CHECK(form.invariance_defect < 1e-9);
    CHECK(form.unitarity_defect < 1e-8);
  }
  SUBCASE("a Jordan block has no positive form") {
    Matrix j(2, 2);
    j << 1.0, 1.0, 0.0, 1.0;
    const std::vector<Matrix> ms{j};
    CHECK_FALSE(invariant_form(ms).positive());
  }
  SUBCASE("KZ gates at lambda = 5 are unitarizable") {
    const auto b = braid_matrices(build_kz(3, 0.5, 5.0), 1e-11);
    const auto form = invariant_form(b);
    REQUIRE(form.positive());
    CHECK(form.min_eigenvalue > 0.5);
    CHECK(form.unitarity_defect < 1e-8);
    CHECK(unitarity_defect(b[0]) > 1e-3);
    const auto relations = verify_braid_relations(form.unitarized, 3);
    CHECK(relations.braid_deviation <= 1e-6);
  }
  SUBCASE("KZ gates at lambda = 3 admit no positive invariant form") {
    // The three-strand action is not semisimple at this coupling.
    const auto b = braid_matrices(build_kz(3, 0.5, 3.0), 1e-11);
    const auto form = invariant_form(b);
    CHECK_FALSE(form.positive());
    CHECK(form.min_eigenvalue < 1e-6);
  }
}

TEST_CASE("word matrices act letter by letter") {
  oracle::Rng rng(5);
  const std::vector<Matrix> g{rng.unitary(2), rng.unitary(2)};
  const Matrix w = word_matrix(g, {{1, 1}, {2, -1}, {1, 1}});
  CHECK((w - g[0] * g[1].inverse() * g[0]).norm() < 1e-12);
  const Matrix w2 = word_matrix(g, {{2, 1}, {1, 1}});
  CHECK((w2 - g[0] * g[1]).norm() < 1e-12);
  CHECK_THROWS_AS(word_matrix(g, {{3, 1}}), InputError);
}
