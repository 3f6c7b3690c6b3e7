#include "monodromy/errors.hpp"
#include "monodromy/universality.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace monodromy;

namespace {

GateSet gates(std::initializer_list<const char*> names) {
  std::vector<QuantumGate> g;
  for (const char* n : names) g.push_back(parse_gate(n));
  return GateSet(g);
}

GateSet conjugated(const GateSet& gs, const Matrix& v) {
  std::vector<QuantumGate> g;
  for (const auto& x : gs.generators()) g.emplace_back(v * x.matrix() * v.adjoint(), 1e-9);
  return GateSet(g);
}

}  // namespace

TEST_CASE("verdicts") {
  CHECK(density_screen(gates({"Z"})).verdict == DensityVerdict::Abelian);
  CHECK(density_screen(gates({"PHASE:0.3333333333333333"})).verdict == DensityVerdict::Abelian);
  CHECK(density_screen(gates({"Z", "PHASE:0.25"})).verdict == DensityVerdict::Abelian);

  const auto pauli = density_screen(gates({"X", "Z"}));
  CHECK(pauli.verdict == DensityVerdict::FiniteSuspect);
  CHECK(pauli.saturated);
  CHECK(pauli.closure_sizes.back() == 4);
  CHECK(pauli.max_commutator == doctest::Approx(2.0 * std::sqrt(2.0)));

  // Clifford group modulo phase has 24 elements.
  const auto clifford = density_screen(gates({"H_std", "PHASE:0.5"}));
  CHECK(clifford.verdict == DensityVerdict::FiniteSuspect);
  CHECK(clifford.closure_sizes.back() == 24);

  ScreenOptions opts;
  opts.node_budget = 20000;
  const auto dense = density_screen(gates({"H_std", "PHASE:0.25"}), opts);
  CHECK(dense.verdict == DensityVerdict::DenseLikely);
  CHECK_FALSE(dense.saturated);
  for (std::size_t k = 1; k < dense.closure_sizes.size(); ++k) {
    CHECK(dense.closure_sizes[k] > dense.closure_sizes[k - 1]);
  }

  CHECK(to_string(DensityVerdict::Abelian) == "abelian");
  CHECK(to_string(DensityVerdict::FiniteSuspect) == "finite-suspect");
  CHECK(to_string(DensityVerdict::DenseLikely) == "dense-likely");
}

TEST_CASE("verdicts are conjugation invariant") {
  oracle::Rng rng(1);
  ScreenOptions opts;
  opts.node_budget = 20000;
  for (auto gs : {gates({"Z", "PHASE:0.25"}), gates({"X", "Z"}), gates({"H_std", "PHASE:0.5"}),
                  gates({"H_std", "PHASE:0.25"})}) {
    const auto base = density_screen(gs, opts).verdict;
    for (int trial = 0; trial < 3; ++trial) {
      CHECK(density_screen(conjugated(gs, rng.unitary(2)), opts).verdict == base);
    }
  }
}

TEST_CASE("word enumeration is projective and breadth first") {
  const auto e = enumerate_words(gates({"X", "Z"}), 5, 1e-6, 1000);
  // Stops once a level adds nothing new.
  REQUIRE(e.level_sizes.size() == 4);
  CHECK(e.level_sizes[0] == 1);
  CHECK(e.level_sizes[1] == 3);
  CHECK(e.level_sizes[2] == 4);
  CHECK(e.level_sizes[3] == 4);
  CHECK_FALSE(e.budget_exhausted);
  CHECK(e.elements.size() == 4);
  CHECK((e.elements[0] - Matrix::Identity(2, 2)).norm() == 0.0);
  for (std::size_t a = 0; a < e.elements.size(); ++a) {
    for (std::size_t b = a + 1; b < e.elements.size(); ++b) {
      CHECK(oracle::projective_distance_search(e.elements[a], e.elements[b]) > 0.1);
    }
  }
  const auto capped = enumerate_words(gates({"H_std", "PHASE:0.25"}), 30, 1e-6, 500);
  CHECK(capped.budget_exhausted);
  CHECK(capped.elements.size() <= 500);
}

TEST_CASE("haar samples on SU(2)") {
  const auto s = haar_su2(20000, 3);
  double second_moment = 0.0;
  for (const auto& u : s) {
    CHECK(unitarity_defect(u) < 1e-12);
    CHECK(std::abs(u.determinant() - 1.0) < 1e-12);
    second_moment += std::norm(u.trace());
  }
  // E|tr U|² = 1 under Haar measure.
  CHECK(second_moment / s.size() == doctest::Approx(1.0).epsilon(0.05));
  CHECK(haar_su2(5, 9)[4] == haar_su2(5, 9)[4]);
}

TEST_CASE("coverage distances match a brute-force oracle") {
  const auto res = epsilon_net_coverage(gates({"X", "Z"}), 4, 0.5, 50, 11);
  REQUIRE(res.distances.size() == 50);
  const auto targets = haar_su2(50, 11);
  const std::vector<Matrix> group{Matrix::Identity(2, 2), oracle::pauli('x'), oracle::pauli('z'),
                                  oracle::pauli('x') * oracle::pauli('z')};
  std::size_t covered = 0;
  for (std::size_t k = 0; k < targets.size(); ++k) {
    double best = 1e9;
    for (const auto& g : group) best = std::min(best, oracle::projective_distance_search(targets[k], g));
    CHECK(res.distances[k] == doctest::Approx(best).epsilon(1e-6));
    if (best <= 0.5) ++covered;
  }
  CHECK(res.covered == covered);
  CHECK(res.fraction == doctest::Approx(double(covered) / 50.0));
}

TEST_CASE("coverage properties") {
  const auto id = epsilon_net_coverage(GateSet({QuantumGate(Matrix::Identity(2, 2))}), 4, 0.1, 200, 7);
  CHECK(id.fraction < 0.02);
  CHECK(id.words == 1);

  const auto gs = gates({"H_std", "PHASE:0.25"});
  double prev = -1.0;
  for (int len : {2, 4, 6, 8}) {
    const double f = epsilon_net_coverage(gs, len, 0.5, 100, 5).fraction;
    CHECK(f >= prev);
    prev = f;
  }
  prev = -1.0;
  for (double eps : {0.2, 0.4, 0.6, 0.8}) {
    const double f = epsilon_net_coverage(gs, 6, eps, 100, 5).fraction;
    CHECK(f >= prev);
    prev = f;
  }

  const auto abelian = gates({"PHASE:0.3333333333333333"});
  REQUIRE(density_screen(abelian).verdict == DensityVerdict::Abelian);
  for (int len : {4, 12}) CHECK(epsilon_net_coverage(abelian, len, 0.3, 200, 7).fraction < 0.5);

  CHECK_THROWS_AS(epsilon_net_coverage(gs, 4, 0.0, 10, 1), InputError);
  CHECK_THROWS_AS(epsilon_net_coverage(GateSet({cnot()}), 4, 0.5, 10, 1), InputError);
}

TEST_CASE("screens in higher dimension") {
  std::vector<QuantumGate> two{cnot(), tensor(std::vector<QuantumGate>{parse_gate("Z"), parse_gate("PHASE:0")})};
  CHECK(density_screen(GateSet(two)).verdict == DensityVerdict::Abelian);
  std::vector<QuantumGate> mixed{cnot(), tensor(std::vector<QuantumGate>{parse_gate("H_std"), parse_gate("X")})};
  CHECK(density_screen(GateSet(mixed)).verdict == DensityVerdict::FiniteSuspect);
  CHECK_THROWS_AS(GateSet({parse_gate("X"), cnot()}), InputError);
  CHECK_THROWS_AS(GateSet({}), InputError);
}
