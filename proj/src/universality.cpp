#include "monodromy/universality.hpp"

#include "monodromy/errors.hpp"
#include "monodromy/parallel.hpp"

#include <boost/functional/hash.hpp>

#include <cmath>
#include <limits>
#include <random>
#include <unordered_set>

namespace monodromy {
namespace {

using Key = std::vector<std::int64_t>;

struct KeyHash {
  std::size_t operator()(const Key& k) const { return boost::hash_range(k.begin(), k.end()); }
};

// Entries rounded to the grid after removing the phase of the first entry of
// modulus above 1/(2√d). Each unitary column has an entry of modulus ≥ 1/√d.
Key projective_key(const Matrix& m, double grid) {
  const double threshold = 0.5 / std::sqrt(static_cast<double>(m.rows()));
  Complex phase = 1.0;
  for (Eigen::Index k = 0; k < m.size(); ++k) {
    const Complex z = m.data()[k];
    if (std::abs(z) > threshold) {
      phase = std::conj(z) / std::abs(z);
      break;
    }
  }
  Key key;
  key.reserve(static_cast<std::size_t>(2 * m.size()));
  for (Eigen::Index k = 0; k < m.size(); ++k) {
    const Complex z = phase * m.data()[k];
    key.push_back(std::llround(z.real() / grid));
    key.push_back(std::llround(z.imag() / grid));
  }
  return key;
}

}  // namespace

GateSet::GateSet(std::vector<QuantumGate> generators, std::vector<std::string> labels)
    : generators_(std::move(generators)), labels_(std::move(labels)) {
  if (generators_.empty()) throw InputError("gate set is empty");
  for (const auto& g : generators_) {
    if (g.dim() != generators_.front().dim()) throw InputError("gate set: generators differ in dimension");
  }
  if (labels_.empty()) {
    for (std::size_t k = 0; k < generators_.size(); ++k) labels_.push_back("g" + std::to_string(k + 1));
  }
  if (labels_.size() != generators_.size()) throw InputError("gate set: label count mismatch");
}

std::string to_string(DensityVerdict v) {
  switch (v) {
    case DensityVerdict::Abelian:
      return "abelian";
    case DensityVerdict::FiniteSuspect:
      return "finite-suspect";
    case DensityVerdict::DenseLikely:
      return "dense-likely";
  }
  return "unknown";
}

WordEnumeration enumerate_words(const GateSet& gs, int max_length, double grid, std::size_t node_budget) {
  if (max_length < 0) throw InputError("enumerate_words: negative word length");
  if (!(grid > 0.0)) throw InputError("enumerate_words: grid must be positive");
  WordEnumeration out;
  std::unordered_set<Key, KeyHash> seen;
  const Matrix id = identity(gs.dim());
  seen.insert(projective_key(id, grid));
  out.elements.push_back(id);
  out.level_sizes.push_back(1);

  std::size_t frontier_begin = 0;
  const std::size_t g = gs.size();
  for (int length = 1; length <= max_length; ++length) {
    const std::size_t frontier_end = out.elements.size();
    const std::size_t count = (frontier_end - frontier_begin) * g;
    std::vector<Matrix> candidates(count);
    std::vector<Key> keys(count);
    parallel_for(count, [&](std::size_t c) {
      const Matrix& parent = out.elements[frontier_begin + c / g];
      candidates[c] = gs.generators()[c % g].matrix() * parent;
      keys[c] = projective_key(candidates[c], grid);
    });
    for (std::size_t c = 0; c < count; ++c) {
      if (out.elements.size() >= node_budget) {
        out.budget_exhausted = true;
        break;
      }
      if (seen.insert(std::move(keys[c])).second) out.elements.push_back(std::move(candidates[c]));
    }
    out.level_sizes.push_back(out.elements.size());
    if (out.budget_exhausted || out.elements.size() == frontier_end) break;
    frontier_begin = frontier_end;
  }
  return out;
}

ScreenResult density_screen(const GateSet& gs, const ScreenOptions& options) {
  if (options.max_length < 1) throw InputError("density_screen: max_length must be at least 1");
  ScreenResult result;
  const auto& gens = gs.generators();
  for (std::size_t a = 0; a < gens.size(); ++a) {
    for (std::size_t b = a + 1; b < gens.size(); ++b) {
      result.max_commutator = std::max(result.max_commutator, commutator(gens[a].matrix(), gens[b].matrix()).norm());
    }
  }
  if (result.max_commutator <= options.commute_tol) {
    result.verdict = DensityVerdict::Abelian;
    return result;
  }
  const auto words = enumerate_words(gs, options.max_length, options.grid, options.node_budget);
  result.closure_sizes = words.level_sizes;
  result.budget_exhausted = words.budget_exhausted;
  const auto n = words.level_sizes.size();
  result.saturated = !words.budget_exhausted && n >= 2 && words.level_sizes[n - 1] == words.level_sizes[n - 2];
  result.verdict = result.saturated ? DensityVerdict::FiniteSuspect : DensityVerdict::DenseLikely;
  return result;
}

std::vector<Matrix> haar_su2(std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Matrix> out;
  out.reserve(count);
  while (out.size() < count) {
    double x[4];
    for (double& v : x) v = normal(rng);
    const double r = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2] + x[3] * x[3]);
    if (r < 1e-12) continue;
    const Complex a(x[0] / r, x[1] / r);
    const Complex b(x[2] / r, x[3] / r);
    Matrix u(2, 2);
    u << a, b, -std::conj(b), std::conj(a);
    out.push_back(std::move(u));
  }
  return out;
}

CoverageResult epsilon_net_coverage(const GateSet& gs, int max_length, double epsilon, std::size_t samples,
                                    std::uint64_t seed, std::size_t node_budget) {
  if (gs.dim() != 2) throw InputError("epsilon_net_coverage: only single-qubit gate sets are supported");
  if (!(epsilon > 0.0)) throw InputError("epsilon_net_coverage: epsilon must be positive");
  if (max_length < 0) throw InputError("epsilon_net_coverage: negative word length");
  const auto words = enumerate_words(gs, max_length, 1e-6, node_budget);
  const auto targets = haar_su2(samples, seed);

  CoverageResult result;
  result.samples = samples;
  result.words = words.elements.size();
  result.partial = words.budget_exhausted;
  result.distances.assign(samples, std::numeric_limits<double>::infinity());
  parallel_for(samples, [&](std::size_t s) {
    const Matrix t = targets[s].adjoint();
    // d² = 4 − 2|tr(t† w)| for 2×2 unitaries, so maximize |tr|.
    double best = 0.0;
    for (const auto& w : words.elements) {
      const Complex tr = t(0, 0) * w(0, 0) + t(0, 1) * w(1, 0) + t(1, 0) * w(0, 1) + t(1, 1) * w(1, 1);
      best = std::max(best, std::abs(tr));
    }
    result.distances[s] = std::sqrt(std::max(0.0, 4.0 - 2.0 * best));
  });
  for (double d : result.distances) {
    if (d <= epsilon) ++result.covered;
  }
  result.fraction = samples == 0 ? 0.0 : static_cast<double>(result.covered) / static_cast<double>(samples);
  return result;
}

}  // namespace monodromy
