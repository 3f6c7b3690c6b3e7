#pragma once

#include "monodromy/gate.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace monodromy {

/// A finite set of gates of common dimension.
class GateSet {
 public:
  GateSet(std::vector<QuantumGate> generators, std::vector<std::string> labels = {});

  const std::vector<QuantumGate>& generators() const noexcept { return generators_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  Eigen::Index dim() const noexcept { return generators_.front().dim(); }
  std::size_t size() const noexcept { return generators_.size(); }

 private:
  std::vector<QuantumGate> generators_;
  std::vector<std::string> labels_;
};

enum class DensityVerdict { Abelian, FiniteSuspect, DenseLikely };

std::string to_string(DensityVerdict v);

struct ScreenOptions {
  int max_length = 16;
  double grid = 1e-6;          // projective deduplication grid
  double commute_tol = 1e-10;
  std::size_t node_budget = 200000;
};

struct ScreenResult {
  DensityVerdict verdict = DensityVerdict::DenseLikely;
  double max_commutator = 0.0;
  /// Distinct projective elements with word length ≤ L, L = 0, 1, …
  std::vector<std::size_t> closure_sizes;
  bool saturated = false;
  bool budget_exhausted = false;
};

/// Heuristic three-way screen. Abelian if all generators commute; otherwise
/// the projective closure is grown word length by word length and the set is
/// finite-suspect if it stops growing before max_length.
ScreenResult density_screen(const GateSet& gs, const ScreenOptions& options = {});

/// Projectively distinct products of the generators with word length ≤
/// max_length, breadth first, identity first. Stops after node_budget elements or once a level adds nothing.
struct WordEnumeration {
  std::vector<Matrix> elements;
  std::vector<std::size_t> level_sizes;  // cumulative count after each length
  bool budget_exhausted = false;
};

WordEnumeration enumerate_words(const GateSet& gs, int max_length, double grid, std::size_t node_budget);

/// Uniform (Haar) samples on SU(2) from a normalized 4-D Gaussian.
std::vector<Matrix> haar_su2(std::size_t count, std::uint64_t seed);

struct CoverageResult {
  double fraction = 0.0;
  std::size_t covered = 0;
  std::size_t samples = 0;
  std::size_t words = 0;
  bool partial = false;  // enumeration hit the node budget
  std::vector<double> distances;  // per sample, to the nearest word
};

/// Fraction of Haar targets within projective distance ε of some word of
/// length ≤ max_length. dim must be 2.
CoverageResult epsilon_net_coverage(const GateSet& gs, int max_length, double epsilon, std::size_t samples,
                                    std::uint64_t seed, std::size_t node_budget = 2000000);

}  // namespace monodromy
