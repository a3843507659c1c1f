#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fedpref/types.hpp"

namespace fedpref {

// Objective vectors under the maximisation convention.
using SolutionSet = std::vector<ObjectiveVector>;

// Maximal nondominated subset, in first-occurrence order. Points equal after
// rounding to 9 decimal digits count as one solution.
SolutionSet pareto_front(std::span<const ObjectiveVector> solutions);

// Lebesgue measure of ∪ [r, s] over the front, computed by recursive slicing
// along the last objective. Points that do not strictly dominate r in every
// objective contribute nothing. Supports up to 6 objectives.
double hypervolume(std::span<const ObjectiveVector> solutions, std::span<const double> reference);

struct MonteCarloEstimate {
  double value = 0.0;
  double standard_error = 0.0;
};

// Uniform sampling of the box [r, max over solutions]; test oracle for
// hypervolume().
MonteCarloEstimate hypervolume_mc(std::span<const ObjectiveVector> solutions,
                                  std::span<const double> reference, std::size_t samples,
                                  std::uint64_t seed);

// (1/(|P|−1)) Σ_j Σ_k (P̃_j(k) − P̃_j(k+1))² over the Pareto front P with each
// objective sorted independently; 0 when |P| ≤ 1.
double sparsity(std::span<const ObjectiveVector> solutions);

// Mean over reference points of the Euclidean distance to the nearest
// solution.
double igd(std::span<const ObjectiveVector> solutions,
           std::span<const ObjectiveVector> reference_front);

// |pareto_front(S)|.
std::size_t cardinality(std::span<const ObjectiveVector> solutions);

}  // namespace fedpref
