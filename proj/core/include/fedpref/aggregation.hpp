#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fedpref/params.hpp"
#include "fedpref/similarity.hpp"

namespace fedpref {

struct AggregationResult {
  std::vector<LayeredParams> models;
  // Rows whose clipped weights summed to zero; those clients kept their model.
  std::vector<std::size_t> fallback_rows;
};

// Clip-then-map: (max(s, s_min) − s_min) / (1 − s_min), in [0, 1].
double aggregation_weight(double similarity, double min_similarity);

// Personalised mixing from a precomputed similarity matrix: client i gets
// Σ_j ŵ_ij θ_j with ŵ_i the normalised row of clipped, mapped similarities.
AggregationResult weighted_aggregate(std::span<const LayeredParams> models,
                                     const SimilarityMatrix& similarity,
                                     double min_similarity);

// Builds the similarity matrix from `deltas` (index-aligned with `models`)
// and mixes as above.
AggregationResult weighted_aggregate(std::span<const LayeredParams> models,
                                     std::span<const ParamDelta> deltas, double ratio,
                                     double min_similarity);

// Elementwise mean, used for cluster means and the FedAvg global model.
LayeredParams plain_mean(std::span<const LayeredParams> models);

}  // namespace fedpref
