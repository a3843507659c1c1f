#include "fedpref/aggregation.hpp"

#include <algorithm>
#include <cmath>

#include "fedpref/errors.hpp"

namespace fedpref {

double aggregation_weight(double similarity, double min_similarity) {
  return (std::max(similarity, min_similarity) - min_similarity) / (1.0 - min_similarity);
}

AggregationResult weighted_aggregate(std::span<const LayeredParams> models,
                                     const SimilarityMatrix& similarity,
                                     double min_similarity) {
  const std::size_t c = models.size();
  if (c == 0) throw PreconditionError("weighted_aggregate: empty cluster");
  if (similarity.size() != c) {
    throw StructuralError("weighted_aggregate: similarity matrix does not match cluster size");
  }
  if (!(min_similarity >= -1.0 && min_similarity < 1.0)) {
    throw PreconditionError("weighted_aggregate: min_similarity must lie in [-1, 1)");
  }
  for (const auto& m : models) {
    if (!m.shape_compatible(models.front())) {
      throw StructuralError("weighted_aggregate: shape mismatch");
    }
  }

  AggregationResult result;
  result.models.reserve(c);
  std::vector<double> row(c);
  for (std::size_t i = 0; i < c; ++i) {
    double total = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
      row[j] = aggregation_weight(similarity(i, j), min_similarity);
      total += row[j];
    }
    if (!(total > 0.0)) {
      result.fallback_rows.push_back(i);
      result.models.push_back(models[i]);
      continue;
    }

    std::vector<std::vector<double>> acc(models[i].layer_count());
    for (std::size_t l = 0; l < acc.size(); ++l) acc[l].assign(models[i].layer(l).size(), 0.0);
    for (std::size_t j = 0; j < c; ++j) {
      const double w = row[j] / total;
      if (w == 0.0) continue;
      for (std::size_t l = 0; l < acc.size(); ++l) {
        const auto& src = models[j].layer(l);
        for (std::size_t k = 0; k < src.size(); ++k) acc[l][k] += w * src[k];
      }
    }
    result.models.emplace_back(std::move(acc));
  }
  return result;
}

AggregationResult weighted_aggregate(std::span<const LayeredParams> models,
                                     std::span<const ParamDelta> deltas, double ratio,
                                     double min_similarity) {
  if (models.size() != deltas.size()) {
    throw StructuralError("weighted_aggregate: models and deltas are not aligned");
  }
  if (models.empty()) throw PreconditionError("weighted_aggregate: empty cluster");
  return weighted_aggregate(models, similarity_matrix(deltas, ratio), min_similarity);
}

LayeredParams plain_mean(std::span<const LayeredParams> models) { return mean(models); }

}  // namespace fedpref
