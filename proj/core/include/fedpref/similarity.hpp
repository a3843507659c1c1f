#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fedpref/params.hpp"

namespace fedpref {

// Dense symmetric n×n matrix, row-major. Entries lie in [-1, 1].
class SimilarityMatrix {
 public:
  explicit SimilarityMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  std::size_t size() const noexcept { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  // Writes both (i, j) and (j, i), clamping to [-1, 1].
  void set(std::size_t i, std::size_t j, double value);

 private:
  std::size_t n_;
  std::vector<double> data_;
};

// Number of entries top_r keeps for a vector of dimension `dim`: ⌈dim·R⌉,
// at least 1. A 1e-9 slack absorbs representation error in dim·R.
std::size_t top_r_count(std::size_t dim, double ratio);

// Keeps the ⌈dim·R⌉ largest-magnitude entries and zeroes the rest. Among
// equal magnitudes the lower index wins.
std::vector<double> top_r(std::span<const double> v, double ratio);

// ⟨u,v⟩ / (‖u‖‖v‖), clamped to [-1, 1]; 0 when either norm is zero.
double cos_sim(std::span<const double> u, std::span<const double> v);

// Layer-averaged cosine similarity of the top_r-sparsified layers. A layer
// where both sides are zero counts as 1; exactly one zero side counts as 0.
double model_sim(const ParamDelta& a, const ParamDelta& b, double ratio);

SimilarityMatrix similarity_matrix(std::span<const ParamDelta> deltas, double ratio);

}  // namespace fedpref
