#include "fedpref/similarity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fedpref/errors.hpp"

namespace fedpref {

namespace {

double dot(std::span<const double> u, std::span<const double> v) {
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) s += u[k] * v[k];
  return s;
}

bool all_zero(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

// Both layers are already sparsified.
double layer_sim(std::span<const double> u, std::span<const double> v) {
  const bool zu = all_zero(u);
  const bool zv = all_zero(v);
  if (zu && zv) return 1.0;
  if (zu || zv) return 0.0;
  return cos_sim(u, v);
}

using SparseLayers = std::vector<std::vector<double>>;

SparseLayers sparsify(const ParamDelta& d, double ratio) {
  SparseLayers out;
  out.reserve(d.layer_count());
  for (const auto& layer : d.layers()) out.push_back(top_r(layer, ratio));
  return out;
}

double sparse_model_sim(const SparseLayers& a, const SparseLayers& b) {
  double sum = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l) sum += layer_sim(a[l], b[l]);
  return std::clamp(sum / static_cast<double>(a.size()), -1.0, 1.0);
}

void check_ratio(double ratio) {
  if (!(ratio > 0.0 && ratio <= 1.0)) throw PreconditionError("top_r ratio must lie in (0, 1]");
}

}  // namespace

void SimilarityMatrix::set(std::size_t i, std::size_t j, double value) {
  const double v = std::clamp(value, -1.0, 1.0);
  data_[i * n_ + j] = v;
  data_[j * n_ + i] = v;
}

std::size_t top_r_count(std::size_t dim, double ratio) {
  check_ratio(ratio);
  const auto k = static_cast<std::size_t>(std::ceil(static_cast<double>(dim) * ratio - 1e-9));
  return std::clamp<std::size_t>(k, 1, dim);
}

std::vector<double> top_r(std::span<const double> v, double ratio) {
  if (v.empty()) throw StructuralError("top_r of an empty vector");
  const std::size_t k = top_r_count(v.size(), ratio);
  if (k == v.size()) return {v.begin(), v.end()};

  std::vector<std::size_t> order(v.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(v[a]) > std::abs(v[b]);
  });
  std::vector<double> out(v.size(), 0.0);
  for (std::size_t r = 0; r < k; ++r) out[order[r]] = v[order[r]];
  return out;
}

double cos_sim(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) throw StructuralError("cos_sim: dimension mismatch");
  const double nu = std::sqrt(dot(u, u));
  const double nv = std::sqrt(dot(v, v));
  if (nu == 0.0 || nv == 0.0) return 0.0;
  const double c = dot(u, v) / (nu * nv);
  if (!std::isfinite(c)) throw NumericError("cos_sim: non-finite result");
  return std::clamp(c, -1.0, 1.0);
}

double model_sim(const ParamDelta& a, const ParamDelta& b, double ratio) {
  if (!a.shape_compatible(b)) throw StructuralError("model_sim: shape mismatch");
  check_ratio(ratio);
  return sparse_model_sim(sparsify(a, ratio), sparsify(b, ratio));
}

SimilarityMatrix similarity_matrix(std::span<const ParamDelta> deltas, double ratio) {
  if (deltas.empty()) throw PreconditionError("similarity_matrix needs at least one delta");
  check_ratio(ratio);
  std::vector<SparseLayers> sparse;
  sparse.reserve(deltas.size());
  for (const auto& d : deltas) {
    if (!d.shape_compatible(deltas.front())) {
      throw StructuralError("similarity_matrix: shape mismatch");
    }
    sparse.push_back(sparsify(d, ratio));
  }
  SimilarityMatrix s(deltas.size());
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    for (std::size_t j = i; j < deltas.size(); ++j) {
      s.set(i, j, sparse_model_sim(sparse[i], sparse[j]));
    }
  }
  return s;
}

}  // namespace fedpref
