#include "fedpref/mo_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "fedpref/errors.hpp"

namespace fedpref {

namespace {

constexpr std::size_t kMaxHypervolumeObjectives = 6;

std::size_t common_dimension(std::span<const ObjectiveVector> s) {
  if (s.empty()) return 0;
  const std::size_t m = s.front().size();
  for (const auto& v : s) {
    if (v.size() != m) throw StructuralError("solutions have different objective counts");
    for (double x : v.values) {
      if (!std::isfinite(x)) throw NumericError("non-finite objective value");
    }
  }
  return m;
}

std::vector<double> rounded(const ObjectiveVector& v) {
  std::vector<double> r(v.size());
  for (std::size_t j = 0; j < v.size(); ++j) r[j] = std::round(v.values[j] * 1e9) / 1e9;
  return r;
}

// a dominates b: a ≥ b everywhere and a > b somewhere.
bool dominates(std::span<const double> a, std::span<const double> b) {
  bool strictly = false;
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (a[j] < b[j]) return false;
    if (a[j] > b[j]) strictly = true;
  }
  return strictly;
}

using Point = std::vector<double>;

// Points are nondominated and strictly dominate ref in every coordinate.
double slice_volume(std::vector<Point> points, std::span<const double> ref, std::size_t dims) {
  if (points.empty()) return 0.0;
  if (dims == 1) {
    double best = ref[0];
    for (const auto& p : points) best = std::max(best, p[0]);
    return best - ref[0];
  }
  const std::size_t last = dims - 1;
  std::sort(points.begin(), points.end(),
            [last](const Point& a, const Point& b) { return a[last] > b[last]; });
  double volume = 0.0;
  std::vector<Point> active;
  for (std::size_t k = 0; k < points.size(); ++k) {
    active.push_back(points[k]);
    const double lower = (k + 1 < points.size()) ? points[k + 1][last] : ref[last];
    const double height = points[k][last] - lower;
    if (height <= 0.0) continue;
    // Drop points dominated in the projected space to keep recursion small.
    std::vector<Point> projected;
    for (const auto& p : active) {
      Point q(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(last));
      projected.push_back(std::move(q));
    }
    std::vector<Point> front;
    for (std::size_t i = 0; i < projected.size(); ++i) {
      bool dominated = false;
      for (std::size_t j = 0; j < projected.size() && !dominated; ++j) {
        if (j == i) continue;
        dominated = dominates(projected[j], projected[i]) ||
                    (projected[j] == projected[i] && j < i);
      }
      if (!dominated) front.push_back(projected[i]);
    }
    volume += height * slice_volume(std::move(front), ref, last);
  }
  return volume;
}

}  // namespace

SolutionSet pareto_front(std::span<const ObjectiveVector> solutions) {
  common_dimension(solutions);
  std::vector<Point> keys;
  SolutionSet unique;
  for (const auto& s : solutions) {
    auto key = rounded(s);
    if (std::find(keys.begin(), keys.end(), key) != keys.end()) continue;
    keys.push_back(std::move(key));
    unique.push_back(s);
  }
  SolutionSet front;
  for (std::size_t i = 0; i < unique.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < unique.size() && !dominated; ++j) {
      dominated = j != i && dominates(keys[j], keys[i]);
    }
    if (!dominated) front.push_back(unique[i]);
  }
  return front;
}

double hypervolume(std::span<const ObjectiveVector> solutions, std::span<const double> reference) {
  const std::size_t m = reference.size();
  if (m == 0) throw StructuralError("hypervolume: empty reference point");
  if (m > kMaxHypervolumeObjectives) {
    throw PreconditionError("hypervolume supports at most 6 objectives");
  }
  if (!solutions.empty() && common_dimension(solutions) != m) {
    throw StructuralError("hypervolume: reference point dimension mismatch");
  }
  std::vector<Point> points;
  for (const auto& s : pareto_front(solutions)) {
    bool inside = true;
    for (std::size_t j = 0; j < m; ++j) inside = inside && s.values[j] > reference[j];
    if (inside) points.push_back(s.values);
  }
  return slice_volume(std::move(points), reference, m);
}

MonteCarloEstimate hypervolume_mc(std::span<const ObjectiveVector> solutions,
                                  std::span<const double> reference, std::size_t samples,
                                  std::uint64_t seed) {
  const std::size_t m = reference.size();
  if (solutions.empty()) return {};
  if (common_dimension(solutions) != m) {
    throw StructuralError("hypervolume_mc: reference point dimension mismatch");
  }
  if (samples == 0) throw PreconditionError("hypervolume_mc needs at least one sample");

  std::vector<double> upper(reference.begin(), reference.end());
  for (const auto& s : solutions) {
    for (std::size_t j = 0; j < m; ++j) upper[j] = std::max(upper[j], s.values[j]);
  }
  double box = 1.0;
  for (std::size_t j = 0; j < m; ++j) box *= upper[j] - reference[j];
  if (box <= 0.0) return {};

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<double> x(m);
  std::size_t hits = 0;
  for (std::size_t k = 0; k < samples; ++k) {
    for (std::size_t j = 0; j < m; ++j) x[j] = reference[j] + unit(rng) * (upper[j] - reference[j]);
    for (const auto& s : solutions) {
      bool covers = true;
      for (std::size_t j = 0; j < m && covers; ++j) covers = s.values[j] >= x[j];
      if (covers) {
        ++hits;
        break;
      }
    }
  }
  const double p = static_cast<double>(hits) / static_cast<double>(samples);
  return {p * box, box * std::sqrt(p * (1.0 - p) / static_cast<double>(samples))};
}

double sparsity(std::span<const ObjectiveVector> solutions) {
  const SolutionSet front = pareto_front(solutions);
  if (front.size() <= 1) return 0.0;
  const std::size_t m = front.front().size();
  double total = 0.0;
  std::vector<double> column(front.size());
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t k = 0; k < front.size(); ++k) column[k] = front[k].values[j];
    std::sort(column.begin(), column.end());
    for (std::size_t k = 0; k + 1 < column.size(); ++k) {
      const double gap = column[k + 1] - column[k];
      total += gap * gap;
    }
  }
  return total / static_cast<double>(front.size() - 1);
}

double igd(std::span<const ObjectiveVector> solutions,
           std::span<const ObjectiveVector> reference_front) {
  if (reference_front.empty()) return 0.0;
  if (solutions.empty()) throw PreconditionError("igd: empty solution set");
  const std::size_t m = common_dimension(solutions);
  if (common_dimension(reference_front) != m) throw StructuralError("igd: dimension mismatch");

  double total = 0.0;
  for (const auto& r : reference_front) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& s : solutions) {
      double d2 = 0.0;
      for (std::size_t j = 0; j < m; ++j) {
        const double d = r.values[j] - s.values[j];
        d2 += d * d;
      }
      best = std::min(best, d2);
    }
    total += std::sqrt(best);
  }
  return total / static_cast<double>(reference_front.size());
}

std::size_t cardinality(std::span<const ObjectiveVector> solutions) {
  return pareto_front(solutions).size();
}

}  // namespace fedpref
