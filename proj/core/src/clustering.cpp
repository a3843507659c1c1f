#include "fedpref/clustering.hpp"

#include <algorithm>
#include <cstdint>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "fedpref/errors.hpp"

namespace fedpref {

double SquareMatrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : data) s += v * v;
  return std::sqrt(s);
}

namespace {

double off_diagonal_norm(const SquareMatrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.n; ++i) {
    for (std::size_t j = 0; j < a.n; ++j) {
      if (i != j) s += a(i, j) * a(i, j);
    }
  }
  return std::sqrt(s);
}

// Zeroes a(p, q) by a plane rotation; accumulates the rotation into v.
void rotate(SquareMatrix& a, SquareMatrix& v, std::size_t p, std::size_t q) {
  const double apq = a(p, q);
  const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
  const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
  const double c = 1.0 / std::sqrt(t * t + 1.0);
  const double s = t * c;
  const std::size_t n = a.n;

  for (std::size_t k = 0; k < n; ++k) {
    const double akp = a(k, p);
    const double akq = a(k, q);
    a(k, p) = c * akp - s * akq;
    a(k, q) = s * akp + c * akq;
  }
  for (std::size_t k = 0; k < n; ++k) {
    const double apk = a(p, k);
    const double aqk = a(q, k);
    a(p, k) = c * apk - s * aqk;
    a(q, k) = s * apk + c * aqk;
  }
  a(p, q) = 0.0;
  a(q, p) = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double vkp = v(k, p);
    const double vkq = v(k, q);
    v(k, p) = c * vkp - s * vkq;
    v(k, q) = s * vkp + c * vkq;
  }
}

std::vector<ClientId> sorted(std::vector<ClientId> ids) {
  std::sort(ids.begin(), ids.end());
  return ids;
}

Bipartition make_bipartition(std::vector<ClientId> a, std::vector<ClientId> b) {
  a = sorted(std::move(a));
  b = sorted(std::move(b));
  if (b.front() < a.front()) std::swap(a, b);
  return {std::move(a), std::move(b)};
}

}  // namespace

Eigenpairs eigen_smallest_two(const SquareMatrix& m, JacobiOptions options) {
  const std::size_t n = m.n;
  if (n < 2) throw PreconditionError("eigen_smallest_two needs a matrix of size >= 2");
  const double norm = m.frobenius_norm();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (std::abs(m(i, j) - m(j, i)) > 1e-10 * std::max(1.0, norm)) {
        throw PreconditionError("eigen_smallest_two: matrix is not symmetric");
      }
    }
  }

  SquareMatrix a = m;
  SquareMatrix v(n);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;

  const double target = std::numeric_limits<double>::epsilon() * norm;
  std::size_t sweeps = 0;
  while (off_diagonal_norm(a) > target) {
    if (sweeps == options.max_sweeps) {
      throw NumericError("Jacobi eigensolver did not converge after " +
                             std::to_string(sweeps) + " sweeps",
                         sweeps);
    }
    ++sweeps;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a(p, q) != 0.0) rotate(a, v, p, q);
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });

  Eigenpairs out;
  out.sweeps = sweeps;
  for (std::size_t r = 0; r < 2; ++r) {
    const std::size_t col = order[r];
    out.values[r] = a(col, col);
    out.vectors[r].resize(n);
    for (std::size_t k = 0; k < n; ++k) out.vectors[r][k] = v(k, col);

    double residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double mv = 0.0;
      for (std::size_t k = 0; k < n; ++k) mv += m(i, k) * out.vectors[r][k];
      const double e = mv - out.values[r] * out.vectors[r][i];
      residual += e * e;
    }
    if (std::sqrt(residual) > 1e-8 * norm) {
      throw NumericError("Jacobi eigensolver residual too large", sweeps);
    }
  }
  return out;
}

SquareMatrix affinity_from_similarity(const SimilarityMatrix& s) {
  SquareMatrix a(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      a(i, j) = std::clamp((s(i, j) + 1.0) / 2.0, 0.0, 1.0);
    }
  }
  return a;
}

double normalized_cut(const SimilarityMatrix& s, std::span<const std::size_t> left) {
  std::vector<bool> in_left(s.size(), false);
  for (std::size_t i : left) {
    if (i >= s.size()) throw StructuralError("normalized_cut: index out of range");
    in_left[i] = true;
  }
  const SquareMatrix a = affinity_from_similarity(s);
  double cut = 0.0;
  double vol_left = 0.0;
  double vol_right = 0.0;
  for (std::size_t i = 0; i < a.n; ++i) {
    for (std::size_t j = 0; j < a.n; ++j) {
      (in_left[i] ? vol_left : vol_right) += a(i, j);
      if (in_left[i] && !in_left[j]) cut += a(i, j);
    }
  }
  if (vol_left <= 0.0 || vol_right <= 0.0) return std::numeric_limits<double>::infinity();
  return cut / vol_left + cut / vol_right;
}

Bipartition spectral_bipartition(std::span<const ClientId> members, const SimilarityMatrix& s,
                                 JacobiOptions options) {
  const std::size_t n = members.size();
  if (n < 2) throw PreconditionError("spectral_bipartition needs at least two members");
  if (s.size() != n) throw StructuralError("spectral_bipartition: matrix size mismatch");
  if (n == 2) return make_bipartition({members[0]}, {members[1]});

  const SquareMatrix a = affinity_from_similarity(s);
  std::vector<double> degree(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) degree[i] += a(i, j);
    if (!(degree[i] > 0.0)) throw NumericError("spectral_bipartition: zero-degree client");
  }

  double off_min = std::numeric_limits<double>::infinity();
  double off_max = -off_min;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      off_min = std::min(off_min, a(i, j));
      off_max = std::max(off_max, a(i, j));
    }
  }

  std::vector<double> fiedler(n, 0.0);
  if (off_max - off_min > 1e-12) {
    SquareMatrix laplacian(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        laplacian(i, j) = (i == j ? 1.0 : 0.0) - a(i, j) / std::sqrt(degree[i] * degree[j]);
      }
    }
    const Eigenpairs eig = eigen_smallest_two(laplacian, options);
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      fiedler[i] = eig.vectors[1][i] / std::sqrt(degree[i]);
      scale = std::max(scale, std::abs(fiedler[i]));
    }
    for (double& f : fiedler) {
      if (std::abs(f) <= 1e-10 * scale) f = 0.0;
    }
  }

  std::vector<ClientId> pos;
  std::vector<ClientId> neg;
  for (std::size_t i = 0; i < n; ++i) {
    if (fiedler[i] > 0.0) pos.push_back(members[i]);
    if (fiedler[i] < 0.0) neg.push_back(members[i]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (fiedler[i] != 0.0) continue;
    (pos.size() <= neg.size() ? pos : neg).push_back(members[i]);
  }

  if (pos.empty() || neg.empty()) {
    std::size_t loner = 0;
    double lowest = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < n; ++i) {
      const double avg = (degree[i] - a(i, i)) / static_cast<double>(n - 1);
      if (avg < lowest) {
        lowest = avg;
        loner = i;
      }
    }
    std::vector<ClientId> rest;
    for (std::size_t i = 0; i < n; ++i) {
      if (i != loner) rest.push_back(members[i]);
    }
    return make_bipartition({members[loner]}, std::move(rest));
  }
  return make_bipartition(std::move(pos), std::move(neg));
}

Bipartition brute_force_min_cut(const SimilarityMatrix& s) {
  const std::size_t n = s.size();
  if (n < 2 || n > 12) throw PreconditionError("brute_force_min_cut supports 2 <= n <= 12");

  const std::uint32_t full = (1u << n) - 1u;
  double best = std::numeric_limits<double>::infinity();
  std::vector<ClientId> best_left;
  // Client 0 is always on the left, so each bipartition is visited once.
  for (std::uint32_t mask = 1; mask < full; mask += 2) {
    std::vector<ClientId> left;
    for (std::size_t i = 0; i < n; ++i) {
      if ((mask >> i) & 1u) left.push_back(i);
    }
    const double value = normalized_cut(s, left);
    const double tol = 1e-12 * std::max(1.0, std::abs(best));
    const bool first = best_left.empty();
    if (first || value < best - tol || (std::abs(value - best) <= tol && left < best_left)) {
      best = value;
      best_left = std::move(left);
    }
  }
  std::vector<ClientId> right;
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::binary_search(best_left.begin(), best_left.end(), i)) right.push_back(i);
  }
  return make_bipartition(std::move(best_left), std::move(right));
}

}  // namespace fedpref
