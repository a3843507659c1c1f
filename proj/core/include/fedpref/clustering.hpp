#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "fedpref/similarity.hpp"
#include "fedpref/types.hpp"

namespace fedpref {

// Row-major square matrix used by the eigensolver.
struct SquareMatrix {
  std::size_t n = 0;
  std::vector<double> data;

  explicit SquareMatrix(std::size_t size) : n(size), data(size * size, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return data[i * n + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data[i * n + j]; }
  double frobenius_norm() const;
};

struct Eigenpairs {
  std::array<double, 2> values{};
  std::array<std::vector<double>, 2> vectors;
  std::size_t sweeps = 0;
};

struct JacobiOptions {
  std::size_t max_sweeps = 100;
};

// The two algebraically smallest eigenpairs of a symmetric matrix, computed
// by cyclic Jacobi rotations over the full matrix. Deterministic. Throws
// NumericError carrying the sweep count when the off-diagonal mass does not
// vanish within `max_sweeps`, or when a residual exceeds 1e-8·‖M‖.
Eigenpairs eigen_smallest_two(const SquareMatrix& m, JacobiOptions options = {});

// Two nonempty disjoint sides. `left` holds the side with the smallest id;
// both sides are sorted ascending.
struct Bipartition {
  std::vector<ClientId> left;
  std::vector<ClientId> right;

  friend bool operator==(const Bipartition&, const Bipartition&) = default;
};

// Affinity (S + 1) / 2 clamped to [0, 1].
SquareMatrix affinity_from_similarity(const SimilarityMatrix& s);

// cut(L, R)/vol(L) + cut(L, R)/vol(R) on the affinity of `s`, where `left`
// lists row indices of `s`. Infinite when either side has zero volume.
double normalized_cut(const SimilarityMatrix& s, std::span<const std::size_t> left);

// Splits `members` (row i of `s` belongs to members[i]) by the sign of the
// Fiedler vector of the symmetric normalised Laplacian of the affinity
// (S + 1)/2. Entries that are numerically zero go one at a time, lowest index
// first, to the currently smaller side. When every off-diagonal affinity is
// equal the Fiedler vector carries no information and all entries are
// treated as zero.
Bipartition spectral_bipartition(std::span<const ClientId> members, const SimilarityMatrix& s,
                                 JacobiOptions options = {});

// Exhaustive minimum normalised cut over all proper bipartitions of
// {0, …, n−1}, 2 ≤ n ≤ 12. Ties go to the lexicographically smallest left
// side.
Bipartition brute_force_min_cut(const SimilarityMatrix& s);

}  // namespace fedpref
