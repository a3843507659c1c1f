#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fedpref/params.hpp"

namespace fedpref {

using ClientId = std::size_t;

// Per-client objective weights on the probability simplex. Input weights are
// renormalised to sum to one; negative or non-finite entries and an all-zero
// vector are rejected. Zero weights on individual objectives are allowed.
class PreferenceVector {
 public:
  explicit PreferenceVector(std::vector<double> weights);

  std::size_t size() const noexcept { return weights_.size(); }
  double operator[](std::size_t j) const { return weights_.at(j); }
  std::span<const double> weights() const noexcept { return weights_; }

  friend bool operator==(const PreferenceVector&, const PreferenceVector&) = default;

 private:
  std::vector<double> weights_;
};

// (f_1(θ), …, f_m(θ)) for one client, maximisation convention.
struct ObjectiveVector {
  std::vector<double> values;

  std::size_t size() const noexcept { return values.size(); }
  friend bool operator==(const ObjectiveVector&, const ObjectiveVector&) = default;
};

struct ClusterState {
  std::vector<ClientId> members;
  LayeredParams mean_model;  // mean of members' post-aggregation models
  std::size_t rounds_below_threshold = 0;
};

// Throws PreconditionError unless every id in [0, client_count) appears in
// exactly one cluster and no cluster is empty.
void check_partition(std::span<const ClusterState> clusters, std::size_t client_count);
void check_partition(std::span<const std::vector<ClientId>> clusters,
                     std::size_t client_count);

}  // namespace fedpref
