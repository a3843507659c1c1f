#include "fedpref/types.hpp"

#include <cmath>
#include <string>

#include "fedpref/errors.hpp"

namespace fedpref {

PreferenceVector::PreferenceVector(std::vector<double> weights)
    : weights_(std::move(weights)) {
  if (weights_.empty()) throw PreconditionError("preference vector is empty");
  double sum = 0.0;
  for (double w : weights_) {
    if (!std::isfinite(w) || w < 0.0) {
      throw PreconditionError("preference weights must be finite and nonnegative");
    }
    sum += w;
  }
  if (sum <= 0.0) throw PreconditionError("preference weights sum to zero");
  for (double& w : weights_) w /= sum;
}

void check_partition(std::span<const std::vector<ClientId>> clusters,
                     std::size_t client_count) {
  std::vector<int> seen(client_count, 0);
  for (const auto& members : clusters) {
    if (members.empty()) throw PreconditionError("empty cluster");
    for (ClientId id : members) {
      if (id >= client_count) {
        throw PreconditionError("cluster member " + std::to_string(id) + " out of range");
      }
      if (seen[id]++ != 0) {
        throw PreconditionError("client " + std::to_string(id) + " in more than one cluster");
      }
    }
  }
  for (std::size_t i = 0; i < client_count; ++i) {
    if (seen[i] == 0) {
      throw PreconditionError("client " + std::to_string(i) + " not in any cluster");
    }
  }
}

void check_partition(std::span<const ClusterState> clusters, std::size_t client_count) {
  std::vector<std::vector<ClientId>> members;
  members.reserve(clusters.size());
  for (const auto& c : clusters) members.push_back(c.members);
  check_partition(std::span<const std::vector<ClientId>>(members), client_count);
}

}  // namespace fedpref
