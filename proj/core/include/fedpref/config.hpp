#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fedpref {

enum class Algorithm { kFedPref, kFedAvg, kFedProx, kCfl, kLocalOnly };

std::string_view to_string(Algorithm a) noexcept;
// Accepts "fedpref", "fedavg", "fedprox", "cfl", "local". Returns nullopt
// for anything else.
std::optional<Algorithm> parse_algorithm(std::string_view id) noexcept;

enum class ProblemKind { kQuadratic, kConflictingGroups };

struct ProblemConfig {
  ProblemKind kind = ProblemKind::kConflictingGroups;
  // Pseudo-layer partition of the parameter vector.
  std::vector<std::size_t> layer_sizes{4, 4};

  // kQuadratic: one center per objective; optional per-objective scale
  // matrices stored row-major (empty means identity for all objectives).
  std::vector<std::vector<double>> centers;
  std::vector<std::vector<double>> scales;

  // kConflictingGroups: antipodal centers at distance `separation` from the
  // origin, one preference vector and client count per group.
  double separation = 1.0;
  std::size_t objectives = 2;
  std::vector<std::vector<double>> group_preferences;
  std::vector<std::size_t> group_sizes;

  // Std-dev of the iid Normal(0, ·) initial client parameters.
  double init_scale = 1.0;
  // Std-dev of seeded Gaussian noise added to each gradient component.
  double gradient_noise = 0.0;
};

enum class PrefKind { kDirichlet, kGaussian, kEquidistant };

struct PreferenceConfig {
  PrefKind kind = PrefKind::kDirichlet;
  double alpha = 1.0;   // Dirichlet concentration
  double sigma = 0.1;   // Gaussian std-dev around 1/m
};

struct RunConfig {
  Algorithm algorithm = Algorithm::kFedPref;
  std::size_t rounds = 1;
  std::size_t local_steps = 1;
  double learning_rate = 0.1;

  // FedPref
  double clustering_threshold = 0.0;
  std::size_t patience = 1;
  double top_r = 1.0;
  double min_similarity = -1.0;
  bool fine_tune = false;

  // FedProx
  double prox_mu = 0.0;

  // CFL
  double cfl_threshold = 0.0;
  std::size_t cfl_patience = 1;

  ProblemConfig problem;
  PreferenceConfig preferences;

  std::uint64_t seed = 0;
  std::size_t clients = 1;
  // Worker threads for local training. Does not affect results.
  std::size_t threads = 1;

  // Throws PreconditionError naming the offending field.
  void validate() const;
};

inline constexpr std::size_t kNeverSplit = std::numeric_limits<std::size_t>::max();

}  // namespace fedpref
