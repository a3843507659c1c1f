#include "fedpref/config.hpp"

#include <cmath>
#include <numeric>

#include "fedpref/errors.hpp"

namespace fedpref {

std::string_view to_string(Algorithm a) noexcept {
  switch (a) {
    case Algorithm::kFedPref: return "fedpref";
    case Algorithm::kFedAvg: return "fedavg";
    case Algorithm::kFedProx: return "fedprox";
    case Algorithm::kCfl: return "cfl";
    case Algorithm::kLocalOnly: return "local";
  }
  return "unknown";
}

std::optional<Algorithm> parse_algorithm(std::string_view id) noexcept {
  if (id == "fedpref") return Algorithm::kFedPref;
  if (id == "fedavg") return Algorithm::kFedAvg;
  if (id == "fedprox") return Algorithm::kFedProx;
  if (id == "cfl") return Algorithm::kCfl;
  if (id == "local") return Algorithm::kLocalOnly;
  return std::nullopt;
}

namespace {

void require(bool ok, const char* field, const char* what) {
  if (!ok) throw PreconditionError(std::string(field) + ": " + what);
}

}  // namespace

void RunConfig::validate() const {
  require(rounds >= 1, "federation.rounds", "must be >= 1");
  require(local_steps >= 1, "federation.local_steps", "must be >= 1");
  require(std::isfinite(learning_rate) && learning_rate > 0.0,
          "federation.learning_rate", "must be > 0");
  require(clients >= 1, "federation.clients", "must be >= 1");
  require(top_r > 0.0 && top_r <= 1.0, "federation.top_r", "must lie in (0, 1]");
  require(min_similarity >= -1.0 && min_similarity < 1.0, "federation.min_similarity",
          "must lie in [-1, 1)");
  require(std::isfinite(clustering_threshold), "federation.clustering_threshold",
          "must be finite");
  require(patience >= 1, "federation.patience", "must be >= 1");
  require(std::isfinite(prox_mu) && prox_mu >= 0.0, "federation.prox_mu", "must be >= 0");
  require(std::isfinite(cfl_threshold), "federation.cfl_threshold", "must be finite");
  require(cfl_patience >= 1, "federation.cfl_patience", "must be >= 1");
  require(threads >= 1, "threads", "must be >= 1");

  require(!problem.layer_sizes.empty(), "problem.layers", "must list at least one layer");
  for (std::size_t s : problem.layer_sizes) require(s >= 1, "problem.layers", "layer sizes must be >= 1");
  require(problem.init_scale >= 0.0, "problem.init_scale", "must be >= 0");
  require(problem.gradient_noise >= 0.0, "problem.gradient_noise", "must be >= 0");

  const std::size_t dim = std::accumulate(problem.layer_sizes.begin(),
                                          problem.layer_sizes.end(), std::size_t{0});
  if (problem.kind == ProblemKind::kQuadratic) {
    require(problem.centers.size() >= 2, "problem.centers", "need at least two objectives");
    for (const auto& c : problem.centers) {
      require(c.size() == dim, "problem.centers", "center dimension must equal sum of layers");
    }
    require(problem.scales.empty() || problem.scales.size() == problem.centers.size(),
            "problem.scales", "need one matrix per objective");
    for (const auto& a : problem.scales) {
      require(a.size() == dim * dim, "problem.scales", "each matrix needs dim*dim entries");
    }
    require(preferences.alpha > 0.0, "preferences.alpha", "must be > 0");
    require(preferences.sigma >= 0.0, "preferences.sigma", "must be >= 0");
  } else {
    require(problem.objectives >= 2, "problem.objectives", "must be >= 2");
    require(problem.separation > 0.0, "problem.separation", "must be > 0");
    require(!problem.group_sizes.empty(), "problem.group_sizes", "must be nonempty");
    require(problem.group_preferences.size() == problem.group_sizes.size(),
            "problem.group_preferences", "need one preference vector per group");
    for (const auto& w : problem.group_preferences) {
      require(w.size() == problem.objectives, "problem.group_preferences",
              "each vector needs one weight per objective");
    }
    const std::size_t total = std::accumulate(problem.group_sizes.begin(),
                                              problem.group_sizes.end(), std::size_t{0});
    require(total == clients, "problem.group_sizes", "must sum to federation.clients");
    require((problem.objectives + 1) / 2 <= dim, "problem.objectives",
            "too many objectives for the model dimension");
  }
}

}  // namespace fedpref
