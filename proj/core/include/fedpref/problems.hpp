#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <vector>

#include "fedpref/config.hpp"
#include "fedpref/params.hpp"
#include "fedpref/types.hpp"

namespace fedpref {

// Mixes a base seed with a list of stream tags (client id, round, …) into an
// independent 64-bit seed.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags);

// m quadratic objectives f_j(θ) = −(θ − c_j)ᵀ A_j (θ − c_j), maximised.
class QuadraticMOProblem {
 public:
  // `scales` empty means A_j = I for every objective; otherwise one row-major
  // symmetric PSD dim×dim matrix per objective.
  QuadraticMOProblem(std::vector<std::vector<double>> centers,
                     std::vector<std::vector<double>> scales,
                     std::vector<std::size_t> layer_sizes);

  std::size_t objectives() const noexcept { return centers_.size(); }
  std::size_t dimension() const noexcept { return dim_; }
  const std::vector<std::size_t>& layer_sizes() const noexcept { return layer_sizes_; }
  const std::vector<double>& center(std::size_t j) const { return centers_.at(j); }
  bool identity_scales() const noexcept { return scales_.empty(); }

  ObjectiveVector objectives_at(std::span<const double> theta) const;
  ObjectiveVector objectives_at(const LayeredParams& theta) const;
  // Σ_j w_j f_j(θ).
  double scalarised_value(const PreferenceVector& w, std::span<const double> theta) const;
  double scalarised_value(const PreferenceVector& w, const LayeredParams& theta) const;
  // ∇_θ Σ_j w_j f_j(θ) = −2 Σ_j w_j A_j (θ − c_j).
  std::vector<double> scalarised_gradient(const PreferenceVector& w,
                                          std::span<const double> theta) const;

  // (Σ w_j A_j)⁻¹ Σ w_j A_j c_j. Throws NumericError if the weighted matrix
  // is singular.
  std::vector<double> analytic_optimum(const PreferenceVector& w) const;

 private:
  void check(const PreferenceVector& w, std::size_t theta_size) const;
  std::vector<double> apply_scale(std::size_t j, std::span<const double> x) const;

  std::vector<std::vector<double>> centers_;
  std::vector<std::vector<double>> scales_;
  std::vector<std::size_t> layer_sizes_;
  std::size_t dim_ = 0;
};

// Dirichlet(α,…,α); Normal(1/m, σ) clamped at 0 and renormalised; or an
// even lattice on the simplex.
struct PrefDistribution {
  PrefKind kind = PrefKind::kDirichlet;
  std::size_t objectives = 2;
  double alpha = 1.0;
  double sigma = 0.1;
};

// For the equidistant kind, the lattice {k/H : Σk = H} is refined to the
// smallest H with at least n points, and n points are taken evenly spaced
// through its lexicographic enumeration. With m = 2 this is w_1 = i/(n−1).
std::vector<PreferenceVector> generate_preferences(const PrefDistribution& dist, std::size_t n,
                                                   std::uint64_t seed);

struct ProxTerm {
  double mu = 0.0;
  LayeredParams anchor;
};

struct TrainOptions {
  std::size_t steps = 1;
  double learning_rate = 0.1;
  std::optional<ProxTerm> prox;
  double gradient_noise = 0.0;
  std::uint64_t seed = 0;
};

// Gradient ascent on the scalarised objective. With a proximal term the
// penalty (μ/2)‖θ − anchor‖² is handled semi-implicitly,
//   θ ← (θ + η·g(θ) + ημ·anchor) / (1 + ημ),
// which is stable for any μ and reduces to plain ascent at μ = 0.
// Throws NumericError with the 1-based step index on divergence.
LayeredParams local_train(const LayeredParams& start, const QuadraticMOProblem& problem,
                          const PreferenceVector& w, const TrainOptions& options);

// Everything the simulator needs about the client population.
struct ClientBank {
  QuadraticMOProblem problem;
  std::vector<PreferenceVector> preferences;
  std::vector<LayeredParams> initial_models;
  // Group label per client for the conflicting-groups scenario; empty
  // otherwise.
  std::vector<std::size_t> groups;

  std::size_t size() const noexcept { return preferences.size(); }
};

// Antipodal centers ±a·u_k along orthonormal cosine directions u_k.
QuadraticMOProblem conflicting_groups_problem(const ProblemConfig& problem);

ClientBank build_client_bank(const RunConfig& cfg);

}  // namespace fedpref
