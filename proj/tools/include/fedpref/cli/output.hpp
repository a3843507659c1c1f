#pragma once

#include <cstddef>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fedpref/federation.hpp"
#include "fedpref/mo_metrics.hpp"
#include "fedpref/problems.hpp"

namespace fedpref::cli {

// Shortest round-trip decimal representation.
std::string format_double(double v);

nlohmann::json report_to_json(const RoundReport& report, const std::string& config_hash);

// Line-delimited round reports, flushed after every record.
class RoundStream {
 public:
  RoundStream(const std::filesystem::path& path, std::string config_hash);
  void write(const RoundReport& report);

 private:
  std::ofstream out_;
  std::string hash_;
  std::size_t last_round_ = 0;
};

// `# config_hash=<hex>` then `client_id,w_1..w_m,f_1..f_m,scalarised`.
void write_solutions_csv(const std::filesystem::path& path, const std::string& config_hash,
                         const ClientBank& bank, const FederationOutcome& outcome);

// Reads the f_* columns of a solutions or reference-front CSV. Lines starting
// with '#' are skipped.
SolutionSet read_objectives_csv(const std::filesystem::path& path);

void write_front_csv(const std::filesystem::path& path, const std::string& config_hash,
                     const SolutionSet& front);

// Pareto front of {f(θ*(w))} over a simplex lattice with `resolution`
// divisions per axis (0 picks a default for the objective count).
SolutionSet analytic_front(const QuadraticMOProblem& problem, std::size_t resolution);

// Elementwise minimum of `front` minus 10% of its per-objective range.
std::vector<double> default_ref_point(const SolutionSet& front);

struct MetricsRecord {
  double mean_scalarised = 0.0;
  double hypervolume = 0.0;
  double sparsity = 0.0;
  double igd = 0.0;
  std::size_t cardinality = 0;
  std::vector<double> ref_point;
  // Solutions that do not dominate the reference point.
  std::size_t clipped = 0;
};

MetricsRecord compute_metrics(const SolutionSet& solutions, std::span<const double> scalarised,
                              const SolutionSet& reference_front,
                              std::span<const double> ref_point);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& path);

}  // namespace fedpref::cli
