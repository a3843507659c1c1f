#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "fedpref/config.hpp"
#include "fedpref/problems.hpp"
#include "fedpref/types.hpp"

namespace fedpref {

struct RoundEvent {
  enum class Kind {
    kSplit,            // cluster `cluster` was bipartitioned into `left`/`right`
    kSplitSkipped,     // split criterion met but all member updates identical
    kZeroRowFallback,  // `client` kept its own model during aggregation
  };
  Kind kind = Kind::kSplit;
  std::size_t cluster = 0;  // index into the previous round's cluster list
  std::vector<ClientId> left;
  std::vector<ClientId> right;
  ClientId client = 0;
};

std::string_view to_string(RoundEvent::Kind kind) noexcept;

struct RoundReport {
  std::size_t round = 0;  // 1-based
  std::vector<std::vector<ClientId>> clusters;
  std::vector<std::size_t> cluster_assignment;  // per client, index into `clusters`
  std::vector<double> scalarised_values;        // per client, after the round
  std::vector<double> mean_delta_norms;         // per cluster of the previous round
  std::vector<double> client_drift;             // ‖θ' − θ_start‖ of the local phase
  std::vector<RoundEvent> events;
};

struct FederationOutcome {
  Algorithm algorithm = Algorithm::kFedPref;
  bool fine_tune = false;
  std::vector<LayeredParams> final_models;
  std::vector<ObjectiveVector> final_objectives;
  std::vector<double> final_scalarised;
  std::vector<RoundReport> reports;
};

// Called once per round, in round order, as soon as the round completes.
using ReportSink = std::function<void(const RoundReport&)>;

// Personalised FedPref: similarity-weighted aggregation inside clusters and
// recursive spectral bipartition of clusters whose mean model stalls.
FederationOutcome run_fedpref(const RunConfig& cfg, const ClientBank& clients,
                              const ReportSink& sink = {});
// Single global model, plain averaging.
FederationOutcome run_fedavg(const RunConfig& cfg, const ClientBank& clients,
                             const ReportSink& sink = {});
// FedAvg with the proximal penalty (μ/2)‖θ − θ_global‖² in local training.
FederationOutcome run_fedprox(const RunConfig& cfg, const ClientBank& clients,
                              const ReportSink& sink = {});
// Clustered FL: one shared model per cluster, split by gradient similarity
// once the cluster mean update stalls.
FederationOutcome run_cfl(const RunConfig& cfg, const ClientBank& clients,
                          const ReportSink& sink = {});
// No communication.
FederationOutcome run_local_only(const RunConfig& cfg, const ClientBank& clients,
                                 const ReportSink& sink = {});

// Dispatches on cfg.algorithm.
FederationOutcome run_federation(const RunConfig& cfg, const ClientBank& clients,
                                 const ReportSink& sink = {});

}  // namespace fedpref
