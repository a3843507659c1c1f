#include "fedpref/federation.hpp"

#include <algorithm>
#include <optional>

#include "fedpref/aggregation.hpp"
#include "fedpref/clustering.hpp"
#include "fedpref/errors.hpp"
#include "fedpref/similarity.hpp"
#include "parallel.hpp"

namespace fedpref {

std::string_view to_string(RoundEvent::Kind kind) noexcept {
  switch (kind) {
    case RoundEvent::Kind::kSplit: return "split";
    case RoundEvent::Kind::kSplitSkipped: return "split_skipped";
    case RoundEvent::Kind::kZeroRowFallback: return "zero_row_fallback";
  }
  return "unknown";
}

namespace {

constexpr std::uint64_t kTrainStream = 0x10;

void check_bank(const RunConfig& cfg, const ClientBank& bank) {
  cfg.validate();
  if (bank.size() != cfg.clients || bank.initial_models.size() != cfg.clients) {
    throw PreconditionError("client bank size does not match federation.clients");
  }
  for (const auto& m : bank.initial_models) {
    if (!m.shape_compatible(bank.initial_models.front())) {
      throw StructuralError("clients do not share a model shape");
    }
    if (m.size() != bank.problem.dimension()) {
      throw StructuralError("client model does not match problem dimension");
    }
  }
}

// Local training for every client from `starts[i]`; an optional proximal
// anchor per client.
std::vector<LayeredParams> train_all(const RunConfig& cfg, const ClientBank& bank,
                                     std::size_t round, const std::vector<LayeredParams>& starts,
                                     double prox_mu) {
  std::vector<std::optional<LayeredParams>> out(starts.size());
  detail::parallel_for(starts.size(), cfg.threads, [&](std::size_t i) {
    TrainOptions opts;
    opts.steps = cfg.local_steps;
    opts.learning_rate = cfg.learning_rate;
    opts.gradient_noise = cfg.problem.gradient_noise;
    opts.seed = derive_seed(cfg.seed, {kTrainStream, round, i});
    if (prox_mu > 0.0) opts.prox = ProxTerm{prox_mu, starts[i]};
    out[i] = local_train(starts[i], bank.problem, bank.preferences[i], opts);
  });
  std::vector<LayeredParams> models;
  models.reserve(out.size());
  for (auto& m : out) models.push_back(std::move(*m));
  return models;
}

std::vector<LayeredParams> gather(const std::vector<LayeredParams>& models,
                                  const std::vector<ClientId>& ids) {
  std::vector<LayeredParams> out;
  out.reserve(ids.size());
  for (ClientId id : ids) out.push_back(models[id]);
  return out;
}

std::vector<ParamDelta> deltas_from(const std::vector<LayeredParams>& models,
                                    const LayeredParams& reference) {
  std::vector<ParamDelta> out;
  out.reserve(models.size());
  for (const auto& m : models) out.push_back(delta(m, reference));
  return out;
}

bool all_identical(const std::vector<ParamDelta>& deltas) {
  return std::all_of(deltas.begin(), deltas.end(),
                     [&](const ParamDelta& d) { return d == deltas.front(); });
}

bool below_threshold(double norm, double threshold) {
  return threshold > 0.0 && norm <= threshold;
}

std::vector<double> drift(const std::vector<LayeredParams>& trained,
                          const std::vector<LayeredParams>& starts) {
  std::vector<double> out(trained.size());
  for (std::size_t i = 0; i < trained.size(); ++i) out[i] = flat_norm(delta(trained[i], starts[i]));
  return out;
}

void finish_report(RoundReport& report, const std::vector<std::vector<ClientId>>& clusters,
                   const std::vector<LayeredParams>& models, const ClientBank& bank) {
  report.clusters = clusters;
  report.cluster_assignment.assign(models.size(), 0);
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    for (ClientId id : clusters[c]) report.cluster_assignment[id] = c;
  }
  report.scalarised_values.resize(models.size());
  for (std::size_t i = 0; i < models.size(); ++i) {
    report.scalarised_values[i] = bank.problem.scalarised_value(bank.preferences[i], models[i]);
  }
}

FederationOutcome make_outcome(const RunConfig& cfg, const ClientBank& bank,
                               std::vector<LayeredParams> models,
                               std::vector<RoundReport> reports) {
  FederationOutcome out;
  out.algorithm = cfg.algorithm;
  out.fine_tune = cfg.fine_tune;
  for (std::size_t i = 0; i < models.size(); ++i) {
    out.final_objectives.push_back(bank.problem.objectives_at(models[i]));
    out.final_scalarised.push_back(bank.problem.scalarised_value(bank.preferences[i], models[i]));
  }
  out.final_models = std::move(models);
  out.reports = std::move(reports);
  return out;
}

// Wraps the round body so numeric failures carry the round index.
template <class Fn>
void run_round(std::size_t round, Fn&& body) {
  try {
    body();
  } catch (const RoundError&) {
    throw;
  } catch (const NumericError& e) {
    throw RoundError(e.what(), round);
  } catch (const StructuralError& e) {
    throw StructuralError(std::string(e.what()) + " (round " + std::to_string(round) + ")");
  }
}

std::vector<ClientId> all_clients(std::size_t n) {
  std::vector<ClientId> ids(n);
  for (std::size_t i = 0; i < n; ++i) ids[i] = i;
  return ids;
}

void emit(std::vector<RoundReport>& history, RoundReport report, const ReportSink& sink) {
  if (sink) sink(report);
  history.push_back(std::move(report));
}

FederationOutcome run_global_model(const RunConfig& cfg, const ClientBank& bank, double mu,
                                   const ReportSink& sink) {
  check_bank(cfg, bank);
  const std::size_t n = cfg.clients;
  LayeredParams global = plain_mean(bank.initial_models);
  std::vector<LayeredParams> models(n, global);
  std::vector<RoundReport> history;
  const std::vector<std::vector<ClientId>> clusters{all_clients(n)};

  for (std::size_t t = 1; t <= cfg.rounds; ++t) {
    RoundReport report;
    report.round = t;
    run_round(t, [&] {
      const std::vector<LayeredParams> starts(n, global);
      auto trained = train_all(cfg, bank, t, starts, mu);
      report.client_drift = drift(trained, starts);
      const LayeredParams next = plain_mean(trained);
      report.mean_delta_norms = {flat_norm(delta(global, next))};
      if (cfg.fine_tune && t == cfg.rounds) {
        models = std::move(trained);
      } else {
        global = next;
        models.assign(n, global);
      }
      finish_report(report, clusters, models, bank);
    });
    emit(history, std::move(report), sink);
  }
  return make_outcome(cfg, bank, std::move(models), std::move(history));
}

}  // namespace

FederationOutcome run_fedpref(const RunConfig& cfg, const ClientBank& bank,
                              const ReportSink& sink) {
  check_bank(cfg, bank);
  const std::size_t n = cfg.clients;
  std::vector<LayeredParams> models = bank.initial_models;
  std::vector<ClusterState> clusters{ClusterState{all_clients(n), plain_mean(models), 0}};
  std::vector<RoundReport> history;

  auto aggregate_into = [&](const std::vector<ClientId>& members,
                            const std::vector<LayeredParams>& trained,
                            const std::vector<ParamDelta>& deltas, std::size_t cluster_index,
                            std::vector<LayeredParams>& next_models, RoundReport& report) {
    auto result = weighted_aggregate(trained, deltas, cfg.top_r, cfg.min_similarity);
    for (std::size_t row : result.fallback_rows) {
      RoundEvent ev;
      ev.kind = RoundEvent::Kind::kZeroRowFallback;
      ev.cluster = cluster_index;
      ev.client = members[row];
      report.events.push_back(std::move(ev));
    }
    for (std::size_t k = 0; k < members.size(); ++k) next_models[members[k]] = result.models[k];
    return plain_mean(result.models);
  };

  for (std::size_t t = 1; t <= cfg.rounds; ++t) {
    RoundReport report;
    report.round = t;
    run_round(t, [&] {
      auto trained = train_all(cfg, bank, t, models, 0.0);
      report.client_drift = drift(trained, models);

      std::vector<ClusterState> next_clusters;
      std::vector<LayeredParams> next_models = trained;
      for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
        const ClusterState& cluster = clusters[ci];
        const auto cluster_trained = gather(trained, cluster.members);
        const LayeredParams& prev_mean = cluster.mean_model;
        const double norm = flat_norm(delta(prev_mean, plain_mean(cluster_trained)));
        report.mean_delta_norms.push_back(norm);

        if (cfg.fine_tune && t == cfg.rounds) continue;

        std::size_t below =
            below_threshold(norm, cfg.clustering_threshold) ? cluster.rounds_below_threshold + 1 : 0;
        const auto deltas = deltas_from(cluster_trained, prev_mean);
        const bool ready = cluster.members.size() >= 2 && below >= cfg.patience;

        if (ready && !all_identical(deltas)) {
          const SimilarityMatrix s = similarity_matrix(deltas, cfg.top_r);
          const Bipartition parts = spectral_bipartition(cluster.members, s);
          for (const auto* side : {&parts.left, &parts.right}) {
            const auto side_trained = gather(trained, *side);
            // A new cluster has no previous mean; its members' fresh models
            // provide the reference.
            const auto side_deltas = deltas_from(side_trained, plain_mean(side_trained));
            auto side_mean =
                aggregate_into(*side, side_trained, side_deltas, ci, next_models, report);
            next_clusters.push_back(ClusterState{*side, std::move(side_mean), 0});
          }
          RoundEvent ev;
          ev.kind = RoundEvent::Kind::kSplit;
          ev.cluster = ci;
          ev.left = parts.left;
          ev.right = parts.right;
          report.events.push_back(std::move(ev));
          continue;
        }
        if (ready) {
          RoundEvent ev;
          ev.kind = RoundEvent::Kind::kSplitSkipped;
          ev.cluster = ci;
          report.events.push_back(std::move(ev));
          below = 0;
        }
        auto new_mean =
            aggregate_into(cluster.members, cluster_trained, deltas, ci, next_models, report);
        next_clusters.push_back(ClusterState{cluster.members, std::move(new_mean), below});
      }

      if (cfg.fine_tune && t == cfg.rounds) {
        models = std::move(trained);
      } else {
        models = std::move(next_models);
        clusters = std::move(next_clusters);
      }
      std::vector<std::vector<ClientId>> snapshot;
      for (const auto& c : clusters) snapshot.push_back(c.members);
      finish_report(report, snapshot, models, bank);
    });
    emit(history, std::move(report), sink);
  }
  return make_outcome(cfg, bank, std::move(models), std::move(history));
}

FederationOutcome run_fedavg(const RunConfig& cfg, const ClientBank& bank,
                             const ReportSink& sink) {
  return run_global_model(cfg, bank, 0.0, sink);
}

FederationOutcome run_fedprox(const RunConfig& cfg, const ClientBank& bank,
                              const ReportSink& sink) {
  return run_global_model(cfg, bank, cfg.prox_mu, sink);
}

FederationOutcome run_cfl(const RunConfig& cfg, const ClientBank& bank,
                          const ReportSink& sink) {
  check_bank(cfg, bank);
  const std::size_t n = cfg.clients;

  struct SharedCluster {
    std::vector<ClientId> members;
    LayeredParams model;
    std::size_t rounds_below_threshold = 0;
  };
  std::vector<SharedCluster> clusters{
      SharedCluster{all_clients(n), plain_mean(bank.initial_models), 0}};
  std::vector<LayeredParams> models(n, clusters.front().model);
  std::vector<RoundReport> history;

  for (std::size_t t = 1; t <= cfg.rounds; ++t) {
    RoundReport report;
    report.round = t;
    run_round(t, [&] {
      std::vector<LayeredParams> starts = models;
      auto trained = train_all(cfg, bank, t, starts, 0.0);
      report.client_drift = drift(trained, starts);

      std::vector<SharedCluster> next_clusters;
      for (std::size_t ci = 0; ci < clusters.size(); ++ci) {
        const SharedCluster& cluster = clusters[ci];
        const auto cluster_trained = gather(trained, cluster.members);
        LayeredParams next = plain_mean(cluster_trained);
        const double norm = flat_norm(delta(cluster.model, next));
        report.mean_delta_norms.push_back(norm);
        if (cfg.fine_tune && t == cfg.rounds) continue;

        std::size_t below =
            below_threshold(norm, cfg.cfl_threshold) ? cluster.rounds_below_threshold + 1 : 0;
        const bool ready = cluster.members.size() >= 2 && below >= cfg.cfl_patience;
        if (ready) {
          const auto deltas = deltas_from(cluster_trained, cluster.model);
          if (!all_identical(deltas)) {
            const Bipartition parts =
                spectral_bipartition(cluster.members, similarity_matrix(deltas, 1.0));
            for (const auto* side : {&parts.left, &parts.right}) {
              next_clusters.push_back(SharedCluster{*side, plain_mean(gather(trained, *side)), 0});
            }
            RoundEvent ev;
            ev.kind = RoundEvent::Kind::kSplit;
            ev.cluster = ci;
            ev.left = parts.left;
            ev.right = parts.right;
            report.events.push_back(std::move(ev));
            continue;
          }
          RoundEvent ev;
          ev.kind = RoundEvent::Kind::kSplitSkipped;
          ev.cluster = ci;
          report.events.push_back(std::move(ev));
          below = 0;
        }
        next_clusters.push_back(SharedCluster{cluster.members, std::move(next), below});
      }

      if (cfg.fine_tune && t == cfg.rounds) {
        models = std::move(trained);
      } else {
        clusters = std::move(next_clusters);
        for (const auto& c : clusters) {
          for (ClientId id : c.members) models[id] = c.model;
        }
      }
      std::vector<std::vector<ClientId>> snapshot;
      for (const auto& c : clusters) snapshot.push_back(c.members);
      finish_report(report, snapshot, models, bank);
    });
    emit(history, std::move(report), sink);
  }
  return make_outcome(cfg, bank, std::move(models), std::move(history));
}

FederationOutcome run_local_only(const RunConfig& cfg, const ClientBank& bank,
                                 const ReportSink& sink) {
  check_bank(cfg, bank);
  const std::size_t n = cfg.clients;
  std::vector<LayeredParams> models = bank.initial_models;
  std::vector<std::vector<ClientId>> singletons;
  for (ClientId i = 0; i < n; ++i) singletons.push_back({i});
  std::vector<RoundReport> history;

  for (std::size_t t = 1; t <= cfg.rounds; ++t) {
    RoundReport report;
    report.round = t;
    run_round(t, [&] {
      auto trained = train_all(cfg, bank, t, models, 0.0);
      report.client_drift = drift(trained, models);
      report.mean_delta_norms = report.client_drift;
      models = std::move(trained);
      finish_report(report, singletons, models, bank);
    });
    emit(history, std::move(report), sink);
  }
  return make_outcome(cfg, bank, std::move(models), std::move(history));
}

FederationOutcome run_federation(const RunConfig& cfg, const ClientBank& bank,
                                 const ReportSink& sink) {
  switch (cfg.algorithm) {
    case Algorithm::kFedPref: return run_fedpref(cfg, bank, sink);
    case Algorithm::kFedAvg: return run_fedavg(cfg, bank, sink);
    case Algorithm::kFedProx: return run_fedprox(cfg, bank, sink);
    case Algorithm::kCfl: return run_cfl(cfg, bank, sink);
    case Algorithm::kLocalOnly: return run_local_only(cfg, bank, sink);
  }
  throw PreconditionError("unknown algorithm");
}

}  // namespace fedpref
