#include "fedpref/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "fedpref/cli/config_io.hpp"
#include "fedpref/cli/output.hpp"
#include "fedpref/errors.hpp"

namespace fedpref::cli {

namespace fs = std::filesystem;
using nlohmann::json;

void configure_logging() {
  spdlog::set_level(spdlog::level::warn);
  if (const char* level = std::getenv("FEDPREF_LOG")) {
    spdlog::set_level(spdlog::level::from_str(level));
  }
}

MeanStd mean_std(std::span<const double> values) {
  if (values.empty()) return {};
  double sum = 0.0;
  for (double v : values) sum += v;
  const double mean = sum / static_cast<double>(values.size());
  double sq = 0.0;
  for (double v : values) sq += (v - mean) * (v - mean);
  return {mean, std::sqrt(sq / static_cast<double>(values.size()))};
}

namespace {

struct RunResult {
  fs::path dir;
  SolutionSet solutions;
};

json metrics_json(const MetricsRecord& m) {
  return {
      {"mean_scalarised", m.mean_scalarised},
      {"hypervolume", m.hypervolume},
      {"sparsity", m.sparsity},
      {"igd", m.igd},
      {"cardinality", m.cardinality},
      {"ref_point", m.ref_point},
      {"clipped_solutions", m.clipped},
  };
}

RunResult run_single(const RunConfig& cfg, const ExperimentSpec& spec, const fs::path& dir) {
  fs::create_directories(dir);
  const ClientBank bank = build_client_bank(cfg);
  const std::string hash = config_hash(cfg);
  const std::string label = run_label(cfg);
  spdlog::info("running {} (seed {}) into {}", label, cfg.seed, dir.string());

  RoundStream stream(dir / "rounds.jsonl", hash);
  const FederationOutcome outcome = run_federation(cfg, bank, [&](const RoundReport& r) {
    stream.write(r);
    for (const auto& e : r.events) {
      if (e.kind == RoundEvent::Kind::kZeroRowFallback) {
        spdlog::warn("round {}: client {} kept its own model (zero aggregation row)", r.round,
                     e.client);
      } else {
        spdlog::debug("round {}: {} in cluster {}", r.round, to_string(e.kind), e.cluster);
      }
    }
  });
  write_solutions_csv(dir / "solutions.csv", hash, bank, outcome);

  const SolutionSet front = analytic_front(bank.problem, spec.front_resolution);
  const std::vector<double> ref = spec.ref_point ? *spec.ref_point : default_ref_point(front);
  const MetricsRecord m = compute_metrics(outcome.final_objectives, outcome.final_scalarised, front, ref);
  if (m.clipped > 0) {
    spdlog::warn("{}: {} solutions do not dominate the reference point and add no hypervolume",
                 label, m.clipped);
  }
  json mj = metrics_json(m);
  mj["config_hash"] = hash;
  mj["problem_hash"] = problem_hash(cfg);
  mj["algorithm"] = label;
  mj["seed"] = cfg.seed;
  mj["reference_front"] = "analytic";
  write_json(dir / "metrics.json", mj);

  write_json(dir / "manifest.json",
             {
                 {"config_hash", hash},
                 {"problem_hash", problem_hash(cfg)},
                 {"algorithm", label},
                 {"seed", cfg.seed},
                 {"clients", cfg.clients},
                 {"rounds", cfg.rounds},
                 {"objectives", bank.problem.objectives()},
                 {"config", to_json(cfg)},
                 {"files", {"rounds.jsonl", "solutions.csv", "metrics.json"}},
             });
  return {dir, outcome.final_objectives};
}

}  // namespace

int run(const RunOptions& options, std::ostream& err) {
  ExperimentSpec spec;
  try {
    spec = load_experiment(options.config);
    if (options.seed) {
      spec.base.seed = *options.seed;
      spec.campaign_seeds = {*options.seed};
    }
    if (options.algorithm) {
      const auto algo = parse_algorithm(*options.algorithm);
      if (!algo) throw ConfigError("--algo: unknown algorithm '" + *options.algorithm + "'");
      spec.base.algorithm = *algo;
      std::vector<CampaignEntry> kept;
      for (const auto& e : spec.campaign_algorithms) {
        if (e.algorithm == *algo) kept.push_back(e);
      }
      if (kept.empty()) kept.push_back({*algo, spec.base.fine_tune});
      spec.campaign_algorithms = kept;
    }
    if (options.threads < 1) throw ConfigError("--threads: must be >= 1");
    spec.base.threads = options.threads;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  }

  try {
    if (!spec.is_campaign) {
      run_single(spec.base, spec, options.out);
      return kExitOk;
    }

    std::vector<RunResult> results;
    json runs = json::array();
    for (const auto& entry : spec.campaign_algorithms) {
      for (std::uint64_t seed : spec.campaign_seeds) {
        RunConfig cfg = spec.base;
        cfg.algorithm = entry.algorithm;
        cfg.fine_tune = entry.fine_tune;
        cfg.seed = seed;
        const std::string name = run_label(cfg) + "_seed" + std::to_string(seed);
        results.push_back(run_single(cfg, spec, options.out / name));
        runs.push_back(name);
      }
    }

    SolutionSet combined;
    for (const auto& r : results) combined.insert(combined.end(), r.solutions.begin(), r.solutions.end());
    const SolutionSet reference = pareto_front(combined);
    const std::string campaign_hash = hash_json(runs) + problem_hash(spec.base);
    write_front_csv(options.out / "reference_front.csv", campaign_hash, reference);
    for (const auto& r : results) {
      json mj = read_json(r.dir / "metrics.json");
      mj["igd_campaign"] = igd(r.solutions, reference);
      write_json(r.dir / "metrics.json", mj);
    }
    write_json(options.out / "campaign.json", {
                                                  {"campaign_hash", campaign_hash},
                                                  {"problem_hash", problem_hash(spec.base)},
                                                  {"runs", runs},
                                                  {"reference_front", "reference_front.csv"},
                                              });
    return kExitOk;
  } catch (const NumericError& e) {
    err << "numeric failure";
    if (e.index()) err << " in round " << *e.index();
    err << ": " << e.what() << '\n';
    return kExitNumeric;
  } catch (const PreconditionError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
}

int summarize(std::span<const fs::path> dirs, const std::optional<fs::path>& json_out,
              std::ostream& out, std::ostream& err) {
  std::vector<fs::path> runs;
  for (const auto& d : dirs) {
    if (!fs::is_directory(d)) {
      err << "missing run directory: " << d.string() << '\n';
      return kExitConfig;
    }
    if (fs::exists(d / "metrics.json")) {
      runs.push_back(d);
      continue;
    }
    std::vector<fs::path> children;
    for (const auto& entry : fs::directory_iterator(d)) {
      if (entry.is_directory() && fs::exists(entry.path() / "metrics.json")) {
        children.push_back(entry.path());
      }
    }
    if (children.empty()) {
      err << "no runs found in " << d.string() << '\n';
      return kExitConfig;
    }
    std::sort(children.begin(), children.end());
    runs.insert(runs.end(), children.begin(), children.end());
  }
  if (runs.empty()) {
    err << "no run directories given\n";
    return kExitConfig;
  }

  static const std::vector<std::string> kColumns = {"mean_scalarised", "hypervolume", "sparsity",
                                                    "igd", "cardinality"};
  std::map<std::string, std::map<std::string, std::vector<double>>> table;
  std::map<std::string, std::size_t> counts;
  std::string problem;
  try {
    for (const auto& r : runs) {
      const json m = read_json(r / "metrics.json");
      const std::string ph = m.at("problem_hash").get<std::string>();
      if (problem.empty()) problem = ph;
      if (ph != problem) {
        err << "refusing to pool runs with different problems: " << r.string() << " has problem hash "
            << ph << ", expected " << problem << '\n';
        return kExitConfig;
      }
      const std::string label = m.at("algorithm").get<std::string>();
      ++counts[label];
      for (const auto& c : kColumns) table[label][c].push_back(m.at(c).get<double>());
      if (m.contains("igd_campaign")) {
        table[label]["igd_campaign"].push_back(m.at("igd_campaign").get<double>());
      }
    }
  } catch (const std::exception& e) {
    err << "cannot read metrics: " << e.what() << '\n';
    return kExitConfig;
  }

  json summary = {{"problem_hash", problem}, {"algorithms", json::object()}};
  out << std::left << std::setw(14) << "algorithm" << std::setw(6) << "runs";
  for (const auto& c : kColumns) out << std::setw(28) << c;
  out << '\n';
  for (const auto& [label, columns] : table) {
    json entry = {{"runs", counts[label]}};
    out << std::setw(14) << label << std::setw(6) << counts[label];
    for (const auto& [name, values] : columns) {
      const MeanStd s = mean_std(values);
      entry[name] = {{"mean", s.mean}, {"std", s.stddev}};
    }
    for (const auto& c : kColumns) {
      const MeanStd s = mean_std(columns.at(c));
      std::ostringstream cell;
      cell << std::setprecision(6) << s.mean << " sd " << s.stddev;
      out << std::setw(28) << cell.str();
    }
    out << '\n';
    summary["algorithms"][label] = entry;
  }
  if (json_out) {
    try {
      write_json(*json_out, summary);
    } catch (const std::exception& e) {
      err << e.what() << '\n';
      return kExitIo;
    }
  }
  return kExitOk;
}

int metrics(const fs::path& solutions, std::span<const double> ref_point,
            const std::optional<fs::path>& ref_front, std::ostream& out, std::ostream& err) {
  try {
    const SolutionSet s = read_objectives_csv(solutions);
    if (!s.empty() && s.front().size() != ref_point.size()) {
      err << "--ref-point needs " << s.front().size() << " coordinates\n";
      return kExitConfig;
    }
    SolutionSet front;
    if (ref_front) front = read_objectives_csv(*ref_front);
    const MetricsRecord m = compute_metrics(s, {}, front, ref_point);
    json j = metrics_json(m);
    j.erase("mean_scalarised");
    if (!ref_front) j.erase("igd");
    out << j.dump(2) << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace fedpref::cli
