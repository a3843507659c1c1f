#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fedpref/config.hpp"

namespace fedpref::cli {

// Invalid or unreadable configuration. The message names the offending field
// (dotted path) or the line/column of a syntax error.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CampaignEntry {
  Algorithm algorithm = Algorithm::kFedPref;
  bool fine_tune = false;
};

struct ExperimentSpec {
  RunConfig base;
  std::optional<std::vector<double>> ref_point;
  std::size_t front_resolution = 0;  // 0 picks a default per objective count
  // Present when the file has a `campaign` section.
  std::vector<CampaignEntry> campaign_algorithms;
  std::vector<std::uint64_t> campaign_seeds;
  bool is_campaign = false;
};

ExperimentSpec parse_experiment(const nlohmann::json& doc);
ExperimentSpec parse_experiment_text(const std::string& text);
ExperimentSpec load_experiment(const std::filesystem::path& path);

// Effective configuration with all defaults filled in. Stable key order, so
// its dump is canonical.
nlohmann::json to_json(const RunConfig& cfg);

// FNV-1a 64 over the canonical dump, as 16 lowercase hex digits.
std::string hash_json(const nlohmann::json& j);
std::string config_hash(const RunConfig& cfg);
// Hash of the problem and preference sections only, shared by every seed
// and algorithm run on the same problem.
std::string problem_hash(const RunConfig& cfg);

// "fedpref", "fedavg+ft", …
std::string run_label(const RunConfig& cfg);

}  // namespace fedpref::cli
