#include "fedpref/cli/config_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "fedpref/errors.hpp"

namespace fedpref::cli {

using nlohmann::json;

namespace {

// Typed access to one JSON object. Remembers which keys were read so
// unknown keys can be reported.
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) fail("", "must be an object");
  }

  bool has(const std::string& key) const { return node_.contains(key); }

  const json& raw(const std::string& key, bool required) {
    seen_.insert(key);
    if (!node_.contains(key)) {
      if (required) fail(key, "missing required field");
      static const json null_node;
      return null_node;
    }
    return node_.at(key);
  }

  template <class T>
  T get(const std::string& key, const T& fallback) {
    const json& v = raw(key, false);
    return v.is_null() ? fallback : convert<T>(key, v);
  }

  template <class T>
  T require(const std::string& key) {
    return convert<T>(key, raw(key, true));
  }

  Section child(const std::string& key, bool required) {
    const json& v = raw(key, required);
    static const json empty = json::object();
    return Section(v.is_null() ? empty : v, qualified(key));
  }

  void reject_unknown() const {
    for (const auto& item : node_.items()) {
      if (!seen_.count(item.key())) fail(item.key(), "unknown field");
    }
  }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    throw ConfigError(qualified(key) + ": " + what);
  }

 private:
  std::string qualified(const std::string& key) const {
    if (key.empty()) return path_;
    return path_.empty() ? key : path_ + "." + key;
  }

  template <class T>
  T convert(const std::string& key, const json& v) const {
    try {
      if constexpr (std::is_same_v<T, double>) {
        if (!v.is_number()) fail(key, "expected a number");
      } else if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t>) {
        if (!v.is_number_unsigned()) fail(key, "expected a nonnegative integer");
      } else if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) fail(key, "expected true or false");
      } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) fail(key, "expected a string");
      }
      return v.get<T>();
    } catch (const json::exception& e) {
      fail(key, std::string("wrong type (") + e.what() + ")");
    }
  }

  const json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

std::size_t parse_patience(Section& s, const std::string& key, std::size_t fallback) {
  if (!s.has(key)) {
    s.raw(key, false);
    return fallback;
  }
  const json& v = s.raw(key, false);
  if (v.is_string() && (v == "inf" || v == "never")) return kNeverSplit;
  if (!v.is_number_unsigned()) s.fail(key, "expected a nonnegative integer or \"inf\"");
  return v.get<std::size_t>();
}

json patience_json(std::size_t p) { return p == kNeverSplit ? json("inf") : json(p); }

Algorithm parse_algorithm_field(Section& s, const std::string& key, const std::string& id) {
  auto a = parse_algorithm(id);
  if (!a) s.fail(key, "unknown algorithm '" + id + "' (expected fedpref, fedavg, fedprox, cfl, local)");
  return *a;
}

}  // namespace

ExperimentSpec parse_experiment(const json& doc) {
  ExperimentSpec spec;
  RunConfig& cfg = spec.base;
  Section root(doc, "");

  {
    Section fed = root.child("federation", true);
    cfg.algorithm = parse_algorithm_field(fed, "algorithm", fed.require<std::string>("algorithm"));
    cfg.rounds = fed.require<std::size_t>("rounds");
    cfg.local_steps = fed.require<std::size_t>("local_steps");
    cfg.learning_rate = fed.require<double>("learning_rate");
    cfg.clients = fed.require<std::size_t>("clients");
    cfg.seed = fed.require<std::uint64_t>("seed");
    cfg.clustering_threshold = fed.get<double>("clustering_threshold", cfg.clustering_threshold);
    cfg.patience = parse_patience(fed, "patience", cfg.patience);
    cfg.top_r = fed.get<double>("top_r", cfg.top_r);
    cfg.min_similarity = fed.get<double>("min_similarity", cfg.min_similarity);
    cfg.fine_tune = fed.get<bool>("fine_tune", cfg.fine_tune);
    cfg.prox_mu = fed.get<double>("prox_mu", cfg.prox_mu);
    cfg.cfl_threshold = fed.get<double>("cfl_threshold", cfg.cfl_threshold);
    cfg.cfl_patience = parse_patience(fed, "cfl_patience", cfg.cfl_patience);
    fed.reject_unknown();
  }

  {
    Section prob = root.child("problem", true);
    ProblemConfig& p = cfg.problem;
    const auto kind = prob.require<std::string>("kind");
    if (kind == "quadratic") {
      p.kind = ProblemKind::kQuadratic;
      p.centers = prob.require<std::vector<std::vector<double>>>("centers");
      p.scales = prob.get<std::vector<std::vector<double>>>("scales", {});
    } else if (kind == "conflicting_groups") {
      p.kind = ProblemKind::kConflictingGroups;
      p.objectives = prob.get<std::size_t>("objectives", p.objectives);
      p.separation = prob.get<double>("separation", p.separation);
      p.group_preferences = prob.require<std::vector<std::vector<double>>>("group_preferences");
      p.group_sizes = prob.require<std::vector<std::size_t>>("group_sizes");
    } else {
      prob.fail("kind", "unknown problem kind '" + kind + "' (expected quadratic, conflicting_groups)");
    }
    p.layer_sizes = prob.get<std::vector<std::size_t>>("layers", p.layer_sizes);
    p.init_scale = prob.get<double>("init_scale", p.init_scale);
    p.gradient_noise = prob.get<double>("gradient_noise", p.gradient_noise);
    prob.reject_unknown();
  }

  {
    const bool needs_prefs = cfg.problem.kind == ProblemKind::kQuadratic;
    Section prefs = root.child("preferences", needs_prefs);
    if (needs_prefs || prefs.has("distribution")) {
      const auto dist = prefs.require<std::string>("distribution");
      if (dist == "dirichlet") {
        cfg.preferences.kind = PrefKind::kDirichlet;
      } else if (dist == "gaussian") {
        cfg.preferences.kind = PrefKind::kGaussian;
      } else if (dist == "equidistant") {
        cfg.preferences.kind = PrefKind::kEquidistant;
      } else {
        prefs.fail("distribution", "unknown distribution '" + dist +
                                       "' (expected dirichlet, gaussian, equidistant)");
      }
    }
    cfg.preferences.alpha = prefs.get<double>("alpha", cfg.preferences.alpha);
    cfg.preferences.sigma = prefs.get<double>("sigma", cfg.preferences.sigma);
    prefs.reject_unknown();
  }

  {
    Section met = root.child("metrics", false);
    if (met.has("ref_point")) spec.ref_point = met.require<std::vector<double>>("ref_point");
    spec.front_resolution = met.get<std::size_t>("front_resolution", 0);
    met.reject_unknown();
  }

  if (root.has("campaign")) {
    spec.is_campaign = true;
    Section camp = root.child("campaign", true);
    const json& algos = camp.raw("algorithms", true);
    if (!algos.is_array() || algos.empty()) camp.fail("algorithms", "expected a nonempty list");
    for (const auto& a : algos) {
      CampaignEntry entry;
      if (a.is_string()) {
        entry.algorithm = parse_algorithm_field(camp, "algorithms", a.get<std::string>());
        entry.fine_tune = cfg.fine_tune;
      } else {
        Section item(a, "campaign.algorithms[]");
        entry.algorithm = parse_algorithm_field(item, "algorithm", item.require<std::string>("algorithm"));
        entry.fine_tune = item.get<bool>("fine_tune", cfg.fine_tune);
        item.reject_unknown();
      }
      spec.campaign_algorithms.push_back(entry);
    }
    spec.campaign_seeds = camp.get<std::vector<std::uint64_t>>("seeds", {cfg.seed});
    if (spec.campaign_seeds.empty()) camp.fail("seeds", "expected a nonempty list");
    camp.reject_unknown();
  }
  root.reject_unknown();

  try {
    cfg.validate();
  } catch (const PreconditionError& e) {
    throw ConfigError(e.what());
  }
  if (spec.ref_point) {
    const std::size_t m = cfg.problem.kind == ProblemKind::kQuadratic ? cfg.problem.centers.size()
                                                                     : cfg.problem.objectives;
    if (spec.ref_point->size() != m) {
      throw ConfigError("metrics.ref_point: needs one coordinate per objective");
    }
  }
  return spec;
}

ExperimentSpec parse_experiment_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1;
    std::size_t column = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    throw ConfigError("syntax error at line " + std::to_string(line) + ", column " +
                      std::to_string(column) + ": " + e.what());
  }
  return parse_experiment(doc);
}

ExperimentSpec load_experiment(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_experiment_text(buf.str());
}

json to_json(const RunConfig& cfg) {
  json fed = {
      {"algorithm", std::string(to_string(cfg.algorithm))},
      {"rounds", cfg.rounds},
      {"local_steps", cfg.local_steps},
      {"learning_rate", cfg.learning_rate},
      {"clients", cfg.clients},
      {"seed", cfg.seed},
      {"clustering_threshold", cfg.clustering_threshold},
      {"patience", patience_json(cfg.patience)},
      {"top_r", cfg.top_r},
      {"min_similarity", cfg.min_similarity},
      {"fine_tune", cfg.fine_tune},
      {"prox_mu", cfg.prox_mu},
      {"cfl_threshold", cfg.cfl_threshold},
      {"cfl_patience", patience_json(cfg.cfl_patience)},
  };
  const ProblemConfig& p = cfg.problem;
  json prob = {
      {"layers", p.layer_sizes},
      {"init_scale", p.init_scale},
      {"gradient_noise", p.gradient_noise},
  };
  json prefs = json::object();
  if (p.kind == ProblemKind::kQuadratic) {
    prob["kind"] = "quadratic";
    prob["centers"] = p.centers;
    if (!p.scales.empty()) prob["scales"] = p.scales;
    const char* dist = cfg.preferences.kind == PrefKind::kDirichlet  ? "dirichlet"
                       : cfg.preferences.kind == PrefKind::kGaussian ? "gaussian"
                                                                     : "equidistant";
    prefs = {{"distribution", dist}, {"alpha", cfg.preferences.alpha}, {"sigma", cfg.preferences.sigma}};
  } else {
    prob["kind"] = "conflicting_groups";
    prob["objectives"] = p.objectives;
    prob["separation"] = p.separation;
    prob["group_preferences"] = p.group_preferences;
    prob["group_sizes"] = p.group_sizes;
  }
  return {{"federation", fed}, {"problem", prob}, {"preferences", prefs}};
}

std::string hash_json(const json& j) {
  const std::string text = j.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  static const char* digits = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return out;
}

std::string config_hash(const RunConfig& cfg) { return hash_json(to_json(cfg)); }

std::string problem_hash(const RunConfig& cfg) {
  const json full = to_json(cfg);
  json j = {{"problem", full["problem"]}, {"preferences", full["preferences"]}};
  // The client count shapes the problem instance as much as the centers do.
  j["clients"] = cfg.clients;
  return hash_json(j);
}

std::string run_label(const RunConfig& cfg) {
  std::string label(to_string(cfg.algorithm));
  if (cfg.fine_tune) label += "+ft";
  return label;
}

}  // namespace fedpref::cli
