// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fedpref/aggregation.hpp"
#include "fedpref/cli/commands.hpp"
#include "fedpref/cli/config_io.hpp"
#include "fedpref/clustering.hpp"
#include "fedpref/federation.hpp"
#include "fedpref/mo_metrics.hpp"
#include "fedpref/problems.hpp"
#include "fedpref/similarity.hpp"
#include "support/oracles.hpp"
#include "support/scenarios.hpp"

namespace {

using namespace fedpref;
namespace fs = std::filesystem;

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

// Runs `check`, enforces the time limit (seconds, 0 for none) and prints one
// line.
bool report(int id, const char* title, double limit, const std::function<Verdict()>& check) {
  const auto start = Clock::now();
  Verdict v;
  try {
    v = check();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(Clock::now() - start).count();
  if (limit > 0.0 && secs >= limit) {
    v.pass = false;
    v.detail += "; over the " + std::to_string(limit) + " s limit";
  }
  std::printf("criterion %2d: %s  %s [%s] (%.2f s)\n", id, v.pass ? "PASS" : "FAIL", title,
              v.detail.c_str(), secs);
  std::fflush(stdout);
  return v.pass;
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

std::vector<std::size_t> random_shape(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> layers(1, 4);
  std::uniform_int_distribution<std::size_t> width(1, 12);
  std::vector<std::size_t> shape(layers(rng));
  for (auto& s : shape) s = width(rng);
  return shape;
}

Verdict metric_identities() {
  std::mt19937_64 rng(101);
  std::size_t mismatches = 0, asymmetric = 0, out_of_range = 0;
  for (int t = 0; t < 1000; ++t) {
    auto shape = random_shape(rng);
    auto a = oracle::random_delta(rng, shape);
    auto b = oracle::random_delta(rng, shape);
    const double s = model_sim(a, b, 1.0);
    if (s != oracle::layer_cosine(a, b)) ++mismatches;
    for (double r : {1.0, 0.5, 0.25}) {
      const double ab = model_sim(a, b, r);
      if (ab != model_sim(b, a, r)) ++asymmetric;
      if (std::abs(ab) > 1.0 + 1e-12) ++out_of_range;
    }
  }
  return {mismatches == 0 && asymmetric == 0 && out_of_range == 0,
          std::to_string(mismatches) + " cosine mismatches, " + std::to_string(asymmetric) +
              " asymmetric pairs, " + std::to_string(out_of_range) + " out of range"};
}

Verdict aggregation_limits() {
  std::mt19937_64 rng(202);
  std::uniform_int_distribution<std::size_t> size(1, 20);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  std::size_t changed = 0;
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = size(rng);
    const auto shape = random_shape(rng);
    std::vector<LayeredParams> models;
    for (std::size_t i = 0; i < n; ++i) models.push_back(oracle::random_model(rng, shape));
    const double s_min = 0.9 * u(rng);

    // Every entry the same value above the floor.
    const double level = s_min + (1.0 - s_min) * (0.05 + 0.95 * (u(rng) + 1.0) / 2.0);
    SimilarityMatrix flat(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) flat.set(i, j, level);
    }
    const auto mixed = weighted_aggregate(models, flat, s_min);
    const auto mu = plain_mean(models).flat();
    for (const auto& m : mixed.models) {
      const auto f = m.flat();
      for (std::size_t k = 0; k < f.size(); ++k) worst = std::max(worst, std::abs(f[k] - mu[k]));
    }

    // Off-diagonal entries at or below the floor.
    SimilarityMatrix floor(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        floor.set(i, j, i == j ? 1.0 : s_min - (1.0 + s_min) * (u(rng) + 1.0) / 2.0);
      }
    }
    const auto kept = weighted_aggregate(models, floor, s_min);
    for (std::size_t i = 0; i < n; ++i) changed += kept.models[i] == models[i] ? 0 : 1;
  }
  return {worst <= 1e-12 && changed == 0,
          fmt("max deviation from mean %.3g", worst) + ", " + std::to_string(changed) +
              " clipped outputs differ from inputs"};
}

struct Planted {
  SimilarityMatrix s;
  std::vector<int> label;
};

Planted planted_blocks(std::mt19937_64& rng, bool exact) {
  std::uniform_int_distribution<std::size_t> size(2, 10);
  std::uniform_real_distribution<double> intra(0.5, 1.0), inter(-1.0, -0.5);
  const std::size_t n = size(rng);
  std::vector<int> label(n);
  do {
    for (auto& l : label) l = static_cast<int>(rng() & 1u);
  } while (std::count(label.begin(), label.end(), 0) == 0 ||
           std::count(label.begin(), label.end(), 1) == 0);
  const double a = intra(rng), b = inter(rng);
  SimilarityMatrix s(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double v;
      if (i == j) {
        v = 1.0;
      } else if (label[i] == label[j]) {
        v = exact ? a : intra(rng);
      } else {
        v = exact ? b : inter(rng);
      }
      s.set(i, j, v);
    }
  }
  return {std::move(s), std::move(label)};
}

Verdict clustering_oracle() {
  std::mt19937_64 rng(303);
  std::size_t random_match = 0, exact_match = 0, improper = 0;
  for (int exact = 0; exact < 2; ++exact) {
    for (int t = 0; t < 200; ++t) {
      const auto p = planted_blocks(rng, exact == 1);
      std::vector<ClientId> ids(p.s.size());
      std::iota(ids.begin(), ids.end(), ClientId{0});
      const auto spectral = spectral_bipartition(ids, p.s);
      if (spectral.left.empty() || spectral.right.empty() ||
          spectral.left.size() + spectral.right.size() != ids.size()) {
        ++improper;
      }
      if (spectral == brute_force_min_cut(p.s)) ++(exact ? exact_match : random_match);
    }
  }
  return {random_match >= 195 && exact_match == 200 && improper == 0,
          std::to_string(random_match) + "/200 random, " + std::to_string(exact_match) +
              "/200 exact blocks match, " + std::to_string(improper) + " improper"};
}

Verdict end_to_end_separation() {
  std::size_t good = 0;
  double worst_distance = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto cfg = scenario::conflicting_groups(seed);
    const auto bank = build_client_bank(cfg);
    const auto out = run_fedpref(cfg, bank);
    const double d = scenario::mean_distance_to_optimum(bank, out);
    worst_distance = std::max(worst_distance, d);
    if (scenario::group_pure(out.reports.back(), bank.groups) && d < 1e-2) ++good;
  }
  return {good >= 9, std::to_string(good) + "/10 seeds pure with mean distance < 1e-2" +
                         fmt(", worst mean distance %.3g", worst_distance)};
}

Verdict qualitative_ordering() {
  std::size_t ordered = 0, not_converged = 0;
  std::string per_seed;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto cfg = scenario::conflicting_groups_budget(seed);
    const auto bank = build_client_bank(cfg);
    const auto pref = run_fedpref(cfg, bank);
    cfg.algorithm = Algorithm::kFedAvg;
    const auto avg = run_fedavg(cfg, bank);
    cfg.algorithm = Algorithm::kLocalOnly;
    const auto local = run_local_only(cfg, bank);

    const double v_pref = scenario::mean_of(pref.final_scalarised);
    const double v_avg = scenario::mean_of(avg.final_scalarised);
    const double v_local = scenario::mean_of(local.final_scalarised);
    if (scenario::mean_distance_to_optimum(bank, local) > 1e-2) ++not_converged;
    const bool ok = v_pref > v_avg && v_pref > v_local &&
                    cardinality(avg.final_objectives) == 1 &&
                    cardinality(pref.final_objectives) >= 4;
    ordered += ok ? 1 : 0;
    per_seed += ok ? '+' : '-';
  }
  return {ordered >= 8 && not_converged == 10,
          std::to_string(ordered) + "/10 seeds ordered (" + per_seed + "), local-only unconverged in " +
              std::to_string(not_converged) + "/10"};
}

Verdict hypervolume_correctness() {
  const SolutionSet example{{{1, 3}}, {{2, 2}}, {{3, 1}}};
  const std::vector<double> origin{0.0, 0.0};
  const double hv = hypervolume(example, origin);

  std::mt19937_64 rng(606);
  std::uniform_int_distribution<std::size_t> count(1, 20);
  double worst = 0.0;
  std::size_t within = 0;
  for (int t = 0; t < 50; ++t) {
    const std::size_t m = 2 + static_cast<std::size_t>(t % 3);
    const auto front = oracle::random_front(rng, m, count(rng));
    const std::vector<double> ref(m, 0.0);
    const double exact = hypervolume(front, ref);
    const auto est = hypervolume_mc(front, ref, 1000000, 1000 + static_cast<std::uint64_t>(t));
    const double rel = std::abs(est.value - exact) / exact;
    worst = std::max(worst, rel);
    within += rel <= 0.01 ? 1 : 0;
  }
  return {hv == 6.0 && within == 50,
          fmt("example %.17g", hv) + ", " + std::to_string(within) +
              fmt("/50 fronts within 1%% of Monte Carlo, worst %.3g%%", 100.0 * worst)};
}

Verdict igd_sparsity_cases() {
  const SolutionSet ref{{{0, 1}}, {{1, 0}}};
  const double g = igd(SolutionSet{{{0, 0}}}, ref);
  const double single = sparsity(SolutionSet{{{0.3, 0.7}}});
  const double pair = sparsity(ref);
  return {g == 1.0 && single == 0.0 && pair == 2.0,
          fmt("igd %.17g, singleton sparsity %.17g, pair sparsity %.17g", g, single, pair)};
}

Verdict fedprox_reduction() {
  auto cfg = scenario::conflicting_groups(8);
  cfg.problem.gradient_noise = 0.05;
  const auto bank = build_client_bank(cfg);
  cfg.prox_mu = 0.0;
  const auto prox = run_fedprox(cfg, bank);
  const auto avg = run_fedavg(cfg, bank);
  bool identical = prox.final_models == avg.final_models;
  for (std::size_t t = 0; t < cfg.rounds; ++t) {
    identical = identical && prox.reports[t].client_drift == avg.reports[t].client_drift &&
                prox.reports[t].scalarised_values == avg.reports[t].scalarised_values;
  }

  cfg.prox_mu = 1e6;
  const auto pinned = run_fedprox(cfg, bank);
  double worst = 0.0;
  for (const auto& r : pinned.reports) {
    for (double d : r.client_drift) worst = std::max(worst, d);
  }
  return {identical && worst <= 1e-3,
          std::string(identical ? "mu=0 trajectory identical" : "mu=0 trajectory differs") +
              fmt(", mu=1e6 max drift %.3g", worst)};
}

Verdict gradient_check() {
  // General PSD scale matrices B Bᵀ + 0.1 I so every component matters.
  std::mt19937_64 rng(909);
  std::normal_distribution<double> normal(0.0, 1.0);
  const std::size_t d = 8, m = 3;
  std::vector<std::vector<double>> centers(m, std::vector<double>(d));
  std::vector<std::vector<double>> scales(m, std::vector<double>(d * d, 0.0));
  for (std::size_t j = 0; j < m; ++j) {
    for (auto& c : centers[j]) c = normal(rng);
    std::vector<double> b(d * d);
    for (auto& x : b) x = normal(rng) / std::sqrt(static_cast<double>(d));
    for (std::size_t r = 0; r < d; ++r) {
      for (std::size_t c = 0; c < d; ++c) {
        double acc = r == c ? 0.1 : 0.0;
        for (std::size_t k = 0; k < d; ++k) acc += b[r * d + k] * b[c * d + k];
        scales[j][r * d + c] = acc;
      }
    }
    for (std::size_t r = 0; r < d; ++r) {
      for (std::size_t c = r + 1; c < d; ++c) scales[j][c * d + r] = scales[j][r * d + c];
    }
  }
  const std::vector<std::size_t> layers{4, 4};
  QuadraticMOProblem problem(centers, scales, layers);

  std::uniform_real_distribution<double> u(0.01, 1.0);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    std::vector<double> theta(d);
    for (auto& x : theta) x = normal(rng);
    const PreferenceVector w({u(rng), u(rng), u(rng)});

    // The update direction local_train takes from θ: one unit step.
    TrainOptions opts;
    opts.steps = 1;
    opts.learning_rate = 1.0;
    const auto start = LayeredParams::from_flat(theta, layers);
    const auto moved = local_train(start, problem, w, opts).flat();

    double err2 = 0.0, norm2 = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      const double h = 1e-5;
      auto up = theta, down = theta;
      up[k] += h;
      down[k] -= h;
      const double fd =
          (problem.scalarised_value(w, up) - problem.scalarised_value(w, down)) / (2.0 * h);
      const double g = moved[k] - theta[k];
      err2 += (g - fd) * (g - fd);
      norm2 += fd * fd;
    }
    worst = std::max(worst, std::sqrt(err2 / norm2));
  }
  return {worst <= 1e-6, fmt("worst relative error %.3g over 100 pairs", worst)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict determinism() {
  const fs::path root = fs::temp_directory_path() / "fedpref_acceptance_determinism";
  fs::remove_all(root);
  fs::create_directories(root);

  struct Case {
    const char* algorithm;
    const char* extra;
  };
  const Case cases[] = {
      {"fedpref", R"(, "fine_tune": true)"},
      {"fedavg", ""},
      {"fedprox", R"(, "prox_mu": 0.5)"},
      {"cfl", R"(, "cfl_threshold": 0.05)"},
      {"local", ""},
  };
  std::size_t identical = 0, total = 0;
  for (const auto& c : cases) {
    const std::string text = std::string(R"({"federation": {"algorithm": ")") + c.algorithm +
                             R"(", "rounds": 15, "local_steps": 3, "learning_rate": 0.1,
        "clients": 12, "seed": 5, "clustering_threshold": 0.05, "patience": 1, "top_r": 0.5)" +
                             c.extra + R"(},
      "problem": {"kind": "quadratic", "layers": [3, 3],
        "centers": [[1, 0, 0, 0, 0, 1], [0, 1, 0, -1, 0, 0], [0, 0, 1, 0, 1, 0]],
        "init_scale": 0.5, "gradient_noise": 0.05},
      "preferences": {"distribution": "dirichlet", "alpha": 1.0}})";
    const fs::path cfg = root / (std::string(c.algorithm) + ".json");
    std::ofstream(cfg) << text;

    std::string reference;
    for (std::size_t threads : {1u, 1u, 4u}) {
      cli::RunOptions opts;
      opts.config = cfg;
      opts.out = root / (std::string(c.algorithm) + "_" + std::to_string(total));
      opts.threads = threads;
      std::ostringstream err;
      if (cli::run(opts, err) != cli::kExitOk) {
        fs::remove_all(root);
        return {false, std::string(c.algorithm) + " run failed: " + err.str()};
      }
      const std::string csv = slurp(opts.out / "solutions.csv");
      if (reference.empty()) reference = csv;
      identical += csv == reference ? 1 : 0;
      ++total;
    }
  }
  fs::remove_all(root);
  return {identical == total,
          std::to_string(identical) + "/" + std::to_string(total) +
              " solution files identical across repeats and thread counts"};
}

}  // namespace

int main() {
  fedpref::cli::configure_logging();
  bool ok = true;
  ok &= report(1, "metric identities", 1.0, metric_identities);
  ok &= report(2, "aggregation limits", 0.0, aggregation_limits);
  ok &= report(3, "clustering matches brute force", 10.0, clustering_oracle);
  ok &= report(4, "end-to-end separation", 30.0, end_to_end_separation);
  ok &= report(5, "qualitative ordering", 0.0, qualitative_ordering);
  ok &= report(6, "hypervolume correctness", 60.0, hypervolume_correctness);
  ok &= report(7, "IGD and sparsity hand cases", 0.0, igd_sparsity_cases);
  ok &= report(8, "FedProx reduction", 0.0, fedprox_reduction);
  ok &= report(9, "gradient check", 0.0, gradient_check);
  ok &= report(10, "determinism", 0.0, determinism);
  std::printf("%s\n", ok ? "all criteria passed" : "some criteria FAILED");
  return ok ? 0 : 1;
}
