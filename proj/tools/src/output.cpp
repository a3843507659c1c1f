#include "fedpref/cli/output.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "fedpref/errors.hpp"

namespace fedpref::cli {

using nlohmann::json;

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

json report_to_json(const RoundReport& report, const std::string& config_hash) {
  json events = json::array();
  for (const auto& e : report.events) {
    json ev = {{"type", std::string(to_string(e.kind))}, {"cluster", e.cluster}};
    if (e.kind == RoundEvent::Kind::kSplit) {
      ev["left"] = e.left;
      ev["right"] = e.right;
    }
    if (e.kind == RoundEvent::Kind::kZeroRowFallback) ev["client"] = e.client;
    events.push_back(std::move(ev));
  }
  return {
      {"config_hash", config_hash},
      {"round", report.round},
      {"cluster_assignment", report.cluster_assignment},
      {"per_client_scalarised_value", report.scalarised_values},
      {"per_cluster_mean_delta_norm", report.mean_delta_norms},
      {"events", events},
  };
}

RoundStream::RoundStream(const std::filesystem::path& path, std::string config_hash)
    : out_(path, std::ios::out | std::ios::trunc), hash_(std::move(config_hash)) {
  if (!out_) throw std::runtime_error("cannot write " + path.string());
}

void RoundStream::write(const RoundReport& report) {
  if (report.round <= last_round_) throw std::logic_error("round reports out of order");
  last_round_ = report.round;
  out_ << report_to_json(report, hash_).dump() << '\n';
  out_.flush();
}

void write_solutions_csv(const std::filesystem::path& path, const std::string& config_hash,
                         const ClientBank& bank, const FederationOutcome& outcome) {
  std::ofstream out(path, std::ios::out | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  const std::size_t m = bank.problem.objectives();
  out << "# config_hash=" << config_hash << '\n';
  out << "client_id";
  for (std::size_t j = 1; j <= m; ++j) out << ",w_" << j;
  for (std::size_t j = 1; j <= m; ++j) out << ",f_" << j;
  out << ",scalarised\n";
  for (std::size_t i = 0; i < outcome.final_models.size(); ++i) {
    out << i;
    for (double w : bank.preferences[i].weights()) out << ',' << format_double(w);
    for (double f : outcome.final_objectives[i].values) out << ',' << format_double(f);
    out << ',' << format_double(outcome.final_scalarised[i]) << '\n';
  }
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

}  // namespace

SolutionSet read_objectives_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  std::vector<std::size_t> columns;
  bool have_header = false;
  SolutionSet out;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto cells = split_csv(line);
    if (!have_header) {
      for (std::size_t c = 0; c < cells.size(); ++c) {
        if (cells[c].rfind("f_", 0) == 0) columns.push_back(c);
      }
      if (columns.empty()) throw std::runtime_error(path.string() + ": no f_* columns in header");
      have_header = true;
      continue;
    }
    ObjectiveVector v;
    for (std::size_t c : columns) {
      if (c >= cells.size()) {
        throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": short row");
      }
      double x = 0.0;
      const auto& s = cells[c];
      const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
      if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                                 ": bad number '" + s + "'");
      }
      v.values.push_back(x);
    }
    out.push_back(std::move(v));
  }
  if (!have_header) throw std::runtime_error(path.string() + ": missing header");
  return out;
}

void write_front_csv(const std::filesystem::path& path, const std::string& config_hash,
                     const SolutionSet& front) {
  std::ofstream out(path, std::ios::out | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "# config_hash=" << config_hash << '\n';
  const std::size_t m = front.empty() ? 0 : front.front().size();
  for (std::size_t j = 1; j <= m; ++j) out << (j > 1 ? "," : "") << "f_" << j;
  out << '\n';
  for (const auto& s : front) {
    for (std::size_t j = 0; j < s.size(); ++j) out << (j > 0 ? "," : "") << format_double(s.values[j]);
    out << '\n';
  }
}

SolutionSet analytic_front(const QuadraticMOProblem& problem, std::size_t resolution) {
  const std::size_t m = problem.objectives();
  if (resolution == 0) {
    resolution = m == 2 ? 200 : m == 3 ? 40 : m == 4 ? 15 : 8;
  }
  SolutionSet points;
  std::vector<double> w(m);
  auto visit = [&](auto&& self, std::size_t j, std::size_t remaining) -> void {
    if (j + 1 == m) {
      w[j] = static_cast<double>(remaining) / static_cast<double>(resolution);
      try {
        const auto opt = problem.analytic_optimum(PreferenceVector(w));
        points.push_back(problem.objectives_at(opt));
      } catch (const NumericError&) {
        // Singular weighting: no unique optimum for this lattice point.
      }
      return;
    }
    for (std::size_t k = 0; k <= remaining; ++k) {
      w[j] = static_cast<double>(k) / static_cast<double>(resolution);
      self(self, j + 1, remaining - k);
    }
  };
  visit(visit, 0, resolution);
  return pareto_front(points);
}

std::vector<double> default_ref_point(const SolutionSet& front) {
  if (front.empty()) throw std::invalid_argument("default_ref_point: empty front");
  const std::size_t m = front.front().size();
  std::vector<double> ref(m);
  for (std::size_t j = 0; j < m; ++j) {
    double lo = front.front().values[j];
    double hi = lo;
    for (const auto& s : front) {
      lo = std::min(lo, s.values[j]);
      hi = std::max(hi, s.values[j]);
    }
    ref[j] = lo - 0.1 * (hi - lo);
  }
  return ref;
}

MetricsRecord compute_metrics(const SolutionSet& solutions, std::span<const double> scalarised,
                              const SolutionSet& reference_front,
                              std::span<const double> ref_point) {
  MetricsRecord r;
  if (!scalarised.empty()) {
    r.mean_scalarised = std::accumulate(scalarised.begin(), scalarised.end(), 0.0) /
                        static_cast<double>(scalarised.size());
  }
  r.ref_point.assign(ref_point.begin(), ref_point.end());
  for (const auto& s : solutions) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (!(s.values[j] > ref_point[j])) {
        ++r.clipped;
        break;
      }
    }
  }
  r.hypervolume = hypervolume(solutions, ref_point);
  r.sparsity = sparsity(solutions);
  r.cardinality = cardinality(solutions);
  r.igd = reference_front.empty() || solutions.empty() ? 0.0 : igd(solutions, reference_front);
  return r;
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path, std::ios::out | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  return json::parse(in);
}

}  // namespace fedpref::cli
