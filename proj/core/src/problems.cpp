#include "fedpref/problems.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include "fedpref/errors.hpp"

namespace fedpref {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t kInitStream = 0x1;
constexpr std::uint64_t kPreferenceStream = 0x2;

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = splitmix64(base);
  for (std::uint64_t t : tags) h = splitmix64(h ^ splitmix64(t + 0x632be59bd9b4e019ULL));
  return h;
}

QuadraticMOProblem::QuadraticMOProblem(std::vector<std::vector<double>> centers,
                                       std::vector<std::vector<double>> scales,
                                       std::vector<std::size_t> layer_sizes)
    : centers_(std::move(centers)),
      scales_(std::move(scales)),
      layer_sizes_(std::move(layer_sizes)) {
  dim_ = std::accumulate(layer_sizes_.begin(), layer_sizes_.end(), std::size_t{0});
  if (centers_.empty()) throw PreconditionError("problem needs at least one objective");
  if (layer_sizes_.empty() || dim_ == 0) throw StructuralError("problem needs nonempty layers");
  for (const auto& c : centers_) {
    if (c.size() != dim_) throw StructuralError("center dimension does not match layer sizes");
    for (double v : c) {
      if (!std::isfinite(v)) throw NumericError("non-finite center");
    }
  }
  if (!scales_.empty()) {
    if (scales_.size() != centers_.size()) {
      throw StructuralError("need one scale matrix per objective");
    }
    for (const auto& a : scales_) {
      if (a.size() != dim_ * dim_) throw StructuralError("scale matrix has wrong size");
      Eigen::Map<const RowMajor> m(a.data(), dim_, dim_);
      if (!m.allFinite()) throw NumericError("non-finite scale matrix");
      if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff())) {
        throw PreconditionError("scale matrices must be symmetric");
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
      if (es.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff())) {
        throw PreconditionError("scale matrices must be positive semidefinite");
      }
    }
  }
}

void QuadraticMOProblem::check(const PreferenceVector& w, std::size_t theta_size) const {
  if (w.size() != objectives()) throw StructuralError("preference length does not match objectives");
  if (theta_size != dim_) throw StructuralError("parameter dimension does not match problem");
}

std::vector<double> QuadraticMOProblem::apply_scale(std::size_t j, std::span<const double> x) const {
  if (scales_.empty()) return {x.begin(), x.end()};
  std::vector<double> out(dim_, 0.0);
  const auto& a = scales_[j];
  for (std::size_t r = 0; r < dim_; ++r) {
    double s = 0.0;
    for (std::size_t c = 0; c < dim_; ++c) s += a[r * dim_ + c] * x[c];
    out[r] = s;
  }
  return out;
}

ObjectiveVector QuadraticMOProblem::objectives_at(std::span<const double> theta) const {
  if (theta.size() != dim_) throw StructuralError("parameter dimension does not match problem");
  ObjectiveVector f;
  f.values.resize(objectives());
  std::vector<double> diff(dim_);
  for (std::size_t j = 0; j < objectives(); ++j) {
    for (std::size_t k = 0; k < dim_; ++k) diff[k] = theta[k] - centers_[j][k];
    const auto ad = apply_scale(j, diff);
    double q = 0.0;
    for (std::size_t k = 0; k < dim_; ++k) q += diff[k] * ad[k];
    f.values[j] = -q;
    if (!std::isfinite(f.values[j])) throw NumericError("non-finite objective value");
  }
  return f;
}

ObjectiveVector QuadraticMOProblem::objectives_at(const LayeredParams& theta) const {
  return objectives_at(theta.flat());
}

double QuadraticMOProblem::scalarised_value(const PreferenceVector& w,
                                            std::span<const double> theta) const {
  check(w, theta.size());
  const auto f = objectives_at(theta);
  double s = 0.0;
  for (std::size_t j = 0; j < objectives(); ++j) s += w[j] * f.values[j];
  return s;
}

double QuadraticMOProblem::scalarised_value(const PreferenceVector& w,
                                            const LayeredParams& theta) const {
  return scalarised_value(w, theta.flat());
}

std::vector<double> QuadraticMOProblem::scalarised_gradient(const PreferenceVector& w,
                                                            std::span<const double> theta) const {
  check(w, theta.size());
  std::vector<double> g(dim_, 0.0);
  std::vector<double> diff(dim_);
  for (std::size_t j = 0; j < objectives(); ++j) {
    if (w[j] == 0.0) continue;
    for (std::size_t k = 0; k < dim_; ++k) diff[k] = theta[k] - centers_[j][k];
    const auto ad = apply_scale(j, diff);
    for (std::size_t k = 0; k < dim_; ++k) g[k] -= 2.0 * w[j] * ad[k];
  }
  return g;
}

std::vector<double> QuadraticMOProblem::analytic_optimum(const PreferenceVector& w) const {
  check(w, dim_);
  if (scales_.empty()) {
    std::vector<double> opt(dim_, 0.0);
    for (std::size_t j = 0; j < objectives(); ++j) {
      for (std::size_t k = 0; k < dim_; ++k) opt[k] += w[j] * centers_[j][k];
    }
    return opt;
  }
  Eigen::MatrixXd lhs = Eigen::MatrixXd::Zero(dim_, dim_);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(dim_);
  for (std::size_t j = 0; j < objectives(); ++j) {
    Eigen::Map<const RowMajor> a(scales_[j].data(), dim_, dim_);
    Eigen::Map<const Eigen::VectorXd> c(centers_[j].data(), dim_);
    lhs += w[j] * a;
    rhs += w[j] * (a * c);
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(lhs);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) {
    throw NumericError("weighted scale matrix is singular; optimum is not unique");
  }
  const Eigen::VectorXd x = lu.solve(rhs);
  return {x.data(), x.data() + x.size()};
}

std::vector<PreferenceVector> generate_preferences(const PrefDistribution& dist, std::size_t n,
                                                   std::uint64_t seed) {
  const std::size_t m = dist.objectives;
  if (n < 1) throw PreconditionError("generate_preferences: n must be >= 1");
  if (m < 2) throw PreconditionError("generate_preferences: need at least two objectives");

  std::vector<PreferenceVector> out;
  out.reserve(n);
  std::mt19937_64 rng(derive_seed(seed, {kPreferenceStream}));

  switch (dist.kind) {
    case PrefKind::kDirichlet: {
      if (!(dist.alpha > 0.0)) throw PreconditionError("Dirichlet alpha must be > 0");
      std::gamma_distribution<double> gamma(dist.alpha, 1.0);
      while (out.size() < n) {
        std::vector<double> w(m);
        double total = 0.0;
        for (double& x : w) total += (x = gamma(rng));
        if (total > 0.0) out.emplace_back(std::move(w));
      }
      break;
    }
    case PrefKind::kGaussian: {
      if (!(dist.sigma >= 0.0)) throw PreconditionError("Gaussian sigma must be >= 0");
      std::normal_distribution<double> normal(1.0 / static_cast<double>(m), dist.sigma);
      while (out.size() < n) {
        std::vector<double> w(m);
        double total = 0.0;
        for (double& x : w) total += (x = std::max(0.0, normal(rng)));
        if (total > 0.0) out.emplace_back(std::move(w));
      }
      break;
    }
    case PrefKind::kEquidistant: {
      if (n == 1) {
        out.emplace_back(std::vector<double>(m, 1.0));
        break;
      }
      // Smallest H with C(H + m − 1, m − 1) >= n.
      auto lattice_size = [m](std::size_t h) {
        double c = 1.0;
        for (std::size_t i = 1; i < m; ++i) c = c * static_cast<double>(h + i) / static_cast<double>(i);
        return c;
      };
      std::size_t h = 1;
      while (lattice_size(h) < static_cast<double>(n)) ++h;

      std::vector<std::vector<std::size_t>> lattice;
      std::vector<std::size_t> point(m, 0);
      auto enumerate = [&](auto&& self, std::size_t j, std::size_t remaining) -> void {
        if (j + 1 == m) {
          point[j] = remaining;
          lattice.push_back(point);
          return;
        }
        for (std::size_t k = 0; k <= remaining; ++k) {
          point[j] = k;
          self(self, j + 1, remaining - k);
        }
      };
      enumerate(enumerate, 0, h);

      const std::size_t count = lattice.size();
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t idx = static_cast<std::size_t>(
            std::llround(static_cast<double>(i) * static_cast<double>(count - 1) /
                         static_cast<double>(n - 1)));
        std::vector<double> w(m);
        for (std::size_t j = 0; j < m; ++j) {
          w[j] = static_cast<double>(lattice[idx][j]) / static_cast<double>(h);
        }
        out.emplace_back(std::move(w));
      }
      break;
    }
  }
  return out;
}

LayeredParams local_train(const LayeredParams& start, const QuadraticMOProblem& problem,
                          const PreferenceVector& w, const TrainOptions& options) {
  if (options.steps < 1) throw PreconditionError("local_train: steps must be >= 1");
  if (!(options.learning_rate > 0.0)) throw PreconditionError("local_train: learning rate must be > 0");
  if (start.size() != problem.dimension()) {
    throw StructuralError("local_train: model dimension does not match problem");
  }

  std::vector<double> theta = start.flat();
  std::vector<double> anchor;
  double mu = 0.0;
  if (options.prox && options.prox->mu > 0.0) {
    if (options.prox->anchor.shape() != start.shape()) {
      throw StructuralError("local_train: proximal anchor shape mismatch");
    }
    anchor = options.prox->anchor.flat();
    mu = options.prox->mu;
  }

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const double lr = options.learning_rate;

  for (std::size_t step = 1; step <= options.steps; ++step) {
    auto g = problem.scalarised_gradient(w, theta);
    if (options.gradient_noise > 0.0) {
      for (double& gk : g) gk += options.gradient_noise * noise(rng);
    }
    for (std::size_t k = 0; k < theta.size(); ++k) {
      if (mu > 0.0) {
        theta[k] = (theta[k] + lr * g[k] + lr * mu * anchor[k]) / (1.0 + lr * mu);
      } else {
        theta[k] += lr * g[k];
      }
      if (!std::isfinite(theta[k])) {
        throw NumericError("local training diverged at step " + std::to_string(step), step);
      }
    }
  }
  return LayeredParams::from_flat(theta, start.shape());
}

QuadraticMOProblem conflicting_groups_problem(const ProblemConfig& problem) {
  const std::size_t dim = std::accumulate(problem.layer_sizes.begin(), problem.layer_sizes.end(),
                                          std::size_t{0});
  const std::size_t m = problem.objectives;
  if ((m + 1) / 2 > dim) throw PreconditionError("too many objectives for the model dimension");

  std::vector<std::vector<double>> centers;
  centers.reserve(m);
  for (std::size_t j = 0; j < m; ++j) {
    const std::size_t k = j / 2;
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    std::vector<double> u(dim);
    double norm = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
      u[d] = std::cos(std::numbers::pi * static_cast<double>(k) * (static_cast<double>(d) + 0.5) /
                      static_cast<double>(dim));
      norm += u[d] * u[d];
    }
    norm = std::sqrt(norm);
    for (double& x : u) x = sign * problem.separation * x / norm;
    centers.push_back(std::move(u));
  }
  return QuadraticMOProblem(std::move(centers), {}, problem.layer_sizes);
}

ClientBank build_client_bank(const RunConfig& cfg) {
  cfg.validate();
  const ProblemConfig& pc = cfg.problem;

  std::vector<PreferenceVector> prefs;
  std::vector<std::size_t> groups;
  auto problem = [&] {
    if (pc.kind == ProblemKind::kConflictingGroups) {
      for (std::size_t g = 0; g < pc.group_sizes.size(); ++g) {
        for (std::size_t i = 0; i < pc.group_sizes[g]; ++i) {
          prefs.emplace_back(pc.group_preferences[g]);
          groups.push_back(g);
        }
      }
      return conflicting_groups_problem(pc);
    }
    QuadraticMOProblem p(pc.centers, pc.scales, pc.layer_sizes);
    PrefDistribution dist{cfg.preferences.kind, p.objectives(), cfg.preferences.alpha,
                          cfg.preferences.sigma};
    prefs = generate_preferences(dist, cfg.clients, cfg.seed);
    return p;
  }();

  std::vector<LayeredParams> init;
  init.reserve(cfg.clients);
  for (std::size_t i = 0; i < cfg.clients; ++i) {
    std::mt19937_64 rng(derive_seed(cfg.seed, {kInitStream, i}));
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> theta(problem.dimension());
    for (double& x : theta) x = pc.init_scale * normal(rng);
    init.push_back(LayeredParams::from_flat(theta, pc.layer_sizes));
  }
  return ClientBank{std::move(problem), std::move(prefs), std::move(init), std::move(groups)};
}

}  // namespace fedpref
