// Online imputation of missing neighbor values. Each node owns one
// random-feature model per in-neighbor: a shift-invariant kernel is
// approximated by D spectral samples, coefficients are pretrained offline in
// closed form and refined online by gradient steps on received values, and
// predictions replace the contributions of dropped edges.
#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "shiftseq/errors.hpp"
#include "shiftseq/filtering.hpp"
#include "shiftseq/graph.hpp"
#include "shiftseq/matrix_io.hpp"
#include "shiftseq/rng.hpp"

namespace shiftseq {

enum class KernelType { kGaussian, kLaplacian, kCauchy };

struct KernelConfig {
  KernelType type = KernelType::kGaussian;
  // Gaussian bandwidth sigma, Laplacian rate b, or Cauchy scale gamma.
  // param <= 0 requests the median heuristic during pretraining (Gaussian
  // only).
  double param = 1.0;
};

inline const char* to_string(KernelType t) {
  switch (t) {
    case KernelType::kGaussian: return "gaussian";
    case KernelType::kLaplacian: return "laplacian";
    default: return "cauchy";
  }
}

inline KernelType kernel_type_from_string(const std::string& s) {
  if (s == "gaussian") return KernelType::kGaussian;
  if (s == "laplacian") return KernelType::kLaplacian;
  if (s == "cauchy") return KernelType::kCauchy;
  throw InputError("unknown kernel: " + s);
}

inline double kernel_exact(const Eigen::VectorXd& u, const Eigen::VectorXd& v,
                           const KernelConfig& kernel) {
  if (u.size() != v.size())
    throw DimensionError("kernel arguments must have equal dimension");
  const Eigen::VectorXd d = u - v;
  switch (kernel.type) {
    case KernelType::kGaussian:
      return std::exp(-d.squaredNorm() / (2.0 * kernel.param * kernel.param));
    case KernelType::kLaplacian:
      return std::exp(-kernel.param * d.lpNorm<1>());
    default: {  // product of per-coordinate Cauchy factors
      double k = 1.0;
      for (Eigen::Index i = 0; i < d.size(); ++i)
        k /= 1.0 + kernel.param * kernel.param * d(i) * d(i);
      return k;
    }
  }
}

// Spectral samples w_1..w_D (one column each) from the kernel's Fourier
// density: Gaussian kernel -> normal with std 1/sigma, Laplacian kernel ->
// per-coordinate Cauchy, Cauchy kernel -> per-coordinate Laplace.
inline Eigen::MatrixXd sample_spectral(int count, const KernelConfig& kernel,
                                       int dim, std::uint64_t seed) {
  if (count < 1) throw InputError("need at least one spectral sample");
  if (dim < 1) throw InputError("feature dimension must be positive");
  if (kernel.param <= 0.0)
    throw InputError("kernel parameter must be positive when sampling");
  Rng rng = substream(seed, "spectral-samples");
  Eigen::MatrixXd w(dim, count);
  switch (kernel.type) {
    case KernelType::kGaussian: {
      std::normal_distribution<double> dist(0.0, 1.0 / kernel.param);
      for (int c = 0; c < count; ++c)
        for (int r = 0; r < dim; ++r) w(r, c) = dist(rng);
      break;
    }
    case KernelType::kLaplacian: {
      std::cauchy_distribution<double> dist(0.0, kernel.param);
      for (int c = 0; c < count; ++c)
        for (int r = 0; r < dim; ++r) w(r, c) = dist(rng);
      break;
    }
    default: {  // Laplace via inverse CDF
      std::uniform_real_distribution<double> uni(-0.5, 0.5);
      for (int c = 0; c < count; ++c)
        for (int r = 0; r < dim; ++r) {
          const double u = uni(rng);
          w(r, c) = -kernel.param * std::copysign(1.0, u) *
                    std::log(1.0 - 2.0 * std::abs(u));
        }
      break;
    }
  }
  return w;
}

// Unit-norm random-feature map: sines of w_d^T u, then cosines, scaled by
// 1/sqrt(D).
inline Eigen::VectorXd rff_features(const Eigen::VectorXd& u,
                                    const Eigen::MatrixXd& w) {
  if (u.size() != w.rows())
    throw DimensionError("feature vector does not match the spectral samples");
  const Eigen::Index d = w.cols();
  const Eigen::VectorXd proj = w.transpose() * u;
  Eigen::VectorXd delta(2 * d);
  const double scale = 1.0 / std::sqrt(static_cast<double>(d));
  delta.head(d) = proj.array().sin() * scale;
  delta.tail(d) = proj.array().cos() * scale;
  return delta;
}

// Solves (gram + lambda * k I) alpha = y; one refinement step keeps the
// residual below 1e-10 ||y||. A singular system (lambda = 0) is signaled.
inline Eigen::VectorXd ridge_closed_form(const Eigen::MatrixXd& gram,
                                         double lambda, int k,
                                         const Eigen::VectorXd& y) {
  if (gram.rows() != gram.cols() || gram.rows() != y.size())
    throw DimensionError("gram matrix and targets do not agree");
  Eigen::MatrixXd lhs = gram;
  lhs.diagonal().array() += lambda * static_cast<double>(k);
  Eigen::LDLT<Eigen::MatrixXd> ldlt(lhs);
  Eigen::VectorXd alpha = ldlt.solve(y);
  Eigen::VectorXd residual = y - lhs * alpha;
  if (alpha.allFinite() && residual.norm() > 1e-12 * y.norm())
    alpha += ldlt.solve(residual);
  residual = y - lhs * alpha;
  if (!alpha.allFinite() || residual.norm() > 1e-10 * y.norm())
    throw SingularSystemError("ridge system is singular; need lambda > 0");
  return alpha;
}

struct NeighborEstimator {
  int owner = 0;
  int neighbor = 0;
  Eigen::VectorXd beta;  // 2D coefficients; the only state kept per pair
  double belief = 0.0;   // most recent received value or prediction
};

inline double predict(const NeighborEstimator& est,
                      const Eigen::VectorXd& delta) {
  if (est.beta.size() != delta.size())
    throw DimensionError("estimator coefficients do not match the features");
  return est.beta.dot(delta);
}

// One gradient step on (beta^T delta - target)^2 + lambda ||beta||^2.
inline void ogd_step(NeighborEstimator& est, const Eigen::VectorXd& delta,
                     double target, double eta, double lambda) {
  if (eta <= 0.0) throw InputError("step size must be positive");
  const double err = predict(est, delta);
  est.beta -= eta * (2.0 * (err - target) * delta + 2.0 * lambda * est.beta);
  if (!est.beta.allFinite())
    throw NumericalError("online update diverged for estimator (" +
                         std::to_string(est.owner + 1) + "," +
                         std::to_string(est.neighbor + 1) + ")");
}

// u = [missing neighbor's value, own value, remaining neighbors ascending],
// all as of two exchanges back; missing or never-received slots carry the
// latest belief (prediction or zero).
inline Eigen::VectorXd build_feature_vector(const std::vector<int>& neighbors,
                                            int missing_index,
                                            double own_value,
                                            std::span<const double> beliefs) {
  const int deg = static_cast<int>(neighbors.size());
  if (missing_index < 0 || missing_index >= deg)
    throw InputError("missing neighbor index out of range");
  if (static_cast<int>(beliefs.size()) != deg)
    throw DimensionError("one belief per neighbor required");
  Eigen::VectorXd u(deg + 1);
  u(0) = beliefs[missing_index];
  u(1) = own_value;
  int slot = 2;
  for (int m = 0; m < deg; ++m)
    if (m != missing_index) u(slot++) = beliefs[m];
  return u;
}

struct RffEstimatorBank {
  KernelConfig kernel;
  int feature_count = 100;  // D
  double lambda = 1e-4;
  double eta0 = 0.0;  // 0 -> 0.1 / sqrt(D)
  bool eta_sqrt_decay = false;
  std::uint64_t seed = 0;
  std::vector<std::vector<int>> neighbors;  // per node, ascending, no self
  std::vector<Eigen::MatrixXd> spectral;    // per node: (deg+1) x D
  std::vector<std::vector<NeighborEstimator>> estimators;

  double eta_at(int round) const {
    const double base =
        eta0 > 0.0 ? eta0 : 0.1 / std::sqrt(static_cast<double>(feature_count));
    return eta_sqrt_decay ? base / std::sqrt(static_cast<double>(round)) : base;
  }

  void reset_beliefs() {
    for (auto& node : estimators)
      for (auto& est : node) est.belief = 0.0;
  }
};

namespace detail {

struct TrainingSet {
  // per node, per neighbor slot: feature vectors and targets
  std::vector<std::vector<std::vector<Eigen::VectorXd>>> features;
  std::vector<std::vector<std::vector<double>>> targets;
};

// Clean executions of the protocol; at round l the features per (node,
// neighbor) are the values of exchange l-2 (cold start: neighbor slots 0,
// own slot the input value) and the target is the neighbor's value at
// exchange l-1.
inline TrainingSet collect_training_set(
    std::span<const Eigen::MatrixXd> shifts,
    const std::vector<std::vector<int>>& neighbors, int n_nodes, int samples,
    std::uint64_t seed) {
  TrainingSet set;
  set.features.resize(n_nodes);
  set.targets.resize(n_nodes);
  for (int i = 0; i < n_nodes; ++i) {
    set.features[i].resize(neighbors[i].size());
    set.targets[i].resize(neighbors[i].size());
  }
  const std::size_t rounds = shifts.size();
  std::normal_distribution<double> gauss;
  for (int k = 0; k < samples; ++k) {
    Rng rng = substream(seed, "pretrain-data", static_cast<std::uint64_t>(k));
    Eigen::VectorXd x(n_nodes);
    for (int i = 0; i < n_nodes; ++i) x(i) = gauss(rng);
    RunTrace trace = apply_successive(shifts, x);
    for (std::size_t l = 1; l <= rounds; ++l) {
      const Eigen::VectorXd& prev = trace.iterates[l - 1];
      const Eigen::VectorXd* two_back =
          l >= 2 ? &trace.iterates[l - 2] : nullptr;
      for (int i = 0; i < n_nodes; ++i) {
        const auto& nb = neighbors[i];
        if (nb.empty()) continue;
        std::vector<double> beliefs(nb.size(), 0.0);
        if (two_back)
          for (std::size_t m = 0; m < nb.size(); ++m)
            beliefs[m] = (*two_back)(nb[m]);
        const double own = two_back ? (*two_back)(i) : x(i);
        for (std::size_t m = 0; m < nb.size(); ++m) {
          set.features[i][m].push_back(
              build_feature_vector(nb, static_cast<int>(m), own, beliefs));
          set.targets[i][m].push_back(prev(nb[m]));
        }
      }
    }
  }
  return set;
}

inline double median_pairwise_distance(const TrainingSet& set,
                                       std::uint64_t seed) {
  std::vector<double> dists;
  Rng rng = substream(seed, "bandwidth");
  for (std::size_t i = 0; i < set.features.size(); ++i) {
    std::vector<const Eigen::VectorXd*> pool;
    for (const auto& per_pair : set.features[i])
      for (const auto& u : per_pair) pool.push_back(&u);
    if (pool.size() < 2) continue;
    const std::size_t draws = std::min<std::size_t>(512, pool.size());
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    for (std::size_t d = 0; d < draws; ++d) {
      const auto a = pick(rng), b = pick(rng);
      if (a == b) continue;
      dists.push_back((*pool[a] - *pool[b]).norm());
    }
  }
  if (dists.empty()) return 1.0;
  std::nth_element(dists.begin(), dists.begin() + dists.size() / 2,
                   dists.end());
  const double med = dists[dists.size() / 2];
  return med > 0.0 ? med : 1.0;
}

// Batch fit of min (1/M)||Phi^T beta - y||^2 + lambda ||beta||^2; with
// lambda = 0 the minimum-norm least-squares solution is used instead of the
// (singular) normal equations.
inline Eigen::VectorXd fit_beta(const Eigen::MatrixXd& phi,
                                const Eigen::VectorXd& y, double lambda) {
  if (lambda > 0.0) {
    Eigen::MatrixXd lhs = phi * phi.transpose();
    lhs.diagonal().array() += lambda * static_cast<double>(y.size());
    return Eigen::LDLT<Eigen::MatrixXd>(lhs).solve(phi * y);
  }
  return phi.transpose()
      .completeOrthogonalDecomposition()
      .solve(y)
      .eval();
}

}  // namespace detail

struct PretrainConfig {
  KernelConfig kernel;       // param <= 0 -> median heuristic (Gaussian)
  int feature_count = 100;   // D
  int samples = 500;         // K random input signals
  double lambda = 1e-4;
  double eta0 = 0.0;
  bool eta_sqrt_decay = false;
};

inline RffEstimatorBank offline_pretrain(const Topology& topo,
                                         std::span<const Eigen::MatrixXd> shifts,
                                         const PretrainConfig& cfg,
                                         std::uint64_t seed) {
  if (cfg.samples < 1) throw InputError("need at least one pretrain sample");
  if (cfg.feature_count < 1) throw InputError("need at least one feature");
  const int n = topo.n_nodes();
  for (const auto& s : shifts) check_square_and_matching(s, n);

  RffEstimatorBank bank;
  bank.kernel = cfg.kernel;
  bank.feature_count = cfg.feature_count;
  bank.lambda = cfg.lambda;
  bank.eta0 = cfg.eta0;
  bank.eta_sqrt_decay = cfg.eta_sqrt_decay;
  bank.seed = seed;
  bank.neighbors = topo.in_neighbors_excluding_self();

  detail::TrainingSet set = detail::collect_training_set(
      shifts, bank.neighbors, n, cfg.samples, seed);

  if (bank.kernel.param <= 0.0) {
    if (bank.kernel.type != KernelType::kGaussian)
      throw InputError("median bandwidth heuristic needs a Gaussian kernel");
    bank.kernel.param = detail::median_pairwise_distance(set, seed);
  }

  bank.spectral.resize(n);
  bank.estimators.resize(n);
  for (int i = 0; i < n; ++i) {
    const auto& nb = bank.neighbors[i];
    if (nb.empty()) continue;
    bank.spectral[i] = sample_spectral(
        cfg.feature_count, bank.kernel, static_cast<int>(nb.size()) + 1,
        stream_key(seed, "spectral", static_cast<std::uint64_t>(i)));
    bank.estimators[i].resize(nb.size());
    for (std::size_t m = 0; m < nb.size(); ++m) {
      const auto& us = set.features[i][m];
      const auto& ys = set.targets[i][m];
      Eigen::MatrixXd phi(2 * cfg.feature_count, us.size());
      for (std::size_t c = 0; c < us.size(); ++c)
        phi.col(c) = rff_features(us[c], bank.spectral[i]);
      Eigen::VectorXd y =
          Eigen::Map<const Eigen::VectorXd>(ys.data(), ys.size());
      NeighborEstimator est;
      est.owner = i;
      est.neighbor = nb[m];
      est.beta = detail::fit_beta(phi, y, cfg.lambda);
      bank.estimators[i][m] = std::move(est);
    }
  }
  return bank;
}

enum class ImputeMode { kRff, kZero };

struct EstimationRun {
  RunTrace trace;
  std::vector<int> imputed_per_round;
  std::vector<std::vector<std::pair<int, int>>> imputed_edges;  // (dst, src)
  long messages_sent = 0;
  long messages_full = 0;  // what a drop-free protocol would send
};

namespace detail {

// Shared execution loop. activation(i, j, round) returns the probability
// that the edge j -> i delivers at that round; the Bernoulli draws come from
// a per-round stream that both imputation modes consume identically, so a
// zero-imputation baseline sees the same drop pattern as the estimator run.
template <typename ActivationFn>
EstimationRun run_imputed(std::span<const Eigen::MatrixXd> shifts,
                          const Eigen::VectorXd& x, RffEstimatorBank& bank,
                          std::uint64_t seed, ImputeMode mode,
                          ActivationFn&& activation) {
  const Eigen::Index n = x.size();
  for (const auto& s : shifts) check_square_and_matching(s, n);
  if (static_cast<Eigen::Index>(bank.neighbors.size()) != n)
    throw DimensionError("estimator bank does not match the signal");

  bank.reset_beliefs();
  EstimationRun run;
  run.trace.iterates.push_back(x);
  Eigen::VectorXd current = x;
  Eigen::VectorXd own_prev = x;  // own values as of two exchanges back

  const int rounds = static_cast<int>(shifts.size());
  for (int l = 1; l <= rounds; ++l) {
    const Eigen::MatrixXd& s = shifts[l - 1];
    Rng rng = substream(seed, "impute-drops", static_cast<std::uint64_t>(l));
    const double eta = bank.eta_at(l);
    Eigen::VectorXd next(n);
    for (Eigen::Index i = 0; i < n; ++i) next(i) = s(i, i) * current(i);
    int imputed = 0;
    run.imputed_edges.emplace_back();

    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& nb = bank.neighbors[i];
      if (nb.empty()) continue;
      std::vector<double> beliefs(nb.size());
      for (std::size_t m = 0; m < nb.size(); ++m)
        beliefs[m] = bank.estimators[i][m].belief;
      for (std::size_t m = 0; m < nb.size(); ++m) {
        const int j = nb[m];
        run.messages_full += 1;
        const double p = activation(static_cast<int>(i), j, l);
        bool received;
        if (p >= 1.0)
          received = true;
        else if (p <= 0.0)
          received = false;
        else
          received = std::bernoulli_distribution(p)(rng);

        NeighborEstimator& est = bank.estimators[i][m];
        double used;
        if (mode == ImputeMode::kRff) {
          const Eigen::VectorXd u = build_feature_vector(
              nb, static_cast<int>(m), own_prev(i), beliefs);
          const Eigen::VectorXd delta = rff_features(u, bank.spectral[i]);
          if (received) {
            used = current(j);
            ogd_step(est, delta, used, eta, bank.lambda);
          } else {
            used = predict(est, delta);
          }
          est.belief = used;
        } else {
          used = received ? current(j) : 0.0;
        }
        if (received) {
          run.messages_sent += 1;
        } else {
          ++imputed;
          run.imputed_edges.back().emplace_back(static_cast<int>(i), j);
        }
        next(i) += s(i, j) * used;
      }
    }
    run.imputed_per_round.push_back(imputed);
    own_prev = current;
    current = next;
    run.trace.iterates.push_back(current);
  }
  run.trace.final = current;
  return run;
}

}  // namespace detail

// Fluctuating execution with online imputation: dropped contributions are
// replaced by predictions, received values drive one gradient step per
// (node, neighbor) pair.
inline EstimationRun simulate_with_estimation(
    std::span<const Eigen::MatrixXd> shifts, const Eigen::MatrixXd& p_active,
    const Eigen::VectorXd& x, RffEstimatorBank& bank, std::uint64_t seed,
    ImputeMode mode = ImputeMode::kRff) {
  if (p_active.rows() != x.size() || p_active.cols() != x.size())
    throw DimensionError("activation matrix does not match the signal");
  return detail::run_imputed(
      shifts, x, bank, seed, mode,
      [&](int i, int j, int) { return p_active(i, j); });
}

// Deliberate sparsification: incoming cross-edges are dropped at drop_rate;
// after the optional freeze horizon all exchanges stop and every neighbor
// value is imputed.
inline EstimationRun sparsify_run(std::span<const Eigen::MatrixXd> shifts,
                                  double drop_rate, const Eigen::VectorXd& x,
                                  RffEstimatorBank& bank, std::uint64_t seed,
                                  std::optional<int> freeze_after = std::nullopt,
                                  ImputeMode mode = ImputeMode::kRff) {
  if (drop_rate < 0.0 || drop_rate >= 1.0)
    throw InputError("drop rate must lie in [0,1)");
  return detail::run_imputed(shifts, x, bank, seed, mode,
                             [&](int, int, int round) {
                               if (freeze_after && round > *freeze_after)
                                 return 0.0;
                               return 1.0 - drop_rate;
                             });
}

// --- serialization -----------------------------------------------------

inline void save_estimator_bank(const std::string& dir,
                                const RffEstimatorBank& bank) {
  std::filesystem::create_directories(dir);
  nlohmann::json meta;
  meta["kernel"] = to_string(bank.kernel.type);
  meta["kernel_param"] = bank.kernel.param;
  meta["feature_count"] = bank.feature_count;
  meta["lambda"] = bank.lambda;
  meta["eta0"] = bank.eta0;
  meta["eta_sqrt_decay"] = bank.eta_sqrt_decay;
  meta["seed"] = bank.seed;
  meta["neighbors"] = bank.neighbors;
  std::ofstream out(dir + "/rff_meta.json");
  if (!out) throw IoError("cannot open for writing: " + dir + "/rff_meta.json");
  out << meta.dump(2) << '\n';
  for (std::size_t i = 0; i < bank.estimators.size(); ++i)
    for (const auto& est : bank.estimators[i])
      write_matrix(dir + "/beta_" + std::to_string(est.owner + 1) + "_" +
                       std::to_string(est.neighbor + 1) + ".mat",
                   est.beta);
}

// Spectral samples are regenerated from the stored seed rather than written
// out; only the coefficients are persisted.
inline RffEstimatorBank load_estimator_bank(const std::string& dir) {
  std::ifstream in(dir + "/rff_meta.json");
  if (!in) throw IoError("cannot open estimator meta: " + dir);
  nlohmann::json meta = nlohmann::json::parse(in);
  RffEstimatorBank bank;
  bank.kernel.type = kernel_type_from_string(meta.at("kernel"));
  bank.kernel.param = meta.at("kernel_param").get<double>();
  bank.feature_count = meta.at("feature_count").get<int>();
  bank.lambda = meta.at("lambda").get<double>();
  bank.eta0 = meta.at("eta0").get<double>();
  bank.eta_sqrt_decay = meta.at("eta_sqrt_decay").get<bool>();
  bank.seed = meta.at("seed").get<std::uint64_t>();
  bank.neighbors = meta.at("neighbors").get<std::vector<std::vector<int>>>();
  const int n = static_cast<int>(bank.neighbors.size());
  bank.spectral.resize(n);
  bank.estimators.resize(n);
  for (int i = 0; i < n; ++i) {
    const auto& nb = bank.neighbors[i];
    if (nb.empty()) continue;
    bank.spectral[i] = sample_spectral(
        bank.feature_count, bank.kernel, static_cast<int>(nb.size()) + 1,
        stream_key(bank.seed, "spectral", static_cast<std::uint64_t>(i)));
    bank.estimators[i].resize(nb.size());
    for (std::size_t m = 0; m < nb.size(); ++m) {
      NeighborEstimator est;
      est.owner = i;
      est.neighbor = nb[m];
      Eigen::MatrixXd beta = read_matrix(
          dir + "/beta_" + std::to_string(i + 1) + "_" +
          std::to_string(nb[m] + 1) + ".mat");
      est.beta = beta.col(0);
      bank.estimators[i][m] = std::move(est);
    }
  }
  return bank;
}

}  // namespace shiftseq
