// Design of a sequence of support-constrained shift operators S_1..S_L whose
// running products track a target transformation: weighted cost evaluation,
// the per-block least-squares subproblem in the E free entries, and the
// block-coordinate-descent loop that cycles over the blocks.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "shiftseq/errors.hpp"
#include "shiftseq/graph.hpp"
#include "shiftseq/linalg.hpp"
#include "shiftseq/matrix_io.hpp"
#include "shiftseq/rng.hpp"

namespace shiftseq {

enum class WeightScheme { kUniform, kGeometric };
enum class InitScheme { kScaledRandom, kIdentityLike };
enum class StopMetric { kUnweighted, kWeighted };

// Per-round weights: nonnegative, nondecreasing, normalized to sum 1.
inline std::vector<double> default_weights(int rounds, WeightScheme scheme,
                                           double ratio = 2.0) {
  if (rounds < 1) throw InputError("need at least one round");
  std::vector<double> w(rounds);
  if (scheme == WeightScheme::kUniform) {
    std::fill(w.begin(), w.end(), 1.0 / rounds);
    return w;
  }
  if (ratio <= 1.0)
    throw InputError("geometric weights need ratio > 1");
  double sum = 0.0;
  for (int l = 0; l < rounds; ++l) sum += (w[l] = std::pow(ratio, l));
  for (double& v : w) v /= sum;
  return w;
}

inline std::vector<double> normalize_weights(std::vector<double> w) {
  if (w.empty()) throw InputError("weight vector is empty");
  double sum = 0.0;
  for (std::size_t l = 0; l < w.size(); ++l) {
    if (!(w[l] >= 0.0)) throw InputError("weights must be nonnegative");
    if (l > 0 && w[l] < w[l - 1])
      throw InputError("weights must be nondecreasing");
    sum += w[l];
  }
  if (sum <= 0.0) throw InputError("weights must not all be zero");
  for (double& v : w) v /= sum;
  return w;
}

struct DesignConfig {
  int rounds = 1;                  // L
  std::vector<double> weights;     // empty -> geometric, ratio 2
  double epsilon = 1e-6;           // relative stopping tolerance
  int max_bcd_sweeps = 200;
  InitScheme init_scheme = InitScheme::kScaledRandom;
  StopMetric stop_on = StopMetric::kUnweighted;
  std::uint64_t seed = 0;
  double ridge = 0.0;
};

// sum_l w_l || T - S_l ... S_1 ||_F^2
inline double objective(const Eigen::MatrixXd& target,
                        std::span<const Eigen::MatrixXd> shifts,
                        std::span<const double> weights) {
  if (shifts.size() != weights.size())
    throw DimensionError("objective: one weight per shift required");
  const Eigen::Index n = target.rows();
  if (target.cols() != n) throw DimensionError("objective: target not square");
  Eigen::MatrixXd prod = Eigen::MatrixXd::Identity(n, n);
  double acc = 0.0;
  for (std::size_t l = 0; l < shifts.size(); ++l) {
    if (shifts[l].rows() != n || shifts[l].cols() != n)
      throw DimensionError("objective: shift dimension mismatch");
    prod = shifts[l] * prod;
    acc += weights[l] * (target - prod).squaredNorm();
  }
  return acc;
}

// Unweighted round-error sum; the stopping rule tracks this by default.
inline double unweighted_cost(const Eigen::MatrixXd& target,
                              std::span<const Eigen::MatrixXd> shifts) {
  const std::vector<double> ones(shifts.size(), 1.0);
  return objective(target, shifts, ones);
}

inline Eigen::VectorXd gather_support(const Eigen::MatrixXd& m,
                                      const SupportBasis& basis) {
  Eigen::VectorXd s(basis.e_count);
  for (int k = 0; k < basis.e_count; ++k)
    s(k) = m(basis.pairs[k].first, basis.pairs[k].second);
  return s;
}

inline Eigen::MatrixXd scatter_support(const Eigen::VectorXd& s,
                                       const SupportBasis& basis,
                                       Eigen::Index n) {
  if (s.size() != basis.e_count)
    throw DimensionError("coefficient vector does not match the support");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < basis.e_count; ++k)
    m(basis.pairs[k].first, basis.pairs[k].second) = s(k);
  return m;
}

// Normal-equation system for one block. With B = S_{j-1} ... S_1 and
// A_l = S_l ... S_{j+1} (empty products are the identity), the stacked
// design matrix for round l has columns vec(A_l[:,r] * B[c,:]) over the
// support pairs (r, c), so its Gram factorizes entrywise into
// (A_l^T A_l)(r, r') * (B B^T)(c, c') and the Kronecker product is never
// formed.
struct BlockSystem {
  Eigen::MatrixXd gram;  // E x E
  Eigen::VectorXd rhs;   // E
};

inline BlockSystem build_block_system(std::size_t block,
                                      std::span<const Eigen::MatrixXd> shifts,
                                      const Eigen::MatrixXd& target,
                                      std::span<const double> weights,
                                      const SupportBasis& basis) {
  const std::size_t rounds = shifts.size();
  if (block >= rounds) throw InputError("block index out of range");
  if (weights.size() != rounds)
    throw DimensionError("one weight per shift required");
  const Eigen::Index n = target.rows();
  if (target.cols() != n) throw DimensionError("target not square");
  for (const auto& s : shifts)
    if (s.rows() != n || s.cols() != n)
      throw DimensionError("shift dimension mismatch");

  Eigen::MatrixXd before = Eigen::MatrixXd::Identity(n, n);  // B
  for (std::size_t i = 0; i < block; ++i) before = shifts[i] * before;
  const Eigen::MatrixXd q = before * before.transpose();

  // Accumulate sum_l w_l A_l^T A_l and sum_l w_l A_l over l = block..L-1.
  Eigen::MatrixXd after = Eigen::MatrixXd::Identity(n, n);  // A_l
  Eigen::MatrixXd p_sum = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd a_sum = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t l = block; l < rounds; ++l) {
    if (l > block) after = shifts[l] * after;
    if (weights[l] == 0.0) continue;
    p_sum.noalias() += weights[l] * (after.transpose() * after);
    a_sum.noalias() += weights[l] * after;
  }
  const Eigen::MatrixXd r_sum = a_sum.transpose() * target * before.transpose();

  BlockSystem sys;
  sys.gram.resize(basis.e_count, basis.e_count);
  sys.rhs.resize(basis.e_count);
  for (int k = 0; k < basis.e_count; ++k) {
    const auto [rk, ck] = basis.pairs[k];
    sys.rhs(k) = r_sum(rk, ck);
    for (int k2 = 0; k2 < basis.e_count; ++k2) {
      const auto [r2, c2] = basis.pairs[k2];
      sys.gram(k, k2) = p_sum(rk, r2) * q(ck, c2);
    }
  }
  return sys;
}

inline Eigen::VectorXd solve_block_system(const BlockSystem& sys,
                                          double ridge) {
  Eigen::MatrixXd lhs = sys.gram;
  if (ridge > 0.0) lhs.diagonal().array() += ridge;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(lhs);
  Eigen::VectorXd s = ldlt.solve(sys.rhs);
  const double scale =
      sys.rhs.norm() + lhs.norm() * s.norm() + 1e-300;
  const double residual = (lhs * s - sys.rhs).norm();
  if (!s.allFinite() || residual > 1e-8 * scale)
    throw SingularSystemError(
        "block normal system is numerically singular; retry with ridge > 0");
  return s;
}

// Minimizer of sum_{l>=j} w_l || T - A_l S_j B ||_F^2 + ridge ||s||_2^2 over
// the free entries of block j (0-based), all other shifts held fixed.
inline Eigen::VectorXd solve_block(std::size_t block,
                                   std::span<const Eigen::MatrixXd> shifts,
                                   const Eigen::MatrixXd& target,
                                   std::span<const double> weights,
                                   const SupportBasis& basis,
                                   double ridge = 0.0) {
  return solve_block_system(
      build_block_system(block, shifts, target, weights, basis), ridge);
}

struct ShiftSequence {
  std::vector<Eigen::MatrixXd> shifts;
  std::vector<double> weights;
  std::vector<double> objective_history;  // weighted cost after each sweep
  std::vector<double> stop_history;       // stopping metric after each sweep
  std::vector<double> per_round_error;    // ||T - S_l...S_1||_F at the end
  double final_objective = 0.0;
  int sweeps = 0;
  bool converged = false;
  DesignConfig config;
};

namespace detail {

inline void init_shift(Eigen::MatrixXd& s, const SupportBasis& basis,
                       Eigen::Index n, InitScheme scheme, Rng& rng) {
  s = Eigen::MatrixXd::Zero(n, n);
  if (scheme == InitScheme::kIdentityLike) {
    for (auto [r, c] : basis.pairs)
      if (r == c) s(r, c) = 1.0;
    return;
  }
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (auto [r, c] : basis.pairs) s(r, c) = uni(rng);
  const double norm = spectral_norm(s);
  if (norm > 0.0) s /= norm;
}

}  // namespace detail

// Algorithm: initialize blocks 2..L, then cycle j = 1..L solving each block
// exactly while the others stay fixed, until the relative change of the
// stopping metric drops below epsilon or the sweep cap is reached.
inline ShiftSequence bcd_design(const Eigen::MatrixXd& target,
                                const Topology& topo,
                                const DesignConfig& config_in) {
  DesignConfig config = config_in;
  const Eigen::Index n = target.rows();
  if (target.cols() != n) throw DimensionError("bcd_design: target not square");
  if (topo.n_nodes() != n)
    throw DimensionError("bcd_design: target does not match the topology");
  if (config.rounds < 1) throw InputError("bcd_design: rounds must be >= 1");
  if (config.epsilon <= 0.0) throw InputError("bcd_design: epsilon must be > 0");
  if (config.max_bcd_sweeps < 1)
    throw InputError("bcd_design: sweep cap must be >= 1");
  if (config.weights.empty())
    config.weights = default_weights(config.rounds, WeightScheme::kGeometric);
  config.weights = normalize_weights(std::move(config.weights));
  if (static_cast<int>(config.weights.size()) != config.rounds)
    throw DimensionError("bcd_design: one weight per round required");

  const SupportBasis basis = build_support_basis(topo);
  if (basis.e_count == 0)
    throw InputError("bcd_design: support has no free entries");

  ShiftSequence seq;
  seq.config = config;
  seq.weights = config.weights;
  seq.shifts.assign(config.rounds, Eigen::MatrixXd::Zero(n, n));
  for (int i = 1; i < config.rounds; ++i) {
    Rng rng = substream(config.seed, "design-init", static_cast<std::uint64_t>(i));
    detail::init_shift(seq.shifts[i], basis, n, config.init_scheme, rng);
  }

  for (int sweep = 1; sweep <= config.max_bcd_sweeps; ++sweep) {
    for (int j = 0; j < config.rounds; ++j) {
      const BlockSystem sys = build_block_system(
          static_cast<std::size_t>(j), seq.shifts, target, config.weights,
          basis);
      Eigen::VectorXd coeffs;
      try {
        coeffs = solve_block_system(sys, config.ridge);
      } catch (const SingularSystemError&) {
        const double retry =
            std::max(1e-10 * sys.gram.trace() / basis.e_count, 1e-300);
        coeffs = solve_block_system(sys, retry);
        // A regularized retry must not undo the sweep's progress.
        const Eigen::VectorXd old = gather_support(seq.shifts[j], basis);
        const double cost_new =
            coeffs.dot(sys.gram * coeffs) - 2.0 * sys.rhs.dot(coeffs);
        const double cost_old =
            old.dot(sys.gram * old) - 2.0 * sys.rhs.dot(old);
        if (cost_new > cost_old) continue;
      }
      seq.shifts[j] = scatter_support(coeffs, basis, n);
    }
    seq.sweeps = sweep;
    const double weighted = objective(target, seq.shifts, config.weights);
    const double metric = config.stop_on == StopMetric::kWeighted
                              ? weighted
                              : unweighted_cost(target, seq.shifts);
    if (!std::isfinite(weighted) || !std::isfinite(metric))
      throw NumericalError("bcd_design: objective is not finite at sweep " +
                           std::to_string(sweep));
    seq.objective_history.push_back(weighted);
    seq.stop_history.push_back(metric);
    if (metric == 0.0) {
      seq.converged = true;
      break;
    }
    if (sweep >= 2) {
      const double prev = seq.stop_history[sweep - 2];
      if (prev == 0.0 || std::abs(metric - prev) / std::abs(prev) <
                             config.epsilon) {
        seq.converged = true;
        break;
      }
    }
  }

  seq.final_objective = seq.objective_history.back();
  Eigen::MatrixXd prod = Eigen::MatrixXd::Identity(n, n);
  for (const auto& s : seq.shifts) {
    prod = s * prod;
    seq.per_round_error.push_back((target - prod).norm());
  }
  return seq;
}

// --- serialization -----------------------------------------------------

inline const char* to_string(InitScheme s) {
  return s == InitScheme::kScaledRandom ? "scaled-random" : "identity-like";
}
inline const char* to_string(StopMetric s) {
  return s == StopMetric::kUnweighted ? "unweighted" : "weighted";
}
inline InitScheme init_scheme_from_string(const std::string& s) {
  if (s == "scaled-random") return InitScheme::kScaledRandom;
  if (s == "identity-like") return InitScheme::kIdentityLike;
  throw InputError("unknown init scheme: " + s);
}
inline StopMetric stop_metric_from_string(const std::string& s) {
  if (s == "unweighted") return StopMetric::kUnweighted;
  if (s == "weighted") return StopMetric::kWeighted;
  throw InputError("unknown stopping metric: " + s);
}

// Directory layout: meta.json plus S_1.mat .. S_L.mat.
inline void save_shift_sequence(const std::string& dir,
                                const ShiftSequence& seq) {
  std::filesystem::create_directories(dir);
  nlohmann::json meta;
  meta["rounds"] = seq.shifts.size();
  meta["n_nodes"] = seq.shifts.empty() ? 0 : seq.shifts[0].rows();
  meta["weights"] = seq.weights;
  meta["epsilon"] = seq.config.epsilon;
  meta["max_bcd_sweeps"] = seq.config.max_bcd_sweeps;
  meta["init_scheme"] = to_string(seq.config.init_scheme);
  meta["stop_on"] = to_string(seq.config.stop_on);
  meta["ridge"] = seq.config.ridge;
  meta["seed"] = seq.config.seed;
  meta["sweeps"] = seq.sweeps;
  meta["converged"] = seq.converged;
  meta["final_objective"] = seq.final_objective;
  meta["objective_history"] = seq.objective_history;
  meta["stop_history"] = seq.stop_history;
  meta["per_round_error"] = seq.per_round_error;
  std::ofstream out(dir + "/meta.json");
  if (!out) throw IoError("cannot open for writing: " + dir + "/meta.json");
  out << meta.dump(2) << '\n';
  for (std::size_t l = 0; l < seq.shifts.size(); ++l)
    write_matrix(dir + "/S_" + std::to_string(l + 1) + ".mat", seq.shifts[l]);
}

inline ShiftSequence load_shift_sequence(const std::string& dir) {
  std::ifstream in(dir + "/meta.json");
  if (!in) throw IoError("cannot open shift directory meta: " + dir);
  nlohmann::json meta = nlohmann::json::parse(in);
  ShiftSequence seq;
  const std::size_t rounds = meta.at("rounds").get<std::size_t>();
  seq.weights = meta.at("weights").get<std::vector<double>>();
  seq.objective_history =
      meta.at("objective_history").get<std::vector<double>>();
  seq.stop_history = meta.at("stop_history").get<std::vector<double>>();
  seq.per_round_error = meta.at("per_round_error").get<std::vector<double>>();
  seq.final_objective = meta.at("final_objective").get<double>();
  seq.sweeps = meta.at("sweeps").get<int>();
  seq.converged = meta.at("converged").get<bool>();
  seq.config.rounds = static_cast<int>(rounds);
  seq.config.weights = seq.weights;
  seq.config.epsilon = meta.at("epsilon").get<double>();
  seq.config.max_bcd_sweeps = meta.at("max_bcd_sweeps").get<int>();
  seq.config.init_scheme =
      init_scheme_from_string(meta.at("init_scheme").get<std::string>());
  seq.config.stop_on =
      stop_metric_from_string(meta.at("stop_on").get<std::string>());
  seq.config.ridge = meta.at("ridge").get<double>();
  seq.config.seed = meta.at("seed").get<std::uint64_t>();
  for (std::size_t l = 0; l < rounds; ++l)
    seq.shifts.push_back(
        read_matrix(dir + "/S_" + std::to_string(l + 1) + ".mat"));
  return seq;
}

}  // namespace shiftseq
