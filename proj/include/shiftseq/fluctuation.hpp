// Random edge-fluctuation model: per-edge Bernoulli activations, analytic
// first/second moments of the first-round deviation, Monte-Carlo moments for
// later rounds, empirical mean-square error and its analytic upper bound.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "shiftseq/errors.hpp"
#include "shiftseq/filtering.hpp"
#include "shiftseq/linalg.hpp"
#include "shiftseq/parallel.hpp"
#include "shiftseq/rng.hpp"

namespace shiftseq {

struct FluctuationModel {
  Eigen::MatrixXd p_active;  // per-edge activation probabilities
  std::uint64_t seed = 0;
  double rho = 0.0;  // spectral-norm cap used in the bound; 0 -> computed
};

inline Eigen::MatrixXd uniform_activation(Eigen::Index n, double p) {
  if (p < 0.0 || p > 1.0)
    throw InputError("activation probability must lie in [0,1]");
  return Eigen::MatrixXd::Constant(n, n, p);
}

inline void check_probabilities(const Eigen::MatrixXd& p_active) {
  if ((p_active.array() < 0.0).any() || (p_active.array() > 1.0).any())
    throw InputError("activation probabilities must lie in [0,1]");
}

inline double max_shift_norm(std::span<const Eigen::MatrixXd> shifts) {
  double m = 0.0;
  for (const auto& s : shifts) m = std::max(m, spectral_norm(s));
  return m;
}

inline void validate_rho(std::span<const Eigen::MatrixXd> shifts, double rho) {
  const double actual = max_shift_norm(shifts);
  if (rho < actual * (1.0 - 1e-9))
    throw InputError("rho = " + std::to_string(rho) +
                     " is below the largest shift spectral norm " +
                     std::to_string(actual));
}

// One draw of the perturbed operator: every nonzero off-diagonal entry
// survives with its own activation probability, the diagonal never
// fluctuates (a node cannot lose its own value).
inline Eigen::MatrixXd sample_perturbed_shift(const Eigen::MatrixXd& shift,
                                              const Eigen::MatrixXd& p_active,
                                              Rng& rng) {
  if (p_active.rows() != shift.rows() || p_active.cols() != shift.cols())
    throw DimensionError("activation matrix does not match the shift");
  Eigen::MatrixXd out = shift;
  for (Eigen::Index r = 0; r < shift.rows(); ++r) {
    for (Eigen::Index c = 0; c < shift.cols(); ++c) {
      if (r == c || shift(r, c) == 0.0) continue;
      const double p = p_active(r, c);
      if (p >= 1.0) continue;
      if (p <= 0.0 || !std::bernoulli_distribution(p)(rng)) out(r, c) = 0.0;
    }
  }
  return out;
}

// Mean of the perturbation term: (P_ac - 1) entrywise times the shift on
// fluctuating entries, zero on the diagonal.
inline Eigen::MatrixXd mean_perturbation(const Eigen::MatrixXd& shift,
                                         const Eigen::MatrixXd& p_active) {
  if (p_active.rows() != shift.rows() || p_active.cols() != shift.cols())
    throw DimensionError("activation matrix does not match the shift");
  Eigen::MatrixXd m = ((p_active.array() - 1.0) * shift.array()).matrix();
  m.diagonal().setZero();
  return m;
}

struct DeviationMoments {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
  Eigen::MatrixXd second_moment;  // cov + mean * mean^T
  // Standard errors of the Monte-Carlo estimates (zero for analytic results).
  Eigen::VectorXd mean_se;
  Eigen::MatrixXd second_moment_se;
  std::uint64_t trials = 0;  // 0 for analytic results
};

// Closed-form moments of the first-round deviation z_1. The (i,j) entry of
// the second moment is sum_{a,b} x_a x_b E[s~_i(a) s~_j(b)] with
// s~_i(a) = -S(i,a) * 1{edge (a -> node i) dropped}; drop indicators are
// independent across edges, so the cross-correlation factorizes except on
// the matching-entry diagonal.
inline DeviationMoments z1_moments(const Eigen::MatrixXd& shift,
                                   const Eigen::MatrixXd& p_active,
                                   const Eigen::VectorXd& x) {
  const Eigen::Index n = shift.rows();
  if (shift.cols() != n) throw DimensionError("shift must be square");
  if (x.size() != n) throw DimensionError("signal does not match the shift");
  check_probabilities(p_active);
  const Eigen::MatrixXd m_pert = mean_perturbation(shift, p_active);

  DeviationMoments dm;
  dm.mean = m_pert * x;
  dm.second_moment.setZero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      double acc = 0.0;
      for (Eigen::Index a = 0; a < n; ++a) {
        if (a == i || shift(i, a) == 0.0) continue;
        const double qi = 1.0 - p_active(i, a);
        for (Eigen::Index b = 0; b < n; ++b) {
          if (b == j || shift(j, b) == 0.0) continue;
          const double qj = 1.0 - p_active(j, b);
          const double corr =
              (i == j && a == b) ? qi : qi * qj;  // same drop indicator
          acc += x(a) * x(b) * shift(i, a) * shift(j, b) * corr;
        }
      }
      dm.second_moment(i, j) = acc;
    }
  }
  dm.cov = dm.second_moment - dm.mean * dm.mean.transpose();
  dm.mean_se = Eigen::VectorXd::Zero(n);
  dm.second_moment_se = Eigen::MatrixXd::Zero(n, n);
  return dm;
}

namespace detail {

// Executes `rounds` perturbed exchanges, recording the per-round deviation
// z_l = y^(l) - S_l y^(l-1). Draw order matches sample_perturbed_shift so
// the same stream yields the same realization either way.
inline void simulate_deviations(std::span<const Eigen::MatrixXd> shifts,
                                const Eigen::MatrixXd& p_active,
                                const Eigen::VectorXd& x, std::size_t rounds,
                                Rng& rng, std::vector<Eigen::VectorXd>& z_out,
                                std::vector<Eigen::VectorXd>* iterates) {
  Eigen::VectorXd y = x;
  if (iterates) iterates->push_back(y);
  z_out.clear();
  for (std::size_t l = 0; l < rounds; ++l) {
    const Eigen::MatrixXd& s = shifts[l];
    Eigen::VectorXd z = Eigen::VectorXd::Zero(y.size());
    for (Eigen::Index r = 0; r < s.rows(); ++r) {
      for (Eigen::Index c = 0; c < s.cols(); ++c) {
        if (r == c || s(r, c) == 0.0) continue;
        const double p = p_active(r, c);
        if (p >= 1.0) continue;
        if (p <= 0.0 || !std::bernoulli_distribution(p)(rng))
          z(r) -= s(r, c) * y(c);
      }
    }
    y = s * y + z;
    z_out.push_back(std::move(z));
    if (iterates) iterates->push_back(y);
  }
}

}  // namespace detail

struct FluctuatingRun {
  RunTrace trace;
  std::vector<Eigen::VectorXd> deviations;  // z_1 .. z_L
  Eigen::VectorXd omega;                    // y^(L) - S_L...S_1 x
};

inline FluctuatingRun run_fluctuating(std::span<const Eigen::MatrixXd> shifts,
                                      const Eigen::MatrixXd& p_active,
                                      const Eigen::VectorXd& x, Rng& rng) {
  for (const auto& s : shifts) check_square_and_matching(s, x.size());
  check_probabilities(p_active);
  FluctuatingRun run;
  detail::simulate_deviations(shifts, p_active, x, shifts.size(), rng,
                              run.deviations, &run.trace.iterates);
  run.trace.final = run.trace.iterates.back();
  Eigen::VectorXd clean = x;
  for (const auto& s : shifts) clean = s * clean;
  run.omega = run.trace.final - clean;
  return run;
}

// Sample moments of z_k (k_index is 1-based) over independent trajectories.
// Trial t draws from substream (seed, "fluct-dev", t), so estimates do not
// depend on the worker count and shorter prefixes of the same trajectory are
// reproduced exactly by smaller k_index.
inline DeviationMoments deviation_moments_mc(
    std::span<const Eigen::MatrixXd> shifts, const Eigen::MatrixXd& p_active,
    const Eigen::VectorXd& x, int k_index, std::uint64_t trials,
    std::uint64_t seed, int workers = 1) {
  if (k_index < 1 || k_index > static_cast<int>(shifts.size()))
    throw InputError("k_index out of range");
  if (trials < 1) throw InputError("need at least one trial");
  check_probabilities(p_active);
  const Eigen::Index n = x.size();

  struct Acc {
    Eigen::VectorXd s1;
    Eigen::MatrixXd s2, s2sq;
    bool init = false;
  };
  auto ensure = [n](Acc& a) {
    if (!a.init) {
      a.s1 = Eigen::VectorXd::Zero(n);
      a.s2 = Eigen::MatrixXd::Zero(n, n);
      a.s2sq = Eigen::MatrixXd::Zero(n, n);
      a.init = true;
    }
  };

  Acc total = mc_reduce<Acc>(
      trials, workers,
      [&](Acc& acc, std::uint64_t t) {
        ensure(acc);
        Rng rng = substream(seed, "fluct-dev", t);
        std::vector<Eigen::VectorXd> z;
        detail::simulate_deviations(shifts, p_active, x,
                                    static_cast<std::size_t>(k_index), rng, z,
                                    nullptr);
        const Eigen::VectorXd& zk = z.back();
        acc.s1 += zk;
        const Eigen::MatrixXd outer = zk * zk.transpose();
        acc.s2 += outer;
        acc.s2sq += outer.cwiseProduct(outer);
      },
      [&](Acc& tot, const Acc& part) {
        ensure(tot);
        tot.s1 += part.s1;
        tot.s2 += part.s2;
        tot.s2sq += part.s2sq;
      });

  const double inv = 1.0 / static_cast<double>(trials);
  DeviationMoments dm;
  dm.trials = trials;
  dm.mean = total.s1 * inv;
  dm.second_moment = total.s2 * inv;
  dm.cov = dm.second_moment - dm.mean * dm.mean.transpose();
  dm.mean_se = (dm.cov.diagonal().cwiseMax(0.0) * inv).cwiseSqrt();
  dm.second_moment_se =
      ((total.s2sq * inv - dm.second_moment.cwiseProduct(dm.second_moment))
           .cwiseMax(0.0) *
       inv)
          .cwiseSqrt();
  return dm;
}

struct McEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t trials = 0;
};

// E||Omega||^2 over independent fluctuating executions.
inline McEstimate mse_empirical_stats(std::span<const Eigen::MatrixXd> shifts,
                                      const Eigen::MatrixXd& p_active,
                                      const Eigen::VectorXd& x,
                                      std::uint64_t trials, std::uint64_t seed,
                                      int workers = 1) {
  if (trials < 1) throw InputError("need at least one trial");
  check_probabilities(p_active);
  const std::size_t rounds = shifts.size();
  Eigen::VectorXd clean = x;
  for (const auto& s : shifts) {
    check_square_and_matching(s, x.size());
    clean = s * clean;
  }

  struct Acc {
    double sum = 0.0, sumsq = 0.0;
  };
  Acc total = mc_reduce<Acc>(
      trials, workers,
      [&](Acc& acc, std::uint64_t t) {
        Rng rng = substream(seed, "fluct-mse", t);
        std::vector<Eigen::VectorXd> z;
        std::vector<Eigen::VectorXd> iterates;
        detail::simulate_deviations(shifts, p_active, x, rounds, rng, z,
                                    &iterates);
        const double v = (iterates.back() - clean).squaredNorm();
        acc.sum += v;
        acc.sumsq += v * v;
      },
      [](Acc& tot, const Acc& part) {
        tot.sum += part.sum;
        tot.sumsq += part.sumsq;
      });

  McEstimate est;
  est.trials = trials;
  est.value = total.sum / static_cast<double>(trials);
  const double var =
      std::max(0.0, total.sumsq / static_cast<double>(trials) -
                        est.value * est.value);
  est.std_error = std::sqrt(var / static_cast<double>(trials));
  return est;
}

inline double mse_empirical(std::span<const Eigen::MatrixXd> shifts,
                            const Eigen::MatrixXd& p_active,
                            const Eigen::VectorXd& x, std::uint64_t trials,
                            std::uint64_t seed, int workers = 1) {
  return mse_empirical_stats(shifts, p_active, x, trials, seed, workers).value;
}

// The bound's mean contribution tr(Sigma_z + ...): either the outer product
// m m^T (default; makes the term tr(E[z z^T])) or the literal mean vector
// added along the diagonal.
enum class MeanTerm { kOuterProduct, kDiagonalSum };

struct BoundReport {
  double bound = 0.0;
  double bound_se = 0.0;
  double tr_psi = 0.0;         // E[tr(Psi)], cross terms of the deviations
  double tr_psi_se = 0.0;
  std::vector<double> deviation_msq;     // E||z_k||^2 per round
  std::vector<double> deviation_msq_se;
  double rho = 0.0;
  std::uint64_t trials = 0;
};

// Upper bound on E||Omega||^2: E[tr(Psi)] plus rho-weighted traces of the
// per-round deviation second moments. Psi collects exactly the cross terms
// of the propagated deviations, so per trajectory
// tr(Psi) = ||sum_i w_i||^2 - sum_i ||w_i||^2 with w_i the deviation of
// round i propagated through the remaining shifts. All expectations are
// estimated jointly from one trajectory per trial; the deviations of
// different rounds are correlated and must not be sampled separately.
inline BoundReport mse_bound_report(std::span<const Eigen::MatrixXd> shifts,
                                    const Eigen::MatrixXd& p_active,
                                    const Eigen::VectorXd& x, double rho,
                                    std::uint64_t trials_psi,
                                    std::uint64_t seed, int workers = 1,
                                    MeanTerm mean_term = MeanTerm::kOuterProduct) {
  if (trials_psi < 1) throw InputError("need at least one trial");
  validate_rho(shifts, rho);
  check_probabilities(p_active);
  const std::size_t rounds = shifts.size();
  const Eigen::Index n = x.size();

  // propagators[r] = S_L ... S_{r+2}, applied to the round r+1 deviation
  std::vector<Eigen::MatrixXd> propagators;
  if (rounds >= 2) {
    propagators.assign(rounds - 1, Eigen::MatrixXd());
    propagators[rounds - 2] = shifts[rounds - 1];
    for (std::size_t r = rounds - 2; r-- > 0;)
      propagators[r] = propagators[r + 1] * shifts[r + 1];
  }

  struct Acc {
    double psi_sum = 0.0, psi_sumsq = 0.0;
    std::vector<double> msq_sum, msq_sumsq;
    std::vector<Eigen::VectorXd> z_sum;
    bool init = false;
  };
  auto ensure = [&](Acc& a) {
    if (!a.init) {
      a.msq_sum.assign(rounds, 0.0);
      a.msq_sumsq.assign(rounds, 0.0);
      a.z_sum.assign(rounds, Eigen::VectorXd::Zero(n));
      a.init = true;
    }
  };

  Acc total = mc_reduce<Acc>(
      trials_psi, workers,
      [&](Acc& acc, std::uint64_t t) {
        ensure(acc);
        Rng rng = substream(seed, "fluct-dev", t);
        std::vector<Eigen::VectorXd> z;
        detail::simulate_deviations(shifts, p_active, x, rounds, rng, z,
                                    nullptr);
        Eigen::VectorXd w_total = Eigen::VectorXd::Zero(n);
        double w_norms = 0.0;
        for (std::size_t r = 0; r < rounds; ++r) {
          const double msq = z[r].squaredNorm();
          acc.msq_sum[r] += msq;
          acc.msq_sumsq[r] += msq * msq;
          acc.z_sum[r] += z[r];
          const Eigen::VectorXd w =
              r + 1 < rounds ? Eigen::VectorXd(propagators[r] * z[r]) : z[r];
          w_total += w;
          w_norms += w.squaredNorm();
        }
        const double psi = w_total.squaredNorm() - w_norms;
        acc.psi_sum += psi;
        acc.psi_sumsq += psi * psi;
      },
      [&](Acc& tot, const Acc& part) {
        ensure(tot);
        tot.psi_sum += part.psi_sum;
        tot.psi_sumsq += part.psi_sumsq;
        for (std::size_t r = 0; r < rounds; ++r) {
          tot.msq_sum[r] += part.msq_sum[r];
          tot.msq_sumsq[r] += part.msq_sumsq[r];
          tot.z_sum[r] += part.z_sum[r];
        }
      });

  const double inv = 1.0 / static_cast<double>(trials_psi);
  BoundReport report;
  report.rho = rho;
  report.trials = trials_psi;
  report.tr_psi = rounds >= 2 ? total.psi_sum * inv : 0.0;
  report.tr_psi_se =
      rounds >= 2
          ? std::sqrt(std::max(0.0, total.psi_sumsq * inv -
                                        report.tr_psi * report.tr_psi) *
                      inv)
          : 0.0;

  report.deviation_msq.resize(rounds);
  report.deviation_msq_se.resize(rounds);
  std::vector<double> mean_terms(rounds);
  for (std::size_t r = 0; r < rounds; ++r) {
    const double msq = total.msq_sum[r] * inv;
    report.deviation_msq[r] = msq;
    report.deviation_msq_se[r] = std::sqrt(
        std::max(0.0, total.msq_sumsq[r] * inv - msq * msq) * inv);
    if (mean_term == MeanTerm::kOuterProduct) {
      mean_terms[r] = msq;  // tr(Sigma + m m^T) = E||z||^2
    } else {
      const Eigen::VectorXd m = total.z_sum[r] * inv;
      mean_terms[r] = msq - m.squaredNorm() + m.sum();
    }
  }

  report.bound = report.tr_psi;
  report.bound_se = report.tr_psi_se;
  for (std::size_t r = 0; r + 1 < rounds; ++r) {
    const double coeff =
        2.0 * std::pow(rho, static_cast<double>(rounds - r - 1));
    report.bound += coeff * mean_terms[r];
    report.bound_se += coeff * report.deviation_msq_se[r];
  }
  report.bound += mean_terms[rounds - 1];
  report.bound_se += report.deviation_msq_se[rounds - 1];
  return report;
}

inline double mse_bound(std::span<const Eigen::MatrixXd> shifts,
                        const Eigen::MatrixXd& p_active,
                        const Eigen::VectorXd& x, double rho,
                        std::uint64_t trials_psi, std::uint64_t seed,
                        int workers = 1,
                        MeanTerm mean_term = MeanTerm::kOuterProduct) {
  return mse_bound_report(shifts, p_active, x, rho, trials_psi, seed, workers,
                          mean_term)
      .bound;
}

}  // namespace shiftseq
