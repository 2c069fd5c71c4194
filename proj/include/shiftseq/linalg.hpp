#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "shiftseq/rng.hpp"

namespace shiftseq {

struct SpectralNormResult {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Largest singular value by power iteration on m^T m. The start vector is
// drawn from a fixed stream so results are reproducible.
inline SpectralNormResult spectral_norm_detailed(const Eigen::MatrixXd& m,
                                                 double rel_tol = 1e-10,
                                                 int max_iterations = 10000) {
  SpectralNormResult res;
  if (m.size() == 0) {
    res.converged = true;
    return res;
  }
  Rng rng = substream(0x5eedu, "spectral-norm-start");
  std::normal_distribution<double> gauss;
  Eigen::VectorXd v(m.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = gauss(rng);
  v.normalize();

  double sigma_prev = -1.0;
  for (int it = 1; it <= max_iterations; ++it) {
    res.iterations = it;
    Eigen::VectorXd w = m * v;
    const double lambda = w.squaredNorm();  // Rayleigh quotient of m^T m
    res.value = std::sqrt(lambda);
    if (lambda == 0.0) {  // v in the null space; only exact for m == 0
      res.converged = true;
      return res;
    }
    if (sigma_prev >= 0.0 &&
        std::abs(res.value - sigma_prev) <= rel_tol * res.value) {
      res.converged = true;
      return res;
    }
    sigma_prev = res.value;
    Eigen::VectorXd u = m.transpose() * w;
    const double nu = u.norm();
    if (nu == 0.0) {
      res.converged = true;
      return res;
    }
    v = u / nu;
  }
  return res;  // best estimate, converged == false
}

inline double spectral_norm(const Eigen::MatrixXd& m) {
  return spectral_norm_detailed(m).value;
}

}  // namespace shiftseq
