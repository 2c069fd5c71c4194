// Execution of designed operators on graph signals: one matrix-vector
// product per exchange round, plus the classic polynomial-filter baseline.
#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "shiftseq/errors.hpp"

namespace shiftseq {

struct RunTrace {
  std::vector<Eigen::VectorXd> iterates;  // x^(0) .. x^(L)
  Eigen::VectorXd final;
  std::vector<double> errors;  // ||T x - x^(l)||, filled when a target is given
};

inline void check_square_and_matching(const Eigen::MatrixXd& s,
                                      Eigen::Index n) {
  if (s.rows() != n || s.cols() != n)
    throw DimensionError("shift operator dimensions do not match the signal");
}

inline RunTrace apply_successive(std::span<const Eigen::MatrixXd> shifts,
                                 const Eigen::VectorXd& x) {
  RunTrace trace;
  trace.iterates.reserve(shifts.size() + 1);
  trace.iterates.push_back(x);
  for (const auto& s : shifts) {
    check_square_and_matching(s, x.size());
    trace.iterates.push_back(s * trace.iterates.back());
  }
  trace.final = trace.iterates.back();
  return trace;
}

inline RunTrace apply_successive(std::span<const Eigen::MatrixXd> shifts,
                                 const Eigen::VectorXd& x,
                                 const Eigen::MatrixXd& target) {
  RunTrace trace = apply_successive(shifts, x);
  if (target.rows() != x.size() || target.cols() != x.size())
    throw DimensionError("target dimensions do not match the signal");
  const Eigen::VectorXd want = target * x;
  trace.errors.reserve(trace.iterates.size());
  for (const auto& it : trace.iterates)
    trace.errors.push_back((want - it).norm());
  return trace;
}

// Polynomial filter sum_l coeffs[l] * S^l * x, evaluated by repeated
// shifting; powers of S are never formed.
inline Eigen::VectorXd apply_fir(const Eigen::MatrixXd& shift,
                                 std::span<const double> coeffs,
                                 const Eigen::VectorXd& x) {
  check_square_and_matching(shift, x.size());
  if (coeffs.empty()) throw InputError("filter needs at least one coefficient");
  Eigen::VectorXd acc = coeffs[0] * x;
  Eigen::VectorXd power = x;
  for (std::size_t l = 1; l < coeffs.size(); ++l) {
    power = shift * power;
    acc += coeffs[l] * power;
  }
  return acc;
}

inline double relative_error(const Eigen::MatrixXd& target,
                             const Eigen::VectorXd& x,
                             const Eigen::VectorXd& y) {
  if (target.cols() != x.size() || target.rows() != y.size())
    throw DimensionError("relative_error: dimensions do not agree");
  const Eigen::VectorXd want = target * x;
  const double denom = want.norm();
  if (denom == 0.0)
    throw InputError("relative_error: target output has zero norm");
  return (y - want).norm() / denom;
}

}  // namespace shiftseq
