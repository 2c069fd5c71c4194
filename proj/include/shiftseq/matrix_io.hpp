// Text matrix format: first line "rows cols", then row-major entries,
// whitespace separated, written with 17 significant digits so that values
// round-trip exactly. Signals are single-column matrices.
#pragma once

#include <Eigen/Dense>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "shiftseq/errors.hpp"

namespace shiftseq {

// Shortest-exact would be nicer but %.17g is portable and also exact.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_matrix(std::ostream& out, const Eigen::MatrixXd& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ' ';
      out << format_double(m(r, c));
    }
    out << '\n';
  }
}

inline void write_matrix(const std::string& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  write_matrix(out, m);
  if (!out) throw IoError("write failed: " + path);
}

inline Eigen::MatrixXd read_matrix(std::istream& in, const std::string& name) {
  Eigen::Index rows = 0, cols = 0;
  if (!(in >> rows >> cols) || rows < 0 || cols < 0)
    throw IoError("bad matrix header in " + name);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c)
      if (!(in >> m(r, c)))
        throw IoError("truncated matrix data in " + name);
  return m;
}

inline Eigen::MatrixXd read_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open matrix file: " + path);
  return read_matrix(in, path);
}

inline void write_signal(const std::string& path, const Eigen::VectorXd& x) {
  write_matrix(path, x);
}

inline Eigen::VectorXd read_signal(const std::string& path) {
  Eigen::MatrixXd m = read_matrix(path);
  if (m.cols() != 1)
    throw IoError("signal file must have one column: " + path);
  return m.col(0);
}

}  // namespace shiftseq
