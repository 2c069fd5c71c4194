// Directed network topology and the support pattern it induces on shift
// operators. Node ids are 1-based in files and in the public builders
// (matching the on-disk format) and 0-based everywhere in memory.
#pragma once

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "shiftseq/errors.hpp"
#include "shiftseq/rng.hpp"

namespace shiftseq {

class Topology {
 public:
  Topology(int n_nodes, std::vector<std::pair<int, int>> edges_zero_based,
           bool allow_self_loops)
      : n_nodes_(n_nodes),
        edges_(std::move(edges_zero_based)),
        allow_self_loops_(allow_self_loops) {
    std::sort(edges_.begin(), edges_.end());
    edges_.erase(std::unique(edges_.begin(), edges_.end()), edges_.end());
  }

  int n_nodes() const { return n_nodes_; }
  bool allow_self_loops() const { return allow_self_loops_; }

  // Directed (src, dst) pairs, 0-based, sorted, deduplicated. Implicit
  // self-loops are not listed here.
  const std::vector<std::pair<int, int>>& edges() const { return edges_; }

  // In-neighborhood of each node: sources of incoming edges, ascending.
  std::vector<std::vector<int>> in_neighbors() const {
    std::vector<std::vector<int>> nbrs(n_nodes_);
    for (auto [src, dst] : edges_) nbrs[dst].push_back(src);
    return nbrs;
  }

  // Same, with the node itself removed (explicit self-edges do not count
  // as neighbors for message exchange).
  std::vector<std::vector<int>> in_neighbors_excluding_self() const {
    auto nbrs = in_neighbors();
    for (int n = 0; n < n_nodes_; ++n)
      std::erase(nbrs[n], n);
    return nbrs;
  }

 private:
  int n_nodes_;
  std::vector<std::pair<int, int>> edges_;
  bool allow_self_loops_;
};

// Edges are given 1-based, as in the graph file format. Duplicates are
// dropped; out-of-range indices are an error.
inline Topology build_topology(int n_nodes,
                               const std::vector<std::pair<int, int>>& edges,
                               bool allow_self_loops = true) {
  if (n_nodes < 1) throw InputError("topology needs at least one node");
  std::vector<std::pair<int, int>> zero_based;
  zero_based.reserve(edges.size());
  for (auto [src, dst] : edges) {
    if (src < 1 || src > n_nodes || dst < 1 || dst > n_nodes) {
      std::ostringstream msg;
      msg << "edge (" << src << "," << dst << ") out of range for " << n_nodes
          << " nodes";
      throw InputError(msg.str());
    }
    zero_based.emplace_back(src - 1, dst - 1);
  }
  return Topology(n_nodes, std::move(zero_based), allow_self_loops);
}

// Erdos-Renyi topology: every ordered off-diagonal pair is an edge with
// probability p_edge (undirected mode draws once per unordered pair and
// inserts both directions). Deterministic per seed.
inline Topology random_er_graph(int n_nodes, double p_edge, bool directed,
                                std::uint64_t seed,
                                bool allow_self_loops = true) {
  if (n_nodes < 1) throw InputError("topology needs at least one node");
  if (p_edge < 0.0 || p_edge > 1.0)
    throw InputError("edge probability must lie in [0,1]");
  Rng rng = substream(seed, "er-graph");
  std::bernoulli_distribution coin(p_edge);
  std::vector<std::pair<int, int>> edges;
  for (int a = 0; a < n_nodes; ++a) {
    const int b_first = directed ? 0 : a + 1;
    for (int b = b_first; b < n_nodes; ++b) {
      if (a == b) continue;
      if (p_edge >= 1.0 || (p_edge > 0.0 && coin(rng))) {
        edges.emplace_back(a, b);
        if (!directed) edges.emplace_back(b, a);
      }
    }
  }
  return Topology(n_nodes, std::move(edges), allow_self_loops);
}

// Connectivity of the underlying undirected graph (edge direction ignored).
inline bool is_connected(const Topology& topo) {
  const int n = topo.n_nodes();
  if (n == 1) return true;
  std::vector<std::vector<int>> adj(n);
  for (auto [src, dst] : topo.edges()) {
    if (src == dst) continue;
    adj[src].push_back(dst);
    adj[dst].push_back(src);
  }
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int count = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (int w : adj[v])
      if (!seen[w]) {
        seen[w] = 1;
        ++count;
        stack.push_back(w);
      }
  }
  return count == n;
}

// Sparse representation of the permitted nonzero pattern of a shift
// operator: entry (row, col) may be nonzero iff the edge col -> row exists
// (plus the diagonal when self-loops are allowed). The fixed lexicographic
// order makes vectorized coefficient layouts reproducible.
struct SupportBasis {
  std::vector<std::pair<int, int>> pairs;  // (row, col), 0-based, sorted
  int e_count = 0;
};

inline SupportBasis build_support_basis(const Topology& topo) {
  SupportBasis basis;
  basis.pairs.reserve(topo.edges().size() + topo.n_nodes());
  for (auto [src, dst] : topo.edges()) basis.pairs.emplace_back(dst, src);
  if (topo.allow_self_loops())
    for (int n = 0; n < topo.n_nodes(); ++n) basis.pairs.emplace_back(n, n);
  std::sort(basis.pairs.begin(), basis.pairs.end());
  basis.pairs.erase(std::unique(basis.pairs.begin(), basis.pairs.end()),
                    basis.pairs.end());
  basis.e_count = static_cast<int>(basis.pairs.size());
  return basis;
}

// Exact-zero check off the support; designed operators satisfy this
// structurally, never just to rounding.
inline bool respects_support(const Eigen::MatrixXd& m,
                             const SupportBasis& basis) {
  Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> allowed(m.rows(),
                                                              m.cols());
  allowed.setConstant(false);
  for (auto [r, c] : basis.pairs) {
    if (r >= m.rows() || c >= m.cols()) return false;
    allowed(r, c) = true;
  }
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      if (!allowed(r, c) && m(r, c) != 0.0) return false;
  return true;
}

// Graph file: "N directed|undirected self_loops=0|1" then one "src dst"
// per line, 1-based; '#' starts a comment line.
inline Topology read_graph_file(std::istream& in, const std::string& name) {
  std::string line;
  auto next_line = [&](std::string& out) {
    while (std::getline(in, out)) {
      const auto pos = out.find_first_not_of(" \t\r");
      if (pos == std::string::npos || out[pos] == '#') continue;
      return true;
    }
    return false;
  };
  if (!next_line(line)) throw IoError("empty graph file: " + name);

  std::istringstream header(line);
  int n_nodes = 0;
  std::string mode, loops;
  if (!(header >> n_nodes >> mode >> loops) || n_nodes < 1)
    throw IoError("bad graph header in " + name);
  const bool directed = mode == "directed";
  if (!directed && mode != "undirected")
    throw IoError("graph mode must be directed|undirected in " + name);
  bool self_loops;
  if (loops == "self_loops=1")
    self_loops = true;
  else if (loops == "self_loops=0")
    self_loops = false;
  else
    throw IoError("expected self_loops=0|1 in " + name);

  std::vector<std::pair<int, int>> edges;
  while (next_line(line)) {
    std::istringstream row(line);
    int src = 0, dst = 0;
    if (!(row >> src >> dst)) throw IoError("bad edge line in " + name);
    edges.emplace_back(src, dst);
    if (!directed) edges.emplace_back(dst, src);
  }
  return build_topology(n_nodes, edges, self_loops);
}

inline Topology read_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open graph file: " + path);
  return read_graph_file(in, path);
}

inline void write_graph_file(const std::string& path, const Topology& topo) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << topo.n_nodes() << " directed self_loops="
      << (topo.allow_self_loops() ? 1 : 0) << '\n';
  for (auto [src, dst] : topo.edges())
    out << src + 1 << ' ' << dst + 1 << '\n';
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace shiftseq
