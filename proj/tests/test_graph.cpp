#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "oracles.hpp"
#include "shiftseq/graph.hpp"

using namespace shiftseq;

TEST_CASE("build_topology keeps directed edges and dedups") {
  const Topology t = build_topology(3, {{1, 2}, {2, 3}, {3, 1}}, true);
  REQUIRE(t.n_nodes() == 3);
  REQUIRE(t.edges().size() == 3);
  REQUIRE(t.allow_self_loops());

  const Topology dup = build_topology(2, {{1, 2}, {1, 2}}, true);
  REQUIRE(dup.edges().size() == 1);
}

TEST_CASE("build_topology rejects bad input") {
  REQUIRE_THROWS_AS(build_topology(2, {{1, 3}}, true), InputError);
  REQUIRE_THROWS_AS(build_topology(0, {}, true), InputError);
  REQUIRE_THROWS_AS(build_topology(2, {{0, 1}}, true), InputError);
}

TEST_CASE("in-neighborhoods follow edge direction") {
  const Topology t = build_topology(3, {{1, 2}, {3, 2}}, true);
  const auto nbrs = t.in_neighbors();
  REQUIRE(nbrs[0].empty());
  REQUIRE(nbrs[1] == std::vector<int>{0, 2});
  REQUIRE(nbrs[2].empty());
}

TEST_CASE("er graph degenerate probabilities") {
  const Topology empty = random_er_graph(10, 0.0, true, 7);
  REQUIRE(empty.edges().empty());
  const Topology full = random_er_graph(10, 1.0, true, 7);
  REQUIRE(full.edges().size() == 90);
}

TEST_CASE("er graph edge counts stay inside the exact binomial interval") {
  const auto [lo, hi] = oracles::binomial_central_interval(90, 0.3, 1e-4);
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto count =
        static_cast<int>(random_er_graph(10, 0.3, true, seed).edges().size());
    REQUIRE(count >= lo);
    REQUIRE(count <= hi);
  }
}

TEST_CASE("er graph is deterministic per seed and symmetric when undirected") {
  const Topology a = random_er_graph(12, 0.4, true, 99);
  const Topology b = random_er_graph(12, 0.4, true, 99);
  REQUIRE(a.edges() == b.edges());
  const Topology u = random_er_graph(12, 0.4, false, 99);
  for (auto [src, dst] : u.edges()) {
    const bool reverse =
        std::find(u.edges().begin(), u.edges().end(),
                  std::make_pair(dst, src)) != u.edges().end();
    REQUIRE(reverse);
  }
}

TEST_CASE("connectivity ignores direction") {
  REQUIRE(is_connected(build_topology(3, {{1, 2}, {2, 3}, {3, 1}}, true)));
  REQUIRE_FALSE(is_connected(build_topology(2, {}, true)));
  REQUIRE(is_connected(build_topology(4, {{1, 2}, {1, 3}, {1, 4}}, true)));
}

TEST_CASE("support basis enumerates reversed edges plus the diagonal") {
  const Topology t = build_topology(2, {{1, 2}}, true);
  const SupportBasis basis = build_support_basis(t);
  REQUIRE(basis.e_count == 3);
  REQUIRE(basis.pairs ==
          std::vector<std::pair<int, int>>{{0, 0}, {1, 0}, {1, 1}});

  const Topology no_loops = build_topology(2, {{1, 2}}, false);
  const SupportBasis sparse = build_support_basis(no_loops);
  REQUIRE(sparse.e_count == 1);
  REQUIRE(sparse.pairs == std::vector<std::pair<int, int>>{{1, 0}});
}

TEST_CASE("complete digraph with self-loops has a full support") {
  const int n = 5;
  const Topology t = random_er_graph(n, 1.0, true, 0);
  REQUIRE(build_support_basis(t).e_count == n * n);
}

TEST_CASE("support basis construction is order-stable") {
  const Topology a = build_topology(4, {{3, 1}, {1, 2}, {2, 4}}, true);
  const Topology b = build_topology(4, {{2, 4}, {3, 1}, {1, 2}}, true);
  REQUIRE(build_support_basis(a).pairs == build_support_basis(b).pairs);
}

TEST_CASE("respects_support flags off-pattern entries") {
  const Topology t = build_topology(3, {{1, 2}, {2, 3}}, true);
  const SupportBasis basis = build_support_basis(t);
  Eigen::MatrixXd ok = oracles::random_on_support(basis, 3, 5);
  REQUIRE(respects_support(ok, basis));
  ok(0, 2) = 1e-30;  // tiny but structurally forbidden
  REQUIRE_FALSE(respects_support(ok, basis));
}

TEST_CASE("graph file round trip and parsing") {
  std::stringstream file;
  file << "# a comment\n3 directed self_loops=1\n1 2\n2 3\n\n# tail\n3 1\n";
  const Topology t = read_graph_file(file, "test");
  REQUIRE(t.n_nodes() == 3);
  REQUIRE(t.edges().size() == 3);

  const auto path = std::filesystem::temp_directory_path() / "shiftseq_g.txt";
  write_graph_file(path.string(), t);
  const Topology back = read_graph_file(path.string());
  REQUIRE(back.edges() == t.edges());
  REQUIRE(back.allow_self_loops() == t.allow_self_loops());
  std::filesystem::remove(path);

  std::stringstream undirected;
  undirected << "3 undirected self_loops=0\n1 2\n";
  const Topology u = read_graph_file(undirected, "test");
  REQUIRE(u.edges().size() == 2);

  std::stringstream bad;
  bad << "3 sideways self_loops=1\n";
  REQUIRE_THROWS_AS(read_graph_file(bad, "test"), IoError);
  REQUIRE_THROWS_AS(read_graph_file("/no/such/file.graph"), IoError);
}
