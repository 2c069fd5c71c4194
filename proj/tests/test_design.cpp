#include <catch2/catch_amalgamated.hpp>

#include <vector>

#include "oracles.hpp"
#include "shiftseq/design.hpp"

using namespace shiftseq;

namespace {

// Straight-line re-evaluation of the weighted cost, independent of
// objective()'s incremental product.
double objective_direct(const Eigen::MatrixXd& t,
                        const std::vector<Eigen::MatrixXd>& shifts,
                        const std::vector<double>& w) {
  double acc = 0.0;
  for (std::size_t l = 0; l < shifts.size(); ++l) {
    Eigen::MatrixXd prod = Eigen::MatrixXd::Identity(t.rows(), t.cols());
    for (std::size_t i = 0; i <= l; ++i) prod = shifts[i] * prod;
    acc += w[l] * (t - prod).squaredNorm();
  }
  return acc;
}

struct Instance {
  Topology topo;
  SupportBasis basis;
  std::vector<Eigen::MatrixXd> shifts;
  Eigen::MatrixXd target;
  std::vector<double> weights;
};

Instance random_instance(int n, int rounds, std::uint64_t seed,
                         double p_edge = 0.6) {
  Instance inst{random_er_graph(n, p_edge, true, seed), SupportBasis{}, {}, {},
                default_weights(rounds, WeightScheme::kGeometric, 2.0)};
  inst.basis = build_support_basis(inst.topo);
  for (int l = 0; l < rounds; ++l)
    inst.shifts.push_back(
        oracles::random_on_support(inst.basis, n, 977 * seed + l));
  inst.target = oracles::random_matrix(n, n, 500 + seed);
  return inst;
}

}  // namespace

TEST_CASE("default weight schemes") {
  REQUIRE(default_weights(3, WeightScheme::kUniform) ==
          std::vector<double>{1.0 / 3, 1.0 / 3, 1.0 / 3});
  const auto geo = default_weights(3, WeightScheme::kGeometric, 2.0);
  REQUIRE(geo[0] == Catch::Approx(1.0 / 7).margin(1e-15));
  REQUIRE(geo[1] == Catch::Approx(2.0 / 7).margin(1e-15));
  REQUIRE(geo[2] == Catch::Approx(4.0 / 7).margin(1e-15));
  REQUIRE(default_weights(1, WeightScheme::kGeometric, 5.0) ==
          std::vector<double>{1.0});
  REQUIRE_THROWS_AS(default_weights(3, WeightScheme::kGeometric, 1.0),
                    InputError);
  REQUIRE_THROWS_AS(default_weights(0, WeightScheme::kUniform), InputError);
}

TEST_CASE("weight validation") {
  REQUIRE(normalize_weights({1.0, 1.0}) == std::vector<double>{0.5, 0.5});
  REQUIRE_THROWS_AS(normalize_weights({0.5, -0.1}), InputError);
  REQUIRE_THROWS_AS(normalize_weights({0.7, 0.3}), InputError);  // decreasing
  REQUIRE_THROWS_AS(normalize_weights({0.0, 0.0}), InputError);
}

TEST_CASE("objective trivial values") {
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(3, 3);
  const std::vector<Eigen::MatrixXd> ident{eye, eye};
  REQUIRE(objective(eye, ident, std::vector<double>{0.25, 0.75}) == 0.0);

  const Eigen::MatrixXd t = oracles::random_matrix(3, 3, 11);
  const std::vector<Eigen::MatrixXd> zero{Eigen::MatrixXd::Zero(3, 3)};
  REQUIRE(objective(t, zero, std::vector<double>{1.0}) ==
          Catch::Approx(t.squaredNorm()).epsilon(1e-14));
}

TEST_CASE("objective matches a straight-line oracle") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::vector<Eigen::MatrixXd> shifts{oracles::random_matrix(3, 3, seed),
                                        oracles::random_matrix(3, 3, seed + 90)};
    const Eigen::MatrixXd t = oracles::random_matrix(3, 3, seed + 180);
    const std::vector<double> w{0.25, 0.75};
    const double got = objective(t, shifts, w);
    const double want = objective_direct(t, shifts, w);
    REQUIRE(got == Catch::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("objective rejects mismatched weights") {
  const std::vector<Eigen::MatrixXd> shifts{Eigen::MatrixXd::Identity(2, 2)};
  REQUIRE_THROWS_AS(
      objective(Eigen::MatrixXd::Identity(2, 2), shifts,
                std::vector<double>{0.5, 0.5}),
      DimensionError);
}

TEST_CASE("uniform weights reduce to the scaled unweighted cost") {
  const Instance inst = random_instance(4, 3, 21);
  const auto uniform = default_weights(3, WeightScheme::kUniform);
  const double weighted = objective(inst.target, inst.shifts, uniform);
  const double plain = unweighted_cost(inst.target, inst.shifts);
  REQUIRE(weighted == Catch::Approx(plain / 3.0).epsilon(1e-14));
}

TEST_CASE("unconstrained single block reproduces the target exactly") {
  const int n = 4;
  const Topology full = random_er_graph(n, 1.0, true, 0);
  const SupportBasis basis = build_support_basis(full);
  REQUIRE(basis.e_count == n * n);
  const Eigen::MatrixXd t = oracles::random_matrix(n, n, 33);
  const std::vector<Eigen::MatrixXd> shifts{Eigen::MatrixXd::Zero(n, n)};
  const std::vector<double> w{1.0};
  const Eigen::VectorXd coeffs = solve_block(0, shifts, t, w, basis);
  const Eigen::MatrixXd recovered = scatter_support(coeffs, basis, n);
  REQUIRE((recovered - t).norm() <= 1e-12 * t.norm());
}

TEST_CASE("solve_block matches the dense stacked-Kronecker oracle") {
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const int n = 2 + static_cast<int>(seed % 3);       // 2..4
    const int rounds = 1 + static_cast<int>(seed % 3);  // 1..3
    const Instance inst = random_instance(n, rounds, seed);
    for (int j = 0; j < rounds; ++j) {
      const Eigen::VectorXd got =
          solve_block(j, inst.shifts, inst.target, inst.weights, inst.basis);
      const Eigen::VectorXd want = oracles::solve_block_dense(
          j, inst.shifts, inst.target, inst.weights, inst.basis);
      REQUIRE((got - want).norm() <= 1e-8 * (want.norm() + 1.0));
      ++checked;
    }
  }
  REQUIRE(checked >= 20);
}

TEST_CASE("an exact block solve never increases the block cost") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    Instance inst = random_instance(4, 3, 70 + seed);
    // only the last round carries weight
    std::vector<double> w{0.0, 0.0, 1.0};
    for (int j = 0; j < 3; ++j) {
      std::vector<Eigen::MatrixXd> shifts = inst.shifts;
      const double before = objective(inst.target, shifts, w);
      const Eigen::VectorXd coeffs =
          solve_block(j, shifts, inst.target, w, inst.basis);
      shifts[j] = scatter_support(coeffs, inst.basis, 4);
      const double after = objective(inst.target, shifts, w);
      REQUIRE(after <= before + 1e-10);
    }
  }
}

TEST_CASE("singular systems are signaled and ridge recovers") {
  BlockSystem sys;
  sys.gram = Eigen::MatrixXd::Ones(2, 2);  // rank one
  sys.rhs.resize(2);
  sys.rhs << 1.0, 0.0;  // not in the range
  REQUIRE_THROWS_AS(solve_block_system(sys, 0.0), SingularSystemError);
  REQUIRE_NOTHROW(solve_block_system(sys, 1e-6));
}

TEST_CASE("bcd on the identity with self-loops converges in one sweep") {
  const Topology topo = build_topology(4, {{1, 2}, {2, 3}, {3, 4}}, true);
  DesignConfig cfg;
  cfg.rounds = 1;
  const ShiftSequence seq =
      bcd_design(Eigen::MatrixXd::Identity(4, 4), topo, cfg);
  REQUIRE(seq.sweeps == 1);
  REQUIRE(seq.converged);
  REQUIRE(seq.final_objective == 0.0);
  REQUIRE((seq.shifts[0] - Eigen::MatrixXd::Identity(4, 4)).norm() <= 1e-12);
}

TEST_CASE("bcd on a complete digraph recovers any target") {
  const Topology full = random_er_graph(6, 1.0, true, 1);
  const Eigen::MatrixXd t = oracles::random_matrix(6, 6, 44);
  DesignConfig cfg;
  cfg.rounds = 1;
  const ShiftSequence seq = bcd_design(t, full, cfg);
  REQUIRE(seq.final_objective <= 1e-16 * t.squaredNorm());
}

TEST_CASE("bcd objective history is nonincreasing and supports are exact") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Topology topo = random_er_graph(10, 0.4, true, 1000 + seed);
    const Eigen::MatrixXd t = Eigen::MatrixXd::Constant(10, 10, 0.1);
    DesignConfig cfg;
    cfg.rounds = 5;
    cfg.seed = seed;
    cfg.max_bcd_sweeps = 60;
    const ShiftSequence seq = bcd_design(t, topo, cfg);
    for (std::size_t i = 1; i < seq.objective_history.size(); ++i)
      REQUIRE(seq.objective_history[i] <=
              seq.objective_history[i - 1] + 1e-10);
    const SupportBasis basis = build_support_basis(topo);
    for (const auto& s : seq.shifts) REQUIRE(respects_support(s, basis));
    REQUIRE(seq.per_round_error.size() == 5);
  }
}

TEST_CASE("bcd runs are deterministic per seed") {
  const Topology topo = random_er_graph(8, 0.5, true, 3);
  const Eigen::MatrixXd t = oracles::random_matrix(8, 8, 5);
  DesignConfig cfg;
  cfg.rounds = 3;
  cfg.seed = 17;
  cfg.max_bcd_sweeps = 25;
  const ShiftSequence a = bcd_design(t, topo, cfg);
  const ShiftSequence b = bcd_design(t, topo, cfg);
  REQUIRE(a.sweeps == b.sweeps);
  for (int l = 0; l < 3; ++l)
    REQUIRE((a.shifts[l] - b.shifts[l]).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("scaling the target scales every round error linearly") {
  const Topology topo = random_er_graph(7, 0.5, true, 21);
  const Eigen::MatrixXd t = oracles::random_matrix(7, 7, 22);
  DesignConfig cfg;
  cfg.rounds = 3;
  cfg.seed = 9;
  cfg.max_bcd_sweeps = 40;
  const ShiftSequence base = bcd_design(t, topo, cfg);
  const double c = 2.0;
  const ShiftSequence scaled = bcd_design((c * t).eval(), topo, cfg);
  REQUIRE(scaled.sweeps == base.sweeps);
  for (std::size_t l = 0; l < base.per_round_error.size(); ++l)
    REQUIRE(scaled.per_round_error[l] ==
            Catch::Approx(c * base.per_round_error[l]).epsilon(1e-9));
}

TEST_CASE("identity-like initialization is supported") {
  const Topology topo = build_topology(4, {{1, 2}, {2, 3}, {3, 4}, {4, 1}},
                                       true);
  DesignConfig cfg;
  cfg.rounds = 2;
  cfg.init_scheme = InitScheme::kIdentityLike;
  cfg.max_bcd_sweeps = 30;
  const ShiftSequence seq =
      bcd_design(Eigen::MatrixXd::Identity(4, 4), topo, cfg);
  REQUIRE(seq.final_objective <= 1e-20);
}

TEST_CASE("shift sequences round-trip through the directory format") {
  const Topology topo = random_er_graph(5, 0.6, true, 8);
  const Eigen::MatrixXd t = oracles::random_matrix(5, 5, 9);
  DesignConfig cfg;
  cfg.rounds = 2;
  cfg.seed = 123;
  cfg.max_bcd_sweeps = 15;
  const ShiftSequence seq = bcd_design(t, topo, cfg);

  const auto dir =
      (std::filesystem::temp_directory_path() / "shiftseq_seqdir").string();
  save_shift_sequence(dir, seq);
  const ShiftSequence back = load_shift_sequence(dir);
  REQUIRE(back.shifts.size() == seq.shifts.size());
  for (std::size_t l = 0; l < seq.shifts.size(); ++l)
    REQUIRE((back.shifts[l] - seq.shifts[l]).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(back.weights == seq.weights);
  REQUIRE(back.objective_history == seq.objective_history);
  REQUIRE(back.per_round_error == seq.per_round_error);
  REQUIRE(back.config.seed == seq.config.seed);
  std::filesystem::remove_all(dir);
}

TEST_CASE("bcd input validation") {
  const Topology topo = build_topology(3, {{1, 2}}, true);
  DesignConfig cfg;
  cfg.rounds = 1;
  REQUIRE_THROWS_AS(
      bcd_design(Eigen::MatrixXd::Identity(4, 4), topo, cfg), DimensionError);
  cfg.rounds = 0;
  REQUIRE_THROWS_AS(
      bcd_design(Eigen::MatrixXd::Identity(3, 3), topo, cfg), InputError);
  // no self-loops and no edges: nothing to design with
  const Topology bare = build_topology(2, {}, false);
  DesignConfig cfg2;
  REQUIRE_THROWS_AS(
      bcd_design(Eigen::MatrixXd::Identity(2, 2), bare, cfg2), InputError);
}
