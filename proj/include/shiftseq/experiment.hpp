// Experiment runner behind the CLI: flat INI-style configuration, builtin
// targets, and one command per task writing CSV/JSON artifacts. Every
// command is a pure function of (config, seed): reruns produce byte-identical
// output for any worker count.
#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "shiftseq/design.hpp"
#include "shiftseq/errors.hpp"
#include "shiftseq/estimator.hpp"
#include "shiftseq/filtering.hpp"
#include "shiftseq/fluctuation.hpp"
#include "shiftseq/graph.hpp"
#include "shiftseq/matrix_io.hpp"
#include "shiftseq/parallel.hpp"

namespace shiftseq {

// "[section]" plus "key = value" lines; '#' and ';' start comments. Keys are
// stored as "section.key".
inline std::map<std::string, std::string> parse_ini(std::istream& in,
                                                    const std::string& name) {
  std::map<std::string, std::string> kv;
  std::string line, section;
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto comment = line.find_first_of("#;");
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw InputError(name + ":" + std::to_string(lineno) +
                         ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InputError(name + ":" + std::to_string(lineno) +
                       ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty())
      throw InputError(name + ":" + std::to_string(lineno) + ": empty key");
    kv[section.empty() ? key : section + "." + key] = trim(line.substr(eq + 1));
  }
  return kv;
}

inline std::map<std::string, std::string> parse_ini_file(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  return parse_ini(in, path);
}

struct ExperimentConfig {
  std::string task;
  std::uint64_t seed = 0;
  std::string out = "out";
  std::uint64_t trials = 100000;
  int workers = 1;

  std::string graph_file;
  int er_nodes = 0;
  double er_edge_prob = 0.0;
  bool er_directed = true;
  bool self_loops = true;

  std::string target_kind = "consensus";
  std::string target_file;
  int target_rank = 1;

  DesignConfig design;
  std::string weight_scheme = "geometric";
  double weight_ratio = 2.0;
  std::string shift_dir;  // reuse an existing design instead of solving

  std::string signal_file;

  std::vector<double> p_scalars;  // uniform activation probabilities
  std::string p_file;             // full activation matrix
  std::string p_edges_file;       // "src dst p" lines
  double rho = 0.0;               // 0 -> max shift norm
  MeanTerm mean_term = MeanTerm::kOuterProduct;

  PretrainConfig pretrain;
  double drop_rate = 0.3;
  int freeze_after = 0;  // 0 = never freeze
  int experiment_seeds = 50;
};

namespace detail {

class IniView {
 public:
  explicit IniView(const std::map<std::string, std::string>& kv) : kv_(kv) {}

  std::string str(const std::string& key, const std::string& fallback) const {
    auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second;
  }
  bool has(const std::string& key) const { return kv_.count(key) != 0; }
  double num(const std::string& key, double fallback) const {
    auto it = kv_.find(key);
    if (it == kv_.end()) return fallback;
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(it->second, &used);
    } catch (const std::exception&) {
      throw InputError("config key " + key + " is not a number: " + it->second);
    }
    if (used != it->second.size())
      throw InputError("config key " + key + " is not a number: " + it->second);
    return v;
  }
  long integer(const std::string& key, long fallback) const {
    const double v = num(key, static_cast<double>(fallback));
    const long r = static_cast<long>(v);
    if (static_cast<double>(r) != v)
      throw InputError("config key " + key + " must be an integer");
    return r;
  }
  bool flag(const std::string& key, bool fallback) const {
    return integer(key, fallback ? 1 : 0) != 0;
  }

 private:
  const std::map<std::string, std::string>& kv_;
};

inline std::vector<double> parse_scalar_list(const std::string& text) {
  std::vector<double> vals;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) vals.push_back(std::stod(item));
  return vals;
}

}  // namespace detail

inline ExperimentConfig config_from_ini(
    const std::map<std::string, std::string>& kv) {
  detail::IniView ini(kv);
  ExperimentConfig cfg;
  cfg.task = ini.str("experiment.task", "");
  if (cfg.task.empty()) throw InputError("config is missing experiment.task");
  cfg.seed = static_cast<std::uint64_t>(ini.integer("experiment.seed", 0));
  cfg.out = ini.str("experiment.out", "out");
  cfg.trials =
      static_cast<std::uint64_t>(ini.integer("experiment.trials", 100000));
  cfg.workers = static_cast<int>(ini.integer("experiment.workers", 1));

  cfg.graph_file = ini.str("graph.file", "");
  cfg.er_nodes = static_cast<int>(ini.integer("graph.er_nodes", 0));
  cfg.er_edge_prob = ini.num("graph.er_edge_prob", 0.0);
  cfg.er_directed = ini.flag("graph.er_directed", true);
  cfg.self_loops = ini.flag("graph.self_loops", true);

  cfg.target_kind = ini.str("target.kind", "consensus");
  cfg.target_file = ini.str("target.file", "");
  cfg.target_rank = static_cast<int>(ini.integer("target.rank", 1));

  cfg.design.rounds = static_cast<int>(ini.integer("design.rounds", 1));
  cfg.weight_scheme = ini.str("design.weights", "geometric");
  cfg.weight_ratio = ini.num("design.ratio", 2.0);
  cfg.design.epsilon = ini.num("design.epsilon", 1e-6);
  cfg.design.max_bcd_sweeps =
      static_cast<int>(ini.integer("design.max_sweeps", 200));
  cfg.design.init_scheme =
      init_scheme_from_string(ini.str("design.init", "scaled-random"));
  cfg.design.stop_on =
      stop_metric_from_string(ini.str("design.stop_on", "unweighted"));
  cfg.design.ridge = ini.num("design.ridge", 0.0);
  cfg.shift_dir = ini.str("design.shift_dir", "");

  cfg.signal_file = ini.str("signal.file", "");

  if (ini.has("fluctuation.p_active"))
    cfg.p_scalars = detail::parse_scalar_list(ini.str("fluctuation.p_active", ""));
  cfg.p_file = ini.str("fluctuation.p_file", "");
  cfg.p_edges_file = ini.str("fluctuation.p_edges", "");
  const std::string rho = ini.str("fluctuation.rho", "auto");
  cfg.rho = rho == "auto" ? 0.0 : std::stod(rho);
  const std::string mt = ini.str("fluctuation.mean_term", "outer");
  if (mt == "outer")
    cfg.mean_term = MeanTerm::kOuterProduct;
  else if (mt == "diagonal-sum")
    cfg.mean_term = MeanTerm::kDiagonalSum;
  else
    throw InputError("fluctuation.mean_term must be outer|diagonal-sum");

  cfg.pretrain.kernel.type =
      kernel_type_from_string(ini.str("estimator.kernel", "gaussian"));
  cfg.pretrain.kernel.param = ini.num("estimator.sigma", 0.0);
  cfg.pretrain.feature_count =
      static_cast<int>(ini.integer("estimator.features", 100));
  cfg.pretrain.samples =
      static_cast<int>(ini.integer("estimator.pretrain_samples", 500));
  cfg.pretrain.lambda = ini.num("estimator.lambda", 1e-4);
  cfg.pretrain.eta0 = ini.num("estimator.eta", 0.0);
  cfg.pretrain.eta_sqrt_decay = ini.flag("estimator.eta_decay", false);
  cfg.drop_rate = ini.num("estimator.drop_rate", 0.3);
  cfg.freeze_after =
      static_cast<int>(ini.integer("estimator.freeze_after", 0));
  cfg.experiment_seeds =
      static_cast<int>(ini.integer("estimator.experiment_seeds", 50));
  return cfg;
}

inline Topology load_topology(const ExperimentConfig& cfg) {
  if (!cfg.graph_file.empty()) return read_graph_file(cfg.graph_file);
  if (cfg.er_nodes > 0)
    return random_er_graph(cfg.er_nodes, cfg.er_edge_prob, cfg.er_directed,
                           cfg.seed, cfg.self_loops);
  throw InputError("config needs graph.file or graph.er_nodes");
}

inline Eigen::MatrixXd make_target(const ExperimentConfig& cfg, int n) {
  if (cfg.target_kind == "consensus")
    return Eigen::MatrixXd::Constant(n, n, 1.0 / n);
  if (cfg.target_kind == "identity")
    return Eigen::MatrixXd::Identity(n, n);
  if (cfg.target_kind == "random-projection") {
    const int rank = cfg.target_rank;
    if (rank < 1 || rank > n)
      throw InputError("target.rank must lie in [1, n_nodes]");
    Rng rng = substream(cfg.seed, "target");
    std::normal_distribution<double> gauss;
    Eigen::MatrixXd a(n, rank);
    for (int c = 0; c < rank; ++c)
      for (int r = 0; r < n; ++r) a(r, c) = gauss(rng);
    Eigen::MatrixXd q =
        Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ() *
        Eigen::MatrixXd::Identity(n, rank);
    return q * q.transpose();
  }
  if (cfg.target_kind == "file") {
    if (cfg.target_file.empty()) throw InputError("target.file not set");
    Eigen::MatrixXd t = read_matrix(cfg.target_file);
    if (t.rows() != n || t.cols() != n)
      throw InputError("target in " + cfg.target_file +
                       " does not match the graph size");
    return t;
  }
  throw InputError("unknown target.kind: " + cfg.target_kind);
}

inline Eigen::VectorXd load_signal(const ExperimentConfig& cfg, int n,
                                   std::string_view label,
                                   std::uint64_t index = 0) {
  if (!cfg.signal_file.empty()) {
    Eigen::VectorXd x = read_signal(cfg.signal_file);
    if (x.size() != n)
      throw InputError("signal in " + cfg.signal_file +
                       " does not match the graph size");
    return x;
  }
  Rng rng = substream(cfg.seed, label, index);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x(i) = gauss(rng);
  return x;
}

// Activation probabilities: per-edge list and matrix files override the
// scalar; unlisted edges in a per-edge list stay active.
inline Eigen::MatrixXd activation_from_config(const ExperimentConfig& cfg,
                                              int n, double scalar) {
  if (!cfg.p_file.empty()) {
    Eigen::MatrixXd p = read_matrix(cfg.p_file);
    if (p.rows() != n || p.cols() != n)
      throw InputError("activation matrix in " + cfg.p_file +
                       " does not match the graph size");
    check_probabilities(p);
    return p;
  }
  if (!cfg.p_edges_file.empty()) {
    Eigen::MatrixXd p = Eigen::MatrixXd::Ones(n, n);
    std::ifstream in(cfg.p_edges_file);
    if (!in) throw IoError("cannot open activation list: " + cfg.p_edges_file);
    std::string line;
    while (std::getline(in, line)) {
      const auto pos = line.find_first_not_of(" \t\r");
      if (pos == std::string::npos || line[pos] == '#') continue;
      std::istringstream row(line);
      int src = 0, dst = 0;
      double prob = 1.0;
      if (!(row >> src >> dst >> prob))
        throw IoError("bad activation line in " + cfg.p_edges_file);
      if (src < 1 || src > n || dst < 1 || dst > n)
        throw InputError("activation edge out of range in " + cfg.p_edges_file);
      p(dst - 1, src - 1) = prob;
    }
    check_probabilities(p);
    return p;
  }
  return uniform_activation(n, scalar);
}

inline ShiftSequence obtain_shifts(const ExperimentConfig& cfg,
                                   const Topology& topo,
                                   const Eigen::MatrixXd& target) {
  if (!cfg.shift_dir.empty()) return load_shift_sequence(cfg.shift_dir);
  DesignConfig dc = cfg.design;
  dc.seed = cfg.seed;
  dc.weights = default_weights(
      dc.rounds,
      cfg.weight_scheme == "uniform" ? WeightScheme::kUniform
                                     : WeightScheme::kGeometric,
      cfg.weight_ratio);
  return bcd_design(target, topo, dc);
}

namespace detail {

inline std::string csv_join(const std::vector<std::string>& cells) {
  std::string row;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) row += ',';
    row += cells[i];
  }
  return row;
}

inline std::ofstream open_out(const std::string& dir, const std::string& file) {
  std::filesystem::create_directories(dir);
  std::ofstream out(dir + "/" + file);
  if (!out) throw IoError("cannot open for writing: " + dir + "/" + file);
  return out;
}

}  // namespace detail

// --- commands ------------------------------------------------------------

inline void cmd_design(const ExperimentConfig& cfg) {
  const Topology topo = load_topology(cfg);
  const Eigen::MatrixXd target = make_target(cfg, topo.n_nodes());
  ShiftSequence seq = obtain_shifts(cfg, topo, target);

  std::filesystem::create_directories(cfg.out);
  save_shift_sequence(cfg.out + "/shifts", seq);
  write_graph_file(cfg.out + "/graph.txt", topo);
  write_matrix(cfg.out + "/target.mat", target);

  std::cout << "designed " << seq.shifts.size() << " shifts over "
            << topo.n_nodes() << " nodes in " << seq.sweeps << " sweeps ("
            << (seq.converged ? "converged" : "sweep cap reached") << ")\n";
  std::cout << "final objective = " << format_double(seq.final_objective)
            << '\n';
  std::cout << "per-round error:";
  for (double e : seq.per_round_error) std::cout << ' ' << format_double(e);
  std::cout << "\nwrote " << cfg.out << "/shifts\n";
}

inline void cmd_run(const ExperimentConfig& cfg) {
  const Topology topo = load_topology(cfg);
  const Eigen::MatrixXd target = make_target(cfg, topo.n_nodes());
  const ShiftSequence seq = obtain_shifts(cfg, topo, target);
  const Eigen::VectorXd x = load_signal(cfg, topo.n_nodes(), "signal");

  const RunTrace trace = apply_successive(seq.shifts, x, target);
  auto out = detail::open_out(cfg.out, "run_trace.csv");
  std::vector<std::string> header{"round", "error"};
  for (int i = 0; i < topo.n_nodes(); ++i)
    header.push_back("x" + std::to_string(i + 1));
  out << detail::csv_join(header) << '\n';
  for (std::size_t l = 0; l < trace.iterates.size(); ++l) {
    std::vector<std::string> row{std::to_string(l),
                                 format_double(trace.errors[l])};
    for (int i = 0; i < topo.n_nodes(); ++i)
      row.push_back(format_double(trace.iterates[l](i)));
    out << detail::csv_join(row) << '\n';
  }
  write_signal(cfg.out + "/final.mat", trace.final);
  std::cout << "relative error = "
            << format_double(relative_error(target, x, trace.final)) << '\n';
}

inline void cmd_fluctuate(const ExperimentConfig& cfg) {
  const Topology topo = load_topology(cfg);
  const Eigen::MatrixXd target = make_target(cfg, topo.n_nodes());
  const ShiftSequence seq = obtain_shifts(cfg, topo, target);
  const Eigen::VectorXd x = load_signal(cfg, topo.n_nodes(), "signal");
  const double rho = cfg.rho > 0.0 ? cfg.rho : max_shift_norm(seq.shifts);
  const std::vector<double> ps =
      cfg.p_scalars.empty() ? std::vector<double>{0.9} : cfg.p_scalars;

  auto out = detail::open_out(cfg.out, "fluctuate.csv");
  std::vector<std::string> header{"p",       "trials", "mse",      "mse_se",
                                  "bound",   "bound_se", "tr_psi", "rho"};
  for (std::size_t l = 1; l <= seq.shifts.size(); ++l)
    header.push_back("dev_msq_" + std::to_string(l));
  out << detail::csv_join(header) << '\n';

  for (double p : ps) {
    const Eigen::MatrixXd p_active =
        activation_from_config(cfg, topo.n_nodes(), p);
    const McEstimate mse = mse_empirical_stats(seq.shifts, p_active, x,
                                               cfg.trials, cfg.seed,
                                               cfg.workers);
    const BoundReport bound =
        mse_bound_report(seq.shifts, p_active, x, rho, cfg.trials, cfg.seed,
                         cfg.workers, cfg.mean_term);
    std::vector<std::string> row{
        format_double(p),           std::to_string(cfg.trials),
        format_double(mse.value),   format_double(mse.std_error),
        format_double(bound.bound), format_double(bound.bound_se),
        format_double(bound.tr_psi), format_double(rho)};
    for (double v : bound.deviation_msq) row.push_back(format_double(v));
    out << detail::csv_join(row) << '\n';
  }
  std::cout << "wrote " << cfg.out << "/fluctuate.csv\n";
}

inline void cmd_bound(const ExperimentConfig& cfg) {
  const Topology topo = load_topology(cfg);
  const Eigen::MatrixXd target = make_target(cfg, topo.n_nodes());
  const ShiftSequence seq = obtain_shifts(cfg, topo, target);
  const Eigen::VectorXd x = load_signal(cfg, topo.n_nodes(), "signal");
  const double rho = cfg.rho > 0.0 ? cfg.rho : max_shift_norm(seq.shifts);
  const double p = cfg.p_scalars.empty() ? 0.9 : cfg.p_scalars.front();
  const Eigen::MatrixXd p_active =
      activation_from_config(cfg, topo.n_nodes(), p);

  const McEstimate mse = mse_empirical_stats(seq.shifts, p_active, x,
                                             cfg.trials, cfg.seed, cfg.workers);
  const BoundReport rep =
      mse_bound_report(seq.shifts, p_active, x, rho, cfg.trials, cfg.seed,
                       cfg.workers, cfg.mean_term);

  auto out = detail::open_out(cfg.out, "bound.csv");
  std::vector<std::string> header{"trials", "rho",     "mse",    "mse_se",
                                  "tr_psi", "tr_psi_se", "bound", "bound_se"};
  for (std::size_t l = 1; l <= seq.shifts.size(); ++l)
    header.push_back("dev_msq_" + std::to_string(l));
  out << detail::csv_join(header) << '\n';
  std::vector<std::string> row{
      std::to_string(cfg.trials),   format_double(rho),
      format_double(mse.value),     format_double(mse.std_error),
      format_double(rep.tr_psi),    format_double(rep.tr_psi_se),
      format_double(rep.bound),     format_double(rep.bound_se)};
  for (double v : rep.deviation_msq) row.push_back(format_double(v));
  out << detail::csv_join(row) << '\n';
  std::cout << "mse = " << format_double(mse.value)
            << "  bound = " << format_double(rep.bound) << '\n';
}

inline void cmd_estimate(const ExperimentConfig& cfg) {
  const Topology topo = load_topology(cfg);
  const int n = topo.n_nodes();
  const Eigen::MatrixXd target = make_target(cfg, n);
  const ShiftSequence seq = obtain_shifts(cfg, topo, target);
  const double p = cfg.p_scalars.empty() ? 0.8 : cfg.p_scalars.front();
  const Eigen::MatrixXd p_active = activation_from_config(cfg, n, p);

  const RffEstimatorBank pretrained =
      offline_pretrain(topo, seq.shifts, cfg.pretrain, cfg.seed);

  struct Row {
    double clean = 0, zero = 0, rff = 0;
  };
  std::vector<Row> rows(cfg.experiment_seeds);
  parallel_for_index(
      static_cast<std::uint64_t>(cfg.experiment_seeds), cfg.workers,
      [&](std::uint64_t s) {
        const Eigen::VectorXd x = [&] {
          Rng rng = substream(cfg.seed, "estimate-signal", s);
          std::normal_distribution<double> gauss;
          Eigen::VectorXd v(n);
          for (int i = 0; i < n; ++i) v(i) = gauss(rng);
          return v;
        }();
        const std::uint64_t run_seed = stream_key(cfg.seed, "estimate-run", s);
        RffEstimatorBank rff_bank = pretrained;
        RffEstimatorBank zero_bank = pretrained;
        const RunTrace clean = apply_successive(seq.shifts, x);
        const EstimationRun rff = simulate_with_estimation(
            seq.shifts, p_active, x, rff_bank, run_seed, ImputeMode::kRff);
        const EstimationRun zero = simulate_with_estimation(
            seq.shifts, p_active, x, zero_bank, run_seed, ImputeMode::kZero);
        rows[s].clean = relative_error(target, x, clean.final);
        rows[s].zero = relative_error(target, x, zero.trace.final);
        rows[s].rff = relative_error(target, x, rff.trace.final);
      });

  int wins = 0;
  for (const Row& r : rows) wins += r.rff < r.zero ? 1 : 0;
  const double win_rate =
      cfg.experiment_seeds > 0
          ? static_cast<double>(wins) / cfg.experiment_seeds
          : 0.0;

  auto out = detail::open_out(cfg.out, "estimate.csv");
  out << "kind,seed_index,err_clean,err_zero,err_rff,win_rate\n";
  for (int s = 0; s < cfg.experiment_seeds; ++s)
    out << detail::csv_join({"seed", std::to_string(s),
                             format_double(rows[s].clean),
                             format_double(rows[s].zero),
                             format_double(rows[s].rff), ""})
        << '\n';
  out << detail::csv_join({"summary", "", "", "", "", format_double(win_rate)})
      << '\n';
  std::cout << "win rate (rff < zero) = " << format_double(win_rate) << '\n';
}

inline void cmd_sparsify(const ExperimentConfig& cfg) {
  const Topology topo = load_topology(cfg);
  const int n = topo.n_nodes();
  const Eigen::MatrixXd target = make_target(cfg, n);
  const ShiftSequence seq = obtain_shifts(cfg, topo, target);
  const std::optional<int> freeze =
      cfg.freeze_after > 0 ? std::optional<int>(cfg.freeze_after)
                           : std::nullopt;

  const RffEstimatorBank pretrained =
      offline_pretrain(topo, seq.shifts, cfg.pretrain, cfg.seed);

  struct Row {
    long sent = 0, full = 0;
    double err = 0, err_clean = 0;
  };
  std::vector<Row> rows(cfg.experiment_seeds);
  parallel_for_index(
      static_cast<std::uint64_t>(cfg.experiment_seeds), cfg.workers,
      [&](std::uint64_t s) {
        Rng rng = substream(cfg.seed, "sparsify-signal", s);
        std::normal_distribution<double> gauss;
        Eigen::VectorXd x(n);
        for (int i = 0; i < n; ++i) x(i) = gauss(rng);
        RffEstimatorBank bank = pretrained;
        const EstimationRun run =
            sparsify_run(seq.shifts, cfg.drop_rate, x, bank,
                         stream_key(cfg.seed, "sparsify-run", s), freeze);
        const RunTrace clean = apply_successive(seq.shifts, x);
        rows[s].sent = run.messages_sent;
        rows[s].full = run.messages_full;
        rows[s].err = relative_error(target, x, run.trace.final);
        rows[s].err_clean = relative_error(target, x, clean.final);
      });

  auto out = detail::open_out(cfg.out, "sparsify.csv");
  out << "seed_index,messages_sent,messages_full,savings,err_rff,err_clean\n";
  for (int s = 0; s < cfg.experiment_seeds; ++s) {
    const double savings =
        rows[s].full > 0
            ? 1.0 - static_cast<double>(rows[s].sent) / rows[s].full
            : 0.0;
    out << detail::csv_join({std::to_string(s), std::to_string(rows[s].sent),
                             std::to_string(rows[s].full),
                             format_double(savings), format_double(rows[s].err),
                             format_double(rows[s].err_clean)})
        << '\n';
  }
  std::cout << "wrote " << cfg.out << "/sparsify.csv\n";
}

inline void run_experiment(const ExperimentConfig& cfg) {
  if (cfg.task == "design")
    cmd_design(cfg);
  else if (cfg.task == "run")
    cmd_run(cfg);
  else if (cfg.task == "fluctuate")
    cmd_fluctuate(cfg);
  else if (cfg.task == "bound")
    cmd_bound(cfg);
  else if (cfg.task == "estimate")
    cmd_estimate(cfg);
  else if (cfg.task == "sparsify")
    cmd_sparsify(cfg);
  else
    throw InputError("unknown task: " + cfg.task);
}

}  // namespace shiftseq
