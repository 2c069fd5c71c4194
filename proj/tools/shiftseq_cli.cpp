// Experiment runner. Tasks, inputs and outputs are described by a flat
// INI config; see README.md for the key reference.
#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <string>

#include "shiftseq/shiftseq.hpp"

int main(int argc, char** argv) {
  CLI::App app{"successive shift operator design and simulation"};
  std::string config_path;
  std::string out_override;
  std::uint64_t seed_override = 0;
  long trials_override = -1;
  int workers_override = -1;
  app.add_option("--config", config_path, "experiment config (INI)")
      ->required();
  app.add_option("--seed", seed_override, "override the config seed");
  const bool* seed_given = nullptr;
  auto* seed_opt = app.get_option("--seed");
  app.add_option("--out", out_override, "override the output directory");
  app.add_option("--workers", workers_override,
                 "Monte-Carlo worker count (results are worker-independent)");
  app.add_option("--trials", trials_override, "override the trial count");
  (void)seed_given;

  CLI11_PARSE(app, argc, argv);

  try {
    shiftseq::ExperimentConfig cfg =
        shiftseq::config_from_ini(shiftseq::parse_ini_file(config_path));
    if (seed_opt->count() > 0) cfg.seed = seed_override;
    if (!out_override.empty()) cfg.out = out_override;
    if (workers_override > 0) cfg.workers = workers_override;
    if (trials_override >= 0)
      cfg.trials = static_cast<std::uint64_t>(trials_override);
    shiftseq::run_experiment(cfg);
    return 0;
  } catch (const shiftseq::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
