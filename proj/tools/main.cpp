// SPDX-License-Identifier: Apache-2.0
#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "vlcsee/sweep.hpp"

namespace {

using namespace vlcsee;

std::string resolve_out(const std::string& configured, const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("VLCSEE_OUT"); env && *env) return env;
  return configured;
}

int cmd_validate(const std::string& config_path) {
  const ExperimentConfig config = load_config(config_path);
  std::cout << "config ok (hash " << config_hash(config) << ")\n";
  std::cout << "  scene: " << config.scenario.leds.size() << " LEDs, " << config.scenario.n_irs
            << " elements, " << config.scenario.k_lus << " users\n";
  std::cout << "  trainer: steps=" << config.trainer.total_steps << " batch_on="
            << config.trainer.batch_on << " epochs=" << config.trainer.epochs_on << "+"
            << config.trainer.epochs_off << "\n";
  return 0;
}

int cmd_train(const std::string& config_path, std::int64_t seed_flag, std::int64_t steps_flag,
              const std::string& out_flag, const std::string& baseline_flag, bool sdma,
              bool no_irs) {
  ExperimentConfig config = load_config(config_path);
  if (steps_flag > 0) config.trainer.total_steps = steps_flag;
  config.out_dir = resolve_out(config.out_dir, out_flag);

  CellSpec cell;
  cell.config = config;
  cell.baseline = baseline_flag.empty() ? BaselineSpec{} : BaselineSpec::parse(baseline_flag);
  cell.baseline.sdma = cell.baseline.sdma || sdma;
  cell.baseline.irs_off = cell.baseline.irs_off || no_irs;
  cell.seed = seed_flag >= 0 ? static_cast<std::uint64_t>(seed_flag) : config.seeds.front();
  cell.dir = config.out_dir;

  const RunRecord record = run_cell(cell);
  std::cout << "run " << cell.baseline.label() << " seed " << cell.seed << ": final smoothed SEE "
            << record.final_smoothed_see << ", final smoothed reward "
            << record.final_smoothed_reward << ", best reward " << record.best_reward << "\n";
  std::cout << "outputs in " << cell.dir << "\n";
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_flag) {
  ExperimentConfig config = load_config(config_path);
  config.out_dir = resolve_out(config.out_dir, out_flag);
  const SweepOutcome outcome = run_sweep(config);
  std::cout << "sweep finished: " << outcome.records.size() << " runs, " << outcome.failures
            << " failures; summary in " << config.out_dir << "/summary.csv\n";
  return 0;
}

int cmd_plot(const std::string& dir) {
  emit_plot_data(dir);
  std::cout << "plot data written under " << dir << "\n";
  return 0;
}

int cmd_oracle(const std::string& config_path) {
  const ExperimentConfig config = load_config(config_path);
  const Scene scene = build_scene(config, config.seeds.front());
  const OpticalParams optics = build_optics(config);
  const PowerLimits limits = build_limits(config);
  const ChannelSet channels = build_channel_set(scene, optics);

  // Reference decision: the conservative starting action decoded against
  // the bare channel.
  DecodeOptions opt;
  opt.irs_off = true;
  VlcEnv env(scene, optics, limits, opt);
  const DecodedAction decoded =
      decode_action(env.initial_action_bias(), channels, limits, opt);

  const OracleResult result = exhaustive_alignment_oracle(channels, decoded.decision, limits);
  std::cout << "configurations: " << result.configurations << "\n";
  std::cout << "best SEE: " << result.best_see << (result.feasible ? "" : " (infeasible)") << "\n";
  for (int n = 0; n < result.best.num_elements(); ++n) {
    const auto pair = result.best.row_pair(n);
    std::cout << "element " << n + 1 << ": ";
    if (pair) {
      std::cout << "LED " << pair->led << " -> user " << pair->lu << "\n";
    } else {
      std::cout << "idle\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reflector-assisted optical downlink simulator and trainer"};
  app.require_subcommand(1);

  std::string config_path, out_flag, baseline_flag, plot_dir;
  std::int64_t seed_flag = -1, steps_flag = 0;
  bool sdma = false, no_irs = false;

  auto* validate = app.add_subcommand("validate", "check a config file");
  validate->add_option("config", config_path)->required();

  auto* train = app.add_subcommand("train", "run one training cell");
  train->add_option("config", config_path)->required();
  train->add_option("--seed", seed_flag, "override the first configured seed");
  train->add_option("--steps", steps_flag, "override trainer.steps");
  train->add_option("--out", out_flag, "output directory");
  train->add_option("--baseline", baseline_flag, "ds_ppo|ppo|eps_greedy|mrt_only[+sdma][+noirs]");
  train->add_flag("--sdma", sdma, "drop the common stream");
  train->add_flag("--no-irs", no_irs, "disable the reflector");

  auto* sweep = app.add_subcommand("sweep", "run the configured sweep");
  sweep->add_option("config", config_path)->required();
  sweep->add_option("--out", out_flag, "output directory");

  auto* plot = app.add_subcommand("plot", "emit plot CSV/SVG from summaries");
  plot->add_option("dir", plot_dir)->required();

  auto* oracle = app.add_subcommand("oracle", "exhaustive assignment search on a tiny instance");
  oracle->add_option("config", config_path)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(config_path);
    if (train->parsed())
      return cmd_train(config_path, seed_flag, steps_flag, out_flag, baseline_flag, sdma, no_irs);
    if (sweep->parsed()) return cmd_sweep(config_path, out_flag);
    if (plot->parsed()) return cmd_plot(plot_dir);
    if (oracle->parsed()) return cmd_oracle(config_path);
  } catch (const vlcsee::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
