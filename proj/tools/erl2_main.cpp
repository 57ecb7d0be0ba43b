// Command-line front end: train / eval / ablate.

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "erl2/config.hpp"
#include "erl2/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"erl2 - evolutionary reinforcement learning on a shared state representation"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::string checkpoint_path;
  std::string axis;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int episodes = 10;

  auto* train_cmd = app.add_subcommand("train", "Run the training loop");
  train_cmd->add_option("--config", config_path, "Config file (key = value lines)")->required();
  train_cmd->add_option("--seed", seed, "Override the config seed")->each([&](std::string) {
    seed_set = true;
  });
  train_cmd->add_option("--out", out_dir, "Override the config output directory");

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpointed policy");
  eval_cmd->add_option("--checkpoint", checkpoint_path, "Checkpoint file")->required();
  eval_cmd->add_option("--episodes", episodes, "Evaluation episodes");
  eval_cmd->add_option("--seed", seed, "Evaluation seed");

  auto* ablate_cmd = app.add_subcommand("ablate", "Run one ablation axis");
  ablate_cmd->add_option("--config", config_path, "Base config file")->required();
  ablate_cmd->add_option("--axis", axis, "Axis name")->required();
  ablate_cmd->add_option("--seed", seed, "Override the config seed")->each([&](std::string) {
    seed_set = true;
  });
  ablate_cmd->add_option("--out", out_dir, "Override the config output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train_cmd->parsed()) {
      erl2::RunConfig cfg = erl2::parse_config_file(config_path);
      if (seed_set) cfg.seed = seed;
      if (!out_dir.empty()) cfg.out_dir = out_dir;
      erl2::RunSummary s = erl2::train(cfg);
      std::printf("completed: steps=%ld generations=%ld best_fitness=%.6g eval=%.6g (dir %s)\n",
                  s.total_env_steps, s.generations, s.best_fitness, s.final_eval_mean,
                  s.out_dir.c_str());
    } else if (eval_cmd->parsed()) {
      erl2::EvalReport r = erl2::evaluate_checkpoint(checkpoint_path, episodes, seed);
      std::printf("episodes=%d mean=%.10g std=%.10g\n", episodes, r.mean, r.stddev);
      for (std::size_t i = 0; i < r.returns.size(); ++i) {
        std::printf("episode %zu: %.10g\n", i, r.returns[i]);
      }
    } else if (ablate_cmd->parsed()) {
      erl2::RunConfig cfg = erl2::parse_config_file(config_path);
      if (seed_set) cfg.seed = seed;
      if (!out_dir.empty()) cfg.out_dir = out_dir;
      auto dirs = erl2::ablate(cfg, axis);
      for (const auto& d : dirs) std::printf("cell: %s\n", d.c_str());
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
