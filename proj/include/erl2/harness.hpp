#pragma once

#include <optional>
#include <string>
#include <vector>

#include "erl2/config.hpp"
#include "erl2/environments.hpp"
#include "erl2/evolution.hpp"
#include "erl2/reinforcement.hpp"

namespace erl2 {

// Everything a run checkpoint stores: the resolved configuration plus all
// learnable parameters (with targets), the population and counters.
struct TrainState {
  RunConfig cfg;
  SharedRepresentation z;
  SharedRepresentation z_target;
  std::optional<PolicyRepresentation> w_rl;
  std::optional<PolicyRepresentation> w_rl_target;
  std::optional<CriticParams> critic;
  std::optional<CriticParams> critic_target;
  std::optional<PeVFAParams> pevfa;
  std::optional<PeVFAParams> pevfa_target;
  std::optional<Population> pop;
  std::optional<CemState> cem;
  long total_env_steps = 0;
  long generation = 0;
};

TrainState init_train_state(const RunConfig& cfg);

void save_checkpoint(const TrainState& state, const std::string& path);
TrainState load_checkpoint(const std::string& path);

struct RunSummary {
  long total_env_steps = 0;
  long generations = 0;
  long episodes = 0;
  long eval_steps = 0;  // measurement rollouts, tracked outside the training counter
  double best_fitness = 0.0;
  double final_eval_mean = 0.0;
  double final_eval_std = 0.0;
  double wallclock_s = 0.0;
  std::string status = "completed";
  std::string out_dir;
};

// Runs the full training loop, writing config echo, metrics.csv,
// generations.jsonl, summary.json and checkpoint.bin under cfg.out_dir.
RunSummary train(const RunConfig& cfg);

struct EvalReport {
  double mean = 0.0;
  double stddev = 0.0;
  std::vector<double> returns;
};

// Deterministic evaluation (no exploration noise) of the checkpointed
// deployment policy: the RL agent when present, otherwise the
// highest-fitness population member.
EvalReport evaluate_checkpoint(const std::string& checkpoint_path, int episodes,
                               std::uint64_t seed);
EvalReport evaluate_state(const TrainState& state, int episodes, std::uint64_t seed);

// Runs one ablation axis; every cell shares the base seed. Returns the
// per-cell output directories.
std::vector<std::string> ablate(const RunConfig& base, const std::string& axis);
std::vector<std::string> ablation_axes();

}  // namespace erl2
