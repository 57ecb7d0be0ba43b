#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace erl2 {

// Fully resolved run configuration. The on-disk format is flat
// `key = value` text; unknown keys are rejected. `preset = <name>` pulls
// in a named bundle of reference hyperparameters before later keys apply.
struct RunConfig {
  std::string env = "pointmass";
  std::string mode = "td3";       // td3 | ddpg
  std::string evolution = "ga";   // ga | cem | none
  bool rl_agent = true;

  int n = 5;
  int e_count = 1;
  double p = 0.8;  // probability of a Monte-Carlo evaluation generation
  int h = 50;      // surrogate rollout length
  int k = 1;       // population policies per shared-representation update
  double alpha = 1.0;
  double beta = 0.2;
  double gamma = 0.99;
  long total_steps = 60000;
  int injection_period = 1;  // generations; 0 disables injection
  std::uint64_t seed = 0;
  std::string out_dir = "run_out";

  std::vector<int> encoder_hidden = {64, 32};
  std::vector<int> critic_hidden = {64, 32};
  std::vector<int> pevfa_hidden = {64, 32};
  int pevfa_embed = 64;

  double lr_critic = 1e-3;
  double lr_pevfa = 1e-3;
  double lr_actor = 1e-3;
  double lr_sharedrep = 1e-3;
  double tau = 0.005;
  int batch_size = 64;
  int warmup_steps = 1000;
  double explore_sigma = 0.1;
  double td3_target_noise = 0.2;
  double td3_noise_clip = 0.4;
  int policy_delay = 2;
  long buffer_capacity = 100000;
  int mc_episodes = 1;

  std::string crossover_kind = "behavior";  // behavior | parameter
  std::string mutation_kind = "behavior";
  double cem_sigma_init = 0.1;
  int cem_top = 2;

  int eval_episodes = 3;
  int eval_period = 1;
  bool wallclock = true;       // off writes 0.0 to the wallclock column
  bool parallel_eval = false;  // capped by ERL2_THREADS
  std::string sharedrep_terms = "both";  // both | critic_only | pevfa_only
  bool sharedrep_normalize_k = false;
  bool pevfa_per_transition = false;
};

RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// Applies one of the reference hyperparameter bundles (td3-walker,
// ddpg-hopper, ...). Throws on unknown names.
void apply_preset(RunConfig& cfg, const std::string& name);

// Fully resolved `key = value` echo, alphabetical, itself parseable.
std::string echo_config(const RunConfig& cfg);

// Throws std::invalid_argument describing the first violated constraint.
void validate_config(const RunConfig& cfg);

}  // namespace erl2
