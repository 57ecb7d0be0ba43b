#include "erl2/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace erl2 {
namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "on" || v == "true" || v == "1") return true;
  if (v == "off" || v == "false" || v == "0") return false;
  throw std::invalid_argument("config: bad boolean for " + key + ": " + v);
}

std::vector<int> parse_int_list(const std::string& v, const std::string& key) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(std::stoi(item));
  }
  if (out.empty()) throw std::invalid_argument("config: empty list for " + key);
  return out;
}

std::string format_int_list(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  return s;
}

std::string format_double(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void assign_key(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "preset") {
    apply_preset(cfg, value);
    return;
  }
  if (key == "env") { cfg.env = value; return; }
  if (key == "mode") { cfg.mode = value; return; }
  if (key == "evolution") { cfg.evolution = value; return; }
  if (key == "rl_agent") { cfg.rl_agent = parse_bool(value, key); return; }
  if (key == "n") { cfg.n = std::stoi(value); return; }
  if (key == "e_count") { cfg.e_count = std::stoi(value); return; }
  if (key == "p") { cfg.p = std::stod(value); return; }
  if (key == "h") { cfg.h = std::stoi(value); return; }
  if (key == "k") { cfg.k = std::stoi(value); return; }
  if (key == "alpha") { cfg.alpha = std::stod(value); return; }
  if (key == "beta") { cfg.beta = std::stod(value); return; }
  if (key == "gamma") { cfg.gamma = std::stod(value); return; }
  if (key == "total_steps") { cfg.total_steps = std::stol(value); return; }
  if (key == "injection_period") { cfg.injection_period = std::stoi(value); return; }
  if (key == "seed") { cfg.seed = std::stoull(value); return; }
  if (key == "out_dir") { cfg.out_dir = value; return; }
  if (key == "encoder_hidden") { cfg.encoder_hidden = parse_int_list(value, key); return; }
  if (key == "critic_hidden") { cfg.critic_hidden = parse_int_list(value, key); return; }
  if (key == "pevfa_hidden") { cfg.pevfa_hidden = parse_int_list(value, key); return; }
  if (key == "pevfa_embed") { cfg.pevfa_embed = std::stoi(value); return; }
  if (key == "lr_critic") { cfg.lr_critic = std::stod(value); return; }
  if (key == "lr_pevfa") { cfg.lr_pevfa = std::stod(value); return; }
  if (key == "lr_actor") { cfg.lr_actor = std::stod(value); return; }
  if (key == "lr_sharedrep") { cfg.lr_sharedrep = std::stod(value); return; }
  if (key == "tau") { cfg.tau = std::stod(value); return; }
  if (key == "batch_size") { cfg.batch_size = std::stoi(value); return; }
  if (key == "warmup_steps") { cfg.warmup_steps = std::stoi(value); return; }
  if (key == "explore_sigma") { cfg.explore_sigma = std::stod(value); return; }
  if (key == "td3_target_noise") { cfg.td3_target_noise = std::stod(value); return; }
  if (key == "td3_noise_clip") { cfg.td3_noise_clip = std::stod(value); return; }
  if (key == "policy_delay") { cfg.policy_delay = std::stoi(value); return; }
  if (key == "buffer_capacity") { cfg.buffer_capacity = std::stol(value); return; }
  if (key == "mc_episodes") { cfg.mc_episodes = std::stoi(value); return; }
  if (key == "crossover_kind") { cfg.crossover_kind = value; return; }
  if (key == "mutation_kind") { cfg.mutation_kind = value; return; }
  if (key == "cem_sigma_init") { cfg.cem_sigma_init = std::stod(value); return; }
  if (key == "cem_top") { cfg.cem_top = std::stoi(value); return; }
  if (key == "eval_episodes") { cfg.eval_episodes = std::stoi(value); return; }
  if (key == "eval_period") { cfg.eval_period = std::stoi(value); return; }
  if (key == "wallclock") { cfg.wallclock = parse_bool(value, key); return; }
  if (key == "parallel_eval") { cfg.parallel_eval = parse_bool(value, key); return; }
  if (key == "sharedrep_terms") { cfg.sharedrep_terms = value; return; }
  if (key == "sharedrep_normalize_k") { cfg.sharedrep_normalize_k = parse_bool(value, key); return; }
  if (key == "pevfa_per_transition") { cfg.pevfa_per_transition = parse_bool(value, key); return; }
  throw std::invalid_argument("config: unknown key: " + key);
}

struct Preset {
  std::string mode;
  double p, beta, gamma;
  int h, k;
};

const std::map<std::string, Preset>& presets() {
  // Reference bundles for the standard MuJoCo-scale setups; they also
  // switch the networks to full scale.
  static const std::map<std::string, Preset> table = {
      {"td3-halfcheetah", {"td3", 0.3, 1.0, 0.99, 200, 1}},
      {"td3-walker", {"td3", 0.8, 0.2, 0.99, 50, 1}},
      {"td3-swimmer", {"td3", 0.3, 1.0, 0.999, 200, 3}},
      {"td3-hopper", {"td3", 0.8, 0.2, 0.99, 50, 3}},
      {"td3-ant", {"td3", 0.5, 0.7, 0.99, 200, 1}},
      {"td3-humanoid", {"td3", 0.5, 0.5, 0.99, 200, 1}},
      {"ddpg-halfcheetah", {"ddpg", 0.5, 1.0, 0.99, 200, 1}},
      {"ddpg-walker", {"ddpg", 0.8, 0.2, 0.99, 50, 1}},
      {"ddpg-swimmer", {"ddpg", 0.3, 0.5, 0.999, 200, 3}},
      {"ddpg-hopper", {"ddpg", 0.8, 0.7, 0.99, 50, 3}},
      {"ddpg-ant", {"ddpg", 0.7, 0.5, 0.99, 200, 1}},
      {"ddpg-humanoid", {"ddpg", 0.7, 0.5, 0.99, 200, 1}},
  };
  return table;
}

}  // namespace

void apply_preset(RunConfig& cfg, const std::string& name) {
  auto it = presets().find(name);
  if (it == presets().end()) {
    throw std::invalid_argument("config: unknown preset: " + name);
  }
  const Preset& ps = it->second;
  cfg.mode = ps.mode;
  cfg.p = ps.p;
  cfg.beta = ps.beta;
  cfg.gamma = ps.gamma;
  cfg.h = ps.h;
  cfg.k = ps.k;
  cfg.n = 5;
  cfg.e_count = 1;
  cfg.alpha = 1.0;
  cfg.encoder_hidden = {400, 300};
  cfg.critic_hidden = {400, 300};
  cfg.pevfa_hidden = {400, 300};
  cfg.pevfa_embed = 64;
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                  " is not key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      assign_key(cfg, key, value);
    } catch (const std::invalid_argument&) {
      throw;
    } catch (const std::exception&) {
      throw std::invalid_argument("config: bad value for " + key + ": " + value);
    }
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

std::string echo_config(const RunConfig& cfg) {
  std::map<std::string, std::string> kv;
  kv["env"] = cfg.env;
  kv["mode"] = cfg.mode;
  kv["evolution"] = cfg.evolution;
  kv["rl_agent"] = cfg.rl_agent ? "on" : "off";
  kv["n"] = std::to_string(cfg.n);
  kv["e_count"] = std::to_string(cfg.e_count);
  kv["p"] = format_double(cfg.p);
  kv["h"] = std::to_string(cfg.h);
  kv["k"] = std::to_string(cfg.k);
  kv["alpha"] = format_double(cfg.alpha);
  kv["beta"] = format_double(cfg.beta);
  kv["gamma"] = format_double(cfg.gamma);
  kv["total_steps"] = std::to_string(cfg.total_steps);
  kv["injection_period"] = std::to_string(cfg.injection_period);
  kv["seed"] = std::to_string(cfg.seed);
  kv["out_dir"] = cfg.out_dir;
  kv["encoder_hidden"] = format_int_list(cfg.encoder_hidden);
  kv["critic_hidden"] = format_int_list(cfg.critic_hidden);
  kv["pevfa_hidden"] = format_int_list(cfg.pevfa_hidden);
  kv["pevfa_embed"] = std::to_string(cfg.pevfa_embed);
  kv["lr_critic"] = format_double(cfg.lr_critic);
  kv["lr_pevfa"] = format_double(cfg.lr_pevfa);
  kv["lr_actor"] = format_double(cfg.lr_actor);
  kv["lr_sharedrep"] = format_double(cfg.lr_sharedrep);
  kv["tau"] = format_double(cfg.tau);
  kv["batch_size"] = std::to_string(cfg.batch_size);
  kv["warmup_steps"] = std::to_string(cfg.warmup_steps);
  kv["explore_sigma"] = format_double(cfg.explore_sigma);
  kv["td3_target_noise"] = format_double(cfg.td3_target_noise);
  kv["td3_noise_clip"] = format_double(cfg.td3_noise_clip);
  kv["policy_delay"] = std::to_string(cfg.policy_delay);
  kv["buffer_capacity"] = std::to_string(cfg.buffer_capacity);
  kv["mc_episodes"] = std::to_string(cfg.mc_episodes);
  kv["crossover_kind"] = cfg.crossover_kind;
  kv["mutation_kind"] = cfg.mutation_kind;
  kv["cem_sigma_init"] = format_double(cfg.cem_sigma_init);
  kv["cem_top"] = std::to_string(cfg.cem_top);
  kv["eval_episodes"] = std::to_string(cfg.eval_episodes);
  kv["eval_period"] = std::to_string(cfg.eval_period);
  kv["wallclock"] = cfg.wallclock ? "on" : "off";
  kv["parallel_eval"] = cfg.parallel_eval ? "on" : "off";
  kv["sharedrep_terms"] = cfg.sharedrep_terms;
  kv["sharedrep_normalize_k"] = cfg.sharedrep_normalize_k ? "on" : "off";
  kv["pevfa_per_transition"] = cfg.pevfa_per_transition ? "on" : "off";

  std::string out;
  for (const auto& [key, value] : kv) {
    out += key + " = " + value + "\n";
  }
  return out;
}

void validate_config(const RunConfig& cfg) {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("config: " + msg); };

  if (cfg.env != "pointmass" && cfg.env != "pendulum" && cfg.env != "tabular-chain") {
    fail("env must be pointmass, pendulum, or tabular-chain");
  }
  if (cfg.mode != "td3" && cfg.mode != "ddpg") fail("mode must be td3 or ddpg");
  if (cfg.evolution != "ga" && cfg.evolution != "cem" && cfg.evolution != "none") {
    fail("evolution must be ga, cem, or none");
  }
  if (!cfg.rl_agent && cfg.evolution == "none") fail("rl_agent=off requires an evolution mode");
  if (cfg.p < 0.0 || cfg.p > 1.0) fail("p must lie in [0, 1]");
  if (cfg.alpha < 0.0 || cfg.alpha > 1.0) fail("alpha must lie in [0, 1]");
  if (cfg.beta < 0.0 || cfg.beta > 1.0) fail("beta must lie in [0, 1]");
  if (cfg.h < 0) fail("h must be >= 0");
  if (cfg.gamma < 0.0 || cfg.gamma >= 1.0) fail("gamma must lie in [0, 1)");
  if (cfg.evolution != "none") {
    if (cfg.n < 3) fail("population size must be >= 3");
    if (cfg.e_count < 1 || cfg.e_count >= cfg.n) fail("e_count must lie in [1, n)");
    if (cfg.k < 0 || cfg.k > cfg.n) fail("k must lie in [0, n]");
    if (cfg.cem_top < 1 || cfg.cem_top > cfg.n) fail("cem_top must lie in [1, n]");
    if (cfg.cem_sigma_init <= 0.0) fail("cem_sigma_init must be > 0");
    if (cfg.mc_episodes < 1) fail("mc_episodes must be >= 1");
  }
  if (cfg.total_steps < 1) fail("total_steps must be >= 1");
  if (cfg.injection_period < 0) fail("injection_period must be >= 0");
  if (cfg.encoder_hidden.empty()) fail("encoder_hidden must not be empty");
  for (int w : cfg.encoder_hidden) {
    if (w < 1) fail("encoder_hidden widths must be positive");
  }
  for (int w : cfg.critic_hidden) {
    if (w < 1) fail("critic_hidden widths must be positive");
  }
  for (int w : cfg.pevfa_hidden) {
    if (w < 1) fail("pevfa_hidden widths must be positive");
  }
  if (cfg.pevfa_embed < 1) fail("pevfa_embed must be >= 1");
  if (cfg.lr_critic <= 0.0 || cfg.lr_pevfa <= 0.0 || cfg.lr_actor <= 0.0 ||
      cfg.lr_sharedrep <= 0.0) {
    fail("learning rates must be > 0");
  }
  if (cfg.tau <= 0.0 || cfg.tau > 1.0) fail("tau must lie in (0, 1]");
  if (cfg.batch_size < 1) fail("batch_size must be >= 1");
  if (cfg.warmup_steps < 0) fail("warmup_steps must be >= 0");
  if (cfg.explore_sigma < 0.0) fail("explore_sigma must be >= 0");
  if (cfg.td3_target_noise < 0.0 || cfg.td3_noise_clip < 0.0) {
    fail("td3 noise parameters must be >= 0");
  }
  if (cfg.policy_delay < 1) fail("policy_delay must be >= 1");
  if (cfg.buffer_capacity < cfg.batch_size) fail("buffer_capacity must cover one batch");
  if (cfg.crossover_kind != "behavior" && cfg.crossover_kind != "parameter") {
    fail("crossover_kind must be behavior or parameter");
  }
  if (cfg.mutation_kind != "behavior" && cfg.mutation_kind != "parameter") {
    fail("mutation_kind must be behavior or parameter");
  }
  if (cfg.eval_episodes < 1) fail("eval_episodes must be >= 1");
  if (cfg.eval_period < 1) fail("eval_period must be >= 1");
  if (cfg.sharedrep_terms != "both" && cfg.sharedrep_terms != "critic_only" &&
      cfg.sharedrep_terms != "pevfa_only") {
    fail("sharedrep_terms must be both, critic_only, or pevfa_only");
  }
  if (!cfg.rl_agent && cfg.sharedrep_terms == "critic_only") {
    fail("sharedrep_terms=critic_only requires the rl agent");
  }
  if (cfg.evolution == "none" && cfg.sharedrep_terms == "pevfa_only") {
    fail("sharedrep_terms=pevfa_only requires a population");
  }
}

}  // namespace erl2
