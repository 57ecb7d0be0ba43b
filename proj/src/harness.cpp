#include "erl2/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "erl2/serialize.hpp"

namespace erl2 {
namespace {

using nlohmann::json;

std::string fmt_g(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

double nan_value() { return std::numeric_limits<double>::quiet_NaN(); }

// NaN-aware max index; returns -1 when everything is NaN.
int argmax_fitness(const std::vector<double>& fitness) {
  int best = -1;
  for (int i = 0; i < static_cast<int>(fitness.size()); ++i) {
    if (std::isnan(fitness[i])) continue;
    if (best < 0 || fitness[i] > fitness[best]) best = i;
  }
  return best;
}

double max_fitness(const std::vector<double>& fitness) {
  const int i = argmax_fitness(fitness);
  return i < 0 ? nan_value() : fitness[i];
}

double mean_fitness(const std::vector<double>& fitness) {
  double sum = 0.0;
  int count = 0;
  for (double f : fitness) {
    if (std::isnan(f)) continue;
    sum += f;
    ++count;
  }
  return count == 0 ? nan_value() : sum / count;
}

int thread_cap() {
  if (const char* env = std::getenv("ERL2_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

UpdateConfig update_config_from(const RunConfig& cfg) {
  UpdateConfig u;
  u.gamma = cfg.gamma;
  u.tau = cfg.tau;
  u.batch_size = cfg.batch_size;
  u.k_policies = cfg.k;
  u.mode = cfg.mode == "ddpg" ? RlMode::Ddpg : RlMode::Td3;
  u.target_noise_sigma = cfg.td3_target_noise;
  u.target_noise_clip = cfg.td3_noise_clip;
  u.policy_delay = cfg.mode == "ddpg" ? 1 : cfg.policy_delay;
  u.per_transition_policy_sample = cfg.pevfa_per_transition;
  u.normalize_pevfa_terms = cfg.sharedrep_normalize_k;
  return u;
}

EvolutionConfig evolution_config_from(const RunConfig& cfg) {
  EvolutionConfig e;
  e.e_count = cfg.e_count;
  e.mutation.select_prob = cfg.alpha;
  e.mutation.entry_fraction = cfg.beta;
  e.crossover_kind =
      cfg.crossover_kind == "parameter" ? OperatorKind::Parameter : OperatorKind::Behavior;
  e.mutation_kind =
      cfg.mutation_kind == "parameter" ? OperatorKind::Parameter : OperatorKind::Behavior;
  return e;
}

struct EvalOutcome {
  double mean = 0.0;
  double stddev = 0.0;
  std::vector<double> returns;
  long steps = 0;
};

EvalOutcome eval_policy(const SharedRepresentation& z, const PolicyRepresentation& w,
                        const std::string& env_name, int episodes, Rng rng) {
  auto env = make_env(env_name);
  const ActionSpec& spec = env->spec().action_spec;
  EvalOutcome out;
  for (int e = 0; e < episodes; ++e) {
    RolloutResult r = rollout(z, w, spec, *env, env->spec().horizon, 0.0, rng);
    out.returns.push_back(r.undiscounted_return);
    out.steps += r.steps;
  }
  double sum = 0.0;
  for (double v : out.returns) sum += v;
  out.mean = sum / episodes;
  double sq = 0.0;
  for (double v : out.returns) sq += (v - out.mean) * (v - out.mean);
  out.stddev = episodes > 1 ? std::sqrt(sq / episodes) : 0.0;
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
}

}  // namespace

TrainState init_train_state(const RunConfig& cfg) {
  validate_config(cfg);
  TrainState st;
  st.cfg = cfg;

  auto env = make_env(cfg.env);
  const int state_width = env->spec().state_width;
  const int action_dim = env->spec().action_spec.dim();
  const int head_count = cfg.mode == "ddpg" ? 1 : 2;

  Rng master(cfg.seed);
  Rng rng_encoder = master.child("init-encoder");
  st.z = make_shared_representation(state_width, cfg.encoder_hidden, rng_encoder);
  st.z_target = st.z;
  const int d = st.z.feature_dim();

  if (cfg.rl_agent) {
    Rng rng_actor = master.child("init-actor");
    st.w_rl = make_policy_representation(d, action_dim, rng_actor);
    st.w_rl_target = st.w_rl;
    Rng rng_critic = master.child("init-critic");
    st.critic = make_critic(state_width, action_dim, cfg.critic_hidden, head_count, rng_critic);
    st.critic_target = st.critic;
  }

  if (cfg.evolution != "none") {
    Rng rng_pevfa = master.child("init-pevfa");
    st.pevfa = make_pevfa(state_width, action_dim, d, cfg.pevfa_embed, cfg.pevfa_hidden,
                          head_count, rng_pevfa);
    st.pevfa_target = st.pevfa;
    Rng rng_pop = master.child("init-population");
    st.pop = make_population(cfg.n, d, action_dim, rng_pop);
    if (cfg.evolution == "cem") {
      Rng rng_cem = master.child("init-cem");
      PolicyRepresentation mean = make_policy_representation(d, action_dim, rng_cem);
      st.cem = make_cem_state(mean, cfg.cem_sigma_init, cfg.cem_top);
    }
  }
  return st;
}

void save_checkpoint(const TrainState& state, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open checkpoint for writing: " + path);
  write_header(os);
  write_string(os, echo_config(state.cfg));
  write_mlp(os, state.z.encoder);
  write_mlp(os, state.z_target.encoder);

  write_u32(os, state.w_rl.has_value() ? 1 : 0);
  if (state.w_rl) {
    write_matrix(os, state.w_rl->mat);
    write_matrix(os, state.w_rl_target->mat);
    write_u32(os, static_cast<std::uint32_t>(state.critic->heads.size()));
    for (const auto& h : state.critic->heads) write_mlp(os, h);
    for (const auto& h : state.critic_target->heads) write_mlp(os, h);
  }

  write_u32(os, state.pevfa.has_value() ? 1 : 0);
  if (state.pevfa) {
    write_mlp(os, state.pevfa->column_encoder);
    write_u32(os, static_cast<std::uint32_t>(state.pevfa->heads.size()));
    for (const auto& h : state.pevfa->heads) write_mlp(os, h);
    write_mlp(os, state.pevfa_target->column_encoder);
    for (const auto& h : state.pevfa_target->heads) write_mlp(os, h);
  }

  // Policy table: n matrices, then the fitness record.
  write_u32(os, state.pop.has_value() ? 1 : 0);
  if (state.pop) {
    write_u32(os, static_cast<std::uint32_t>(state.pop->members.size()));
    for (const auto& m : state.pop->members) write_matrix(os, m.mat);
    for (double f : state.pop->fitness) write_f64(os, f);
    write_u64(os, static_cast<std::uint64_t>(state.pop->generation));
  }

  write_u32(os, state.cem.has_value() ? 1 : 0);
  if (state.cem) {
    write_matrix(os, state.cem->mean);
    write_matrix(os, state.cem->variance);
    write_u32(os, static_cast<std::uint32_t>(state.cem->top_count));
    write_f64(os, state.cem->variance_floor);
  }

  write_u64(os, static_cast<std::uint64_t>(state.total_env_steps));
  write_u64(os, static_cast<std::uint64_t>(state.generation));
}

TrainState load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open checkpoint: " + path);
  read_header(is);
  TrainState st;
  st.cfg = parse_config_text(read_string(is));
  st.z.encoder = read_mlp(is);
  st.z_target.encoder = read_mlp(is);

  if (read_u32(is) != 0) {
    st.w_rl = PolicyRepresentation{read_matrix(is)};
    st.w_rl_target = PolicyRepresentation{read_matrix(is)};
    const std::uint32_t heads = read_u32(is);
    st.critic = CriticParams{};
    st.critic_target = CriticParams{};
    for (std::uint32_t h = 0; h < heads; ++h) st.critic->heads.push_back(read_mlp(is));
    for (std::uint32_t h = 0; h < heads; ++h) st.critic_target->heads.push_back(read_mlp(is));
  }

  if (read_u32(is) != 0) {
    st.pevfa = PeVFAParams{};
    st.pevfa_target = PeVFAParams{};
    st.pevfa->column_encoder = read_mlp(is);
    const std::uint32_t heads = read_u32(is);
    for (std::uint32_t h = 0; h < heads; ++h) st.pevfa->heads.push_back(read_mlp(is));
    st.pevfa_target->column_encoder = read_mlp(is);
    for (std::uint32_t h = 0; h < heads; ++h) st.pevfa_target->heads.push_back(read_mlp(is));
  }

  if (read_u32(is) != 0) {
    st.pop = Population{};
    const std::uint32_t n = read_u32(is);
    for (std::uint32_t i = 0; i < n; ++i) st.pop->members.push_back({read_matrix(is)});
    st.pop->fitness.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) st.pop->fitness[i] = read_f64(is);
    st.pop->generation = static_cast<long>(read_u64(is));
  }

  if (read_u32(is) != 0) {
    st.cem = CemState{};
    st.cem->mean = read_matrix(is);
    st.cem->variance = read_matrix(is);
    st.cem->top_count = static_cast<int>(read_u32(is));
    st.cem->variance_floor = read_f64(is);
  }

  st.total_env_steps = static_cast<long>(read_u64(is));
  st.generation = static_cast<long>(read_u64(is));
  return st;
}

namespace {

struct MemberEval {
  FitnessEvalResult result;
};

// Population fitness pass. Members own private environments and rng
// streams, so evaluation order cannot change results; transitions are
// committed in member-index order afterwards.
std::vector<MemberEval> evaluate_population(const TrainState& st, const Rng& master, bool use_mc,
                                            const PolicyValueFn& value_fn, long generation) {
  const RunConfig& cfg = st.cfg;
  const int n = st.pop->size();
  std::vector<MemberEval> evals(n);

  auto eval_member = [&](int i) {
    Rng rng = cfg.evolution == "cem" ? master.child("cem-eval")
                                     : master.child("pop-eval", static_cast<std::uint64_t>(generation)).child(i);
    auto env = make_env(cfg.env);
    const ActionSpec& spec = env->spec().action_spec;
    if (use_mc) {
      evals[i].result = evaluate_fitness_mc(st.z, st.pop->members[i], spec, *env,
                                            cfg.mc_episodes, rng);
    } else {
      evals[i].result = evaluate_fitness_surrogate(st.z, st.pop->members[i], spec, *env, value_fn,
                                                   cfg.h, cfg.gamma, rng);
    }
  };

  if (cfg.parallel_eval) {
    const int workers = std::min(thread_cap(), n);
    std::vector<std::thread> threads;
    std::atomic<int> next{0};
    for (int w = 0; w < workers; ++w) {
      threads.emplace_back([&]() {
        for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) eval_member(i);
      });
    }
    for (auto& t : threads) t.join();
  } else {
    for (int i = 0; i < n; ++i) eval_member(i);
  }
  return evals;
}

}  // namespace

RunSummary train(const RunConfig& cfg_in) {
  RunConfig cfg = cfg_in;
  validate_config(cfg);

  namespace fs = std::filesystem;
  fs::create_directories(cfg.out_dir);
  write_text_file(cfg.out_dir + "/config.resolved.cfg", echo_config(cfg));

  std::ofstream metrics(cfg.out_dir + "/metrics.csv", std::ios::binary);
  std::ofstream genlog(cfg.out_dir + "/generations.jsonl", std::ios::binary);
  if (!metrics || !genlog) throw std::runtime_error("cannot open log files in " + cfg.out_dir);
  metrics << "step,episodes,fitness_best,fitness_mean,rl_eval_return,surrogate_used,wallclock_s\n";

  const auto t_start = std::chrono::steady_clock::now();
  auto elapsed_s = [&]() {
    if (!cfg.wallclock) return 0.0;
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  };

  TrainState st = init_train_state(cfg);
  const UpdateConfig ucfg = update_config_from(cfg);
  const EvolutionConfig ecfg = evolution_config_from(cfg);

  auto main_env = make_env(cfg.env);
  const ActionSpec spec = main_env->spec().action_spec;
  const int horizon = main_env->spec().horizon;

  Rng master(cfg.seed);
  Rng rng_rl_env = master.child("rl-env");
  Rng rng_updates = master.child("updates");
  Rng rng_evo = master.child("evolution");
  Rng rng_coin = master.child("coin");

  ReplayBuffer buffer(static_cast<std::size_t>(cfg.buffer_capacity));

  // Adam states.
  std::optional<CriticAdam> critic_adam;
  std::optional<MatrixAdamState> actor_adam;
  std::optional<PevfaAdam> pevfa_adam;
  AdamState sharedrep_adam = AdamState::init(st.z.encoder, AdamHyper{cfg.lr_sharedrep});
  if (st.critic) critic_adam = CriticAdam::init(*st.critic, AdamHyper{cfg.lr_critic});
  if (st.w_rl) actor_adam = MatrixAdamState::init(st.w_rl->mat, AdamHyper{cfg.lr_actor});
  if (st.pevfa) {
    pevfa_adam = PevfaAdam::init(*st.pevfa, AdamHyper{cfg.lr_pevfa}, AdamHyper{cfg.lr_pevfa});
  }

  const bool sharedrep_critic_term = st.critic && cfg.sharedrep_terms != "pevfa_only";
  const int sharedrep_k = (st.pevfa && cfg.sharedrep_terms != "critic_only") ? cfg.k : 0;
  UpdateConfig sharedrep_cfg = ucfg;
  sharedrep_cfg.k_policies = sharedrep_k;

  RunSummary summary;
  summary.out_dir = cfg.out_dir;
  summary.best_fitness = nan_value();
  long update_counter = 0;
  long episodes_total = 0;
  long eval_steps_total = 0;
  double last_eval = nan_value();

  // CEM elite carried into the next sampled population.
  std::optional<PolicyRepresentation> cem_elite;

  auto checkpoint_path = cfg.out_dir + "/checkpoint.bin";

  auto write_summary = [&](const std::string& status) {
    json j;
    j["status"] = status;
    j["total_env_steps"] = st.total_env_steps;
    j["generations"] = st.generation;
    j["episodes"] = episodes_total;
    j["eval_steps"] = eval_steps_total;
    if (std::isnan(summary.best_fitness)) {
      j["best_fitness"] = nullptr;
    } else {
      j["best_fitness"] = summary.best_fitness;
    }
    j["final_eval_mean"] = summary.final_eval_mean;
    j["final_eval_std"] = summary.final_eval_std;
    j["wallclock_s"] = summary.wallclock_s;
    write_text_file(cfg.out_dir + "/summary.json", j.dump(2) + "\n");
  };

  try {
    while (st.total_env_steps < cfg.total_steps) {
      const long gen = st.generation;
      long pop_steps = 0;
      long rl_steps = 0;
      bool surrogate_used = false;
      std::vector<double> fitness_snapshot;
      std::vector<std::string> kind_snapshot;
      int elite_index = -1;
      int injected = -1;

      // CEM draws a fresh population each generation, keeping the elite.
      if (cfg.evolution == "cem") {
        Population sampled = cem_sample(*st.cem, cfg.n, rng_evo);
        if (cem_elite) sampled.members[0] = *cem_elite;
        sampled.generation = st.pop->generation;
        *st.pop = std::move(sampled);
      }

      // (1) population evaluation: one coin per iteration, MC with
      // probability p, surrogate otherwise.
      std::optional<SelectionOutcome> outcome;
      if (st.pop) {
        const bool use_mc = rng_coin.bernoulli(cfg.p);
        surrogate_used = !use_mc;
        PevfaValueFn value_fn(*st.pevfa, QMode::Min);
        auto evals = evaluate_population(st, master, use_mc, value_fn, gen);
        for (int i = 0; i < st.pop->size(); ++i) {
          const auto& est = evals[i].result.estimate;
          st.pop->fitness[i] = est.value;
          fitness_snapshot.push_back(est.value);
          kind_snapshot.push_back(est.kind == FitnessKind::MonteCarlo ? "mc" : "surrogate");
          pop_steps += est.steps_used;
          if (use_mc) {
            episodes_total += est.episodes_used;
          } else {
            episodes_total += evals[i].result.transitions.empty()
                                  ? 0
                                  : (evals[i].result.transitions.back().terminal ? 1 : 0);
          }
          buffer.push(evals[i].result.transitions);
        }
      }

      // (2) RL agent exploration episode.
      if (st.w_rl) {
        RolloutResult r =
            rollout(st.z, *st.w_rl, spec, *main_env, horizon, cfg.explore_sigma, rng_rl_env);
        buffer.push(r.transitions);
        rl_steps = r.steps;
        if (r.ended) episodes_total += 1;
      }

      const long t_steps = pop_steps + rl_steps;
      const long steps_before = st.total_env_steps;
      st.total_env_steps += t_steps;

      // (3)+(4) t update steps per t collected steps, gated by warm-up.
      long updates = 0;
      if (st.total_env_steps > cfg.warmup_steps) {
        updates = std::min<long>(t_steps, st.total_env_steps -
                                              std::max<long>(cfg.warmup_steps, steps_before));
      }
      if (buffer.size() < static_cast<std::size_t>(cfg.batch_size)) updates = 0;

      for (long u = 0; u < updates; ++u) {
        const Batch batch = buffer.sample(cfg.batch_size, rng_updates);
        if (st.critic) {
          critic_td_update(*st.critic, *critic_adam, *st.critic_target, *st.w_rl_target,
                           st.z_target, spec, batch, ucfg, rng_updates);
        }
        if (st.pevfa) {
          pevfa_td_update(*st.pevfa, *pevfa_adam, *st.pevfa_target, *st.pop, st.z_target, spec,
                          batch, ucfg, rng_updates);
        }
        ++update_counter;
        if (update_counter % ucfg.policy_delay == 0) {
          if (st.w_rl) {
            actor_update(*st.w_rl, *actor_adam, *st.critic, st.z, spec, batch.states);
          }
          // Target trail.
          soft_update(st.z_target.encoder, st.z.encoder, cfg.tau);
          if (st.w_rl) soft_update(st.w_rl_target->mat, st.w_rl->mat, cfg.tau);
          if (st.critic) {
            for (std::size_t h = 0; h < st.critic->heads.size(); ++h) {
              soft_update(st.critic_target->heads[h], st.critic->heads[h], cfg.tau);
            }
          }
          if (st.pevfa) {
            soft_update(st.pevfa_target->column_encoder, st.pevfa->column_encoder, cfg.tau);
            for (std::size_t h = 0; h < st.pevfa->heads.size(); ++h) {
              soft_update(st.pevfa_target->heads[h], st.pevfa->heads[h], cfg.tau);
            }
          }
        }
        shared_rep_update(st.z, sharedrep_adam, sharedrep_critic_term ? &*st.critic : nullptr,
                          sharedrep_critic_term ? &*st.w_rl : nullptr,
                          sharedrep_k > 0 ? &*st.pevfa : nullptr,
                          sharedrep_k > 0 ? &*st.pop : nullptr, spec, batch.states,
                          sharedrep_cfg, rng_updates);
      }

      // Per-generation measurement rollouts (separate step accounting).
      if (gen % cfg.eval_period == 0) {
        const PolicyRepresentation* eval_policy_rep = nullptr;
        if (st.w_rl) {
          eval_policy_rep = &*st.w_rl;
        } else if (st.pop) {
          const int best = argmax_fitness(st.pop->fitness);
          if (best >= 0) eval_policy_rep = &st.pop->members[best];
        }
        if (eval_policy_rep) {
          EvalOutcome ev = eval_policy(st.z, *eval_policy_rep, cfg.env, cfg.eval_episodes,
                                       master.child("eval", static_cast<std::uint64_t>(gen)));
          last_eval = ev.mean;
          eval_steps_total += ev.steps;
        }
      }

      // (5) evolution.
      if (cfg.evolution == "ga") {
        outcome = select(*st.pop, cfg.e_count, rng_evo);
        elite_index = outcome->elites.front();
        evolve_generation(*st.pop, *outcome, ecfg, rng_evo);
      } else if (cfg.evolution == "cem") {
        const int best = argmax_fitness(st.pop->fitness);
        elite_index = best;
        if (best >= 0) cem_elite = st.pop->members[best];
        cem_update(*st.cem, *st.pop);
        st.pop->generation += 1;
      }

      // (6) periodic injection of the RL policy representation.
      if (st.w_rl && cfg.evolution == "ga" && cfg.injection_period > 0 &&
          (gen + 1) % cfg.injection_period == 0) {
        injected = rl_inject(*st.pop, *st.w_rl, outcome->elites);
      }

      const double best_now = max_fitness(fitness_snapshot);
      if (!std::isnan(best_now) &&
          (std::isnan(summary.best_fitness) || best_now > summary.best_fitness)) {
        summary.best_fitness = best_now;
      }

      metrics << st.total_env_steps << ',' << episodes_total << ',' << fmt_g(best_now) << ','
              << fmt_g(mean_fitness(fitness_snapshot)) << ',' << fmt_g(last_eval) << ','
              << (surrogate_used ? 1 : 0) << ',' << fmt_g(elapsed_s()) << '\n';
      metrics.flush();

      json record;
      record["generation"] = gen;
      record["fitness"] = json::array();
      for (double f : fitness_snapshot) {
        if (std::isnan(f)) {
          record["fitness"].push_back(nullptr);
        } else {
          record["fitness"].push_back(f);
        }
      }
      record["kind"] = kind_snapshot;
      record["elite"] = elite_index;
      record["steps"] = t_steps;
      record["pop_steps"] = pop_steps;
      record["rl_steps"] = rl_steps;
      record["eval_steps"] = eval_steps_total;
      record["injected"] = injected;
      genlog << record.dump() << '\n';
      genlog.flush();

      st.generation += 1;
    }
  } catch (const std::exception& e) {
    // Leave a loadable checkpoint behind, then surface the fault.
    try {
      save_checkpoint(st, checkpoint_path);
      summary.wallclock_s = elapsed_s();
      write_summary(std::string("aborted: ") + e.what());
    } catch (...) {
    }
    throw;
  }

  // Final deterministic evaluation, reproducible through `eval` with the
  // run seed and episode count.
  EvalReport final_eval = evaluate_state(st, cfg.eval_episodes, cfg.seed);
  summary.final_eval_mean = final_eval.mean;
  summary.final_eval_std = final_eval.stddev;
  summary.total_env_steps = st.total_env_steps;
  summary.generations = st.generation;
  summary.episodes = episodes_total;
  summary.eval_steps = eval_steps_total;
  summary.wallclock_s = elapsed_s();

  save_checkpoint(st, checkpoint_path);
  write_summary("completed");
  return summary;
}

EvalReport evaluate_state(const TrainState& state, int episodes, std::uint64_t seed) {
  if (episodes < 1) throw std::invalid_argument("evaluate: episodes must be >= 1");
  const PolicyRepresentation* policy = nullptr;
  if (state.w_rl) {
    policy = &*state.w_rl;
  } else if (state.pop) {
    const int best = argmax_fitness(state.pop->fitness);
    if (best >= 0) policy = &state.pop->members[best];
  }
  if (policy == nullptr) {
    throw std::runtime_error("evaluate: checkpoint holds no deployable policy");
  }
  EvalOutcome ev =
      eval_policy(state.z, *policy, state.cfg.env, episodes, Rng(seed).child("final-eval"));
  return EvalReport{ev.mean, ev.stddev, ev.returns};
}

EvalReport evaluate_checkpoint(const std::string& checkpoint_path, int episodes,
                               std::uint64_t seed) {
  return evaluate_state(load_checkpoint(checkpoint_path), episodes, seed);
}

std::vector<std::string> ablation_axes() {
  return {"operators", "surrogate", "sharedrep", "k", "alpha", "p", "h", "beta", "popsize",
          "eaonly"};
}

std::vector<std::string> ablate(const RunConfig& base, const std::string& axis) {
  struct Cell {
    std::string name;
    std::function<void(RunConfig&)> apply;
  };
  std::vector<Cell> cells;

  if (axis == "operators") {
    cells = {{"behavior_cross-behavior_mut", [](RunConfig& c) {
                c.crossover_kind = "behavior";
                c.mutation_kind = "behavior";
              }},
             {"behavior_cross-parameter_mut", [](RunConfig& c) {
                c.crossover_kind = "behavior";
                c.mutation_kind = "parameter";
              }},
             {"parameter_cross-behavior_mut", [](RunConfig& c) {
                c.crossover_kind = "parameter";
                c.mutation_kind = "behavior";
              }},
             {"parameter_cross-parameter_mut", [](RunConfig& c) {
                c.crossover_kind = "parameter";
                c.mutation_kind = "parameter";
              }}};
  } else if (axis == "surrogate") {
    cells = {{"surrogate_on", [](RunConfig&) {}},
             {"surrogate_off", [](RunConfig& c) { c.p = 1.0; }}};
  } else if (axis == "sharedrep") {
    cells = {{"both", [](RunConfig& c) { c.sharedrep_terms = "both"; }},
             {"critic_only", [](RunConfig& c) {
                c.sharedrep_terms = "critic_only";
                c.k = 0;
              }},
             {"pevfa_only", [](RunConfig& c) { c.sharedrep_terms = "pevfa_only"; }}};
  } else if (axis == "k") {
    for (int k : {1, 2, 3, 5}) {
      if (k > base.n) continue;
      cells.push_back({"k" + std::to_string(k), [k](RunConfig& c) { c.k = k; }});
    }
  } else if (axis == "alpha") {
    for (double a : {0.2, 0.5, 0.8, 1.0}) {
      cells.push_back({"alpha" + fmt_g(a), [a](RunConfig& c) { c.alpha = a; }});
    }
  } else if (axis == "p") {
    for (double p : {0.2, 0.5, 0.8, 1.0}) {
      cells.push_back({"p" + fmt_g(p), [p](RunConfig& c) { c.p = p; }});
    }
  } else if (axis == "h") {
    for (int h : {10, 25, 50, 100}) {
      cells.push_back({"h" + std::to_string(h), [h](RunConfig& c) { c.h = h; }});
    }
  } else if (axis == "beta") {
    for (double b : {0.1, 0.2, 0.5, 1.0}) {
      cells.push_back({"beta" + fmt_g(b), [b](RunConfig& c) { c.beta = b; }});
    }
  } else if (axis == "popsize") {
    for (int n : {5, 10}) {
      cells.push_back({"n" + std::to_string(n), [n](RunConfig& c) { c.n = n; }});
    }
  } else if (axis == "eaonly") {
    cells = {{"full", [](RunConfig&) {}},
             {"ea_only", [](RunConfig& c) {
                c.rl_agent = false;
                c.sharedrep_terms = "pevfa_only";
              }}};
  } else {
    throw std::invalid_argument("ablate: unknown axis: " + axis);
  }

  std::vector<std::string> dirs;
  for (const auto& cell : cells) {
    RunConfig cfg = base;
    cell.apply(cfg);
    cfg.out_dir = base.out_dir + "/" + axis + "/" + cell.name;
    train(cfg);
    dirs.push_back(cfg.out_dir);
  }
  return dirs;
}

}  // namespace erl2
