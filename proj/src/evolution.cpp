#include "erl2/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace erl2 {
namespace {

// NaN-aware comparison: unevaluated members never win.
bool fitness_better(double a, double b) {
  if (std::isnan(b)) return !std::isnan(a);
  if (std::isnan(a)) return false;
  return a > b;
}

}  // namespace

Population make_population(int n, int feature_dim, int action_dim, Rng& rng) {
  if (n < 1) throw std::invalid_argument("make_population: n must be >= 1");
  Population pop;
  pop.members.reserve(n);
  for (int i = 0; i < n; ++i) {
    pop.members.push_back(make_policy_representation(feature_dim, action_dim, rng));
  }
  pop.fitness.assign(n, std::numeric_limits<double>::quiet_NaN());
  return pop;
}

SelectionOutcome select(const Population& pop, int e_count, Rng& rng) {
  const int n = pop.size();
  if (n < 3) throw std::invalid_argument("select: population size must be >= 3");
  if (e_count < 1 || e_count >= n) throw std::invalid_argument("select: bad elite count");
  if (static_cast<int>(pop.fitness.size()) != n) {
    throw std::invalid_argument("select: fitness not populated");
  }

  // Rank by fitness, ties broken by lower index.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return fitness_better(pop.fitness[a], pop.fitness[b]);
  });

  SelectionOutcome out;
  out.elites.assign(order.begin(), order.begin() + e_count);
  std::sort(out.elites.begin(), out.elites.end());

  std::vector<int> non_elites;
  for (int i = 0; i < n; ++i) {
    if (std::find(out.elites.begin(), out.elites.end(), i) == out.elites.end()) {
      non_elites.push_back(i);
    }
  }

  std::vector<bool> is_winner(n, false);
  const int tournaments = n - e_count;
  for (int t = 0; t < tournaments; ++t) {
    // Pick 3 distinct contestants when possible.
    std::vector<int> pool = non_elites;
    const int k = std::min<int>(3, static_cast<int>(pool.size()));
    int best = -1;
    for (int j = 0; j < k; ++j) {
      const int pick = rng.uniform_int(static_cast<int>(pool.size()));
      const int idx = pool[pick];
      pool.erase(pool.begin() + pick);
      if (best < 0 || fitness_better(pop.fitness[idx], pop.fitness[best]) ||
          (!fitness_better(pop.fitness[best], pop.fitness[idx]) && idx < best)) {
        best = idx;
      }
    }
    if (best >= 0) is_winner[best] = true;
  }

  for (int idx : non_elites) {
    if (is_winner[idx]) {
      out.winners.push_back(idx);
    } else {
      out.discarders.push_back(idx);
    }
  }
  return out;
}

FitnessEvalResult evaluate_fitness_mc(const SharedRepresentation& z, const PolicyRepresentation& w,
                                      const ActionSpec& spec, Environment& env, int episodes,
                                      Rng& rng) {
  if (episodes < 1) throw std::invalid_argument("evaluate_fitness_mc: episodes must be >= 1");
  FitnessEvalResult result;
  double total = 0.0;
  for (int e = 0; e < episodes; ++e) {
    RolloutResult r = rollout(z, w, spec, env, env.spec().horizon, 0.0, rng);
    total += r.undiscounted_return;
    result.estimate.steps_used += r.steps;
    result.transitions.insert(result.transitions.end(), r.transitions.begin(),
                              r.transitions.end());
  }
  result.estimate.value = total / episodes;
  result.estimate.kind = FitnessKind::MonteCarlo;
  result.estimate.episodes_used = episodes;
  return result;
}

FitnessEvalResult evaluate_fitness_surrogate(const SharedRepresentation& z,
                                             const PolicyRepresentation& w, const ActionSpec& spec,
                                             Environment& env, const PolicyValueFn& value_fn,
                                             int horizon_h, double gamma, Rng& rng) {
  if (horizon_h < 0) throw std::invalid_argument("evaluate_fitness_surrogate: H must be >= 0");
  FitnessEvalResult result;
  result.estimate.kind = FitnessKind::Surrogate;
  result.estimate.episodes_used = 1;

  double discounted = 0.0;
  double discount = 1.0;
  Eigen::VectorXd state;
  bool episode_over = false;
  if (horizon_h == 0) {
    state = env.reset(rng);
  } else {
    RolloutResult r = rollout(z, w, spec, env, horizon_h, 0.0, rng);
    for (const auto& t : r.transitions) {
      discounted += discount * t.reward;
      discount *= gamma;
    }
    result.estimate.steps_used = r.steps;
    result.transitions = std::move(r.transitions);
    episode_over = r.ended;
    if (!episode_over) state = result.transitions.back().next_state;
  }

  if (!episode_over) {
    // discount == gamma^H here (or 1 when H == 0).
    const Eigen::VectorXd bootstrap_action = policy_forward(z, w, spec, state);
    discounted += discount * value_fn.value(state, bootstrap_action, w);
  }
  result.estimate.value = discounted;
  return result;
}

std::vector<CrossTag> sample_crossover_assignment(int action_dim, Rng& rng) {
  std::vector<CrossTag> tags(action_dim);
  for (auto& t : tags) {
    t = rng.bernoulli(0.5) ? CrossTag::ToParent1 : CrossTag::ToParent2;
  }
  return tags;
}

std::pair<PolicyRepresentation, PolicyRepresentation> b_crossover(
    const PolicyRepresentation& parent1, const PolicyRepresentation& parent2,
    const std::vector<CrossTag>& assignment) {
  if (parent1.mat.rows() != parent2.mat.rows() || parent1.mat.cols() != parent2.mat.cols()) {
    throw std::invalid_argument("b_crossover: parent shape mismatch");
  }
  if (static_cast<int>(assignment.size()) != parent1.action_dim()) {
    throw std::invalid_argument("b_crossover: assignment length mismatch");
  }
  PolicyRepresentation child1 = parent1;
  PolicyRepresentation child2 = parent2;
  for (int j = 0; j < parent1.action_dim(); ++j) {
    if (assignment[j] == CrossTag::ToParent1) {
      child1.mat.col(j) = parent2.mat.col(j);
    } else {
      child2.mat.col(j) = parent1.mat.col(j);
    }
  }
  return {std::move(child1), std::move(child2)};
}

PolicyRepresentation b_mutation(const PolicyRepresentation& w, const MutationParams& params,
                                Rng& rng) {
  if (params.select_prob < 0.0 || params.select_prob > 1.0 || params.entry_fraction < 0.0 ||
      params.entry_fraction > 1.0) {
    throw std::invalid_argument("b_mutation: alpha and beta must lie in [0, 1]");
  }
  PolicyRepresentation out = w;
  const int rows = static_cast<int>(w.mat.rows());
  const int entries = static_cast<int>(std::ceil(params.entry_fraction * rows));
  const double reset_bound = policy_init_bound(w.feature_dim());

  for (int j = 0; j < w.action_dim(); ++j) {
    if (!rng.bernoulli(params.select_prob)) continue;
    if (entries == 0) continue;

    // One perturbation kind per selected dimension.
    const double kind_draw = rng.uniform();
    // Uniform subset of the column's entries (partial Fisher-Yates).
    std::vector<int> idx(rows);
    std::iota(idx.begin(), idx.end(), 0);
    for (int t = 0; t < entries; ++t) {
      const int pick = t + rng.uniform_int(rows - t);
      std::swap(idx[t], idx[pick]);
    }

    for (int t = 0; t < entries; ++t) {
      double& entry = out.mat(idx[t], j);
      if (kind_draw < params.small_prob) {
        entry += rng.normal(0.0, params.small_sigma_scale * (1.0 + std::abs(entry)));
      } else if (kind_draw < params.small_prob + params.large_prob) {
        entry += rng.normal(0.0, params.large_sigma);
      } else {
        entry = rng.uniform(-reset_bound, reset_bound);
      }
    }
  }
  return out;
}

PolicyRepresentation param_crossover_at(const PolicyRepresentation& a,
                                        const PolicyRepresentation& b,
                                        const std::vector<int>& cut_points) {
  if (a.mat.rows() != b.mat.rows() || a.mat.cols() != b.mat.cols()) {
    throw std::invalid_argument("param_crossover: architecture mismatch");
  }
  const Eigen::Index total = a.mat.size();
  PolicyRepresentation child = a;
  // Alternate source at each cut over the flattened (column-major) vector.
  bool from_a = true;
  std::size_t cut = 0;
  std::vector<int> cuts = cut_points;
  std::sort(cuts.begin(), cuts.end());
  for (Eigen::Index i = 0; i < total; ++i) {
    while (cut < cuts.size() && cuts[cut] == i) {
      from_a = !from_a;
      ++cut;
    }
    child.mat.data()[i] = from_a ? a.mat.data()[i] : b.mat.data()[i];
  }
  return child;
}

std::pair<PolicyRepresentation, PolicyRepresentation> param_crossover(
    const PolicyRepresentation& a, const PolicyRepresentation& b, int k_points, Rng& rng) {
  const int total = static_cast<int>(a.mat.size());
  std::vector<int> cuts;
  for (int k = 0; k < k_points; ++k) cuts.push_back(1 + rng.uniform_int(total - 1));
  return {param_crossover_at(a, b, cuts), param_crossover_at(b, a, cuts)};
}

PolicyRepresentation param_mutation(const PolicyRepresentation& w, double sigma, Rng& rng) {
  PolicyRepresentation out = w;
  if (sigma == 0.0) return out;
  for (Eigen::Index i = 0; i < out.mat.size(); ++i) {
    out.mat.data()[i] += rng.normal(0.0, sigma);
  }
  return out;
}

void evolve_generation(Population& pop, const SelectionOutcome& outcome,
                       const EvolutionConfig& cfg, Rng& rng) {
  const int n = pop.size();
  std::vector<bool> is_elite(n, false);
  for (int e : outcome.elites) is_elite[e] = true;

  // Crossover phase: refill discarder slots with offspring of cloned
  // (elite, winner) parents, two at a time.
  std::vector<int> pending = outcome.discarders;
  while (!pending.empty()) {
    if (outcome.winners.empty() || outcome.elites.empty()) break;
    const int ei = outcome.elites[rng.uniform_int(static_cast<int>(outcome.elites.size()))];
    const int wi = outcome.winners[rng.uniform_int(static_cast<int>(outcome.winners.size()))];
    PolicyRepresentation p1 = pop.members[ei];
    PolicyRepresentation p2 = pop.members[wi];
    PolicyRepresentation c1, c2;
    if (cfg.crossover_kind == OperatorKind::Behavior) {
      const auto assignment = sample_crossover_assignment(p1.action_dim(), rng);
      std::tie(c1, c2) = b_crossover(p1, p2, assignment);
    } else {
      std::tie(c1, c2) = param_crossover(p1, p2, cfg.param_crossover_points, rng);
    }
    const int slot1 = pending.front();
    pending.erase(pending.begin());
    pop.members[slot1] = std::move(c1);
    pop.fitness[slot1] = std::numeric_limits<double>::quiet_NaN();
    if (!pending.empty()) {
      const int slot2 = pending.front();
      pending.erase(pending.begin());
      pop.members[slot2] = std::move(c2);
      pop.fitness[slot2] = std::numeric_limits<double>::quiet_NaN();
    }
  }

  // Mutation phase over all non-elites.
  for (int i = 0; i < n; ++i) {
    if (is_elite[i]) continue;
    if (!rng.bernoulli(cfg.mutation_gate)) continue;
    if (cfg.mutation_kind == OperatorKind::Behavior) {
      pop.members[i] = b_mutation(pop.members[i], cfg.mutation, rng);
    } else {
      pop.members[i] = param_mutation(pop.members[i], cfg.param_mutation_sigma, rng);
    }
  }

  pop.generation += 1;
}

CemState make_cem_state(const PolicyRepresentation& mean, double sigma_init, int top_count) {
  if (sigma_init <= 0.0) throw std::invalid_argument("make_cem_state: sigma_init must be > 0");
  CemState state;
  state.mean = mean.mat;
  state.variance = Eigen::MatrixXd::Constant(mean.mat.rows(), mean.mat.cols(),
                                             sigma_init * sigma_init);
  state.top_count = top_count;
  return state;
}

Population cem_sample(const CemState& state, int n, Rng& rng) {
  if (state.top_count > n) throw std::invalid_argument("cem_sample: top count exceeds n");
  Population pop;
  pop.members.reserve(n);
  for (int k = 0; k < n; ++k) {
    PolicyRepresentation w;
    w.mat.resize(state.mean.rows(), state.mean.cols());
    for (Eigen::Index i = 0; i < state.mean.rows(); ++i) {
      for (Eigen::Index j = 0; j < state.mean.cols(); ++j) {
        w.mat(i, j) = state.mean(i, j) + std::sqrt(state.variance(i, j)) * rng.normal();
      }
    }
    pop.members.push_back(std::move(w));
  }
  pop.fitness.assign(n, std::numeric_limits<double>::quiet_NaN());
  return pop;
}

void cem_update(CemState& state, const Population& pop) {
  const int n = pop.size();
  if (state.top_count > n) throw std::invalid_argument("cem_update: top count exceeds n");
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return fitness_better(pop.fitness[a], pop.fitness[b]);
  });

  Eigen::MatrixXd new_mean = Eigen::MatrixXd::Zero(state.mean.rows(), state.mean.cols());
  for (int t = 0; t < state.top_count; ++t) {
    new_mean += pop.members[order[t]].mat;
  }
  new_mean /= static_cast<double>(state.top_count);

  Eigen::MatrixXd var = Eigen::MatrixXd::Zero(state.mean.rows(), state.mean.cols());
  for (int t = 0; t < state.top_count; ++t) {
    const Eigen::MatrixXd diff = pop.members[order[t]].mat - new_mean;
    var += diff.cwiseProduct(diff);
  }
  var /= static_cast<double>(state.top_count);
  var.array() += state.variance_floor;

  state.mean = std::move(new_mean);
  state.variance = std::move(var);
}

}  // namespace erl2
