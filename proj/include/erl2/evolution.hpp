#pragma once

#include <Eigen/Core>
#include <utility>
#include <vector>

#include "erl2/environments.hpp"
#include "erl2/policy.hpp"
#include "erl2/rng.hpp"
#include "erl2/value_functions.hpp"

namespace erl2 {

enum class FitnessKind { MonteCarlo, Surrogate };

struct FitnessEstimate {
  double value = 0.0;
  FitnessKind kind = FitnessKind::MonteCarlo;
  int episodes_used = 0;
  long steps_used = 0;
};

struct Population {
  std::vector<PolicyRepresentation> members;
  std::vector<double> fitness;  // latest estimate per member (NaN = unevaluated)
  long generation = 0;

  int size() const { return static_cast<int>(members.size()); }
};

Population make_population(int n, int feature_dim, int action_dim, Rng& rng);

struct SelectionOutcome {
  std::vector<int> elites;
  std::vector<int> winners;
  std::vector<int> discarders;
};

// Top e_count by fitness become elites (ties to the lower index). Winners
// come from repeated 3-way tournaments among non-elites, deduplicated;
// everyone else is a discarder.
SelectionOutcome select(const Population& pop, int e_count, Rng& rng);

struct FitnessEvalResult {
  FitnessEstimate estimate;
  std::vector<Transition> transitions;
};

// Mean undiscounted return over full episodes.
FitnessEvalResult evaluate_fitness_mc(const SharedRepresentation& z, const PolicyRepresentation& w,
                                      const ActionSpec& spec, Environment& env, int episodes,
                                      Rng& rng);

// H-step discounted prefix from a fresh reset plus a bootstrap value at
// s_H when the episode is still running there.
FitnessEvalResult evaluate_fitness_surrogate(const SharedRepresentation& z,
                                             const PolicyRepresentation& w, const ActionSpec& spec,
                                             Environment& env, const PolicyValueFn& value_fn,
                                             int horizon_h, double gamma, Rng& rng);

enum class CrossTag { ToParent1, ToParent2 };

std::vector<CrossTag> sample_crossover_assignment(int action_dim, Rng& rng);

// Behavior-level crossover: per action dimension, ToParent1 copies parent
// 2's column into child 1 (child 2 keeps its own), and symmetrically for
// ToParent2. Parents are untouched; children start as copies.
std::pair<PolicyRepresentation, PolicyRepresentation> b_crossover(
    const PolicyRepresentation& parent1, const PolicyRepresentation& parent2,
    const std::vector<CrossTag>& assignment);

struct MutationParams {
  double select_prob = 1.0;      // alpha: per-dimension selection probability
  double entry_fraction = 0.2;   // beta: fraction of a column's entries perturbed
  double small_prob = 0.90;
  double large_prob = 0.05;      // remaining 0.05 resets to init range
  double small_sigma_scale = 0.05;  // sigma_small = scale * (1 + |entry|)
  double large_sigma = 0.5;
};

PolicyRepresentation b_mutation(const PolicyRepresentation& w, const MutationParams& params,
                                Rng& rng);

// Parameter-level baselines over the flattened (column-major) matrix.
PolicyRepresentation param_crossover_at(const PolicyRepresentation& a,
                                        const PolicyRepresentation& b,
                                        const std::vector<int>& cut_points);
std::pair<PolicyRepresentation, PolicyRepresentation> param_crossover(
    const PolicyRepresentation& a, const PolicyRepresentation& b, int k_points, Rng& rng);
PolicyRepresentation param_mutation(const PolicyRepresentation& w, double sigma, Rng& rng);

enum class OperatorKind { Behavior, Parameter };

struct EvolutionConfig {
  int e_count = 1;
  MutationParams mutation;
  OperatorKind crossover_kind = OperatorKind::Behavior;
  OperatorKind mutation_kind = OperatorKind::Behavior;
  double mutation_gate = 0.9;   // per non-elite member
  int param_crossover_points = 1;
  double param_mutation_sigma = 0.1;
};

// One generation: discarders replaced by crossover offspring of cloned
// (elite, winner) pairs, then every non-elite may mutate. Elites are
// preserved bitwise.
void evolve_generation(Population& pop, const SelectionOutcome& outcome,
                       const EvolutionConfig& cfg, Rng& rng);

struct CemState {
  Eigen::MatrixXd mean;      // (d+1) x |A|
  Eigen::MatrixXd variance;  // per-entry, same shape
  int top_count = 2;
  double variance_floor = 1e-6;
};

CemState make_cem_state(const PolicyRepresentation& mean, double sigma_init, int top_count);

Population cem_sample(const CemState& state, int n, Rng& rng);

// Mean <- average of the top-T members by fitness; variance <- per-entry
// spread of those members about the new mean, floored.
void cem_update(CemState& state, const Population& pop);

}  // namespace erl2
