#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "oe/belief.hpp"
#include "oe/explorers.hpp"
#include "oe/mdp.hpp"

namespace oe {

namespace chain {
inline constexpr std::size_t kStates = 5;
inline constexpr Action kForward = 0;  // 'a'
inline constexpr Action kReset = 1;    // 'b'
inline constexpr double kSlip = 0.2;
inline constexpr double kResetReward = 0.2;
inline constexpr double kGoalReward = 1.0;
inline constexpr double kGamma = 0.95;
}  // namespace chain

/// Five-state chain. 'a' advances one state (stays at the last), 'b' returns
/// to the first; with probability 0.2 the other action's effect happens
/// instead. Landing on the first state through a 'b' effect pays 0.2 and the
/// last state's 'a' self-loop pays 1.0. States are 0-based.
TabularMDP chain_mdp();

struct StepOutcome {
    State next;
    double reward;
};

/// Samples s' by inverse CDF over one uniform draw.
StepOutcome env_step(const TabularMDP& mdp, State s, Action a, Rng& rng);

struct TrialOptions {
    std::size_t steps = 1000;
    double gamma = chain::kGamma;
    double tol = 0.1;
    std::size_t max_iter = 100000;
    bool record_trace = false;
    /// Stop updating (s, a) once row_total(s, a) >= 4 theta^2 / (eps (1 - gamma)).
    bool freeze_belief = false;
    double freeze_epsilon = 1.0;
    State start_state = 0;
};

struct TrialResult {
    double cumulative_reward = 0.0;
    std::vector<double> reward_trace;
    std::uint64_t seed = 0;
    std::size_t steps = 0;
};

/// Plan, act, observe, update. Replans from the current belief every step,
/// warm-starting value iteration from the previous values.
class Agent {
public:
    Agent(AlgorithmSpec spec, const TabularMDP& mdp, DirichletBelief prior, const TrialOptions& options,
          std::uint64_t seed);

    /// One time step; returns the environment outcome.
    StepOutcome step();

    State state() const noexcept { return state_; }
    const DirichletBelief& belief() const noexcept { return belief_; }
    const Solution& solution() const noexcept { return solution_; }
    const PlanningProblem& problem() const noexcept { return problem_; }

private:
    double freeze_threshold(State s, Action a) const;

    AlgorithmSpec spec_;
    const TabularMDP& mdp_;
    DirichletBelief belief_;
    TrialOptions options_;
    Rng rng_;
    State state_;
    PlanningProblem problem_;
    ValueIterator planner_;
    Solution solution_;
};

/// Undiscounted reward of one run of `options.steps` steps starting at the
/// start state with belief = prior. Deterministic in (spec, prior, options, seed).
TrialResult run_trial(const AlgorithmSpec& spec, const TabularMDP& mdp, const DirichletBelief& prior,
                      const TrialOptions& options, std::uint64_t seed);

/// Undiscounted reward of a fixed policy on the true model over `steps` steps.
double rollout_policy(const TabularMDP& mdp, std::span<const Action> policy, std::size_t steps, State start,
                      Rng& rng);

}  // namespace oe
