#include "oe/simulation.hpp"

#include <algorithm>
#include <cmath>

namespace oe {

TabularMDP chain_mdp() {
    using namespace chain;
    const std::size_t n = kStates;
    const std::size_t m = 2;
    numvec transition(n * m * n, 0.0);
    numvec reward(n * m * n, 0.0);

    auto at = [&](State s, Action a, State next) -> std::size_t { return (s * m + a) * n + next; };
    auto forward = [&](State s) { return std::min(s + 1, n - 1); };

    for (State s = 0; s < n; ++s) {
        for (Action a = 0; a < m; ++a) {
            const double p_forward = (a == kForward) ? 1.0 - kSlip : kSlip;
            transition[at(s, a, forward(s))] += p_forward;
            transition[at(s, a, 0)] += 1.0 - p_forward;
        }
    }
    // Reward follows the effect: every reset effect lands on state 0 and no
    // forward effect does, so the reward depends only on (s, s').
    for (State s = 0; s < n; ++s) {
        for (Action a = 0; a < m; ++a) {
            reward[at(s, a, 0)] = kResetReward;
            if (s == n - 1) reward[at(s, a, n - 1)] = kGoalReward;
        }
    }
    return TabularMDP(n, m, std::move(transition), std::move(reward), kGamma);
}

StepOutcome env_step(const TabularMDP& mdp, State s, Action a, Rng& rng) {
    if (s >= mdp.n_states() || a >= mdp.n_actions()) throw std::out_of_range("env_step: index out of range");
    const auto row = mdp.transition_row(s, a);
    const double u = uniform01(rng);
    double cdf = 0.0;
    State next = row.size() - 1;
    for (State j = 0; j < row.size(); ++j) {
        cdf += row[j];
        if (u < cdf) {
            next = j;
            break;
        }
    }
    // Rounding can leave cdf slightly below 1; fall back to the last reachable successor.
    if (row[next] == 0.0) {
        for (State j = row.size(); j-- > 0;) {
            if (row[j] > 0.0) {
                next = j;
                break;
            }
        }
    }
    return {next, mdp.reward(s, a, next)};
}

Agent::Agent(AlgorithmSpec spec, const TabularMDP& mdp, DirichletBelief prior, const TrialOptions& options,
             std::uint64_t seed)
    : spec_(spec), mdp_(mdp), belief_(std::move(prior)), options_(options), rng_(seed), state_(options.start_state) {
    spec_.validate();
    if (belief_.n_states() != mdp.n_states() || belief_.n_actions() != mdp.n_actions())
        throw std::invalid_argument("Agent: prior dimensions do not match the environment");
    if (state_ >= mdp.n_states()) throw std::out_of_range("Agent: start state");
}

double Agent::freeze_threshold(State s, Action a) const {
    double theta = static_cast<double>(spec_.horizon);
    if (is_optimistic_transition(spec_.kind)) {
        theta = 0.0;
        for (State t = 0; t < belief_.n_states(); ++t)
            theta = std::max(theta, optimistic_count(spec_, belief_, s, a, t));
    }
    return 4.0 * theta * theta / (options_.freeze_epsilon * (1.0 - options_.gamma));
}

StepOutcome Agent::step() {
    build_planning_problem(spec_, belief_, mdp_.rewards(), options_.gamma, problem_);
    planner_.solve(problem_, options_.tol, options_.max_iter, solution_.values, solution_);

    const std::size_t K = problem_.n_planning_actions();
    const auto q = planner_.backups(solution_.values).subspan(state_ * K, K);
    const Action action = problem_.base_action(select_tied_max(q, rng_));

    const StepOutcome out = env_step(mdp_, state_, action, rng_);
    const bool skip = options_.freeze_belief && belief_.row_total(state_, action) >= freeze_threshold(state_, action);
    if (!skip) belief_.observe(state_, action, out.next);
    state_ = out.next;
    return out;
}

TrialResult run_trial(const AlgorithmSpec& spec, const TabularMDP& mdp, const DirichletBelief& prior,
                      const TrialOptions& options, std::uint64_t seed) {
    if (options.steps == 0) throw std::invalid_argument("run_trial: steps must be >= 1");
    Agent agent(spec, mdp, prior, options, seed);
    TrialResult result;
    result.seed = seed;
    result.steps = options.steps;
    if (options.record_trace) result.reward_trace.reserve(options.steps);
    for (std::size_t t = 0; t < options.steps; ++t) {
        const StepOutcome o = agent.step();
        result.cumulative_reward += o.reward;
        if (options.record_trace) result.reward_trace.push_back(o.reward);
    }
    return result;
}

double rollout_policy(const TabularMDP& mdp, std::span<const Action> policy, std::size_t steps, State start,
                      Rng& rng) {
    if (policy.size() != mdp.n_states()) throw std::invalid_argument("rollout_policy: policy must cover every state");
    State s = start;
    double total = 0.0;
    for (std::size_t t = 0; t < steps; ++t) {
        const StepOutcome o = env_step(mdp, s, policy[s], rng);
        total += o.reward;
        s = o.next;
    }
    return total;
}

}  // namespace oe
