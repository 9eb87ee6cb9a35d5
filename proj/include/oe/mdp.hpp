#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "oe/kernels.hpp"

namespace oe {

using State = std::size_t;
using Action = std::size_t;
using numvec = std::vector<double>;

/// Per-trial random stream. The generator is part of the reproducibility
/// contract and is echoed into every results file.
using Rng = std::mt19937_64;
inline constexpr const char* kRngName = "mt19937_64";

/// Uniform double in [0, 1) from the top 53 bits of one draw.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// Uniform integer in [0, n) by rejection, so results do not depend on the
/// standard library's distribution implementation.
std::size_t uniform_index(Rng& rng, std::size_t n);

/// Raised when value iteration does not reach the tolerance within the
/// iteration budget.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double last_residual, std::size_t iterations)
        : std::runtime_error(what), residual_(last_residual), iterations_(iterations) {}
    double residual() const noexcept { return residual_; }
    std::size_t iterations() const noexcept { return iterations_; }

private:
    double residual_;
    std::size_t iterations_;
};

/// Raised when a backup produces NaN or infinity.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Ground-truth environment. Rewards are conditioned on the realized
/// successor: reward(s, a, s').
class TabularMDP {
public:
    TabularMDP(std::size_t n_states, std::size_t n_actions, numvec transition, numvec reward, double gamma);

    std::size_t n_states() const noexcept { return n_states_; }
    std::size_t n_actions() const noexcept { return n_actions_; }
    double gamma() const noexcept { return gamma_; }
    double r_max() const noexcept { return r_max_; }

    double transition(State s, Action a, State next) const { return transition_[index(s, a, next)]; }
    double reward(State s, Action a, State next) const { return reward_[index(s, a, next)]; }

    std::span<const double> transition_row(State s, Action a) const {
        return {transition_.data() + index(s, a, 0), n_states_};
    }
    std::span<const double> reward_row(State s, Action a) const {
        return {reward_.data() + index(s, a, 0), n_states_};
    }
    /// Full reward tensor, (s, a, s') row-major.
    std::span<const double> rewards() const noexcept { return reward_; }

private:
    std::size_t index(State s, Action a, State next) const { return (s * n_actions_ + a) * n_states_ + next; }

    std::size_t n_states_;
    std::size_t n_actions_;
    numvec transition_;
    numvec reward_;
    double gamma_;
    double r_max_;
};

/// The synthetic MDP handed to the planner.
///
/// Planning actions are indexed 0..n_planning_actions-1 and each maps to one
/// environment action through base_action(k). dist and reward are stored as
/// (s, k, s') row-major. The object is a reusable buffer: builders call
/// reset() and then fill rows, so a trial does not allocate per step.
class PlanningProblem {
public:
    PlanningProblem() = default;
    PlanningProblem(std::size_t n_states, std::size_t n_planning_actions, double gamma);

    void reset(std::size_t n_states, std::size_t n_planning_actions, double gamma);

    std::size_t n_states() const noexcept { return n_states_; }
    std::size_t n_planning_actions() const noexcept { return n_planning_; }
    double gamma() const noexcept { return gamma_; }

    std::span<double> dist(State s, std::size_t k) { return {dist_.data() + row(s, k) * n_states_, n_states_}; }
    std::span<const double> dist(State s, std::size_t k) const {
        return {dist_.data() + row(s, k) * n_states_, n_states_};
    }
    std::span<double> reward(State s, std::size_t k) { return {reward_.data() + row(s, k) * n_states_, n_states_}; }
    std::span<const double> reward(State s, std::size_t k) const {
        return {reward_.data() + row(s, k) * n_states_, n_states_};
    }

    Action base_action(std::size_t k) const { return base_action_[k]; }
    void set_base_action(std::size_t k, Action a) { base_action_[k] = a; }

    /// Throws std::invalid_argument when a row is not a distribution within
    /// 1e-9 or an entry is non-finite.
    void validate() const;

private:
    std::size_t row(State s, std::size_t k) const { return s * n_planning_ + k; }

    std::size_t n_states_ = 0;
    std::size_t n_planning_ = 0;
    double gamma_ = 0.0;
    numvec dist_;
    numvec reward_;
    std::vector<Action> base_action_;
};

struct Solution {
    numvec values;
    /// Planning-action index per state.
    std::vector<std::size_t> policy;
    std::size_t iterations = 0;
    /// max-norm difference of the last two iterates
    double residual = 0.0;
};

/// Jacobi value iteration with max-norm stopping, reusing its scratch space
/// between calls. One instance per trial.
class ValueIterator {
public:
    explicit ValueIterator(const kernels::KernelSet& kernels = kernels::active_kernels());

    /// Iterates from `initial` (empty means all zeros) until the max-norm change
    /// is at most tol. On return `out.values` holds the final iterate and
    /// `out.policy` its greedy policy, first index winning ties.
    ///
    /// Throws ConvergenceError after max_iter sweeps, NumericError on a
    /// non-finite backup, std::invalid_argument on bad arguments.
    void solve(const PlanningProblem& problem, double tol, std::size_t max_iter, std::span<const double> initial,
               Solution& out);

    /// Q-values of the last solved problem under `values`, (s, k) row-major.
    /// Requires a prior solve() on the same problem.
    std::span<const double> backups(std::span<const double> values);

    const kernels::KernelSet& kernels() const noexcept { return *kernels_; }

private:
    void compile(const PlanningProblem& problem);

    const kernels::KernelSet* kernels_;
    std::size_t n_states_ = 0;
    std::size_t n_planning_ = 0;
    double gamma_ = 0.0;
    numvec dist_t_;
    numvec expected_reward_;
    numvec q_;
    numvec current_;
    numvec next_;
};

Solution value_iteration(const PlanningProblem& problem, double tol, std::size_t max_iter);
Solution value_iteration(const PlanningProblem& problem, double tol, std::size_t max_iter,
                         std::span<const double> initial);

/// One-step backups sum_{s'} dist(s,k,s') * (reward(s,k,s') + gamma * values(s')) for every k at s.
numvec state_backups(const PlanningProblem& problem, std::span<const double> values, State s);

inline constexpr double kTieTolerance = 1e-9;

/// Environment action of a maximizing planning action at s. Backups within
/// kTieTolerance of the best are tied and one is chosen uniformly with rng.
Action greedy_action(const Solution& solution, const PlanningProblem& problem, State s, Rng& rng);

/// Same selection over precomputed backups for one state.
std::size_t select_tied_max(std::span<const double> backups, Rng& rng);

/// Fixed-point evaluation of a deterministic policy on the true model.
numvec policy_value(const TabularMDP& mdp, std::span<const Action> policy, double tol, std::size_t max_iter);

}  // namespace oe
