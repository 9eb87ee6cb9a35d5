#include "oe/mdp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace oe {

std::size_t uniform_index(Rng& rng, std::size_t n) {
    if (n == 0) throw std::invalid_argument("uniform_index: empty range");
    const std::uint64_t bound = n;
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return static_cast<std::size_t>(x % bound);
}

// ---------------------------------------------------------------------------
// TabularMDP

TabularMDP::TabularMDP(std::size_t n_states, std::size_t n_actions, numvec transition, numvec reward, double gamma)
    : n_states_(n_states), n_actions_(n_actions), transition_(std::move(transition)), reward_(std::move(reward)),
      gamma_(gamma), r_max_(0.0) {
    if (n_states == 0 || n_actions == 0) throw std::invalid_argument("TabularMDP: empty state or action set");
    const std::size_t size = n_states * n_actions * n_states;
    if (transition_.size() != size || reward_.size() != size)
        throw std::invalid_argument("TabularMDP: tensor size does not match dimensions");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("TabularMDP: gamma must be in [0, 1)");

    for (std::size_t row = 0; row < n_states * n_actions; ++row) {
        double sum = 0.0;
        for (std::size_t j = 0; j < n_states; ++j) {
            const double p = transition_[row * n_states + j];
            if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("TabularMDP: transition entry outside [0, 1]");
            sum += p;
        }
        if (std::fabs(sum - 1.0) > 1e-9) throw std::invalid_argument("TabularMDP: transition row does not sum to 1");
    }
    for (double r : reward_) {
        if (!(r >= 0.0) || !std::isfinite(r)) throw std::invalid_argument("TabularMDP: rewards must be finite and >= 0");
        r_max_ = std::max(r_max_, r);
    }
    // r_max must be positive; an all-zero reward model still gets a nominal bound
    if (r_max_ == 0.0) r_max_ = 1.0;
}

// ---------------------------------------------------------------------------
// PlanningProblem

PlanningProblem::PlanningProblem(std::size_t n_states, std::size_t n_planning_actions, double gamma) {
    reset(n_states, n_planning_actions, gamma);
}

void PlanningProblem::reset(std::size_t n_states, std::size_t n_planning_actions, double gamma) {
    if (n_states == 0 || n_planning_actions == 0) throw std::invalid_argument("PlanningProblem: empty dimensions");
    if (!(gamma >= 0.0 && gamma < 1.0)) throw std::invalid_argument("PlanningProblem: gamma must be in [0, 1)");
    n_states_ = n_states;
    n_planning_ = n_planning_actions;
    gamma_ = gamma;
    const std::size_t size = n_states * n_planning_actions * n_states;
    dist_.assign(size, 0.0);
    reward_.assign(size, 0.0);
    base_action_.assign(n_planning_actions, 0);
}

void PlanningProblem::validate() const {
    for (State s = 0; s < n_states_; ++s) {
        for (std::size_t k = 0; k < n_planning_; ++k) {
            double sum = 0.0;
            for (double p : dist(s, k)) {
                if (!(p >= 0.0 && p <= 1.0 + 1e-12)) throw std::invalid_argument("PlanningProblem: entry outside [0, 1]");
                sum += p;
            }
            if (std::fabs(sum - 1.0) > 1e-9) {
                std::ostringstream msg;
                msg << "PlanningProblem: dist(" << s << ", " << k << ") sums to " << sum;
                throw std::invalid_argument(msg.str());
            }
            for (double r : reward(s, k)) {
                if (!std::isfinite(r)) throw std::invalid_argument("PlanningProblem: non-finite reward");
            }
        }
    }
}

// ---------------------------------------------------------------------------
// Value iteration

ValueIterator::ValueIterator(const kernels::KernelSet& kernels) : kernels_(&kernels) {}

void ValueIterator::compile(const PlanningProblem& problem) {
    n_states_ = problem.n_states();
    n_planning_ = problem.n_planning_actions();
    gamma_ = problem.gamma();
    const std::size_t rows = n_states_ * n_planning_;
    dist_t_.resize(rows * n_states_);
    expected_reward_.resize(rows);
    q_.resize(rows);

    for (State s = 0; s < n_states_; ++s) {
        for (std::size_t k = 0; k < n_planning_; ++k) {
            const std::size_t r = s * n_planning_ + k;
            const auto d = problem.dist(s, k);
            const auto rw = problem.reward(s, k);
            double er = 0.0;
            for (std::size_t j = 0; j < n_states_; ++j) {
                dist_t_[j * rows + r] = d[j];
                er += d[j] * rw[j];
            }
            expected_reward_[r] = er;
        }
    }
}

std::span<const double> ValueIterator::backups(std::span<const double> values) {
    kernels_->backup(dist_t_, expected_reward_, values, gamma_, q_);
    return q_;
}

void ValueIterator::solve(const PlanningProblem& problem, double tol, std::size_t max_iter,
                          std::span<const double> initial, Solution& out) {
    if (!(tol > 0.0)) throw std::invalid_argument("value_iteration: tol must be > 0");
    if (max_iter == 0) throw std::invalid_argument("value_iteration: max_iter must be positive");
    if (!initial.empty() && initial.size() != problem.n_states())
        throw std::invalid_argument("value_iteration: initial values have the wrong size");

    compile(problem);
    const std::size_t n = n_states_;
    const std::size_t K = n_planning_;

    current_.resize(n);
    next_.resize(n);
    if (initial.empty()) {
        std::fill(current_.begin(), current_.end(), 0.0);
    } else {
        std::copy(initial.begin(), initial.end(), current_.begin());
    }

    double residual = std::numeric_limits<double>::infinity();
    std::size_t it = 0;
    while (it < max_iter) {
        kernels_->backup(dist_t_, expected_reward_, current_, gamma_, q_);
        ++it;
        for (State s = 0; s < n; ++s) {
            const double* qs = q_.data() + s * K;
            next_[s] = *std::max_element(qs, qs + K);
        }
        residual = kernels_->max_abs_diff(next_, current_);
        if (!std::isfinite(residual)) {
            std::ostringstream msg;
            msg << "value_iteration: non-finite backup at sweep " << it;
            throw NumericError(msg.str());
        }
        current_.swap(next_);
        if (residual <= tol) break;
    }
    if (residual > tol) {
        std::ostringstream msg;
        msg << "value_iteration: no convergence after " << max_iter << " sweeps (residual " << residual << ")";
        throw ConvergenceError(msg.str(), residual, it);
    }

    // Greedy policy with respect to the returned values, not the previous iterate.
    kernels_->backup(dist_t_, expected_reward_, current_, gamma_, q_);
    out.values.assign(current_.begin(), current_.end());
    out.policy.resize(n);
    for (State s = 0; s < n; ++s) {
        const double* qs = q_.data() + s * K;
        out.policy[s] = static_cast<std::size_t>(std::max_element(qs, qs + K) - qs);
    }
    out.iterations = it;
    out.residual = residual;
}

Solution value_iteration(const PlanningProblem& problem, double tol, std::size_t max_iter) {
    return value_iteration(problem, tol, max_iter, {});
}

Solution value_iteration(const PlanningProblem& problem, double tol, std::size_t max_iter,
                         std::span<const double> initial) {
    problem.validate();
    ValueIterator vi;
    Solution out;
    vi.solve(problem, tol, max_iter, initial, out);
    return out;
}

numvec state_backups(const PlanningProblem& problem, std::span<const double> values, State s) {
    if (s >= problem.n_states()) throw std::out_of_range("state_backups: state index");
    if (values.size() != problem.n_states()) throw std::invalid_argument("state_backups: values size");
    numvec out(problem.n_planning_actions());
    for (std::size_t k = 0; k < out.size(); ++k) {
        const auto d = problem.dist(s, k);
        const auto r = problem.reward(s, k);
        double acc = 0.0;
        for (std::size_t j = 0; j < d.size(); ++j) acc += d[j] * (r[j] + problem.gamma() * values[j]);
        out[k] = acc;
    }
    return out;
}

std::size_t select_tied_max(std::span<const double> backups, Rng& rng) {
    if (backups.empty()) throw std::invalid_argument("select_tied_max: no actions");
    const double best = *std::max_element(backups.begin(), backups.end());
    std::size_t ties = 0;
    for (double b : backups) ties += (b >= best - kTieTolerance);
    if (ties == 1) return static_cast<std::size_t>(std::max_element(backups.begin(), backups.end()) - backups.begin());
    std::size_t pick = uniform_index(rng, ties);
    for (std::size_t k = 0; k < backups.size(); ++k) {
        if (backups[k] >= best - kTieTolerance && pick-- == 0) return k;
    }
    return 0;  // unreachable
}

Action greedy_action(const Solution& solution, const PlanningProblem& problem, State s, Rng& rng) {
    const numvec b = state_backups(problem, solution.values, s);
    return problem.base_action(select_tied_max(b, rng));
}

numvec policy_value(const TabularMDP& mdp, std::span<const Action> policy, double tol, std::size_t max_iter) {
    const std::size_t n = mdp.n_states();
    if (policy.size() != n) throw std::invalid_argument("policy_value: policy must cover every state");
    if (!(tol > 0.0)) throw std::invalid_argument("policy_value: tol must be > 0");
    for (Action a : policy) {
        if (a >= mdp.n_actions()) throw std::out_of_range("policy_value: action index");
    }

    numvec v(n, 0.0), next(n, 0.0), expected(n, 0.0);
    for (State s = 0; s < n; ++s) {
        const auto p = mdp.transition_row(s, policy[s]);
        const auto r = mdp.reward_row(s, policy[s]);
        for (std::size_t j = 0; j < n; ++j) expected[s] += p[j] * r[j];
    }
    double residual = std::numeric_limits<double>::infinity();
    for (std::size_t it = 0; it < max_iter; ++it) {
        for (State s = 0; s < n; ++s) {
            const auto p = mdp.transition_row(s, policy[s]);
            double acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) acc += p[j] * v[j];
            next[s] = expected[s] + mdp.gamma() * acc;
        }
        residual = kernels::scalar::max_abs_diff(next, v);
        v.swap(next);
        if (!std::isfinite(residual)) throw NumericError("policy_value: non-finite backup");
        if (residual <= tol) return v;
    }
    throw ConvergenceError("policy_value: no convergence", residual, max_iter);
}

}  // namespace oe
