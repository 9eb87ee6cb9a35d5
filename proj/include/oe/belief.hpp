#pragma once

#include <cstddef>
#include <span>

#include "oe/mdp.hpp"

namespace oe {

/// How the per-entry spread term is computed from the Dirichlet marginal.
/// Std is the Beta standard deviation; Variance uses its square. Variance is
/// exposed only for sensitivity experiments.
enum class SigmaMode { Std, Variance };

/// Flat-Dirichlet-Multinomial belief: an independent Dirichlet over the
/// successor distribution of every (s, a).
///
/// Alongside the pseudo-counts it tracks real visit counts per (s, a), which
/// prior-free baselines need.
class DirichletBelief {
public:
    DirichletBelief(std::size_t n_states, std::size_t n_actions, numvec alpha);

    std::size_t n_states() const noexcept { return n_states_; }
    std::size_t n_actions() const noexcept { return n_actions_; }

    double alpha(State s, Action a, State next) const { return alpha_[index(s, a, next)]; }
    std::span<const double> alpha_row(State s, Action a) const {
        return {alpha_.data() + index(s, a, 0), n_states_};
    }
    double row_total(State s, Action a) const { return row_total_[pair(s, a)]; }
    /// Transitions actually observed from (s, a), excluding the prior.
    std::size_t visits(State s, Action a) const { return visits_[pair(s, a)]; }

    bool frozen() const noexcept { return frozen_; }
    void freeze() noexcept { frozen_ = true; }

    /// Adds one observed transition. No-op while frozen.
    void observe(State s, Action a, State next);

    /// alpha(s,a,s') / row_total(s,a)
    double mean(State s, Action a, State next) const { return alpha(s, a, next) / row_total(s, a); }
    void posterior_mean(State s, Action a, std::span<double> out) const;
    numvec posterior_mean(State s, Action a) const;

    /// Marginal Beta standard deviation sqrt(m(1-m)/(row_total+1)).
    double posterior_std(State s, Action a, State next) const;
    double posterior_variance(State s, Action a, State next) const;
    /// posterior_std or posterior_variance depending on mode.
    double spread(State s, Action a, State next, SigmaMode mode) const;

    /// Sum over all entries of alpha; grows by exactly one per observation.
    double total_count() const;

private:
    std::size_t pair(State s, Action a) const {
        check(s, a, 0);
        return s * n_actions_ + a;
    }
    std::size_t index(State s, Action a, State next) const {
        check(s, a, next);
        return (s * n_actions_ + a) * n_states_ + next;
    }
    void check(State s, Action a, State next) const {
        if (s >= n_states_ || a >= n_actions_ || next >= n_states_)
            throw std::out_of_range("DirichletBelief: index out of range");
    }

    std::size_t n_states_;
    std::size_t n_actions_;
    numvec alpha_;
    numvec row_total_;
    std::vector<std::size_t> visits_;
    bool frozen_ = false;
};

/// alpha(s,a,s') = alpha0 everywhere. A large alpha0 is the misspecified-prior regime.
DirichletBelief make_uniform_prior(std::size_t n_states, std::size_t n_actions, double alpha0);

/// alpha(s,a,s') = alpha0 + weight * P(s'|s,a): the uniform prior updated with
/// `weight` ideal observations distributed as the true model.
DirichletBelief make_informative_prior(const TabularMDP& mdp, double alpha0, double weight);

}  // namespace oe
