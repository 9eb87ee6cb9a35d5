#include "oe/belief.hpp"

#include <cmath>
#include <numeric>

namespace oe {

DirichletBelief::DirichletBelief(std::size_t n_states, std::size_t n_actions, numvec alpha)
    : n_states_(n_states), n_actions_(n_actions), alpha_(std::move(alpha)) {
    if (n_states == 0 || n_actions == 0) throw std::invalid_argument("DirichletBelief: empty dimensions");
    if (alpha_.size() != n_states * n_actions * n_states)
        throw std::invalid_argument("DirichletBelief: alpha size does not match dimensions");
    for (double a : alpha_) {
        if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("DirichletBelief: alpha entries must be > 0");
    }
    row_total_.resize(n_states * n_actions);
    visits_.assign(n_states * n_actions, 0);
    for (std::size_t r = 0; r < row_total_.size(); ++r) {
        const auto first = alpha_.begin() + static_cast<std::ptrdiff_t>(r * n_states);
        row_total_[r] = std::accumulate(first, first + static_cast<std::ptrdiff_t>(n_states), 0.0);
    }
}

void DirichletBelief::observe(State s, Action a, State next) {
    const std::size_t i = index(s, a, next);
    if (frozen_) return;
    alpha_[i] += 1.0;
    row_total_[pair(s, a)] += 1.0;
    visits_[pair(s, a)] += 1;
}

void DirichletBelief::posterior_mean(State s, Action a, std::span<double> out) const {
    if (out.size() != n_states_) throw std::invalid_argument("posterior_mean: output size");
    const auto row = alpha_row(s, a);
    const double total = row_total(s, a);
    for (std::size_t j = 0; j < n_states_; ++j) out[j] = row[j] / total;
}

numvec DirichletBelief::posterior_mean(State s, Action a) const {
    numvec out(n_states_);
    posterior_mean(s, a, out);
    return out;
}

double DirichletBelief::posterior_variance(State s, Action a, State next) const {
    const double m = mean(s, a, next);
    return m * (1.0 - m) / (row_total(s, a) + 1.0);
}

double DirichletBelief::posterior_std(State s, Action a, State next) const {
    return std::sqrt(posterior_variance(s, a, next));
}

double DirichletBelief::spread(State s, Action a, State next, SigmaMode mode) const {
    return mode == SigmaMode::Std ? posterior_std(s, a, next) : posterior_variance(s, a, next);
}

double DirichletBelief::total_count() const { return std::accumulate(row_total_.begin(), row_total_.end(), 0.0); }

DirichletBelief make_uniform_prior(std::size_t n_states, std::size_t n_actions, double alpha0) {
    if (!(alpha0 > 0.0)) throw std::invalid_argument("make_uniform_prior: alpha0 must be > 0");
    return DirichletBelief(n_states, n_actions, numvec(n_states * n_actions * n_states, alpha0));
}

DirichletBelief make_informative_prior(const TabularMDP& mdp, double alpha0, double weight) {
    if (!(alpha0 > 0.0)) throw std::invalid_argument("make_informative_prior: alpha0 must be > 0");
    if (!(weight >= 0.0)) throw std::invalid_argument("make_informative_prior: weight must be >= 0");
    const std::size_t n = mdp.n_states();
    const std::size_t m = mdp.n_actions();
    numvec alpha(n * m * n);
    for (State s = 0; s < n; ++s)
        for (Action a = 0; a < m; ++a)
            for (State j = 0; j < n; ++j) alpha[(s * m + a) * n + j] = alpha0 + weight * mdp.transition(s, a, j);
    return DirichletBelief(n, m, std::move(alpha));
}

}  // namespace oe
