#include "oe/explorers.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

namespace oe {

void AlgorithmSpec::validate() const {
    if (!(param >= 0.0) || !std::isfinite(param)) throw std::invalid_argument("AlgorithmSpec: param must be >= 0");
    if (horizon == 0) throw std::invalid_argument("AlgorithmSpec: horizon must be >= 1");
    if (kind == Algorithm::Pot) {
        if (theta_source == ThetaSource::Posterior && !(param > 0.0))
            throw std::invalid_argument("AlgorithmSpec: POT beta must be > 0");
        if (theta_source == ThetaSource::OccurrenceBound && !(param >= 1.0))
            throw std::invalid_argument("AlgorithmSpec: POT lambda must be >= 1 with the occurrence-bound theta");
    }
}

std::string_view to_string(Algorithm kind) {
    switch (kind) {
    case Algorithm::Pot: return "POT";
    case Algorithm::Bolt: return "BOLT";
    case Algorithm::Beb: return "BEB";
    case Algorithm::MbieEb: return "MBIE-EB";
    case Algorithm::Vbrb: return "VBRB";
    case Algorithm::GreedyMean: return "GREEDY-MEAN";
    }
    return "?";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "pot") return Algorithm::Pot;
    if (lower == "bolt") return Algorithm::Bolt;
    if (lower == "beb") return Algorithm::Beb;
    if (lower == "mbie-eb" || lower == "mbie") return Algorithm::MbieEb;
    if (lower == "vbrb") return Algorithm::Vbrb;
    if (lower == "greedy" || lower == "greedy-mean") return Algorithm::GreedyMean;
    return std::nullopt;
}

bool is_optimistic_transition(Algorithm kind) { return kind == Algorithm::Pot || kind == Algorithm::Bolt; }

bool is_bonus(Algorithm kind) {
    return kind == Algorithm::Beb || kind == Algorithm::MbieEb || kind == Algorithm::Vbrb;
}

double pot_theta(const DirichletBelief& belief, State s, Action a, State s_tilde, double beta, std::size_t horizon,
                 SigmaMode mode) {
    if (!(beta > 0.0)) throw std::invalid_argument("pot_theta: beta must be > 0");
    const double m = belief.mean(s, a, s_tilde);
    const double sigma = belief.spread(s, a, s_tilde, mode);
    const double theta = beta * (m + sigma + 1.0 / std::sqrt(2.0 * beta));
    return std::min(theta, static_cast<double>(horizon));
}

double z_upper_bound(const DirichletBelief& belief, State s, Action a, State next, double lambda,
                     std::size_t horizon, SigmaMode mode) {
    if (!(lambda >= 1.0)) throw std::invalid_argument("z_upper_bound: lambda must be >= 1");
    const double h = static_cast<double>(horizon);
    const double m = belief.mean(s, a, next);
    const double sigma = belief.spread(s, a, next, mode);
    return h * (m + lambda * sigma + std::sqrt(std::log(lambda * lambda) / (2.0 * h)));
}

double optimistic_count(const AlgorithmSpec& spec, const DirichletBelief& belief, State s, Action a, State s_tilde) {
    switch (spec.kind) {
    case Algorithm::Bolt: return spec.param;
    case Algorithm::Pot:
        if (spec.theta_source == ThetaSource::OccurrenceBound) {
            return std::min(z_upper_bound(belief, s, a, s_tilde, spec.param, spec.horizon, spec.sigma_mode),
                            static_cast<double>(spec.horizon));
        }
        return pot_theta(belief, s, a, s_tilde, spec.param, spec.horizon, spec.sigma_mode);
    default: throw std::invalid_argument("optimistic_count: not an optimistic-transition algorithm");
    }
}

void shifted_distribution(const DirichletBelief& belief, State s, Action a, State s_tilde, double count,
                          std::span<double> out) {
    if (!(count >= 0.0)) throw std::invalid_argument("shifted_distribution: count must be >= 0");
    if (out.size() != belief.n_states()) throw std::invalid_argument("shifted_distribution: output size");
    const auto row = belief.alpha_row(s, a);
    const double denom = belief.row_total(s, a) + count;
    for (std::size_t j = 0; j < row.size(); ++j) out[j] = row[j] / denom;
    out[s_tilde] = (row[s_tilde] + count) / denom;
}

numvec pot_distribution(const DirichletBelief& belief, State s, Action a, State s_tilde, double beta,
                        std::size_t horizon, SigmaMode mode) {
    numvec out(belief.n_states());
    shifted_distribution(belief, s, a, s_tilde, pot_theta(belief, s, a, s_tilde, beta, horizon, mode), out);
    return out;
}

numvec bolt_distribution(const DirichletBelief& belief, State s, Action a, State s_tilde, double eta) {
    if (!(eta >= 0.0)) throw std::invalid_argument("bolt_distribution: eta must be >= 0");
    numvec out(belief.n_states());
    shifted_distribution(belief, s, a, s_tilde, eta, out);
    return out;
}

double exploration_bonus(const AlgorithmSpec& spec, const DirichletBelief& belief, State s, Action a) {
    switch (spec.kind) {
    case Algorithm::Beb: return spec.param / (1.0 + belief.row_total(s, a));
    case Algorithm::MbieEb: {
        const auto n = std::max<std::size_t>(belief.visits(s, a), 1);
        return spec.param / std::sqrt(static_cast<double>(n));
    }
    case Algorithm::Vbrb: {
        double var = 0.0;
        for (State j = 0; j < belief.n_states(); ++j) var += belief.posterior_variance(s, a, j);
        return spec.param * std::sqrt(var);
    }
    default: throw std::invalid_argument("exploration_bonus: not a bonus algorithm");
    }
}

void build_planning_problem(const AlgorithmSpec& spec, const DirichletBelief& belief, std::span<const double> rewards,
                            double gamma, PlanningProblem& out) {
    const std::size_t n = belief.n_states();
    const std::size_t m = belief.n_actions();
    if (rewards.size() != n * m * n) throw std::invalid_argument("build_planning_problem: reward tensor dimension mismatch");

    auto reward_row = [&](State s, Action a) { return rewards.subspan((s * m + a) * n, n); };

    if (is_optimistic_transition(spec.kind)) {
        out.reset(n, m * n, gamma);
        for (Action a = 0; a < m; ++a) {
            for (State t = 0; t < n; ++t) out.set_base_action(a * n + t, a);
        }
        for (State s = 0; s < n; ++s) {
            for (Action a = 0; a < m; ++a) {
                const auto r = reward_row(s, a);
                for (State t = 0; t < n; ++t) {
                    const std::size_t k = a * n + t;
                    shifted_distribution(belief, s, a, t, optimistic_count(spec, belief, s, a, t), out.dist(s, k));
                    std::copy(r.begin(), r.end(), out.reward(s, k).begin());
                }
            }
        }
        return;
    }

    out.reset(n, m, gamma);
    for (Action a = 0; a < m; ++a) out.set_base_action(a, a);
    for (State s = 0; s < n; ++s) {
        for (Action a = 0; a < m; ++a) {
            belief.posterior_mean(s, a, out.dist(s, a));
            const double bonus = is_bonus(spec.kind) ? exploration_bonus(spec, belief, s, a) : 0.0;
            const auto r = reward_row(s, a);
            auto dst = out.reward(s, a);
            for (State j = 0; j < n; ++j) dst[j] = r[j] + bonus;
        }
    }
}

PlanningProblem build_planning_problem(const AlgorithmSpec& spec, const DirichletBelief& belief,
                                       std::span<const double> rewards, double gamma) {
    PlanningProblem out;
    build_planning_problem(spec, belief, rewards, gamma, out);
    return out;
}

}  // namespace oe
