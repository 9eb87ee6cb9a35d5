#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "oe/explorers.hpp"

namespace oe {

DominanceResult check_optimism_dominance(const DirichletBelief& belief, const TabularMDP& mdp,
                                         const AlgorithmSpec& spec, double tol) {
    if (!is_optimistic_transition(spec.kind))
        throw std::invalid_argument("check_optimism_dominance: spec must be POT or BOLT");
    constexpr std::size_t kMaxIter = 100000;

    const PlanningProblem optimistic = build_planning_problem(spec, belief, mdp.rewards(), mdp.gamma());
    AlgorithmSpec mean_spec = spec;
    mean_spec.kind = Algorithm::GreedyMean;
    const PlanningProblem mean = build_planning_problem(mean_spec, belief, mdp.rewards(), mdp.gamma());

    const Solution hi = value_iteration(optimistic, tol, kMaxIter);
    const Solution lo = value_iteration(mean, tol, kMaxIter);

    DominanceResult result;
    result.slack = 2.0 * tol / (1.0 - mdp.gamma());
    result.min_gap = hi.values[0] - lo.values[0];
    for (State s = 1; s < mdp.n_states(); ++s) result.min_gap = std::min(result.min_gap, hi.values[s] - lo.values[s]);
    result.holds = result.min_gap >= -result.slack;
    return result;
}

void sample_dirichlet(std::span<const double> alpha_row, Rng& rng, std::span<double> out) {
    if (out.size() != alpha_row.size()) throw std::invalid_argument("sample_dirichlet: output size");
    // Gamma(a) = Gamma(a + 1) * U^(1/a); take logs and normalize with log-sum-exp.
    double max_log = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < alpha_row.size(); ++i) {
        const double a = alpha_row[i];
        std::gamma_distribution<double> g(a + 1.0, 1.0);
        double u = uniform01(rng);
        while (u == 0.0) u = uniform01(rng);
        out[i] = std::log(g(rng)) + std::log(u) / a;
        max_log = std::max(max_log, out[i]);
    }
    double total = 0.0;
    for (double& x : out) {
        x = std::exp(x - max_log);
        total += x;
    }
    for (double& x : out) x /= total;
}

double z_coverage_estimate(const DirichletBelief& belief, double lambda, std::size_t horizon, std::size_t n_samples,
                           Rng& rng, const CoverageOptions& options) {
    if (n_samples == 0) throw std::invalid_argument("z_coverage_estimate: n_samples must be >= 1");
    if (!(lambda >= 1.0)) throw std::invalid_argument("z_coverage_estimate: lambda must be >= 1");
    const std::size_t n = belief.n_states();
    const double beta = static_cast<double>(horizon) * lambda;

    numvec cap(n);
    for (State j = 0; j < n; ++j) {
        if (options.cap_override) {
            cap[j] = *options.cap_override;
        } else if (options.bound == CoverageBound::PotTheta) {
            cap[j] = pot_theta(belief, options.s, options.a, j, beta, horizon);
        } else {
            cap[j] = z_upper_bound(belief, options.s, options.a, j, lambda, horizon);
        }
    }

    numvec truth(n), cdf(n);
    std::vector<std::size_t> counts(n);
    std::size_t covered = 0;
    for (std::size_t i = 0; i < n_samples; ++i) {
        sample_dirichlet(belief.alpha_row(options.s, options.a), rng, truth);
        std::partial_sum(truth.begin(), truth.end(), cdf.begin());
        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t h = 0; h < horizon; ++h) {
            const double u = uniform01(rng) * cdf.back();
            const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
            ++counts[std::min<std::size_t>(static_cast<std::size_t>(it - cdf.begin()), n - 1)];
        }
        bool ok = true;
        for (State j = 0; j < n; ++j) ok &= static_cast<double>(counts[j]) <= cap[j];
        covered += ok;
    }
    return static_cast<double>(covered) / static_cast<double>(n_samples);
}

}  // namespace oe
