#pragma once

// Exploration strategies compiled into planning problems.
//
// Two families. Bonus algorithms (BEB, MBIE-EB, VBRB) keep the posterior-mean
// transitions and add a per-(s, a) bonus to every reward. Optimistic-transition
// algorithms (POT, BOLT) keep the rewards and enlarge the action set to pairs
// (a, s~): the planner may pick the successor s~ toward which the posterior is
// shifted by a number of artificial observations. BOLT shifts by a fixed eta;
// POT shifts by theta, which shrinks as the posterior concentrates.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "oe/belief.hpp"
#include "oe/mdp.hpp"

namespace oe {

enum class Algorithm { Pot, Bolt, Beb, MbieEb, Vbrb, GreedyMean };

/// Where POT's artificial-observation count comes from.
///  Posterior: beta * (m + sigma + 1/sqrt(2 beta)), capped at H (default).
///  OccurrenceBound: the high-probability occurrence bound with lambda = param,
///  capped at H.
enum class ThetaSource { Posterior, OccurrenceBound };

struct AlgorithmSpec {
    Algorithm kind = Algorithm::Pot;
    /// beta for POT/BEB/MBIE-EB, eta for BOLT, beta_p for VBRB; ignored by GREEDY-MEAN.
    double param = 0.0;
    std::size_t horizon = 20;
    ThetaSource theta_source = ThetaSource::Posterior;
    SigmaMode sigma_mode = SigmaMode::Std;

    /// Throws std::invalid_argument on a negative parameter or zero horizon.
    void validate() const;
};

std::string_view to_string(Algorithm kind);
/// Accepts pot, bolt, beb, mbie-eb, vbrb, greedy (case-insensitive).
std::optional<Algorithm> parse_algorithm(std::string_view name);

bool is_optimistic_transition(Algorithm kind);
bool is_bonus(Algorithm kind);

/// min(beta * (m + sigma + 1/sqrt(2 beta)), H) for entry (s, a, s_tilde).
double pot_theta(const DirichletBelief& belief, State s, Action a, State s_tilde, double beta, std::size_t horizon,
                 SigmaMode mode = SigmaMode::Std);

/// H * (m + lambda * sigma + sqrt(ln(lambda^2) / (2H))): the most times the
/// transition (s, a, s') plausibly occurs within H steps. Requires lambda >= 1.
double z_upper_bound(const DirichletBelief& belief, State s, Action a, State next, double lambda,
                     std::size_t horizon, SigmaMode mode = SigmaMode::Std);

/// Theta for the algorithm's kind and theta source.
double optimistic_count(const AlgorithmSpec& spec, const DirichletBelief& belief, State s, Action a, State s_tilde);

/// (alpha(s,a,.) + count * e_{s_tilde}) / (row_total(s,a) + count).
/// Shared by POT (count = theta) and BOLT (count = eta).
void shifted_distribution(const DirichletBelief& belief, State s, Action a, State s_tilde, double count,
                          std::span<double> out);

numvec pot_distribution(const DirichletBelief& belief, State s, Action a, State s_tilde, double beta,
                        std::size_t horizon, SigmaMode mode = SigmaMode::Std);
numvec bolt_distribution(const DirichletBelief& belief, State s, Action a, State s_tilde, double eta);

/// BEB: beta / (1 + row_total). MBIE-EB: beta / sqrt(max(visits, 1)).
/// VBRB: beta_p * sqrt(sum_{s'} variance(s,a,s')). Other kinds throw.
double exploration_bonus(const AlgorithmSpec& spec, const DirichletBelief& belief, State s, Action a);

/// Fills `out` with the algorithm's planning problem. `rewards` is the known
/// (s, a, s') reward tensor.
void build_planning_problem(const AlgorithmSpec& spec, const DirichletBelief& belief, std::span<const double> rewards,
                            double gamma, PlanningProblem& out);
PlanningProblem build_planning_problem(const AlgorithmSpec& spec, const DirichletBelief& belief,
                                       std::span<const double> rewards, double gamma);

// ---------------------------------------------------------------------------
// Empirical checks of the optimism guarantees.

struct DominanceResult {
    bool holds = false;
    /// min over states of V_optimistic(s) - V_mean(s)
    double min_gap = 0.0;
    double slack = 0.0;
};

/// Solves the optimistic problem and the posterior-mean problem to tol and
/// reports whether the optimistic values dominate everywhere within
/// 2 tol / (1 - gamma). The posterior-mean value stands in for the
/// uncomputable Bayes-optimal value. spec.kind must be POT or BOLT.
DominanceResult check_optimism_dominance(const DirichletBelief& belief, const TabularMDP& mdp,
                                         const AlgorithmSpec& spec, double tol);

/// Which count cap the coverage estimate compares against.
enum class CoverageBound { PotTheta, OccurrenceBound };

struct CoverageOptions {
    State s = 0;
    Action a = 0;
    CoverageBound bound = CoverageBound::PotTheta;
    /// Replaces the computed cap for every successor when set.
    std::optional<double> cap_override;
};

/// Monte Carlo estimate of how often a true successor distribution drawn from
/// the posterior of (s, a) keeps every successor's count over H draws at or
/// below the cap (theta with beta = H * lambda, or the occurrence bound).
double z_coverage_estimate(const DirichletBelief& belief, double lambda, std::size_t horizon, std::size_t n_samples,
                           Rng& rng, const CoverageOptions& options = {});

/// Draws one successor distribution from Dirichlet(alpha_row). Works in log
/// space so shape parameters far below 1 do not underflow.
void sample_dirichlet(std::span<const double> alpha_row, Rng& rng, std::span<double> out);

}  // namespace oe
