#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "oe/explorers.hpp"
#include "oe/simulation.hpp"

using namespace oe;

namespace {

const DirichletBelief& prior() {
    static const DirichletBelief b = make_uniform_prior(5, 2, 0.02);
    return b;
}

AlgorithmSpec spec_of(Algorithm kind, double param) {
    AlgorithmSpec s;
    s.kind = kind;
    s.param = param;
    return s;
}

DirichletBelief random_belief(Rng& rng) {
    numvec alpha(5 * 2 * 5);
    // log-uniform on [0.01, 100]
    for (double& a : alpha) a = std::exp(std::log(0.01) + uniform01(rng) * (std::log(100.0) - std::log(0.01)));
    return DirichletBelief(5, 2, alpha);
}

// Plain Bellman optimality iteration on the true model, written out longhand.
numvec true_values(const TabularMDP& m, double tol) {
    numvec v(m.n_states(), 0.0), next(m.n_states());
    for (;;) {
        double diff = 0.0;
        for (State s = 0; s < m.n_states(); ++s) {
            double best = -1e300;
            for (Action a = 0; a < m.n_actions(); ++a) {
                double q = 0.0;
                for (State j = 0; j < m.n_states(); ++j)
                    q += m.transition(s, a, j) * (m.reward(s, a, j) + m.gamma() * v[j]);
                best = std::max(best, q);
            }
            next[s] = best;
            diff = std::max(diff, std::fabs(next[s] - v[s]));
        }
        v = next;
        if (diff <= tol) return v;
    }
}

}  // namespace

TEST_CASE("parse_algorithm and names") {
    CHECK(parse_algorithm("POT") == Algorithm::Pot);
    CHECK(parse_algorithm("bolt") == Algorithm::Bolt);
    CHECK(parse_algorithm("mbie-eb") == Algorithm::MbieEb);
    CHECK(parse_algorithm("greedy") == Algorithm::GreedyMean);
    CHECK_FALSE(parse_algorithm("rmax").has_value());
    for (Algorithm k : {Algorithm::Pot, Algorithm::Bolt, Algorithm::Beb, Algorithm::MbieEb, Algorithm::Vbrb,
                        Algorithm::GreedyMean})
        CHECK(parse_algorithm(to_string(k)) == k);
}

TEST_CASE("pot_theta on the flat prior") {
    // beta (m + sigma + 1/sqrt(2 beta)) with m = 0.2, sigma = 0.38138503569823695
    CHECK(std::fabs(pot_theta(prior(), 0, 0, 0, 3.2, 20) - 3.1253431783017103) < 1e-12);
    CHECK(pot_theta(prior(), 0, 0, 0, 1000.0, 20) == 20.0);

    // a concentrated row with m ~ 0 leaves the sqrt(beta / 2) floor
    numvec alpha(5 * 2 * 5, 1e-9);
    for (State s = 0; s < 5; ++s)
        for (Action a = 0; a < 2; ++a) alpha[(s * 2 + a) * 5 + 1] = 1e9;
    const DirichletBelief sharp(5, 2, alpha);
    CHECK(std::fabs(pot_theta(sharp, 0, 0, 0, 3.2, 20) - 1.2649110640673518) < 1e-6);
}

TEST_CASE("pot_distribution and bolt_distribution on the flat prior") {
    const numvec pot = pot_distribution(prior(), 0, 0, 4, 3.2, 20);
    CHECK(std::fabs(pot[4] - 0.9751964378432053) < 1e-12);
    for (State j = 0; j < 4; ++j) CHECK(std::fabs(pot[j] - 0.006200890539198656) < 1e-12);

    const numvec bolt = bolt_distribution(prior(), 0, 0, 2, 1.4);
    CHECK(std::fabs(bolt[2] - 0.9466666666666667) < 1e-12);
    for (State j : {0u, 1u, 3u, 4u}) CHECK(std::fabs(bolt[j] - 0.013333333333333334) < 1e-12);
}

TEST_CASE("exploration bonuses on the flat prior") {
    CHECK(std::fabs(exploration_bonus(spec_of(Algorithm::Beb, 2.5), prior(), 0, 0) - 2.2727272727272725) < 1e-12);
    CHECK(exploration_bonus(spec_of(Algorithm::MbieEb, 2.5), prior(), 0, 0) == 2.5);
    CHECK(std::fabs(exploration_bonus(spec_of(Algorithm::Vbrb, 4.9), prior(), 0, 0) - 4.178734040569965) < 1e-12);

    DirichletBelief b = prior();
    for (int i = 0; i < 4; ++i) b.observe(1, 1, 0);
    CHECK(exploration_bonus(spec_of(Algorithm::MbieEb, 2.5), b, 1, 1) == 1.25);
    CHECK(std::fabs(exploration_bonus(spec_of(Algorithm::Beb, 2.5), b, 1, 1) - 2.5 / 5.1) < 1e-12);

    CHECK_THROWS(exploration_bonus(spec_of(Algorithm::Pot, 2.5), prior(), 0, 0));
}

TEST_CASE("z_upper_bound") {
    // H (m + lambda sigma + sqrt(ln(lambda^2) / (2H))), lambda = 2
    CHECK(std::fabs(z_upper_bound(prior(), 0, 0, 0, 2.0, 20) - 22.978698838988514) < 1e-10);
    // lambda = 1 drops the log term
    CHECK(std::fabs(z_upper_bound(prior(), 0, 0, 0, 1.0, 20) - 20.0 * (0.2 + 0.38138503569823695)) < 1e-10);
    // a certain successor has m = 1, sigma -> 0
    numvec alpha(5 * 2 * 5, 1e-12);
    alpha[3] = 1e12;
    const DirichletBelief sure(5, 2, alpha);
    CHECK(std::fabs(z_upper_bound(sure, 0, 0, 3, 1.0, 20) - 20.0) < 1e-6);
    CHECK_THROWS_AS(z_upper_bound(prior(), 0, 0, 0, 0.5, 20), std::invalid_argument);
}

TEST_CASE("property: shifted distribution is a convex combination of the mean and a point mass") {
    Rng rng(13);
    for (int t = 0; t < 100; ++t) {
        const DirichletBelief b = random_belief(rng);
        const State s = uniform_index(rng, 5);
        const Action a = uniform_index(rng, 2);
        const State st = uniform_index(rng, 5);
        const double c = 20.0 * uniform01(rng);
        numvec out(5);
        shifted_distribution(b, s, a, st, c, out);
        const numvec mean = b.posterior_mean(s, a);
        const double tot = b.row_total(s, a);
        const double w = tot / (tot + c);
        for (State j = 0; j < 5; ++j) CHECK(std::fabs(out[j] - (w * mean[j] + (1.0 - w) * (j == st))) < 1e-12);
        CHECK(std::fabs(std::accumulate(out.begin(), out.end(), 0.0) - 1.0) < 1e-12);
    }
}

TEST_CASE("property: more artificial observations move more mass to the target") {
    Rng rng(19);
    for (int t = 0; t < 50; ++t) {
        const DirichletBelief b = random_belief(rng);
        double prev_theta = 0.0, prev_mass = 0.0;
        for (double beta : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0}) {
            const double theta = pot_theta(b, 0, 0, 1, beta, 20);
            CHECK(theta >= prev_theta);
            CHECK(theta <= 20.0);
            const double mass = pot_distribution(b, 0, 0, 1, beta, 20)[1];
            CHECK(mass >= prev_mass - 1e-15);
            prev_theta = theta;
            prev_mass = mass;
        }
    }
}

TEST_CASE("planning problems on the chain") {
    const TabularMDP mdp = chain_mdp();
    SUBCASE("POT enlarges the action set to |A| |S| pairs") {
        const PlanningProblem p = build_planning_problem(spec_of(Algorithm::Pot, 3.2), prior(), mdp.rewards(), 0.95);
        CHECK(p.n_planning_actions() == 10);
        for (std::size_t k = 0; k < 10; ++k) CHECK(p.base_action(k) == k / 5);
        CHECK(std::fabs(p.dist(2, 1 * 5 + 3)[3] - 0.9751964378432053) < 1e-12);
        CHECK(p.reward(4, 0)[4] == 1.0);
        p.validate();
    }
    SUBCASE("bonus algorithms keep |A| actions and add the bonus to every reward") {
        const PlanningProblem p = build_planning_problem(spec_of(Algorithm::Beb, 2.5), prior(), mdp.rewards(), 0.95);
        CHECK(p.n_planning_actions() == 2);
        CHECK(std::fabs(p.reward(4, 0)[4] - (1.0 + 2.5 / 1.1)) < 1e-12);
        CHECK(std::fabs(p.reward(1, 1)[0] - (0.2 + 2.5 / 1.1)) < 1e-12);
        CHECK(std::fabs(p.reward(1, 0)[2] - 2.5 / 1.1) < 1e-12);
        CHECK(std::fabs(p.dist(1, 0)[2] - 0.2) < 1e-15);
    }
    SUBCASE("greedy mean has no bonus") {
        const PlanningProblem p =
            build_planning_problem(spec_of(Algorithm::GreedyMean, 0.0), prior(), mdp.rewards(), 0.95);
        CHECK(p.n_planning_actions() == 2);
        CHECK(p.reward(1, 0)[2] == 0.0);
    }
}

TEST_CASE("BOLT with eta = 0 plans exactly like the posterior mean") {
    const TabularMDP mdp = chain_mdp();
    Rng rng(29);
    for (int t = 0; t < 20; ++t) {
        const DirichletBelief b = random_belief(rng);
        const Solution bolt =
            value_iteration(build_planning_problem(spec_of(Algorithm::Bolt, 0.0), b, mdp.rewards(), 0.95), 1e-6, 100000);
        const Solution mean = value_iteration(
            build_planning_problem(spec_of(Algorithm::GreedyMean, 0.0), b, mdp.rewards(), 0.95), 1e-6, 100000);
        for (State s = 0; s < 5; ++s) CHECK(std::fabs(bolt.values[s] - mean.values[s]) < 1e-12);
    }
}

TEST_CASE("greedy planning on a near-true belief recovers always-a") {
    const TabularMDP mdp = chain_mdp();
    const DirichletBelief b = make_informative_prior(mdp, 1e-9, 1e9);
    const Solution sol = value_iteration(
        build_planning_problem(spec_of(Algorithm::GreedyMean, 0.0), b, mdp.rewards(), 0.95), 1e-8, 100000);
    const numvec oracle = true_values(mdp, 1e-10);
    for (State s = 0; s < 5; ++s) {
        CHECK(sol.policy[s] == chain::kForward);
        CHECK(std::fabs(sol.values[s] - oracle[s]) < 1e-5);
    }
}

TEST_CASE("optimism dominates the posterior-mean value") {
    const TabularMDP mdp = chain_mdp();
    Rng rng(37);
    int held_pot = 0, held_bolt = 0;
    for (int t = 0; t < 100; ++t) {
        const DirichletBelief b = random_belief(rng);
        held_pot += check_optimism_dominance(b, mdp, spec_of(Algorithm::Pot, 3.2), 0.1).holds;
        held_bolt += check_optimism_dominance(b, mdp, spec_of(Algorithm::Bolt, 1.4), 0.1).holds;
    }
    CHECK(held_pot == 100);
    CHECK(held_bolt == 100);
    const DominanceResult r = check_optimism_dominance(prior(), mdp, spec_of(Algorithm::Pot, 3.2), 0.1);
    CHECK(r.slack == doctest::Approx(4.0));
    CHECK(r.holds);
    CHECK_THROWS(check_optimism_dominance(prior(), mdp, spec_of(Algorithm::Beb, 2.5), 0.1));
}

TEST_CASE("sample_dirichlet") {
    Rng rng(43);
    const numvec alpha = {1.0, 2.0, 3.0};
    numvec acc(3, 0.0), draw(3);
    const int n = 50000;
    for (int i = 0; i < n; ++i) {
        sample_dirichlet(alpha, rng, draw);
        CHECK(std::fabs(std::accumulate(draw.begin(), draw.end(), 0.0) - 1.0) < 1e-12);
        for (int j = 0; j < 3; ++j) acc[j] += draw[j];
    }
    for (int j = 0; j < 3; ++j) CHECK(std::fabs(acc[j] / n - alpha[j] / 6.0) < 0.005);

    // shapes far below 1 must not collapse to NaN
    const numvec tiny = {0.02, 0.02, 0.02, 0.02, 0.02};
    numvec d(5);
    for (int i = 0; i < 1000; ++i) {
        sample_dirichlet(tiny, rng, d);
        for (double x : d) CHECK(std::isfinite(x));
    }
}

TEST_CASE("occurrence coverage") {
    Rng rng(47);
    const double lambda = 3.0;
    const double floor = std::pow(1.0 - 1.0 / (lambda * lambda), 2);  // 0.7901
    const double cov = z_coverage_estimate(prior(), lambda, 20, 10000, rng);
    CHECK(cov >= floor - 3.0 * std::sqrt(floor * (1.0 - floor) / 10000.0));

    CoverageOptions z;
    z.bound = CoverageBound::OccurrenceBound;
    CHECK(z_coverage_estimate(prior(), lambda, 20, 10000, rng, z) >= 0.778);

    CoverageOptions capped;
    capped.cap_override = 20.0;
    CHECK(z_coverage_estimate(prior(), lambda, 20, 2000, rng, capped) == 1.0);

    CHECK(z_coverage_estimate(prior(), 100.0, 20, 5000, rng) >= 0.99);

    CHECK_THROWS_AS(z_coverage_estimate(prior(), 0.5, 20, 10, rng), std::invalid_argument);
    CHECK_THROWS_AS(z_coverage_estimate(prior(), 3.0, 20, 0, rng), std::invalid_argument);
}
