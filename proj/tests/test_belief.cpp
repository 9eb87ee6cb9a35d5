#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>

#include "oe/belief.hpp"
#include "oe/simulation.hpp"

using namespace oe;

TEST_CASE("make_uniform_prior") {
    const DirichletBelief b = make_uniform_prior(5, 2, 0.02);
    for (State s = 0; s < 5; ++s)
        for (Action a = 0; a < 2; ++a) {
            CHECK(std::fabs(b.row_total(s, a) - 0.1) < 1e-12);
            for (State j = 0; j < 5; ++j) CHECK(b.alpha(s, a, j) == 0.02);
        }
    CHECK_FALSE(b.frozen());

    const DirichletBelief big = make_uniform_prior(5, 2, 2.0);
    CHECK(big.row_total(0, 0) == 10.0);

    const DirichletBelief single = make_uniform_prior(1, 1, 1.0);
    CHECK(single.posterior_mean(0, 0) == numvec{1.0});

    CHECK_THROWS_AS(make_uniform_prior(5, 2, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_uniform_prior(5, 2, -1.0), std::invalid_argument);
}

TEST_CASE("make_informative_prior") {
    const TabularMDP mdp = chain_mdp();
    const DirichletBelief zero = make_informative_prior(mdp, 0.02, 0.0);
    const DirichletBelief uni = make_uniform_prior(5, 2, 0.02);
    for (State s = 0; s < 5; ++s)
        for (Action a = 0; a < 2; ++a)
            for (State j = 0; j < 5; ++j) CHECK(zero.alpha(s, a, j) == uni.alpha(s, a, j));

    const DirichletBelief w = make_informative_prior(mdp, 0.02, 0.33);
    CHECK(std::fabs(w.alpha(0, chain::kForward, 1) - (0.02 + 0.33 * 0.8)) < 1e-15);
    CHECK(std::fabs(w.alpha(0, chain::kForward, 0) - (0.02 + 0.33 * 0.2)) < 1e-15);
    CHECK(w.alpha(0, chain::kForward, 3) == 0.02);
    CHECK(std::fabs(w.row_total(2, chain::kReset) - (0.1 + 0.33)) < 1e-12);

    const DirichletBelief small = make_informative_prior(mdp, 0.02, 0.035);
    CHECK(std::fabs(small.row_total(4, chain::kForward) - 0.135) < 1e-12);

    CHECK_THROWS_AS(make_informative_prior(mdp, 0.02, -0.1), std::invalid_argument);
}

TEST_CASE("observe") {
    DirichletBelief b = make_uniform_prior(5, 2, 0.02);
    b.observe(0, 0, 1);
    CHECK(std::fabs(b.alpha(0, 0, 1) - 1.02) < 1e-15);
    CHECK(std::fabs(b.row_total(0, 0) - 1.1) < 1e-12);
    CHECK(b.visits(0, 0) == 1);
    b.observe(0, 0, 1);
    CHECK(std::fabs(b.alpha(0, 0, 1) - 2.02) < 1e-15);

    b.freeze();
    b.observe(0, 0, 1);
    CHECK(std::fabs(b.alpha(0, 0, 1) - 2.02) < 1e-15);
    CHECK(b.visits(0, 0) == 2);

    CHECK_THROWS_AS(b.observe(5, 0, 0), std::out_of_range);
    CHECK_THROWS_AS(b.observe(0, 2, 0), std::out_of_range);
    CHECK_THROWS_AS(b.observe(0, 0, 9), std::out_of_range);
}

TEST_CASE("property: observe changes exactly one count by one") {
    Rng rng(17);
    DirichletBelief b = make_uniform_prior(5, 2, 0.02);
    for (int i = 0; i < 500; ++i) {
        const State s = uniform_index(rng, 5);
        const Action a = uniform_index(rng, 2);
        const State j = uniform_index(rng, 5);
        const DirichletBelief before = b;
        b.observe(s, a, j);
        for (State x = 0; x < 5; ++x)
            for (Action y = 0; y < 2; ++y) {
                const double dt = b.row_total(x, y) - before.row_total(x, y);
                CHECK(dt == ((x == s && y == a) ? doctest::Approx(1.0) : doctest::Approx(0.0)));
                for (State z = 0; z < 5; ++z) {
                    const double d = b.alpha(x, y, z) - before.alpha(x, y, z);
                    if (x == s && y == a && z == j) CHECK(std::fabs(d - 1.0) < 1e-12);
                    else CHECK(d == 0.0);
                }
            }
    }
}

TEST_CASE("posterior_mean") {
    DirichletBelief b = make_uniform_prior(5, 2, 0.02);
    for (double m : b.posterior_mean(3, 1)) CHECK(std::fabs(m - 0.2) < 1e-15);

    b.observe(0, 0, 0);
    const numvec m = b.posterior_mean(0, 0);
    CHECK(std::fabs(m[0] - 0.92727272727272727) < 1e-12);
    for (State j = 1; j < 5; ++j) CHECK(std::fabs(m[j] - 0.018181818181818181) < 1e-12);
}

TEST_CASE("property: posterior mean rows are distributions in (0, 1)") {
    Rng rng(23);
    DirichletBelief b = make_uniform_prior(5, 2, 0.02);
    for (int i = 0; i < 2000; ++i) {
        b.observe(uniform_index(rng, 5), uniform_index(rng, 2), uniform_index(rng, 5));
        if (i % 50 != 0) continue;
        for (State s = 0; s < 5; ++s)
            for (Action a = 0; a < 2; ++a) {
                const numvec m = b.posterior_mean(s, a);
                CHECK(std::fabs(std::accumulate(m.begin(), m.end(), 0.0) - 1.0) < 1e-12);
                for (double x : m) CHECK((x > 0.0 && x < 1.0));
            }
    }
}

TEST_CASE("posterior_std") {
    const DirichletBelief b = make_uniform_prior(5, 2, 0.02);
    // Beta marginal with m = 0.2 and row total 0.1
    CHECK(std::fabs(b.posterior_std(0, 0, 0) - 0.38138503569823695) < 1e-12);

    // concentrated row: row total 1e6 with m = 0.2
    const DirichletBelief big = make_uniform_prior(5, 2, 2e5);
    CHECK(big.posterior_std(0, 0, 0) < 1e-3);

    CHECK(b.spread(0, 0, 0, SigmaMode::Variance) == doctest::Approx(0.2 * 0.8 / 1.1));
}

TEST_CASE("property: two closed forms of the marginal variance agree") {
    Rng rng(31);
    for (int t = 0; t < 200; ++t) {
        numvec alpha(4 * 2 * 4);
        for (double& a : alpha) a = std::exp(-5.0 + 10.0 * uniform01(rng));
        const DirichletBelief b(4, 2, alpha);
        for (State s = 0; s < 4; ++s)
            for (Action a = 0; a < 2; ++a)
                for (State j = 0; j < 4; ++j) {
                    const double ai = b.alpha(s, a, j);
                    const double tot = b.row_total(s, a);
                    const double direct = ai * (tot - ai) / (tot * tot * (tot + 1.0));
                    const double sd = b.posterior_std(s, a, j);
                    CHECK(std::fabs(sd * sd - direct) < 1e-12);
                }
    }
}

TEST_CASE("posterior mean converges to the sampled ground truth") {
    Rng rng(41);
    const numvec truth = {0.5, 0.25, 0.125, 0.0625, 0.0625};
    DirichletBelief b = make_uniform_prior(5, 1, 0.02);
    for (int i = 0; i < 100000; ++i) {
        const double u = uniform01(rng);
        double c = 0.0;
        State j = 4;
        for (State k = 0; k < 5; ++k) {
            c += truth[k];
            if (u < c) {
                j = k;
                break;
            }
        }
        b.observe(0, 0, j);
    }
    const numvec m = b.posterior_mean(0, 0);
    for (State k = 0; k < 5; ++k) CHECK(std::fabs(m[k] - truth[k]) < 0.01);
}

TEST_CASE("constructor rejects non-positive counts and bad sizes") {
    CHECK_THROWS_AS(DirichletBelief(2, 1, {1.0, 0.0, 1.0, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(DirichletBelief(2, 1, {1.0, 1.0}), std::invalid_argument);
}
