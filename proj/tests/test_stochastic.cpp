#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "kantor/stochastic.hpp"

using namespace kantor;

TEST_CASE("lazy chain construction") {
    ControlledChain ch = make_lazy_chain(3, 1, {{-1}, {0}, {1}});
    CHECK(ch.states() == 3);
    CHECK(ch.ncontrols() == 3);
    // v = 0 kernel: 1/2 stay, 1/4 each neighbor
    CHECK(ch.kernels[1](0, 0) == 0.5);
    CHECK(ch.kernels[1](0, 1) == 0.25);
    CHECK(ch.kernels[1](0, 2) == 0.25);
    // L = v^2/2 with no potential
    CHECK(ch.lagrangian(0, 0) == 0.5);
    CHECK(ch.lagrangian(0, 1) == 0.0);

    SUBCASE("2-D torus rows are stochastic") {
        ControlledChain ch2 = make_lazy_chain(3, 2, {{0, 0}, {1, 0}, {0, -1}});
        CHECK(ch2.states() == 9);
        ch2.validate();
    }
}

TEST_CASE("bellman operator") {
    ControlledChain ch = make_lazy_chain(3, 1, {{-1}, {0}, {1}});

    SUBCASE("hand-computed expectation on Z3") {
        Potential u = make_potential(ch.space, {1, 0, 0});
        Potential out = bellman_apply(ch, u);
        CHECK(out[0] == doctest::Approx(0.5));
        CHECK(out[1] == doctest::Approx(0.25));
        CHECK(out[2] == doctest::Approx(0.25));
    }
    SUBCASE("constants are fixed points when L(x,0) = 0") {
        Potential u = make_potential(ch.space, {2, 2, 2});
        Potential out = bellman_apply(ch, u);
        for (int i = 0; i < 3; ++i) CHECK(out[i] == doctest::Approx(2.0));
    }
    SUBCASE("translation and the axiom suite") {
        OperatorPtr T = bellman_operator(ch);
        CHECK(check_axioms(*T).pass);
    }
}

TEST_CASE("relative value iteration") {
    SUBCASE("no potential gives c = 0 and constant u") {
        ControlledChain ch = make_lazy_chain(5, 1, {{-1}, {0}, {1}});
        RVIResult r = relative_value_iteration(ch);
        CHECK(std::abs(r.c) <= 1e-9);
        for (int i = 0; i < 5; ++i) CHECK(std::abs(r.u[i]) <= 1e-8);
        CHECK(r.residual <= 1e-9);
    }
    SUBCASE("with a potential c matches the occupation LP") {
        ControlledChain ch = make_lazy_chain(3, 1, {{-1}, {0}, {1}}, {0, 1, 1});
        RVIResult r = relative_value_iteration(ch);
        OccupationResult o = occupation_lp(ch);
        CHECK(std::abs(r.c - o.c) <= 1e-7);
        CHECK(r.c >= 0.0);  // c = inf int L dm >= 0
        CHECK(o.invariance_residual <= 1e-9);
    }
}

TEST_CASE("occupation LP at zero potential picks the resting control") {
    ControlledChain ch = make_lazy_chain(4, 1, {{-1}, {0}, {1}});
    OccupationResult o = occupation_lp(ch);
    CHECK(std::abs(o.c) <= 1e-10);
    // uniform x {v=0} is the canonical optimizer
    for (int x = 0; x < 4; ++x) {
        double rest = o.m(x, 1);
        CHECK(rest >= 0.0);
    }
    double total = 0.0;
    for (double v : o.m.a) total += v;
    CHECK(total == doctest::Approx(1.0));
    CHECK(o.invariance_residual <= 1e-9);
}

TEST_CASE("rvi/lp agreement on random chains") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    for (int rep = 0; rep < 20; ++rep) {
        int N = 3 + static_cast<int>(rng() % 10);  // N <= 12
        std::vector<double> V(N);
        for (double& v : V) v = u(rng);
        std::vector<std::vector<int>> controls = {{-2}, {-1}, {0}, {1}, {2}};
        ControlledChain ch = make_lazy_chain(N, 1, controls, V);
        RVIResult r = relative_value_iteration(ch);
        OccupationResult o = occupation_lp(ch);
        CHECK(std::abs(r.c - o.c) <= 1e-7);
        CHECK(o.invariance_residual <= 1e-9);
    }
}

TEST_CASE("domination characterization of the critical value") {
    ControlledChain ch = make_lazy_chain(3, 1, {{-1}, {0}, {1}}, {0, 1, 1});
    RVIResult r = relative_value_iteration(ch);
    const int horizon = 4 * ch.states();

    SUBCASE("k = c is admissible with the RVI solution") {
        CHECK(domination_check(ch, r.u, r.c, horizon));
    }
    SUBCASE("k = c + 0.1 fails within the state count") {
        CHECK(!domination_check(ch, r.u, r.c + 0.1, ch.states()));
    }
    SUBCASE("gross underbid holds with u = 0") {
        double maxL = 0.0;
        for (double v : ch.lagrangian.a) maxL = std::max(maxL, v);
        CHECK(domination_check(ch, zero_potential(ch.space), -maxL - 1.0, horizon));
    }
    SUBCASE("bisection recovers c") {
        double sup = domination_sup(ch, r.u, horizon, 1e-7);
        CHECK(std::abs(sup - r.c) <= 1e-6);
    }
}
