#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "kantor/ergodic.hpp"
#include "kantor/primal_dual.hpp"
#include "kantor/regularize.hpp"

using namespace kantor;

namespace {

Measure random_measure(const FiniteSpace& s, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> w(s.n);
    double tot = 0.0;
    for (double& x : w) {
        x = u(rng);
        tot += x;
    }
    for (double& x : w) x /= tot;
    return Measure{s, w};
}

}  // namespace

TEST_CASE("smoother is idempotent and 1/eps-Lipschitz") {
    FiniteSpace s = make_line_space({0, 1, 2, 3});
    double eps = 0.5;
    OperatorPtr S = lipschitz_smoother(s, eps);
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> u(-4, 4);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<double> g(4);
        for (double& v : g) v = u(rng);
        auto sg = S->apply(g);
        CHECK(S->apply(sg) == sg);  // metric operator idempotency, exact
        for (int x = 0; x < 4; ++x)
            for (int y = 0; y < 4; ++y)
                CHECK(std::abs(sg[x] - sg[y]) <= s.dist(x, y) / eps + 1e-12);
    }
}

TEST_CASE("regularized transfer stays below the base") {
    FiniteSpace s = make_line_space({0, 1, 2});
    Mat C = Mat::from_rows({{1, 0, 5}, {5, 1, 0}, {0, 5, 1}});
    Transfer t = make_cost_transfer(C, s);
    std::mt19937_64 rng(42);
    for (double eps : {1.0, 0.5, 0.1}) {
        RegularizedTransfer r = regularize(t, eps);
        REQUIRE(r.reg.is_cost_like());
        for (int rep = 0; rep < 20; ++rep) {
            Measure mu = random_measure(s, rng), nu = random_measure(s, rng);
            double base = primal_ot(C, mu, nu).value;
            double reg = primal_ot(*r.reg.cost, mu, nu).value;
            CHECK(reg <= base + 1e-9);
        }
    }
}

TEST_CASE("small epsilon recovers the base transfer") {
    // 1/eps above every finite slope of the instance makes the smoothing free
    FiniteSpace s = make_line_space({0, 1, 2});
    Mat C = Mat::from_rows({{1, 0, 5}, {5, 1, 0}, {0, 5, 1}});
    Transfer t = make_cost_transfer(C, s);
    RegularizedTransfer r = regularize(t, 1e-3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK((*r.reg.cost)(i, j) == doctest::Approx(C(i, j)));
}

TEST_CASE("huge epsilon collapses to the global infimum") {
    FiniteSpace s = make_line_space({0, 1, 2});
    Mat C = Mat::from_rows({{1, 0, 5}, {5, 1, 0}, {0, 5, 1}});
    Transfer t = make_cost_transfer(C, s);
    RegularizedTransfer r = regularize(t, 1e6);
    std::mt19937_64 rng(43);
    Measure mu = random_measure(s, rng), nu = random_measure(s, rng);
    double reg = primal_ot(*r.reg.cost, mu, nu).value;
    CHECK(reg == doctest::Approx(0.0).epsilon(1e-5));  // inf T = 0 on this instance
}

TEST_CASE("gamma-limit ladder increases to the base value") {
    FiniteSpace s = make_line_space({0, 1, 2});
    Mat C = Mat::from_rows({{1, 0, 5}, {5, 1, 0}, {0, 5, 1}});
    Transfer t = make_cost_transfer(C, s);
    std::mt19937_64 rng(44);
    Measure mu = random_measure(s, rng), nu = random_measure(s, rng);
    double base = primal_ot(C, mu, nu).value;
    double prev = -kInf;
    double finest = 0.0;
    for (int k = 0; k <= 10; ++k) {
        double eps = std::pow(2.0, -k);
        RegularizedTransfer r = regularize(t, eps);
        finest = primal_ot(*r.reg.cost, mu, nu).value;
        CHECK(finest >= prev - 1e-12);
        prev = finest;
    }
    CHECK(std::abs(finest - base) <= 1e-6);
}

TEST_CASE("c_epsilon curve") {
    FiniteSpace s = make_line_space({0, 1, 2});
    Mat C = Mat::from_rows({{1, 0, 5}, {5, 1, 0}, {0, 5, 1}});
    Transfer t = make_cost_transfer(C, s);

    SUBCASE("inf-diagonal instances keep c at every epsilon") {
        // inf T = 0 = inf_diag T on the 3-cycle
        auto curve = c_epsilon_curve(t, {1.0, 0.5, 0.1});
        for (double c : curve) CHECK(std::abs(c - 0.0) <= 1e-9);
    }
    SUBCASE("ladder is nondecreasing as epsilon decreases") {
        Mat C2 = Mat::from_rows({{2, 0, 5}, {5, 2, 0}, {1, 5, 2}});
        Transfer t2 = make_cost_transfer(C2, s);
        auto curve = c_epsilon_curve(t2, {1.0, 0.5, 0.1, 0.01});
        double cbase = mane_min_mean_cycle(C2).value;
        for (size_t i = 1; i < curve.size(); ++i) CHECK(curve[i] >= curve[i - 1] - 1e-12);
        for (double c : curve) CHECK(c <= cbase + 1e-12);
    }
    SUBCASE("metric base keeps c = 0") {
        Transfer d = make_metric_transfer(s);
        auto curve = c_epsilon_curve(d, {1.0, 0.5, 0.1});
        for (double c : curve) CHECK(std::abs(c) <= 1e-12);
    }
}

TEST_CASE("operator-level regularization composes the smoothers") {
    FiniteSpace s = make_line_space({0, 1, 2});
    Transfer b;
    b.kind = TransferKind::custom;
    b.source = s;
    b.target = s;
    b.backward = std::make_shared<CostBackwardOp>(*s.metric, s, s);
    RegularizedTransfer r = regularize(b, 2.0);
    std::mt19937_64 rng(45);
    std::uniform_real_distribution<double> u(-3, 3);
    for (int rep = 0; rep < 20; ++rep) {
        std::vector<double> f(3);
        for (double& v : f) v = u(rng);
        auto direct = r.smoother->apply(b.backward->apply(r.smoother->apply(f)));
        CHECK(r.reg.backward->apply(f) == direct);
    }
}
