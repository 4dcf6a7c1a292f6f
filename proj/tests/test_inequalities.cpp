#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "kantor/inequalities.hpp"

using namespace kantor;

namespace {

Transfer identity_entropic(const FiniteSpace& s) {
    Mat I(s.n, s.n);
    for (int i = 0; i < s.n; ++i) I(i, i) = 1.0;
    return make_entropic_transfer(I, s, s);
}

Measure random_measure(const FiniteSpace& s, std::mt19937_64& rng, double floor = 0.05) {
    std::uniform_real_distribution<double> u(floor, 1.0);
    std::vector<double> w(s.n);
    double tot = 0.0;
    for (double& x : w) {
        x = u(rng);
        tot += x;
    }
    for (double& x : w) x /= tot;
    return Measure{s, w};
}

InequalitySpec pinsker_spec(double lambda) {
    FiniteSpace s = make_line_space({0, 1});
    InequalitySpec spec;
    spec.lhs = make_metric_transfer(s);
    spec.t1 = identity_transfer(s);
    spec.t2 = identity_transfer(s);
    spec.e1 = identity_entropic(s);
    spec.e2 = identity_entropic(s);
    spec.lambda1 = spec.lambda2 = lambda;
    spec.mu = uniform(s);
    spec.nu = uniform(s);
    return spec;
}

}  // namespace

TEST_CASE("entropic convolution dual") {
    FiniteSpace s = make_space(2);
    Transfer E = identity_entropic(s);

    SUBCASE("identity F reproduces -KL") {
        Transfer F = identity_transfer(s);
        std::mt19937_64 rng(51);
        for (int rep = 0; rep < 20; ++rep) {
            Measure mu = random_measure(s, rng), nu = random_measure(s, rng);
            double got = entropic_conv_dual(E, F, mu, nu);
            double expect = -kl_divergence(nu, mu);
            CHECK(std::abs(got - expect) <= 1e-4);
        }
    }
    SUBCASE("nu = mu with identity F gives zero") {
        Transfer F = identity_transfer(s);
        Measure mu = make_measure(s, {0.3, 0.7});
        CHECK(std::abs(entropic_conv_dual(E, F, mu, mu)) <= 1e-6);
    }
    SUBCASE("cost F matches the sigma-grid enumeration of inf E + F") {
        Mat C = Mat::from_rows({{0, 1}, {2, 0}});
        Transfer F = make_cost_transfer(C, s);
        std::mt19937_64 rng(52);
        Measure mu = random_measure(s, rng), nu = random_measure(s, rng);
        double got = entropic_conv_dual(E, F, mu, nu);
        // direct enumeration over sigma of KL(sigma||mu) + F(sigma, nu)
        double best = kInf;
        for (int k = 0; k <= 1000; ++k) {
            Measure sig{s, {k / 1000.0, 1.0 - k / 1000.0}};
            double v = kl_divergence(sig, mu) + primal_ot(C, sig, nu).value;
            best = std::min(best, v);
        }
        CHECK(std::abs(got - (-best)) <= 1e-3);
    }
}

TEST_CASE("maurey dual check") {
    SUBCASE("cost shifted below zero passes for every g") {
        FiniteSpace s = make_line_space({0, 1});
        Mat C = *s.metric;
        for (double& v : C.a) v -= 1.0;
        InequalitySpec spec = pinsker_spec(1.0);
        spec.lhs = make_cost_transfer(C, s);
        MaureyReport rep = maurey_dual_check(spec);
        CHECK(rep.pass);
        CHECK(rep.worst_product <= 1.0 + 1e-12);
    }
    SUBCASE("tiny lambda with a strictly positive transfer finds a witness") {
        InequalitySpec spec = pinsker_spec(0.25);
        MaureyReport rep = maurey_dual_check(spec);
        CHECK(!rep.pass);
        CHECK(rep.worst_product > 1.0);
    }
}

TEST_CASE("primal inequality scan") {
    SUBCASE("huge weights never violate") {
        InequalitySpec spec = pinsker_spec(1000.0);
        PrimalScanReport rep = primal_inequality_scan(spec);
        CHECK(rep.pass);
    }
    SUBCASE("pinsker-threshold instance fails below the grid threshold") {
        InequalitySpec spec = pinsker_spec(0.25);
        PrimalScanReport rep = primal_inequality_scan(spec);
        CHECK(!rep.pass);
        CHECK(rep.worst_violation > 1e-6);
    }
    SUBCASE("pinsker-threshold instance passes above the grid threshold") {
        InequalitySpec spec = pinsker_spec(60.0);
        PrimalScanReport rep = primal_inequality_scan(spec);
        CHECK(rep.pass);
    }
}

TEST_CASE("dual pass implies primal pass on shipped instances") {
    std::vector<InequalitySpec> shipped;
    {
        FiniteSpace s = make_line_space({0, 1});
        Mat C = *s.metric;
        for (double& v : C.a) v -= 1.0;
        InequalitySpec margin = pinsker_spec(1.0);
        margin.lhs = make_cost_transfer(C, s);
        shipped.push_back(margin);
        shipped.push_back(pinsker_spec(0.25));
        shipped.push_back(pinsker_spec(60.0));
    }
    for (const auto& spec : shipped) {
        MaureyReport dual = maurey_dual_check(spec);
        PrimalScanReport primal = primal_inequality_scan(spec);
        if (dual.pass) CHECK(primal.pass);
    }
}

TEST_CASE("rhs component reduces to KL for identity pieces") {
    FiniteSpace s = make_space(2);
    Transfer t = identity_transfer(s);
    Transfer e = identity_entropic(s);
    std::mt19937_64 rng(53);
    Measure sig = random_measure(s, rng), ref = random_measure(s, rng);
    CHECK(rhs_component(t, e, sig, ref) == doctest::Approx(kl_divergence(sig, ref)));
}
