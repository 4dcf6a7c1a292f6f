#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "kantor/json_io.hpp"
#include "kantor/space.hpp"

using namespace kantor;

namespace {

Measure random_measure(const FiniteSpace& s, std::mt19937_64& rng, double floor = 0.0) {
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

}  // namespace

TEST_CASE("space validation") {
    CHECK_THROWS(make_space(0));
    FiniteSpace s = make_line_space({0.0, 1.0, 2.0});
    CHECK(s.n == 3);
    CHECK(s.dist(0, 2) == 2.0);

    Mat bad = Mat::from_rows({{0, 5, 1}, {5, 0, 1}, {1, 1, 0}});  // d(0,2)+d(2,1) = 2 < 5
    CHECK_THROWS(make_metric_space(3, bad));
}

TEST_CASE("measure normalization is rejected, not repaired") {
    FiniteSpace s = make_space(2);
    CHECK_THROWS(make_measure(s, {0.5, 0.6}));
    CHECK_THROWS(make_measure(s, {-0.1, 1.1}));
    CHECK_NOTHROW(make_measure(s, {0.5, 0.5}));
}

TEST_CASE("marginals") {
    FiniteSpace s = make_space(3);
    std::mt19937_64 rng(7);

    SUBCASE("product coupling returns the factors") {
        Measure mu = random_measure(s, rng), nu = random_measure(s, rng);
        auto [a, b] = marginals(product_coupling(mu, nu));
        for (int i = 0; i < 3; ++i) {
            CHECK(a[i] == doctest::Approx(mu[i]).epsilon(1e-15));
            CHECK(b[i] == doctest::Approx(nu[i]).epsilon(1e-15));
        }
    }

    SUBCASE("3-cycle plan has uniform marginals") {
        Mat w(3, 3);
        w(0, 1) = w(1, 2) = w(2, 0) = 1.0 / 3;
        auto [a, b] = marginals(make_coupling(s, s, w));
        for (int i = 0; i < 3; ++i) {
            CHECK(a[i] == doctest::Approx(1.0 / 3));
            CHECK(b[i] == doctest::Approx(1.0 / 3));
        }
    }

    SUBCASE("diagonal plan returns (mu, mu) on random measures") {
        for (int rep = 0; rep < 50; ++rep) {
            Measure mu = random_measure(s, rng);
            auto [a, b] = marginals(diagonal_coupling(mu));
            for (int i = 0; i < 3; ++i) {
                CHECK(a[i] == mu[i]);
                CHECK(b[i] == mu[i]);
            }
        }
    }
}

TEST_CASE("kl divergence") {
    FiniteSpace s = make_space(2);
    Measure half = make_measure(s, {0.5, 0.5});
    Measure point = make_measure(s, {1.0, 0.0});

    CHECK(kl_divergence(half, half) == 0.0);
    CHECK(kl_divergence(point, half) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(kl_divergence(half, point) == kInf);

    SUBCASE("nonnegative, zero only on the diagonal") {
        std::mt19937_64 rng(11);
        FiniteSpace s4 = make_space(4);
        for (int rep = 0; rep < 100; ++rep) {
            Measure a = random_measure(s4, rng, 0.05), b = random_measure(s4, rng, 0.05);
            double kl = kl_divergence(a, b);
            CHECK(kl >= -1e-12);
            double dist = 0.0;
            for (int i = 0; i < 4; ++i) dist = std::max(dist, std::abs(a[i] - b[i]));
            if (kl <= 1e-12) CHECK(dist <= 1e-5);
        }
    }
}

TEST_CASE("guarded extended arithmetic") {
    CHECK(xadd(kInf, 5.0) == kInf);
    CHECK(xadd(-kInf, 5.0) == -kInf);
    CHECK_THROWS_AS(xadd(kInf, -kInf), error);
}

TEST_CASE("measure JSON round trip is bit-exact for finite values") {
    FiniteSpace s = make_space(3);
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 30; ++rep) {
        Measure mu = random_measure(s, rng);
        json j = measure_to_json(mu);
        std::string text = j.dump();
        Measure back = measure_from_json(json::parse(text), s);
        for (int i = 0; i < 3; ++i) CHECK(back[i] == mu[i]);
    }
}
