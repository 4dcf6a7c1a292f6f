#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "kantor/transfer.hpp"

using namespace kantor;

namespace {

std::vector<double> random_potential(int n, std::mt19937_64& rng, double lo = -3, double hi = 3) {
    std::uniform_real_distribution<double> u(lo, hi);
    std::vector<double> f(n);
    for (double& v : f) v = u(rng);
    return f;
}

}  // namespace

TEST_CASE("convolve materializes the min-plus product for costs") {
    FiniteSpace s = make_space(2);
    Transfer A = make_cost_transfer(Mat::from_rows({{0, 1}, {2, 0}}), s);
    Transfer B = make_cost_transfer(Mat::from_rows({{0, 3}, {1, 0}}), s);
    Transfer AB = convolve(A, B);
    REQUIRE(AB.is_cost_like());
    CHECK(*AB.cost == Mat::from_rows({{0, 1}, {1, 0}}));
}

TEST_CASE("identity convolution leaves the operator action unchanged") {
    FiniteSpace s = make_space(3);
    Transfer T = make_cost_transfer(Mat::from_rows({{1, 0, 5}, {5, 1, 0}, {0, 5, 1}}), s);
    Transfer I = identity_transfer(s);
    Transfer TI = convolve(T, I);
    std::mt19937_64 rng(2);
    for (int rep = 0; rep < 20; ++rep) {
        auto f = random_potential(3, rng);
        CHECK(TI.backward->apply(f) == T.backward->apply(f));
    }
}

TEST_CASE("metric transfers are idempotent under convolution") {
    FiniteSpace s = make_line_space({0, 1, 2});
    Transfer d = make_metric_transfer(s);
    Transfer dd = convolve(d, d);
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 50; ++rep) {
        auto f = random_potential(3, rng);
        CHECK(dd.backward->apply(f) == d.backward->apply(f));  // exact: integer metric
    }
}

TEST_CASE("convolution is associative on operator action") {
    FiniteSpace s = make_space(3);
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> c(0, 9);
    for (int rep = 0; rep < 10; ++rep) {
        Mat A(3, 3), B(3, 3), C(3, 3);
        for (double& v : A.a) v = c(rng);
        for (double& v : B.a) v = c(rng);
        for (double& v : C.a) v = c(rng);
        Transfer tA = make_cost_transfer(A, s), tB = make_cost_transfer(B, s), tC = make_cost_transfer(C, s);
        Transfer l = convolve(convolve(tA, tB), tC);
        Transfer r = convolve(tA, convolve(tB, tC));
        auto f = random_potential(3, rng);
        CHECK(l.backward->apply(f) == r.backward->apply(f));  // exact in integer min-plus
    }
}

TEST_CASE("tensor of 2x2 costs is the 4x4 sum table") {
    FiniteSpace s = make_space(2);
    Transfer A = make_cost_transfer(Mat::from_rows({{0, 1}, {2, 3}}), s);
    Transfer B = make_cost_transfer(Mat::from_rows({{0, 10}, {20, 30}}), s);
    Transfer AB = tensor(A, B);
    REQUIRE(AB.is_cost_like());
    CHECK(AB.cost->rows == 4);
    // ((i1,i2),(j1,j2)) -> A(i1,j1) + B(i2,j2)
    CHECK((*AB.cost)(0, 0) == 0.0);
    CHECK((*AB.cost)(0, 3) == 11.0);
    CHECK((*AB.cost)(3, 0) == 22.0);
    CHECK((*AB.cost)(3, 3) == 33.0);

    SUBCASE("zero-cost tensor lifts the other factor") {
        Transfer Z = make_cost_transfer(Mat(2, 2, 0.0), s);
        Transfer ZB = tensor(Z, B);
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j) CHECK((*ZB.cost)(i, j) == (*B.cost)(i % 2, j % 2));
    }
    SUBCASE("non-cost representations are rejected") {
        Mat P = Mat::from_rows({{0.5, 0.5}, {0.5, 0.5}});
        Transfer M = make_markov_transfer(P, s, s);
        CHECK_THROWS_AS(tensor(A, M), error);
    }
}

TEST_CASE("scalar action scales the cost table") {
    FiniteSpace s = make_space(2);
    Transfer A = make_cost_transfer(Mat::from_rows({{0, 1}, {2, 0}}), s);
    Transfer A2 = scalar_mult(2.0, A);
    CHECK(*A2.cost == Mat::from_rows({{0, 2}, {4, 0}}));
    CHECK_THROWS(scalar_mult(0.0, A));

    // a = 2 on the operator route matches: 2 sup{(f/2) - c} = sup{f - 2c}
    std::mt19937_64 rng(5);
    Transfer wrapped;
    wrapped.kind = TransferKind::custom;
    wrapped.source = s;
    wrapped.target = s;
    wrapped.backward = A.backward;
    Transfer A2op = scalar_mult(2.0, wrapped);
    for (int rep = 0; rep < 20; ++rep) {
        auto f = random_potential(2, rng);
        auto lhs = A2op.backward->apply(f);
        auto rhs = A2.backward->apply(f);
        for (int i = 0; i < 2; ++i) CHECK(lhs[i] == doctest::Approx(rhs[i]).epsilon(1e-14));
    }
    CHECK(check_axioms(*A2.backward, 200, 7).pass);
}

TEST_CASE("dual sum adds operator outputs") {
    FiniteSpace s = make_space(2);
    Transfer A = make_cost_transfer(Mat::from_rows({{0, 1}, {2, 0}}), s);
    Transfer Z = zero_transfer(s);
    Transfer D = dual_sum(A, Z);
    std::mt19937_64 rng(6);
    for (int rep = 0; rep < 20; ++rep) {
        auto f = random_potential(2, rng);
        auto got = D.backward->apply(f);
        auto a = A.backward->apply(f);
        double mx = std::max(f[0], f[1]);
        for (int i = 0; i < 2; ++i) CHECK(got[i] == doctest::Approx(a[i] + mx));
    }
    CHECK_THROWS(dual_sum(A, make_cost_transfer(Mat(3, 3, 0.0), make_space(3))));
}

TEST_CASE("recession operators") {
    FiniteSpace s = make_space(2);

    SUBCASE("all-finite cost recedes to the running max") {
        Transfer A = make_cost_transfer(Mat::from_rows({{0, 1}, {2, 0}}), s);
        auto R = recession(A);
        CHECK(R->apply({3, 7}) == std::vector<double>{7, 7});
    }
    SUBCASE("finite-entry pattern") {
        Transfer A = make_cost_transfer(Mat::from_rows({{0, kInf}, {1, 0}}), s);
        auto R = recession(A);
        CHECK(R->apply({3, 7}) == std::vector<double>{3, 7});
        CHECK(R->apply({9, 7}) == std::vector<double>{9, 9});
    }
    SUBCASE("numeric lambda-limit agrees with the closed form") {
        Mat C = Mat::from_rows({{0.5, kInf}, {1.5, 0.25}});
        Transfer A = make_cost_transfer(C, s);
        Transfer wrapped;
        wrapped.kind = TransferKind::custom;
        wrapped.source = s;
        wrapped.target = s;
        wrapped.backward = A.backward;
        auto closed = recession(A);
        auto numeric = recession(wrapped);
        std::mt19937_64 rng(9);
        for (int rep = 0; rep < 20; ++rep) {
            auto f = random_potential(2, rng);
            auto a = closed->apply(f), b = numeric->apply(f);
            for (int i = 0; i < 2; ++i) CHECK(b[i] == doctest::Approx(a[i]).epsilon(1e-9));
        }
    }
}

TEST_CASE("alpha envelope") {
    FiniteSpace s = make_line_space({0, 1, 2});
    Transfer d = make_metric_transfer(s);

    SUBCASE("alpha(t) = t returns the operator itself") {
        // conjugate of t is the indicator of {1}: only s = 1 contributes
        auto env = alpha_envelope(d, [](double t) { return t; },
                                  [](double sv) { return sv == 1.0 ? 0.0 : kInf; });
        std::mt19937_64 rng(10);
        for (int rep = 0; rep < 10; ++rep) {
            std::vector<double> f = random_potential(3, rng);
            auto a = env->apply(f), b = d.backward->apply(f);
            for (int i = 0; i < 3; ++i) CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
        }
    }
    SUBCASE("alpha(t) = t^2 matches a dense s-grid oracle") {
        auto alpha = [](double t) { return t * t; };
        // increasing conjugate on t >= 0: sup_t { s t - t^2 } = s^2/4 for s >= 0
        auto aconj = [](double sv) { return sv * sv / 4.0; };
        auto env = alpha_envelope(d, alpha, aconj);
        std::mt19937_64 rng(11);
        for (int rep = 0; rep < 5; ++rep) {
            std::vector<double> f = random_potential(3, rng, 0.0, 4.0);
            auto got = env->apply(f);
            // brute s grid, coarse then dense around the incumbent (the
            // minimum can sit on a kink, so the error is first order in step)
            for (int i = 0; i < 3; ++i) {
                double best = kInf, bests = 1.0;
                for (double sv = 1e-4; sv < 1e3; sv *= 1.001) {
                    std::vector<double> g(3);
                    for (int k = 0; k < 3; ++k) g[k] = f[k] / sv;
                    double v = sv * d.backward->apply(g)[i] + aconj(sv);
                    if (v < best) {
                        best = v;
                        bests = sv;
                    }
                }
                for (double sv = bests * 0.997; sv < bests * 1.003; sv *= 1.00000025) {
                    std::vector<double> g(3);
                    for (int k = 0; k < 3; ++k) g[k] = f[k] / sv;
                    best = std::min(best, sv * d.backward->apply(g)[i] + aconj(sv));
                }
                CHECK(std::abs(got[i] - best) <= 1e-6);
            }
        }
        // the s-grid makes this approximately Kantorovich, within grid tolerance
        CHECK(check_axioms(*env, 60, 12, 1e-5, 1e-5).pass);
    }
}

TEST_CASE("kantorovich envelope") {
    FiniteSpace s = make_space(2);
    Mat C = Mat::from_rows({{0, 1}, {2, 0}});
    Transfer A = make_cost_transfer(C, s);

    SUBCASE("a Kantorovich operator is its own envelope") {
        std::mt19937_64 rng(12);
        for (int rep = 0; rep < 3; ++rep) {
            std::vector<double> f = random_potential(2, rng, -1, 1);
            auto env = kantorovich_envelope_apply(*A.backward, f);
            auto direct = A.backward->apply(f);
            for (int i = 0; i < 2; ++i) CHECK(env[i] == doctest::Approx(direct[i]).epsilon(1e-3));
        }
    }
    SUBCASE("envelope of a non-Kantorovich map stays below it") {
        // pointwise min of two cost operators is generally non-convex in f
        Mat C2 = Mat::from_rows({{1, 0}, {0, 2}});
        auto op1 = A.backward;
        auto op2 = std::make_shared<CostBackwardOp>(C2, s, s);
        struct MinOp final : Operator {
            OperatorPtr a, b;
            MinOp(OperatorPtr a_, OperatorPtr b_) : Operator(Direction::backward, a_->input(), a_->output()), a(a_), b(b_) {}
            std::vector<double> apply(const std::vector<double>& f) const override {
                auto u = a->apply(f), v = b->apply(f);
                for (size_t i = 0; i < u.size(); ++i) u[i] = std::min(u[i], v[i]);
                return u;
            }
        };
        MinOp mn(op1, op2);
        std::mt19937_64 rng(13);
        for (int rep = 0; rep < 3; ++rep) {
            std::vector<double> f = random_potential(2, rng, -1, 1);
            auto env = kantorovich_envelope_apply(mn, f);
            auto direct = mn.apply(f);
            for (int i = 0; i < 2; ++i) CHECK(env[i] <= direct[i] + 1e-9);
        }
    }
}

TEST_CASE("conjugate pairs") {
    FiniteSpace s = make_line_space({0, 1, 2});
    Transfer d = make_metric_transfer(s);

    SUBCASE("hand-computed pair for g = [0,3,0]") {
        auto [psi0, psi1] = conjugate_pair(d, make_potential(s, {0, 3, 0}));
        CHECK(psi0.v == std::vector<double>{2, 3, 2});
        CHECK(psi1.v == std::vector<double>{2, 3, 2});
    }
    SUBCASE("idempotent on the range of T-") {
        Potential h = make_potential(s, {1, -2, 0.5});
        Potential g = (*d.backward)(h);  // g is of the form T- h
        auto [psi0, psi1] = conjugate_pair(d, g);
        for (int i = 0; i < 3; ++i) CHECK(psi0[i] == g[i]);
    }
    SUBCASE("T+ o T- dominates the identity") {
        std::mt19937_64 rng(14);
        for (int rep = 0; rep < 50; ++rep) {
            std::vector<double> g = random_potential(3, rng);
            auto [psi0, psi1] = conjugate_pair(d, make_potential(s, g));
            for (int i = 0; i < 3; ++i) CHECK(psi1[i] >= g[i] - 1e-12);
        }
    }
}
