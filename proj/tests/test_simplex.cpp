#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "kantor/simplex.hpp"

using namespace kantor;

TEST_CASE("rational arithmetic") {
    Rat a(1, 3), b(1, 6);
    CHECK((a + b) == Rat(1, 2));
    CHECK((a - b) == Rat(1, 6));
    CHECK((a * b) == Rat(1, 18));
    CHECK((a / b) == Rat(2));
    CHECK(Rat(2, -4) == Rat(-1, 2));
    CHECK(Rat(1, 3) < Rat(1, 2));
}

TEST_CASE("trivial lp") {
    // min x s.t. x = 1
    LinearProgram lp;
    lp.c = {1.0};
    lp.A = Mat::from_rows({{1.0}});
    lp.b = {1.0};
    LPResult r = lp_solve(lp);
    REQUIRE(r.status == LPStatus::optimal);
    CHECK(r.value == doctest::Approx(1.0));
    CHECK(r.x[0] == doctest::Approx(1.0));
}

TEST_CASE("infeasible lp is detected") {
    // x = 1 and x = 2
    LinearProgram lp;
    lp.c = {0.0};
    lp.A = Mat::from_rows({{1.0}, {1.0}});
    lp.b = {1.0, 2.0};
    CHECK(lp_solve(lp).status == LPStatus::infeasible);
}

TEST_CASE("unbounded lp is detected") {
    // min -x - y s.t. x - y = 0
    LinearProgram lp;
    lp.c = {-1.0, -1.0};
    lp.A = Mat::from_rows({{1.0, -1.0}});
    lp.b = {0.0};
    CHECK(lp_solve(lp).status == LPStatus::unbounded);
}

TEST_CASE("transportation instance") {
    // delta_0 -> delta_2 with cost |i-j| on 3 points forces value 2
    LinearProgram lp;
    const int n = 3;
    lp.c.resize(n * n);
    lp.A = Mat(2 * n, n * n);
    lp.b.assign(2 * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            lp.c[i * n + j] = std::abs(i - j);
            lp.A(i, i * n + j) = 1.0;
            lp.A(n + j, i * n + j) = 1.0;
        }
    lp.b[0] = 1.0;
    lp.b[n + 2] = 1.0;
    LPResult r = lp_solve(lp);
    REQUIRE(r.status == LPStatus::optimal);
    CHECK(r.value == doctest::Approx(2.0));
    // duals certify the same value
    double dual = lp.b[0] * r.dual[0] + lp.b[n + 2] * r.dual[n + 2];
    CHECK(dual == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("exact rational mode agrees with doubles on integer data") {
    std::mt19937_64 rng(13);
    std::uniform_int_distribution<int> cost(0, 10);
    for (int rep = 0; rep < 25; ++rep) {
        const int n = 3;
        std::vector<Rat> c(n * n), b(2 * n, Rat(0));
        std::vector<std::vector<Rat>> A(2 * n, std::vector<Rat>(n * n, Rat(0)));
        LinearProgram lp;
        lp.c.resize(n * n);
        lp.A = Mat(2 * n, n * n);
        lp.b.assign(2 * n, 0.0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                int v = cost(rng);
                c[i * n + j] = Rat(v);
                lp.c[i * n + j] = v;
                A[i][i * n + j] = Rat(1);
                A[n + j][i * n + j] = Rat(1);
                lp.A(i, i * n + j) = 1.0;
                lp.A(n + j, i * n + j) = 1.0;
            }
        // integer marginals scaled by 1/6
        std::vector<int> rm = {1, 2, 3}, cm = {2, 2, 2};
        for (int i = 0; i < n; ++i) {
            b[i] = Rat(rm[i], 6);
            lp.b[i] = rm[i] / 6.0;
            b[n + i] = Rat(cm[i], 6);
            lp.b[n + i] = cm[i] / 6.0;
        }
        ExactLPResult er = lp_solve_exact(c, A, b);
        LPResult dr = lp_solve(lp);
        REQUIRE(er.status == LPStatus::optimal);
        REQUIRE(dr.status == LPStatus::optimal);
        CHECK(er.value.to_double() == doctest::Approx(dr.value).epsilon(1e-9));
    }
}
