#pragma once

// Dense two-phase simplex with Bland's rule, in a double flavor and an
// exact rational flavor for integer data. Instances here are tiny by
// design (transport plans, occupation measures), so dense tableaus are fine.

#include <cstdint>
#include <numeric>
#include <vector>

#include "kantor/matrix.hpp"
#include "kantor/space.hpp"

namespace kantor {

// Exact fraction on int64 with 128-bit intermediates. Throws on overflow
// rather than silently losing exactness.
struct Rat {
    int64_t num = 0;
    int64_t den = 1;

    Rat() = default;
    Rat(int64_t n) : num(n), den(1) {}
    Rat(int64_t n, int64_t d);

    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

    friend Rat operator+(const Rat& a, const Rat& b);
    friend Rat operator-(const Rat& a, const Rat& b);
    friend Rat operator*(const Rat& a, const Rat& b);
    friend Rat operator/(const Rat& a, const Rat& b);
    friend Rat operator-(const Rat& a) { return Rat(-a.num, a.den); }
    friend bool operator==(const Rat& a, const Rat& b) { return a.num == b.num && a.den == b.den; }
    friend bool operator<(const Rat& a, const Rat& b);
    friend bool operator>(const Rat& a, const Rat& b) { return b < a; }
    friend bool operator<=(const Rat& a, const Rat& b) { return !(b < a); }
    friend bool operator>=(const Rat& a, const Rat& b) { return !(a < b); }
};

// min c.x  s.t.  A x = b, x >= 0
struct LinearProgram {
    std::vector<double> c;
    Mat A;
    std::vector<double> b;

    void validate() const;
};

enum class LPStatus { optimal, infeasible, unbounded };

struct LPResult {
    LPStatus status = LPStatus::optimal;
    std::vector<double> x;
    double value = 0.0;
    std::vector<double> dual;  // one multiplier per equality row
};

struct ExactLPResult {
    LPStatus status = LPStatus::optimal;
    std::vector<Rat> x;
    Rat value;
};

LPResult lp_solve(const LinearProgram& lp);

// Exact path: c, A, b are taken as rationals (entries must be integral or
// small dyadic; pass exact data). Throws kantor::error on rational overflow.
ExactLPResult lp_solve_exact(const std::vector<Rat>& c, const std::vector<std::vector<Rat>>& A,
                             const std::vector<Rat>& b);

}  // namespace kantor
