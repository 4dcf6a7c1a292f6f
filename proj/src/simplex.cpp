#include "kantor/simplex.hpp"

#include <algorithm>
#include <cmath>

namespace kantor {

namespace {

int64_t checked(__int128 v) {
    if (v > INT64_MAX || v < INT64_MIN) throw error("rational overflow");
    return static_cast<int64_t>(v);
}

}  // namespace

Rat::Rat(int64_t n, int64_t d) {
    if (d == 0) throw error("rational with zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    int64_t g = std::gcd(n < 0 ? -n : n, d);
    if (g > 1) {
        n /= g;
        d /= g;
    }
    num = n;
    den = d;
}

static Rat make_rat128(__int128 n, __int128 d) {
    if (d == 0) throw error("rational with zero denominator");
    if (d < 0) {
        n = -n;
        d = -d;
    }
    __int128 a = n < 0 ? -n : n, b = d;
    while (b) {
        __int128 t = a % b;
        a = b;
        b = t;
    }
    if (a > 1) {
        n /= a;
        d /= a;
    }
    Rat r;
    r.num = checked(n);
    r.den = checked(d);
    return r;
}

Rat operator+(const Rat& a, const Rat& b) {
    return make_rat128(static_cast<__int128>(a.num) * b.den + static_cast<__int128>(b.num) * a.den,
                       static_cast<__int128>(a.den) * b.den);
}
Rat operator-(const Rat& a, const Rat& b) {
    return make_rat128(static_cast<__int128>(a.num) * b.den - static_cast<__int128>(b.num) * a.den,
                       static_cast<__int128>(a.den) * b.den);
}
Rat operator*(const Rat& a, const Rat& b) {
    return make_rat128(static_cast<__int128>(a.num) * b.num, static_cast<__int128>(a.den) * b.den);
}
Rat operator/(const Rat& a, const Rat& b) {
    if (b.num == 0) throw error("rational division by zero");
    return make_rat128(static_cast<__int128>(a.num) * b.den, static_cast<__int128>(a.den) * b.num);
}
bool operator<(const Rat& a, const Rat& b) {
    return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
}

void LinearProgram::validate() const {
    if (A.rows != static_cast<int>(b.size())) throw std::invalid_argument("lp: rhs size != row count");
    if (A.cols != static_cast<int>(c.size())) throw std::invalid_argument("lp: objective size != column count");
    for (double v : b)
        if (!std::isfinite(v)) throw std::invalid_argument("lp: rhs must be finite");
}

namespace {

// Scalar concepts shared by the double and rational tableaus.
template <class T>
struct Scal;

template <>
struct Scal<double> {
    static double zero() { return 0.0; }
    static bool is_neg(double v) { return v < -1e-9; }
    static bool is_pos(double v) { return v > 1e-9; }
    static bool lt(double a, double b) { return a < b - 1e-12; }
};

template <>
struct Scal<Rat> {
    static Rat zero() { return Rat(0); }
    static bool is_neg(const Rat& v) { return v.num < 0; }
    static bool is_pos(const Rat& v) { return v.num > 0; }
    static bool lt(const Rat& a, const Rat& b) { return a < b; }
};

template <class T>
struct Tableau {
    int m, n;                        // constraints, structural vars
    std::vector<std::vector<T>> A;   // m x (n + m), artificials appended
    std::vector<T> b;                // m
    std::vector<int> basis;          // m, column index of basic var per row
    std::vector<T> cost;             // n + m objective
    std::vector<T> red;              // reduced costs
    T obj;

    // current reduced costs and objective for the given cost vector
    void price() {
        red = cost;
        obj = Scal<T>::zero();
        for (int i = 0; i < m; ++i) {
            const T cb = cost[basis[i]];
            if (!(cb == Scal<T>::zero())) {
                obj = obj + cb * b[i];
                for (int j = 0; j < n + m; ++j) red[j] = red[j] - cb * A[i][j];
            }
        }
    }

    // Bland's rule: lowest eligible column enters, lowest basic index leaves.
    // `allowed` masks columns that may enter. Returns false when optimal.
    LPStatus run(const std::vector<bool>& allowed) {
        const int iter_cap = 20000 * (n + m + 1);
        for (int it = 0; it < iter_cap; ++it) {
            price();
            int enter = -1;
            for (int j = 0; j < n + m; ++j)
                if (allowed[j] && Scal<T>::is_neg(red[j])) {
                    enter = j;
                    break;
                }
            if (enter < 0) return LPStatus::optimal;
            int leave = -1;
            T best_ratio = Scal<T>::zero();
            for (int i = 0; i < m; ++i) {
                if (!Scal<T>::is_pos(A[i][enter])) continue;
                T ratio = b[i] / A[i][enter];
                bool take = leave < 0 || Scal<T>::lt(ratio, best_ratio) ||
                            (!Scal<T>::lt(best_ratio, ratio) && basis[i] < basis[leave]);
                if (take) {
                    leave = i;
                    best_ratio = ratio;
                }
            }
            if (leave < 0) return LPStatus::unbounded;
            do_pivot(leave, enter);
        }
        throw error("simplex iteration cap exceeded");
    }

    void do_pivot(int r, int col) {
        T p = A[r][col];
        for (int j = 0; j < n + m; ++j) A[r][j] = A[r][j] / p;
        b[r] = b[r] / p;
        for (int i = 0; i < m; ++i) {
            if (i == r) continue;
            T f = A[i][col];
            if (f == Scal<T>::zero()) continue;
            for (int j = 0; j < n + m; ++j) A[i][j] = A[i][j] - f * A[r][j];
            b[i] = b[i] - f * b[r];
        }
        basis[r] = col;
    }
};

template <class T>
struct SolveOut {
    LPStatus status;
    std::vector<T> x;
    T value;
    std::vector<T> dual;
    bool feas_zero;
};

template <class T>
SolveOut<T> simplex_solve(const std::vector<T>& c, const std::vector<std::vector<T>>& Arows,
                          const std::vector<T>& brhs, bool is_phase1_zero(const T&)) {
    Tableau<T> t;
    t.m = static_cast<int>(Arows.size());
    t.n = static_cast<int>(c.size());
    t.A.assign(t.m, std::vector<T>(t.n + t.m, Scal<T>::zero()));
    t.b = brhs;
    t.basis.resize(t.m);
    for (int i = 0; i < t.m; ++i) {
        for (int j = 0; j < t.n; ++j) t.A[i][j] = Arows[i][j];
        if (Scal<T>::is_neg(t.b[i])) {
            t.b[i] = Scal<T>::zero() - t.b[i];
            for (int j = 0; j < t.n; ++j) t.A[i][j] = Scal<T>::zero() - t.A[i][j];
        }
        t.A[i][t.n + i] = T(1);
        t.basis[i] = t.n + i;
    }

    std::vector<bool> allow_all(t.n + t.m, true);
    std::vector<bool> allow_structural(t.n + t.m, false);
    for (int j = 0; j < t.n; ++j) allow_structural[j] = true;

    // phase 1: drive artificials to zero
    t.cost.assign(t.n + t.m, Scal<T>::zero());
    for (int i = 0; i < t.m; ++i) t.cost[t.n + i] = T(1);
    LPStatus s1 = t.run(allow_all);
    (void)s1;  // phase 1 is bounded below by 0
    t.price();
    SolveOut<T> out;
    if (!is_phase1_zero(t.obj)) {
        out.status = LPStatus::infeasible;
        out.value = t.obj;
        out.feas_zero = false;
        return out;
    }
    // pivot remaining basic artificials out where possible
    for (int i = 0; i < t.m; ++i) {
        if (t.basis[i] < t.n) continue;
        int col = -1;
        for (int j = 0; j < t.n; ++j)
            if (Scal<T>::is_pos(t.A[i][j]) || Scal<T>::is_neg(t.A[i][j])) {
                col = j;
                break;
            }
        if (col >= 0) t.do_pivot(i, col);
        // a fully zero row is redundant; its artificial stays basic at zero
    }

    // phase 2: original objective, artificials barred from entering
    t.cost.assign(t.n + t.m, Scal<T>::zero());
    for (int j = 0; j < t.n; ++j) t.cost[j] = c[j];
    LPStatus s2 = t.run(allow_structural);
    t.price();
    out.status = s2;
    out.x.assign(t.n, Scal<T>::zero());
    if (s2 == LPStatus::optimal)
        for (int i = 0; i < t.m; ++i)
            if (t.basis[i] < t.n) out.x[t.basis[i]] = t.b[i];
    out.value = t.obj;
    // duals: reduced cost of artificial column i is -y_i (artificial costs are 0 in phase 2)
    out.dual.resize(t.m);
    for (int i = 0; i < t.m; ++i) out.dual[i] = Scal<T>::zero() - t.red[t.n + i];
    out.feas_zero = true;
    return out;
}

bool phase1_zero_d(const double& v) { return std::abs(v) <= 1e-7; }
bool phase1_zero_r(const Rat& v) { return v.num == 0; }

}  // namespace

LPResult lp_solve(const LinearProgram& lp) {
    lp.validate();
    int m = lp.A.rows, n = lp.A.cols;
    std::vector<std::vector<double>> A(m, std::vector<double>(n));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n; ++j) A[i][j] = lp.A(i, j);
    auto out = simplex_solve<double>(lp.c, A, lp.b, phase1_zero_d);
    LPResult r;
    r.status = out.status;
    if (out.status == LPStatus::optimal) {
        r.x = out.x;
        r.value = out.value;
        r.dual = out.dual;
    }
    return r;
}

ExactLPResult lp_solve_exact(const std::vector<Rat>& c, const std::vector<std::vector<Rat>>& A,
                             const std::vector<Rat>& b) {
    auto out = simplex_solve<Rat>(c, A, b, phase1_zero_r);
    ExactLPResult r;
    r.status = out.status;
    if (out.status == LPStatus::optimal) {
        r.x = out.x;
        r.value = out.value;
    }
    return r;
}

}  // namespace kantor
