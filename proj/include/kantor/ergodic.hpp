#pragma once

// Ergodic objects of a transfer: Mane constant (three routes), weak KAM
// solutions, Peierls barrier, Aubry set, Mather measures, Schroedinger
// effective limits.

#include <string>

#include "kantor/transfer.hpp"

namespace kantor {

struct MinMeanCycleResult {
    double value = kInf;  // +inf when the graph has no finite cycle
    int64_t num = 0;      // exact fraction num/den on the integer path
    int64_t den = 1;
    bool exact = false;
};

// minimum mean over directed cycles of the cost graph, Karp's recurrence
// from all sources; exact rational for integral tables.
MinMeanCycleResult mane_min_mean_cycle(const Mat& C);

// LP over couplings with equal marginals: min <C, pi>, pi >= 0, sum pi = 1,
// row marginal = column marginal. Exact rational value on integral tables.
MinMeanCycleResult mane_diag_lp(const Mat& C);

struct IterativeManeResult {
    double estimate = 0.0;
    double error_bound = kInf;  // (range f + K)/n, K = 2 n_states range(C) for costs
    int n = 0;
};

// -(T^n f)(x0)/n with x0 = 0.
IterativeManeResult mane_iterative(const Transfer& t, const Potential& f, int n);

struct WeakKAMResult {
    Potential u;            // normalized u(x0) = 0
    double residual = kInf;  // ||Tu + c - u||_inf
    int stage1_iters = 0;
    int stage2_iters = 0;
};

struct WeakKAMOptions {
    int x0 = 0;
    int64_t max_iters = 1000000;
    double stage2_tol = 1e-12;
};

// two-stage construction: running-sup stabilization of T^n f + nc over a
// sliding window of width 4 * n_states, then monotone iteration of T on the
// stabilized function.
WeakKAMResult weak_kam_solve(const Transfer& t, double c, WeakKAMOptions opts = {});

struct PeierlsResult {
    Mat c_inf;                    // +inf sentinels for unreachable pairs
    std::vector<int> aubry;       // points with c_inf(x,x) = 0 (tol 1e-9 on floats)
    bool exact = false;           // integer path (scaled-integer arithmetic)
    int64_t denom = 1;            // c_inf = c_inf_scaled / denom on the exact path
    IMat c_inf_scaled;            // row-major, kIntInf sentinel
    bool tolerance_ambiguity = false;  // float path relied on the 1e-9 cutoff
};

// Peierls barrier of the tilted matrix B = C - c: Kleene star + factorization
// through the critical nodes. `c` must come from a mane_* route.
PeierlsResult peierls_barrier(const Mat& C, const MinMeanCycleResult& c);

// idempotent effective operator: cost -> max-plus with kernel c_inf;
// entropic -> f -> log <e^f, m>; markov -> f -> <f, m>.
OperatorPtr effective_operator(const Transfer& t);
// the effective transfer itself (cost representation with kernel c_inf when
// available, rank-one kernels otherwise)
Transfer effective_transfer(const Transfer& t);

// one canonical optimizer of the diagonal problem: the uniform edge coupling
// on a lowest-index minimum-mean cycle; LP-optimality and support in the
// generalized Aubry set are verified.
Coupling mather_measure(const Mat& C, const FiniteSpace& space);

struct SchrodingerResult {
    std::vector<double> m;  // invariant distribution
    int iterations = 0;
};

// invariant distribution via kernel power iteration to 1e-12 (cap 1e5);
// throws on periodic kernels.
SchrodingerResult schrodinger_effective(const Mat& P);

struct ErgodicSummary {
    double c = 0.0;
    MinMeanCycleResult c_detail;
    Potential u;
    double residual = kInf;
    Mat peierls;
    std::vector<int> aubry;
    Coupling mather;
    std::vector<std::string> method;  // provenance tags
};

// one-stop summary for cost representations
ErgodicSummary ergodic_summary(const Transfer& t);

}  // namespace kantor
