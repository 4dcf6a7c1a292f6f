#pragma once

// Controlled random walks on a cyclic grid: the stochastic Bellman operator,
// relative value iteration for (c, u), the occupation-measure LP, and
// domination checks.

#include "kantor/operators.hpp"
#include "kantor/transfer.hpp"

namespace kantor {

struct ControlledChain {
    int N = 0;    // grid size per dimension
    int dim = 1;  // 1 or 2
    FiniteSpace space;
    std::vector<std::vector<int>> controls;  // integer shift per dimension
    std::vector<Mat> kernels;                // one row-stochastic table per control
    Mat lagrangian;                          // states x controls, L >= 0

    int states() const { return space.n; }
    int ncontrols() const { return static_cast<int>(controls.size()); }
    void validate() const;
};

// lazy-walk convolution kernel: after shifting by v, stay with 1/2 and move
// to each axis neighbor with the remaining mass (1/4 each in 1-D, 1/8 in 2-D)
ControlledChain make_lazy_chain(int N, int dim, std::vector<std::vector<int>> controls,
                                const std::vector<double>& potential = {});

// Tu(x) = max_v [ sum_x' p(x'|x,v) u(x') - L(x,v) ], ties toward the lowest v
Potential bellman_apply(const ControlledChain& chain, const Potential& u);
std::vector<int> bellman_argmax(const ControlledChain& chain, const Potential& u);
// the Bellman operator as a Kantorovich operator (axiom suite target)
OperatorPtr bellman_operator(const ControlledChain& chain);

struct RVIResult {
    double c = 0.0;
    Potential u;
    double residual = kInf;
    int iterations = 0;
};

// relative value iteration, pinned at state 0, span-seminorm stopping
RVIResult relative_value_iteration(const ControlledChain& chain, double span_tol = 1e-10,
                                   int64_t max_iters = 1000000);

struct OccupationResult {
    double c = 0.0;
    Mat m;  // states x controls occupation table
    double invariance_residual = kInf;
};

// min sum L m over invariant state-control occupation measures
OccupationResult occupation_lp(const ControlledChain& chain);

// T_n u + k n <= u entrywise for every n <= horizon (tolerance 1e-9)
bool domination_check(const ControlledChain& chain, const Potential& u, double k, int horizon);

// sup { k : domination_check(chain, u, k, horizon) } by bisection
double domination_sup(const ControlledChain& chain, const Potential& u, int horizon,
                      double tol = 1e-7);

}  // namespace kantor
