#pragma once

// Primal solvers (transportation LP, brute-force weak transport on tiny
// spaces) and concave dual ascent with duality-gap certification.

#include "kantor/simplex.hpp"
#include "kantor/transfer.hpp"

namespace kantor {

struct OTResult {
    double value = 0.0;
    Coupling plan;
    std::vector<double> potential_g;  // dual potential on the target side
};

// optimal transport for a cost table (finite or +inf entries)
OTResult primal_ot(const Mat& cost, const Measure& mu, const Measure& nu);

// W1 distance: optimal transport of the space's metric
double wasserstein1(const Measure& mu, const Measure& nu);

// Brute-force weak transport: min over disintegrations {pi_x} with
// sum mu(x) pi_x = nu of sum mu(x) c(x, pi_x), scanned on a simplex grid
// (coarse step then one refinement pass). Sizes <= 3 by contract.
struct WeakPrimalOptions {
    int coarse_steps = 100;  // 1e-2 grid
    int refine_steps = 100;  // refines each coarse cell by another factor 100 -> 1e-4
};
double primal_weak_bruteforce(const Transfer& t, const Measure& mu, const Measure& nu,
                              WeakPrimalOptions opts = {});

struct DualAscentReport {
    double value = -kInf;          // best objective seen
    std::vector<double> maximizer;  // g attaining it
    int iterations = 0;
    double gap = kInf;     // vs primal when available, else +inf
    bool attained = false;  // supergradient vanished / no improvement possible
    bool diverging = false;  // objective trending to +inf (certifies T = +inf)
};

// Projected supergradient ascent on g -> int g dnu - int T-g dmu (Gibbs
// objective for the entropic kind). Step a/sqrt(t); stops when the best
// value plateaus below 1e-10 over a window or at max_iters.
DualAscentReport dual_ascent(const Transfer& t, const Measure& mu, const Measure& nu,
                             int max_iters = 20000);

// Dual value sup { int g dnu - int T-g dmu }: exact LP route for cost
// representations, ascent otherwise.
DualAscentReport dual_value(const Transfer& t, const Measure& mu, const Measure& nu);

enum class EvalMethod { automatic, primal, dual, ascent };

// Transfer value T(mu, nu) by the representation's natural route:
// cost-like -> LP; 0/inf kinds -> feasibility checks; entropic -> Gibbs
// ascent; everything else -> dual ascent (weak duality lower bound).
double transfer_value(const Transfer& t, const Measure& mu, const Measure& nu,
                      EvalMethod method = EvalMethod::automatic);

}  // namespace kantor
