#pragma once

// Transfers: bivariate value objects on measures, dual to Kantorovich
// operators, plus the operation calculus (convolution, tensor, scalar
// action, dual sum, recession, envelopes, conjugate pairs).

#include <functional>
#include <optional>
#include <vector>

#include "kantor/operators.hpp"

namespace kantor {

enum class TransferKind {
    cost,         // optimal transport for a cost table
    metric,       // Kantorovich-Rubinstein (cost = metric)
    power_cost,   // |x-y|^p on a coordinate grid
    pushforward,  // 0/inf transfer of a point map
    markov,       // 0/inf transfer of a Markov kernel
    entropic,     // Schroedinger form, dual objective is the Gibbs one
    balayage,     // convex-order 0/inf transfer (1-D)
    martingale,   // martingale transport (1-D)
    variance,     // T(mu,nu) = -var(nu)
    marton,       // weak transport gamma(int d dsigma)
    composite,    // inf-convolution chain
    dual_sum,     // square operation
    custom        // operator-only wrapper (scaled, regularized, ...)
};

// Generalized cost c(x, sigma) with sigma a weight vector over the target.
using WeakCost = std::function<double(int, const std::vector<double>&)>;

struct Transfer {
    TransferKind kind = TransferKind::custom;
    FiniteSpace source, target;
    OperatorPtr backward;  // null when the direction is missing
    OperatorPtr forward;
    bool symmetric = false;

    std::optional<Mat> cost;      // cost-like kinds
    std::optional<Mat> kernel;    // markov / entropic
    std::optional<Mat> aux_cost;  // martingale cost payload
    std::vector<int> sigma_map;   // pushforward
    double power_p = 0.0;
    std::vector<Transfer> children;  // composite / dual_sum
    WeakCost weak_cost;              // null when not available

    bool has_backward() const { return backward != nullptr; }
    bool has_forward() const { return forward != nullptr; }
    bool is_cost_like() const { return cost.has_value(); }
};

Transfer make_cost_transfer(Mat cost, FiniteSpace source, FiniteSpace target);
Transfer make_cost_transfer(Mat cost, const FiniteSpace& space);  // square, X = Y
// metric transfer of the space's own metric table
Transfer make_metric_transfer(const FiniteSpace& space);
Transfer make_markov_transfer(Mat kernel, FiniteSpace source, FiniteSpace target);
Transfer make_entropic_transfer(Mat kernel, FiniteSpace source, FiniteSpace target);
Transfer make_pushforward_transfer(std::vector<int> sigma, FiniteSpace source, FiniteSpace target);
Transfer identity_transfer(const FiniteSpace& space);
Transfer zero_transfer(const FiniteSpace& space);  // null transfer, T-f = sup f

// ---- operations (Section 6 calculus) ----

// inf-convolution T1 * T2; cost representations materialize the min-plus
// product, everything else stores the operator composition.
Transfer convolve(const Transfer& a, const Transfer& b);

// tensor product on the product space; cost representations only.
Transfer tensor(const Transfer& a, const Transfer& b);

// a . T with operator f -> a T(f/a); cost representations scale the table.
Transfer scalar_mult(double a, const Transfer& t);

// square operation: operator T1 + T2, transfer defined by its dual formula.
Transfer dual_sum(const Transfer& a, const Transfer& b);

// positively homogeneous recession operator lim T(lambda f)/lambda.
// Cost representations use the finite-entry pattern closed form; otherwise
// lambda-doubling until successive normalized values differ < 1e-9 (k <= 60).
OperatorPtr recession(const Transfer& t);

// f -> inf_s { s T(f/s) + alpha_conj(s) } over a log s-grid with refinement.
// alpha_conj is the increasing conjugate sup_t {st - alpha(t)}; when absent it
// is tabulated from alpha by grid search.
struct AlphaEnvelopeOptions {
    double s_min = 1e-6, s_max = 1e6;
    int grid = 49;
    int refine_passes = 3;
};
OperatorPtr alpha_envelope(const Transfer& t, const std::function<double(double)>& alpha,
                           std::function<double(double)> alpha_conj = nullptr,
                           AlphaEnvelopeOptions opts = {});

// Largest-Kantorovich-operator-below minimax evaluated on simplex x potential
// grids (|input| <= 4): value per point of sup_sigma inf_g { <f-g, sigma> + Tg(x) }.
struct EnvelopeGridOptions {
    int sigma_steps = 16;   // simplex resolution
    int g_values = 13;      // per-coordinate potential levels
    double g_radius = 0.0;  // 0: use 3 * range(f)
    int refine_passes = 2;
};
std::vector<double> kantorovich_envelope_apply(const Operator& T, const std::vector<double>& f,
                                               EnvelopeGridOptions opts = {});

// conjugate pair (psi0, psi1) = (T-g, T+ T- g); verifies psi0 = T-psi1 and
// psi1 = T+psi0 within 1e-10 and throws on violation.
std::pair<Potential, Potential> conjugate_pair(const Transfer& t, const Potential& g);

}  // namespace kantor
