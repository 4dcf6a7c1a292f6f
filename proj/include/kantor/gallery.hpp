#pragma once

// Constructors for the example transfers: costs, metrics, power costs,
// push-forwards, Markov and Schroedinger kernels, and the 1-D envelope
// family (balayage, martingale, variance, Marton).

#include <optional>

#include "kantor/transfer.hpp"

namespace kantor {

enum class GammaKind { identity, square };

struct GallerySpec {
    TransferKind kind = TransferKind::cost;
    FiniteSpace space;                  // source; also target unless `target` set
    std::optional<FiniteSpace> target;  // rectangular kinds
    std::optional<Mat> cost;            // cost / martingale payload
    std::optional<Mat> kernel;          // markov / entropic payload
    std::vector<int> sigma;             // pushforward payload
    double p = 2.0;                     // power_cost exponent, p > 0
    GammaKind gamma = GammaKind::square;  // marton
    std::optional<Mat> dtable;            // marton distance, defaults to the metric
};

// Pointwise upper concave envelope of f on the 1-D grid given by coords
// (strictly increasing); the upper convex hull of the graph evaluated at
// the grid points.
std::vector<double> concave_envelope(const std::vector<double>& coords, const std::vector<double>& f);
Potential concave_envelope(const Potential& f);

Transfer make_transfer(const GallerySpec& spec);

// value of the kind's backward operator at one point
double gallery_apply(const GallerySpec& spec, const Potential& f, int x);

// power-cost table |x_i - x_j|^p / divisor on the space's coords
Mat power_cost_matrix(const FiniteSpace& space, double p, double divisor = 1.0);

// convex order mu < nu (equal means, dominated call payoffs); used by the
// balayage transfer's 0/inf values
bool convex_order(const Measure& mu, const Measure& nu, double tol = 1e-9);

}  // namespace kantor
