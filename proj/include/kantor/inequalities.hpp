#pragma once

// Transport-entropy inequality machinery: entropic convolution duals,
// Maurey-type product conditions, and primal violation scanners.

#include "kantor/primal_dual.hpp"

namespace kantor {

struct InequalitySpec {
    Transfer lhs;  // F, backward; a single-operator Kantorovich family
    Transfer t1, t2;  // linear components of the rhs (identity transfers allowed)
    Transfer e1, e2;  // entropic kind; identity kernel = plain logarithmic entropy
    double lambda1 = 1.0, lambda2 = 1.0;
    Measure mu, nu;  // reference measures

    int sigma_steps = 100;  // simplex grid resolution for primal scans
    int g_levels = 21;      // potential grid levels per coordinate
    double g_span = 0.0;    // 0 -> 3 * instance range
    void validate() const;
};

struct GridOptions {
    int levels = 21;
    double span = 0.0;  // 0 -> 3 * range heuristic
    int refine_passes = 1;
};

// inf over the potential grid of beta(int E- o F- f dmu) - int f dnu, i.e.
// -(E * F)(mu, nu); with the identity F this is -KL(nu || mu).
double entropic_conv_dual(const Transfer& E, const Transfer& F, const Measure& mu,
                          const Measure& nu, GridOptions opts = {});

struct MaureyReport {
    double worst_product = 0.0;
    std::vector<double> witness_g;
    bool pass = false;  // worst <= 1 (+1e-9)
};

// worst value over the g-grid of
//   (int e^{-T1+((1/l1) F- g)} dmu)^{l1} (int e^{-T2+(-g/l2)} dnu)^{l2}
MaureyReport maurey_dual_check(const InequalitySpec& spec);

struct PrimalScanReport {
    double worst_violation = -kInf;  // max F - rhs over the sigma grids
    Measure witness_sigma1, witness_sigma2;
    bool pass = false;  // worst <= 1e-9
};

// scans F(s1,s2) <= l1 (T1*E1)(s1,mu) + l2 (T2*E2)(s2,nu) over simplex grids
PrimalScanReport primal_inequality_scan(const InequalitySpec& spec);

// rhs component value (T*E)(sigma, ref) with E entropic: KL for identity
// kernel/transfer, inner rho-grid otherwise
double rhs_component(const Transfer& t, const Transfer& e, const Measure& sigma,
                     const Measure& ref, int rho_steps = 100);

}  // namespace kantor
