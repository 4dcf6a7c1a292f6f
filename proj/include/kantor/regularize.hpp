#pragma once

// Wasserstein regularization T_eps = S_eps * T * S_eps with the
// (1/eps)-Lipschitz smoother S_eps g(x) = max_y { g(y) - d(x,y)/eps }.

#include "kantor/transfer.hpp"

namespace kantor {

struct RegularizedTransfer {
    Transfer base;
    double epsilon = 0.0;
    OperatorPtr smoother;  // S_eps
    Transfer reg;          // composed transfer; cost kinds materialize the table
};

OperatorPtr lipschitz_smoother(const FiniteSpace& space, double epsilon);

RegularizedTransfer regularize(const Transfer& t, double epsilon);

// Mane constants of T_eps along an epsilon ladder (cost representation after
// convolution required). Returned in the order of `eps`.
std::vector<double> c_epsilon_curve(const Transfer& t, const std::vector<double>& eps);

}  // namespace kantor
