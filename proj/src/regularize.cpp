#include "kantor/regularize.hpp"

#include "kantor/ergodic.hpp"

namespace kantor {

OperatorPtr lipschitz_smoother(const FiniteSpace& space, double epsilon) {
    if (!space.has_metric()) throw error("regularize needs a metric on the ground space");
    if (!(epsilon > 0)) throw std::invalid_argument("epsilon must be positive");
    Mat d = *space.metric;
    for (double& v : d.a) v /= epsilon;
    return std::make_shared<CostBackwardOp>(std::move(d), space, space);
}

RegularizedTransfer regularize(const Transfer& t, double epsilon) {
    if (!same_space(t.source, t.target)) throw error("regularize: square transfer required");
    const FiniteSpace& s = t.source;
    RegularizedTransfer out;
    out.base = t;
    out.epsilon = epsilon;
    out.smoother = lipschitz_smoother(s, epsilon);

    if (t.is_cost_like()) {
        Mat d = *s.metric;
        for (double& v : d.a) v /= epsilon;
        Mat conv = minplus_product(minplus_product(d, *t.cost), d);
        out.reg = make_cost_transfer(std::move(conv), s, s);
        out.reg.kind = TransferKind::custom;
        return out;
    }
    if (!t.has_backward()) throw error("regularize needs the backward operator");
    Transfer reg;
    reg.kind = TransferKind::custom;
    reg.source = s;
    reg.target = s;
    reg.backward = std::make_shared<CompositeOp>(
        out.smoother, std::make_shared<CompositeOp>(t.backward, out.smoother));
    out.reg = std::move(reg);
    return out;
}

std::vector<double> c_epsilon_curve(const Transfer& t, const std::vector<double>& eps) {
    std::vector<double> out;
    out.reserve(eps.size());
    for (double e : eps) {
        RegularizedTransfer r = regularize(t, e);
        if (!r.reg.is_cost_like()) throw error("c_epsilon_curve: cost representation required");
        out.push_back(mane_min_mean_cycle(*r.reg.cost).value);
    }
    return out;
}

}  // namespace kantor
