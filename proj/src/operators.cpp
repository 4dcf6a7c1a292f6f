#include "kantor/operators.hpp"

#include <algorithm>
#include <cmath>

namespace kantor {

Mat Operator::supergradient(const std::vector<double>&) const {
    throw error("operator has no supergradient");
}

CostBackwardOp::CostBackwardOp(Mat cost, FiniteSpace source, FiniteSpace target)
    : Operator(Direction::backward, std::move(target), std::move(source)), cost_(std::move(cost)) {
    if (cost_.rows != output().n || cost_.cols != input().n)
        throw std::invalid_argument("cost shape != source x target");
}

std::vector<double> CostBackwardOp::apply(const std::vector<double>& f) const {
    return maxplus_apply(cost_, f);
}

Mat CostBackwardOp::supergradient(const std::vector<double>& f) const {
    std::vector<int> arg;
    maxplus_apply(cost_, f, &arg);
    Mat G(output().n, input().n);
    for (int x = 0; x < output().n; ++x)
        if (arg[x] >= 0) G(x, arg[x]) = 1.0;
    return G;
}

CostForwardOp::CostForwardOp(Mat cost, FiniteSpace source, FiniteSpace target)
    : Operator(Direction::forward, std::move(source), std::move(target)), cost_(std::move(cost)) {
    if (cost_.rows != input().n || cost_.cols != output().n)
        throw std::invalid_argument("cost shape != source x target");
}

std::vector<double> CostForwardOp::apply(const std::vector<double>& f) const {
    return minplus_apply(cost_, f);
}

Mat CostForwardOp::supergradient(const std::vector<double>& f) const {
    std::vector<int> arg;
    minplus_apply(cost_, f, &arg);
    Mat G(output().n, input().n);
    for (int y = 0; y < output().n; ++y)
        if (arg[y] >= 0) G(y, arg[y]) = 1.0;
    return G;
}

namespace {

void check_row_stochastic(const Mat& k) {
    for (int i = 0; i < k.rows; ++i) {
        double s = 0.0;
        for (int j = 0; j < k.cols; ++j) {
            if (k(i, j) < 0) throw std::invalid_argument("kernel entry negative");
            s += k(i, j);
        }
        if (std::abs(s - 1.0) > 1e-12) throw std::invalid_argument("kernel row mass differs from 1 beyond 1e-12");
    }
}

}  // namespace

MarkovOp::MarkovOp(Mat kernel, FiniteSpace source, FiniteSpace target)
    : Operator(Direction::backward, std::move(target), std::move(source)), kernel_(std::move(kernel)) {
    if (kernel_.rows != output().n || kernel_.cols != input().n)
        throw std::invalid_argument("kernel shape != source x target");
    check_row_stochastic(kernel_);
}

std::vector<double> MarkovOp::apply(const std::vector<double>& f) const {
    return kernel_apply(kernel_, f);
}

Mat MarkovOp::supergradient(const std::vector<double>&) const { return kernel_; }

EntropicOp::EntropicOp(Mat kernel, FiniteSpace source, FiniteSpace target)
    : Operator(Direction::backward, std::move(target), std::move(source)), kernel_(std::move(kernel)) {
    if (kernel_.rows != output().n || kernel_.cols != input().n)
        throw std::invalid_argument("kernel shape != source x target");
    check_row_stochastic(kernel_);
}

std::vector<double> EntropicOp::apply(const std::vector<double>& f) const {
    return logsumexp_apply(kernel_, f);
}

Mat EntropicOp::supergradient(const std::vector<double>& f) const {
    // gradient rows are the Gibbs reweightings S(x,.)e^f / sum
    Mat G(output().n, input().n);
    for (int x = 0; x < output().n; ++x) {
        double hi = -kInf;
        for (int y = 0; y < input().n; ++y)
            if (kernel_(x, y) > 0) hi = std::max(hi, f[y]);
        double z = 0.0;
        for (int y = 0; y < input().n; ++y)
            if (kernel_(x, y) > 0 && f[y] != -kInf) z += kernel_(x, y) * std::exp(f[y] - hi);
        for (int y = 0; y < input().n; ++y)
            if (kernel_(x, y) > 0 && f[y] != -kInf) G(x, y) = kernel_(x, y) * std::exp(f[y] - hi) / z;
    }
    return G;
}

PushforwardOp::PushforwardOp(std::vector<int> sigma, FiniteSpace source, FiniteSpace target)
    : Operator(Direction::backward, std::move(target), std::move(source)), sigma_(std::move(sigma)) {
    if (static_cast<int>(sigma_.size()) != output().n) throw std::invalid_argument("sigma size != source n");
    for (int v : sigma_)
        if (v < 0 || v >= input().n) throw std::invalid_argument("sigma maps outside target");
}

std::vector<double> PushforwardOp::apply(const std::vector<double>& f) const {
    std::vector<double> out(output().n);
    for (int x = 0; x < output().n; ++x) out[x] = f[sigma_[x]];
    return out;
}

Mat PushforwardOp::supergradient(const std::vector<double>&) const {
    Mat G(output().n, input().n);
    for (int x = 0; x < output().n; ++x) G(x, sigma_[x]) = 1.0;
    return G;
}

CompositeOp::CompositeOp(OperatorPtr outer, OperatorPtr inner)
    : Operator(outer->direction(), inner->input(), outer->output()), outer_(std::move(outer)), inner_(std::move(inner)) {
    if (!same_space(outer_->input(), inner_->output()))
        throw std::invalid_argument("composite: middle spaces differ");
    if (outer_->direction() != inner_->direction()) throw error("composite: direction mismatch");
}

std::vector<double> CompositeOp::apply(const std::vector<double>& f) const {
    return outer_->apply(inner_->apply(f));
}

bool CompositeOp::has_supergradient() const {
    return outer_->has_supergradient() && inner_->has_supergradient();
}

Mat CompositeOp::supergradient(const std::vector<double>& f) const {
    std::vector<double> h = inner_->apply(f);
    Mat Go = outer_->supergradient(h);
    Mat Gi = inner_->supergradient(f);
    Mat G(Go.rows, Gi.cols);
    for (int i = 0; i < Go.rows; ++i)
        for (int k = 0; k < Go.cols; ++k) {
            double w = Go(i, k);
            if (w == 0.0) continue;
            for (int j = 0; j < Gi.cols; ++j) G(i, j) += w * Gi(k, j);
        }
    return G;
}

SumOp::SumOp(OperatorPtr a, OperatorPtr b)
    : Operator(a->direction(), a->input(), a->output()), a_(std::move(a)), b_(std::move(b)) {
    if (!same_space(a_->input(), b_->input()) || !same_space(a_->output(), b_->output()))
        throw std::invalid_argument("dual sum: spaces differ");
    if (a_->direction() != b_->direction()) throw error("dual sum: direction mismatch");
}

std::vector<double> SumOp::apply(const std::vector<double>& f) const {
    std::vector<double> u = a_->apply(f), v = b_->apply(f);
    for (size_t i = 0; i < u.size(); ++i) u[i] = xadd(u[i], v[i]);
    return u;
}

ScaledOp::ScaledOp(double a, OperatorPtr base)
    : Operator(base->direction(), base->input(), base->output()), a_(a), base_(std::move(base)) {
    if (!(a > 0)) throw std::invalid_argument("scalar_mult needs a > 0");
}

std::vector<double> ScaledOp::apply(const std::vector<double>& f) const {
    std::vector<double> g(f.size());
    for (size_t i = 0; i < f.size(); ++i) g[i] = f[i] / a_;
    std::vector<double> out = base_->apply(g);
    for (double& v : out) v *= a_;
    return out;
}

namespace {

class IdentityOp final : public Operator {
  public:
    IdentityOp(const FiniteSpace& s, Direction d) : Operator(d, s, s) {}
    std::vector<double> apply(const std::vector<double>& f) const override { return f; }
    Mat supergradient(const std::vector<double>&) const override {
        Mat G(output().n, input().n);
        for (int i = 0; i < G.rows; ++i) G(i, i) = 1.0;
        return G;
    }
    bool has_supergradient() const override { return true; }
};

class SupOp final : public Operator {
  public:
    explicit SupOp(const FiniteSpace& s) : Operator(Direction::backward, s, s) {}
    std::vector<double> apply(const std::vector<double>& f) const override {
        double m = -kInf;
        for (double v : f) m = std::max(m, v);
        return std::vector<double>(f.size(), m);
    }
    Mat supergradient(const std::vector<double>& f) const override {
        int at = 0;
        for (size_t i = 1; i < f.size(); ++i)
            if (f[i] > f[at]) at = static_cast<int>(i);
        Mat G(output().n, input().n);
        for (int i = 0; i < G.rows; ++i) G(i, at) = 1.0;
        return G;
    }
    bool has_supergradient() const override { return true; }
};

}  // namespace

OperatorPtr identity_op(const FiniteSpace& s, Direction d) { return std::make_shared<IdentityOp>(s, d); }
OperatorPtr sup_op(const FiniteSpace& s) { return std::make_shared<SupOp>(s); }

AxiomReport check_axioms(const Operator& op, int probes, uint64_t seed, double tol_convex, double tol_translate) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> val(-2.0, 2.0), bump(0.0, 2.0), lam(0.0, 1.0), kdist(-3.0, 3.0);
    const int n = op.input().n;
    AxiomReport rep;
    const bool backward = op.direction() == Direction::backward;
    for (int p = 0; p < probes; ++p) {
        std::vector<double> f1(n), f2(n), mix(n);
        for (int i = 0; i < n; ++i) f1[i] = val(rng);
        // monotone pair: f2 = f1 + nonnegative bump
        for (int i = 0; i < n; ++i) f2[i] = f1[i] + bump(rng);
        std::vector<double> t1 = op.apply(f1), t2 = op.apply(f2);
        for (int i = 0; i < op.output().n; ++i) rep.monotonicity = std::max(rep.monotonicity, t1[i] - t2[i]);

        // convexity (backward) / concavity (forward) along a random pair
        for (int i = 0; i < n; ++i) f2[i] = val(rng);
        double l = lam(rng);
        for (int i = 0; i < n; ++i) mix[i] = l * f1[i] + (1 - l) * f2[i];
        t2 = op.apply(f2);
        std::vector<double> tm = op.apply(mix);
        for (int i = 0; i < op.output().n; ++i) {
            double combo = l * t1[i] + (1 - l) * t2[i];
            rep.convexity = std::max(rep.convexity, backward ? tm[i] - combo : combo - tm[i]);
        }

        // affine on constants
        double k = kdist(rng);
        for (int i = 0; i < n; ++i) mix[i] = f1[i] + k;
        tm = op.apply(mix);
        for (int i = 0; i < op.output().n; ++i)
            rep.translation = std::max(rep.translation, std::abs(tm[i] - (t1[i] + k)));
    }
    rep.pass = rep.monotonicity <= tol_convex && rep.convexity <= tol_convex && rep.translation <= tol_translate;
    return rep;
}

}  // namespace kantor
