#include "kantor/stochastic.hpp"

#include <algorithm>
#include <cmath>

#include "kantor/simplex.hpp"

namespace kantor {

void ControlledChain::validate() const {
    if (dim != 1 && dim != 2) throw std::invalid_argument("chain dim must be 1 or 2");
    if (states() != (dim == 1 ? N : N * N)) throw std::invalid_argument("state count != N^dim");
    if (static_cast<int>(kernels.size()) != ncontrols()) throw std::invalid_argument("kernel count != controls");
    for (const auto& v : controls)
        if (static_cast<int>(v.size()) != dim) throw std::invalid_argument("control arity != dim");
    for (const Mat& P : kernels) {
        if (P.rows != states() || P.cols != states()) throw std::invalid_argument("kernel shape");
        for (int x = 0; x < P.rows; ++x) {
            double s = 0.0;
            for (int y = 0; y < P.cols; ++y) {
                if (P(x, y) < 0) throw std::invalid_argument("kernel entry negative");
                s += P(x, y);
            }
            if (std::abs(s - 1.0) > 1e-12) throw std::invalid_argument("kernel row mass beyond 1e-12 of 1");
        }
    }
    if (lagrangian.rows != states() || lagrangian.cols != ncontrols())
        throw std::invalid_argument("lagrangian shape != states x controls");
    for (double v : lagrangian.a)
        if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("lagrangian must be finite and >= 0");
}

namespace {

inline int wrap(int a, int N) { return ((a % N) + N) % N; }

}  // namespace

ControlledChain make_lazy_chain(int N, int dim, std::vector<std::vector<int>> controls,
                                const std::vector<double>& potential) {
    ControlledChain ch;
    ch.N = N;
    ch.dim = dim;
    const int ns = dim == 1 ? N : N * N;
    ch.space = make_space(ns);
    ch.controls = std::move(controls);
    std::vector<double> V = potential.empty() ? std::vector<double>(ns, 0.0) : potential;
    if (static_cast<int>(V.size()) != ns) throw std::invalid_argument("potential size != state count");

    ch.lagrangian = Mat(ns, ch.ncontrols());
    for (const auto& v : ch.controls) {
        Mat P(ns, ns);
        if (dim == 1) {
            for (int x = 0; x < N; ++x) {
                int s = wrap(x + v[0], N);
                P(x, s) += 0.5;
                P(x, wrap(s - 1, N)) += 0.25;
                P(x, wrap(s + 1, N)) += 0.25;
            }
        } else {
            for (int x1 = 0; x1 < N; ++x1)
                for (int x2 = 0; x2 < N; ++x2) {
                    int x = x1 * N + x2;
                    int s1 = wrap(x1 + v[0], N), s2 = wrap(x2 + v[1], N);
                    P(x, s1 * N + s2) += 0.5;
                    P(x, wrap(s1 - 1, N) * N + s2) += 0.125;
                    P(x, wrap(s1 + 1, N) * N + s2) += 0.125;
                    P(x, s1 * N + wrap(s2 - 1, N)) += 0.125;
                    P(x, s1 * N + wrap(s2 + 1, N)) += 0.125;
                }
        }
        ch.kernels.push_back(std::move(P));
    }
    for (int x = 0; x < ns; ++x)
        for (int a = 0; a < ch.ncontrols(); ++a) {
            double v2 = 0.0;
            for (int d = 0; d < dim; ++d) v2 += static_cast<double>(ch.controls[a][d]) * ch.controls[a][d];
            ch.lagrangian(x, a) = 0.5 * v2 + V[x];
        }
    ch.validate();
    return ch;
}

namespace {

std::vector<double> bellman_raw(const ControlledChain& ch, const std::vector<double>& u,
                                std::vector<int>* arg) {
    const int ns = ch.states(), na = ch.ncontrols();
    std::vector<double> out(ns, -kInf);
    if (arg) arg->assign(ns, -1);
#pragma omp parallel for schedule(static)
    for (int x = 0; x < ns; ++x) {
        double best = -kInf;
        int besta = -1;
        for (int a = 0; a < na; ++a) {
            double e = 0.0;
            const double* row = ch.kernels[a].row(x);
            for (int y = 0; y < ns; ++y) e += row[y] * u[y];
            double v = e - ch.lagrangian(x, a);
            if (v > best) {
                best = v;
                besta = a;
            }
        }
        out[x] = best;
        if (arg) (*arg)[x] = besta;
    }
    return out;
}

class BellmanOp final : public Operator {
  public:
    explicit BellmanOp(ControlledChain chain)
        : Operator(Direction::backward, chain.space, chain.space), chain_(std::move(chain)) {}
    std::vector<double> apply(const std::vector<double>& f) const override {
        return bellman_raw(chain_, f, nullptr);
    }
    Mat supergradient(const std::vector<double>& f) const override {
        std::vector<int> arg;
        bellman_raw(chain_, f, &arg);
        Mat G(output().n, input().n);
        for (int x = 0; x < output().n; ++x)
            for (int y = 0; y < input().n; ++y) G(x, y) = chain_.kernels[arg[x]](x, y);
        return G;
    }
    bool has_supergradient() const override { return true; }

  private:
    ControlledChain chain_;
};

}  // namespace

Potential bellman_apply(const ControlledChain& chain, const Potential& u) {
    if (!same_space(u.space, chain.space)) throw std::invalid_argument("bellman_apply: space mismatch");
    return Potential{chain.space, bellman_raw(chain, u.v, nullptr)};
}

std::vector<int> bellman_argmax(const ControlledChain& chain, const Potential& u) {
    std::vector<int> arg;
    bellman_raw(chain, u.v, &arg);
    return arg;
}

OperatorPtr bellman_operator(const ControlledChain& chain) {
    return std::make_shared<BellmanOp>(chain);
}

RVIResult relative_value_iteration(const ControlledChain& chain, double span_tol, int64_t max_iters) {
    const int ns = chain.states();
    std::vector<double> u(ns, 0.0);
    RVIResult res;
    for (int64_t it = 1; it <= max_iters; ++it) {
        std::vector<double> tu = bellman_raw(chain, u, nullptr);
        double lo = kInf, hi = -kInf;
        for (int x = 0; x < ns; ++x) {
            double d = tu[x] - u[x];
            lo = std::min(lo, d);
            hi = std::max(hi, d);
        }
        if (hi - lo < span_tol) {
            double c = -(hi + lo) / 2.0;  // Tu + c = u up to span/2
            double pin = u[0];
            for (double& v : u) v -= pin;
            std::vector<double> tu2 = bellman_raw(chain, u, nullptr);
            double resid = 0.0;
            for (int x = 0; x < ns; ++x) resid = std::max(resid, std::abs(tu2[x] + c - u[x]));
            res.c = c;
            res.u = Potential{chain.space, std::move(u)};
            res.residual = resid;
            res.iterations = static_cast<int>(it);
            return res;
        }
        double pin = tu[0];
        for (int x = 0; x < ns; ++x) u[x] = tu[x] - pin;
    }
    throw error("relative_value_iteration: span did not contract within the iteration cap");
}

OccupationResult occupation_lp(const ControlledChain& chain) {
    const int ns = chain.states(), na = chain.ncontrols();
    const int nv = ns * na;
    LinearProgram lp;
    lp.c.resize(nv);
    lp.A = Mat(1 + ns, nv);
    lp.b.assign(1 + ns, 0.0);
    lp.b[0] = 1.0;
    for (int x = 0; x < ns; ++x)
        for (int a = 0; a < na; ++a) {
            int v = x * na + a;
            lp.c[v] = chain.lagrangian(x, a);
            lp.A(0, v) = 1.0;
            // inflow to x' minus outflow from x'
            for (int y = 0; y < ns; ++y) lp.A(1 + y, v) += chain.kernels[a](x, y);
            lp.A(1 + x, v) -= 1.0;
        }
    LPResult r = lp_solve(lp);
    if (r.status != LPStatus::optimal) throw error("occupation_lp: solver failed (should be feasible)");
    OccupationResult out;
    out.c = r.value;
    out.m = Mat(ns, na);
    for (int x = 0; x < ns; ++x)
        for (int a = 0; a < na; ++a) out.m(x, a) = std::max(r.x[x * na + a], 0.0);
    // invariance residual of the optimizer
    double resid = 0.0;
    for (int y = 0; y < ns; ++y) {
        double in = 0.0, out_mass = 0.0;
        for (int x = 0; x < ns; ++x)
            for (int a = 0; a < na; ++a) in += out.m(x, a) * chain.kernels[a](x, y);
        for (int a = 0; a < na; ++a) out_mass += out.m(y, a);
        resid = std::max(resid, std::abs(in - out_mass));
    }
    out.invariance_residual = resid;
    return out;
}

bool domination_check(const ControlledChain& chain, const Potential& u, double k, int horizon) {
    if (horizon < 1) throw std::invalid_argument("domination_check: horizon >= 1");
    std::vector<double> v = u.v;
    for (int n = 1; n <= horizon; ++n) {
        v = bellman_raw(chain, v, nullptr);
        for (int x = 0; x < chain.states(); ++x)
            if (v[x] + k * n > u[x] + 1e-9) return false;
    }
    return true;
}

double domination_sup(const ControlledChain& chain, const Potential& u, int horizon, double tol) {
    double maxL = 0.0;
    for (double v : chain.lagrangian.a) maxL = std::max(maxL, v);
    double lo = -maxL - 1.0, hi = maxL + 1.0;
    if (!domination_check(chain, u, lo, horizon)) throw error("domination_sup: gross underbid failed");
    while (domination_check(chain, u, hi, horizon)) hi += maxL + 1.0;
    while (hi - lo > tol) {
        double mid = 0.5 * (lo + hi);
        if (domination_check(chain, u, mid, horizon))
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace kantor
