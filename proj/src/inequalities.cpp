#include "kantor/inequalities.hpp"

#include <algorithm>
#include <cmath>

namespace kantor {

namespace {

bool is_identity_transfer(const Transfer& t) {
    if (t.kind != TransferKind::pushforward) return false;
    for (size_t i = 0; i < t.sigma_map.size(); ++i)
        if (t.sigma_map[i] != static_cast<int>(i)) return false;
    return true;
}

bool is_identity_kernel(const Transfer& e) {
    if (!e.kernel) return false;
    const Mat& S = *e.kernel;
    if (S.rows != S.cols) return false;
    for (int i = 0; i < S.rows; ++i)
        for (int j = 0; j < S.cols; ++j)
            if (std::abs(S(i, j) - (i == j ? 1.0 : 0.0)) > 1e-15) return false;
    return true;
}

double lse(const std::vector<double>& w, const std::vector<double>& h) {
    double hi = -kInf;
    for (size_t i = 0; i < w.size(); ++i)
        if (w[i] > 0) hi = std::max(hi, h[i]);
    if (hi == -kInf) return -kInf;
    double s = 0.0;
    for (size_t i = 0; i < w.size(); ++i)
        if (w[i] > 0 && h[i] != -kInf) s += w[i] * std::exp(h[i] - hi);
    return hi + std::log(s);
}

double instance_range(const Transfer& t) {
    if (t.cost) {
        double lo = kInf, hi = -kInf;
        for (double v : t.cost->a)
            if (v != kInf) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        if (hi > lo) return hi - lo;
    }
    return 1.0;
}

// componentwise potential grid with the first coordinate pinned to zero
// (objectives here are translation invariant); visits fn on every grid point
void for_each_potential(int dim, double span, int levels, const std::vector<double>& center,
                        const std::function<void(const std::vector<double>&)>& fn) {
    const int free_dims = dim - 1;
    std::vector<double> f(dim, 0.0);
    if (free_dims == 0) {
        fn(f);
        return;
    }
    int64_t total = 1;
    for (int d = 0; d < free_dims; ++d) total *= levels;
    for (int64_t code = 0; code < total; ++code) {
        int64_t c = code;
        for (int d = 0; d < free_dims; ++d) {
            f[d + 1] = center[d + 1] - span + 2.0 * span * (c % levels) / (levels - 1);
            c /= levels;
        }
        fn(f);
    }
}

}  // namespace

void InequalitySpec::validate() const {
    if (!(lambda1 > 0) || !(lambda2 > 0)) throw std::invalid_argument("inequality weights must be > 0");
    mu.validate();
    nu.validate();
}

double entropic_conv_dual(const Transfer& E, const Transfer& F, const Measure& mu, const Measure& nu,
                          GridOptions opts) {
    if (E.kind != TransferKind::entropic) throw std::invalid_argument("entropic_conv_dual: E must be entropic");
    if (!F.has_backward()) throw error("entropic_conv_dual: F needs a backward operator");
    const Mat& S = *E.kernel;
    const int dim = nu.size();
    double span = opts.span > 0 ? opts.span : 3.0 * instance_range(F);

    auto objective = [&](const std::vector<double>& f) {
        std::vector<double> Ff = F.backward->apply(f);
        // beta( int E- o F- f dmu ) = log sum_x mu_x (S e^{Ff})(x)
        double hi = -kInf;
        for (double v : Ff) hi = std::max(hi, v);
        if (hi == kInf) return kInf;
        double z = 0.0;
        for (int x = 0; x < mu.size(); ++x) {
            if (mu[x] == 0.0) continue;
            for (int y = 0; y < S.cols; ++y)
                if (S(x, y) > 0 && Ff[y] != -kInf) z += mu[x] * S(x, y) * std::exp(Ff[y] - hi);
        }
        double val = hi + std::log(z);
        for (int y = 0; y < dim; ++y) val -= f[y] * nu[y];
        return val;
    };

    double best = kInf;
    std::vector<double> center(dim, 0.0), best_f(dim, 0.0);
    double cur_span = span;
    for (int pass = 0; pass <= opts.refine_passes; ++pass) {
        for_each_potential(dim, cur_span, opts.levels, center, [&](const std::vector<double>& f) {
            double v = objective(f);
            if (v < best) {
                best = v;
                best_f = f;
            }
        });
        center = best_f;
        cur_span = 2.0 * cur_span / (opts.levels - 1);
    }
    return best;
}

MaureyReport maurey_dual_check(const InequalitySpec& spec) {
    spec.validate();
    if (!spec.t1.has_forward() || !spec.t2.has_forward())
        throw error("maurey_dual_check: forward operators required for T1, T2");
    if (!spec.lhs.has_backward()) throw error("maurey_dual_check: lhs needs a backward operator");

    const int dim = spec.lhs.target.n;
    double span = spec.g_span > 0 ? spec.g_span : 3.0 * instance_range(spec.lhs);

    auto log_product = [&](const std::vector<double>& g) {
        std::vector<double> Fg = spec.lhs.backward->apply(g);
        std::vector<double> h1(Fg.size());
        for (size_t i = 0; i < Fg.size(); ++i) h1[i] = Fg[i] / spec.lambda1;
        std::vector<double> t1h = spec.t1.forward->apply(h1);
        for (double& v : t1h) v = -v;
        std::vector<double> h2(g.size());
        for (size_t i = 0; i < g.size(); ++i) h2[i] = -g[i] / spec.lambda2;
        std::vector<double> t2h = spec.t2.forward->apply(h2);
        for (double& v : t2h) v = -v;
        return spec.lambda1 * lse(spec.mu.w, t1h) + spec.lambda2 * lse(spec.nu.w, t2h);
    };

    MaureyReport rep;
    rep.worst_product = -kInf;
    std::vector<double> center(dim, 0.0), best_g(dim, 0.0);
    double cur_span = span;
    for (int pass = 0; pass <= 1; ++pass) {
        for_each_potential(dim, cur_span, spec.g_levels, center, [&](const std::vector<double>& g) {
            double lp = log_product(g);
            if (lp > rep.worst_product) {
                rep.worst_product = lp;
                best_g = g;
            }
        });
        center = best_g;
        cur_span = 2.0 * cur_span / (spec.g_levels - 1);
    }
    rep.worst_product = std::exp(rep.worst_product);
    rep.witness_g = best_g;
    rep.pass = rep.worst_product <= 1.0 + 1e-9;
    return rep;
}

double rhs_component(const Transfer& t, const Transfer& e, const Measure& sigma, const Measure& ref,
                     int rho_steps) {
    const bool id_t = is_identity_transfer(t);
    const bool id_e = is_identity_kernel(e);
    if (id_t && id_e) return kl_divergence(sigma, ref);
    // inner infimum over an intermediate simplex grid
    const int m = ref.size();
    std::vector<int> comp(m, 0);
    double best = kInf;
    std::function<void(int, int)> rec = [&](int idx, int left) {
        if (idx == m - 1) {
            comp[idx] = left;
            std::vector<double> w(m);
            for (int i = 0; i < m; ++i) w[i] = static_cast<double>(comp[i]) / rho_steps;
            Measure rho{ref.space, w};
            double a = id_t ? (same_space(sigma.space, rho.space) && sigma.w == rho.w ? 0.0 : kInf)
                            : transfer_value(t, sigma, rho);
            if (a == kInf) return;
            double b = id_e ? kl_divergence(rho, ref) : transfer_value(e, ref, rho);
            if (b == kInf) return;
            best = std::min(best, a + b);
            return;
        }
        for (int v = 0; v <= left; ++v) {
            comp[idx] = v;
            rec(idx + 1, left - v);
        }
    };
    rec(0, rho_steps);
    return best;
}

PrimalScanReport primal_inequality_scan(const InequalitySpec& spec) {
    spec.validate();
    const int n1 = spec.lhs.source.n, n2 = spec.lhs.target.n;

    // simplex grids for both scanned measures
    auto grid_for = [&](int m) {
        std::vector<std::vector<double>> out;
        std::vector<int> comp(m, 0);
        std::function<void(int, int)> rec = [&](int idx, int left) {
            if (idx == m - 1) {
                comp[idx] = left;
                std::vector<double> s(m);
                for (int i = 0; i < m; ++i) s[i] = static_cast<double>(comp[i]) / spec.sigma_steps;
                out.push_back(std::move(s));
                return;
            }
            for (int v = 0; v <= left; ++v) {
                comp[idx] = v;
                rec(idx + 1, left - v);
            }
        };
        rec(0, spec.sigma_steps);
        return out;
    };
    auto g1 = grid_for(n1), g2 = grid_for(n2);

    // rhs terms depend on one sigma each; precompute per grid point
    std::vector<double> rhs1(g1.size()), rhs2(g2.size());
    for (size_t i = 0; i < g1.size(); ++i)
        rhs1[i] = spec.lambda1 * rhs_component(spec.t1, spec.e1, Measure{spec.lhs.source, g1[i]}, spec.mu,
                                               spec.sigma_steps);
    for (size_t j = 0; j < g2.size(); ++j)
        rhs2[j] = spec.lambda2 * rhs_component(spec.t2, spec.e2, Measure{spec.lhs.target, g2[j]}, spec.nu,
                                               spec.sigma_steps);

    PrimalScanReport rep;
    int64_t total = static_cast<int64_t>(g1.size()) * g2.size();
    auto [neg_worst, at] = scan_min(total, [&](int64_t code) {
        size_t i = static_cast<size_t>(code % g1.size());
        size_t j = static_cast<size_t>(code / g1.size());
        double rhs = rhs1[i] + rhs2[j];
        if (rhs == kInf) return kInf;  // no violation possible at this pair
        Measure s1{spec.lhs.source, g1[i]}, s2{spec.lhs.target, g2[j]};
        double lhs = transfer_value(spec.lhs, s1, s2);
        if (lhs == kInf) return kInf;
        return -(lhs - rhs);
    });
    if (at >= 0 && neg_worst != kInf) {
        rep.worst_violation = -neg_worst;
        size_t i = static_cast<size_t>(at % g1.size());
        size_t j = static_cast<size_t>(at / g1.size());
        rep.witness_sigma1 = Measure{spec.lhs.source, g1[i]};
        rep.witness_sigma2 = Measure{spec.lhs.target, g2[j]};
    } else {
        rep.worst_violation = -kInf;
    }
    rep.pass = rep.worst_violation <= 1e-9;
    return rep;
}

}  // namespace kantor
