#include "kantor/primal_dual.hpp"

#include <algorithm>
#include <cmath>

#include "kantor/gallery.hpp"

namespace kantor {

OTResult primal_ot(const Mat& cost, const Measure& mu, const Measure& nu) {
    const int n = mu.size(), m = nu.size();
    if (cost.rows != n || cost.cols != m) throw std::invalid_argument("primal_ot: cost shape mismatch");
    for (int i = 0; i < n; ++i) {
        if (mu[i] == 0.0) continue;
        bool any = false;
        for (int j = 0; j < m; ++j) any = any || cost(i, j) < kInf;
        if (!any) throw error("primal_ot: infeasible, a charged row has only +inf costs");
    }
    // variables: finite-cost cells only
    std::vector<std::pair<int, int>> cells;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j)
            if (cost(i, j) < kInf) cells.emplace_back(i, j);
    LinearProgram lp;
    lp.c.resize(cells.size());
    lp.A = Mat(n + m, static_cast<int>(cells.size()));
    lp.b.resize(n + m);
    for (size_t v = 0; v < cells.size(); ++v) {
        auto [i, j] = cells[v];
        lp.c[v] = cost(i, j);
        lp.A(i, static_cast<int>(v)) = 1.0;
        lp.A(n + j, static_cast<int>(v)) = 1.0;
    }
    for (int i = 0; i < n; ++i) lp.b[i] = mu[i];
    for (int j = 0; j < m; ++j) lp.b[n + j] = nu[j];
    LPResult r = lp_solve(lp);
    if (r.status == LPStatus::infeasible) throw error("primal_ot: infeasible transportation problem");
    if (r.status == LPStatus::unbounded) throw error("primal_ot: unbounded (invalid data)");

    OTResult out;
    out.value = r.value;
    Mat plan(n, m);
    for (size_t v = 0; v < cells.size(); ++v) plan(cells[v].first, cells[v].second) = std::max(r.x[v], 0.0);
    out.plan = Coupling{mu.space, nu.space, std::move(plan)};
    out.potential_g.assign(m, 0.0);
    for (int j = 0; j < m; ++j) out.potential_g[j] = r.dual[n + j];
    return out;
}

double wasserstein1(const Measure& mu, const Measure& nu) {
    if (!mu.space.has_metric()) throw error("wasserstein1 needs a metric");
    if (!same_space(mu.space, nu.space)) throw std::invalid_argument("wasserstein1: spaces differ");
    return primal_ot(*mu.space.metric, mu, nu).value;
}

namespace {

// simplex grid: all weight vectors with `steps` increments over m points
std::vector<std::vector<double>> simplex_grid(int m, int steps) {
    std::vector<std::vector<double>> out;
    std::vector<int> comp(m, 0);
    std::function<void(int, int)> rec = [&](int idx, int left) {
        if (idx == m - 1) {
            comp[idx] = left;
            std::vector<double> s(m);
            for (int i = 0; i < m; ++i) s[i] = static_cast<double>(comp[i]) / steps;
            out.push_back(std::move(s));
            return;
        }
        for (int v = 0; v <= left; ++v) {
            comp[idx] = v;
            rec(idx + 1, left - v);
        }
    };
    rec(0, steps);
    return out;
}

}  // namespace

double primal_weak_bruteforce(const Transfer& t, const Measure& mu, const Measure& nu,
                              WeakPrimalOptions opts) {
    if (!t.weak_cost) throw error("primal_weak_bruteforce: transfer has no weak cost");
    const int n = mu.size(), m = nu.size();
    if (n > 3 || m > 3) throw error("primal_weak_bruteforce: sizes <= 3 required");
    std::vector<int> support;
    for (int i = 0; i < n; ++i)
        if (mu[i] > 0) support.push_back(i);
    const int k = static_cast<int>(support.size());
    if (k == 1) {
        // the single disintegration row is forced to nu
        return t.weak_cost(support[0], nu.w);
    }

    const int free_rows = k - 1;  // at most 2
    auto grid = simplex_grid(m, opts.coarse_steps);
    const int64_t G = static_cast<int64_t>(grid.size());
    int64_t total = 1;
    for (int r = 0; r < free_rows; ++r) total *= G;

    auto evaluate = [&](const std::vector<double>* const* rows) -> double {
        // last row forced by the marginal constraint
        thread_local std::vector<double> last;
        last.assign(m, 0.0);
        double wl = mu[support[k - 1]];
        for (int y = 0; y < m; ++y) {
            double s = nu[y];
            for (int r = 0; r < free_rows; ++r) s -= mu[support[r]] * (*rows[r])[y];
            last[y] = s / wl;
            if (last[y] < -1e-9) return kInf;
            last[y] = std::max(last[y], 0.0);
        }
        double v = 0.0;
        for (int r = 0; r < free_rows; ++r) {
            double c = t.weak_cost(support[r], *rows[r]);
            if (c == kInf) return kInf;
            v += mu[support[r]] * c;
        }
        double c = t.weak_cost(support[k - 1], last);
        if (c == kInf) return kInf;
        return v + wl * c;
    };

    auto [coarse_val, coarse_at] = scan_min(total, [&](int64_t code) {
        const std::vector<double>* rows[2] = {nullptr, nullptr};
        for (int r = 0; r < free_rows; ++r) {
            rows[r] = &grid[code % G];
            code /= G;
        }
        return evaluate(rows);
    });
    if (coarse_at < 0 || coarse_val == kInf) return kInf;

    // local refinement: per free row, rescan a shrinking barycentric box
    std::vector<std::vector<double>> best(free_rows);
    {
        int64_t code = coarse_at;
        for (int r = 0; r < free_rows; ++r) {
            best[r] = grid[code % G];
            code /= G;
        }
    }
    double best_val = coarse_val;
    double radius = 1.0 / opts.coarse_steps;
    for (int pass = 0; pass < 2; ++pass) {
        const int levels = 21;
        double step = 2.0 * radius / (levels - 1);
        for (int r = 0; r < free_rows; ++r) {
            // scan the free coordinates of row r around the incumbent
            std::vector<double> probe = best[r];
            int dims = m - 1;
            int64_t cnt = 1;
            for (int d = 0; d < dims; ++d) cnt *= levels;
            for (int64_t code = 0; code < cnt; ++code) {
                int64_t c2 = code;
                std::vector<double> cand(m, 0.0);
                double acc = 0.0;
                bool ok = true;
                for (int d = 0; d < dims; ++d) {
                    double v = best[r][d] - radius + step * (c2 % levels);
                    c2 /= levels;
                    if (v < 0) v = 0;
                    cand[d] = v;
                    acc += v;
                }
                if (acc > 1.0 + 1e-12) ok = false;
                cand[m - 1] = std::max(1.0 - acc, 0.0);
                if (!ok) continue;
                const std::vector<double>* rows[2] = {nullptr, nullptr};
                for (int q = 0; q < free_rows; ++q) rows[q] = (q == r) ? &cand : &best[q];
                double v = evaluate(rows);
                if (v < best_val) {
                    best_val = v;
                    best[r] = cand;
                }
            }
        }
        radius = step;
    }
    return best_val;
}

namespace {

struct Objective {
    // value and supergradient of g -> int g dnu - (mu-side term)
    std::function<double(const std::vector<double>&, std::vector<double>*)> eval;
};

Objective make_objective(const Transfer& t, const Measure& mu, const Measure& nu) {
    if (t.kind == TransferKind::entropic) {
        Mat S = *t.kernel;
        Measure m0 = mu, n0 = nu;
        return {[S, m0, n0](const std::vector<double>& g, std::vector<double>* grad) {
            // Gibbs objective: <g, nu> - log (mu^T S e^g)
            const int n = S.rows, m = S.cols;
            double hi = -kInf;
            for (int y = 0; y < m; ++y) hi = std::max(hi, g[y]);
            std::vector<double> w(m, 0.0);
            double z = 0.0;
            for (int x = 0; x < n; ++x) {
                if (m0[x] == 0.0) continue;
                for (int y = 0; y < m; ++y) {
                    double c = m0[x] * S(x, y) * std::exp(g[y] - hi);
                    w[y] += c;
                    z += c;
                }
            }
            double val = -(hi + std::log(z));
            for (int y = 0; y < m; ++y) val += g[y] * n0[y];
            if (grad) {
                grad->assign(m, 0.0);
                for (int y = 0; y < m; ++y) (*grad)[y] = n0[y] - w[y] / z;
            }
            return val;
        }};
    }
    if (!t.has_backward()) throw error("dual ascent needs the backward operator");
    if (!t.backward->has_supergradient()) throw error("dual ascent: operator admits no supergradient");
    OperatorPtr op = t.backward;
    Measure m0 = mu, n0 = nu;
    return {[op, m0, n0](const std::vector<double>& g, std::vector<double>* grad) {
        std::vector<double> Tg = op->apply(g);
        double val = 0.0;
        for (size_t y = 0; y < g.size(); ++y) val += g[y] * n0[y];
        for (int x = 0; x < m0.size(); ++x)
            if (m0[x] != 0.0) val -= m0[x] * Tg[x];
        if (grad) {
            Mat G = op->supergradient(g);
            grad->assign(g.size(), 0.0);
            for (size_t y = 0; y < g.size(); ++y) (*grad)[y] = n0[y];
            for (int x = 0; x < G.rows; ++x) {
                if (m0[x] == 0.0) continue;
                for (int y = 0; y < G.cols; ++y) (*grad)[y] -= m0[x] * G(x, y);
            }
        }
        return val;
    }};
}

}  // namespace

DualAscentReport dual_ascent(const Transfer& t, const Measure& mu, const Measure& nu, int max_iters) {
    if (!same_space(mu.space, t.source) || !same_space(nu.space, t.target))
        throw std::invalid_argument("dual_ascent: measure spaces mismatch");
    Objective obj = make_objective(t, mu, nu);
    const int m = nu.size();
    std::vector<double> g(m, 0.0), grad(m);

    DualAscentReport rep;
    double cur = obj.eval(g, &grad);
    rep.value = cur;
    rep.maximizer = g;

    // linear objectives (Markov / push-forward kinds) are unbounded unless
    // the gradient vanishes: certify T = +inf without iterating
    if (t.kind == TransferKind::markov || t.kind == TransferKind::pushforward) {
        double gn = 0.0;
        for (double v : grad) gn = std::max(gn, std::abs(v));
        if (gn > 1e-9) {
            rep.diverging = true;
            rep.value = kInf;
            return rep;
        }
        rep.attained = true;
        return rep;
    }

    const bool smooth = t.kind == TransferKind::entropic;
    const double a = 1.0;  // range of the zero initializer plus one
    double last_best = cur;
    int since_best = 0;
    const double scale = 1.0 + std::abs(cur);

    for (int it = 1; it <= max_iters; ++it) {
        double gn = 0.0;
        for (double v : grad) gn = std::max(gn, std::abs(v));
        if (gn <= 1e-12) {
            rep.attained = true;
            break;
        }
        if (smooth) {
            // exact gradients: expanding/backtracking line search; expansion
            // matters when the supremum escapes to infinity (nu with zeros)
            double g2 = 0.0;
            for (double v : grad) g2 += v * v;
            auto value_at = [&](double step) {
                std::vector<double> cand(m);
                for (int y = 0; y < m; ++y) cand[y] = g[y] + step * grad[y];
                return obj.eval(cand, nullptr);
            };
            double step = 1.0, cv = value_at(step);
            if (cv >= cur + 0.25 * step * g2) {
                for (int e = 0; e < 60; ++e) {
                    double cv2 = value_at(2 * step);
                    if (cv2 <= cv) break;
                    step *= 2;
                    cv = cv2;
                }
            } else {
                for (int e = 0; e < 60 && cv < cur + 0.25 * step * g2; ++e) {
                    step *= 0.5;
                    cv = value_at(step);
                }
            }
            if (cv > cur) {
                for (int y = 0; y < m; ++y) g[y] += step * grad[y];
            }
            cur = obj.eval(g, &grad);
        } else {
            double step = a / std::sqrt(static_cast<double>(it));
            for (int y = 0; y < m; ++y) g[y] += step * grad[y];
            cur = obj.eval(g, &grad);
        }
        rep.iterations = it;
        if (cur > rep.value) {
            rep.value = cur;
            rep.maximizer = g;
        }
        if (rep.value > 1e9 * scale) {  // unbounded objective certifies T = +inf
            rep.diverging = true;
            break;
        }
        if (rep.value > last_best + 1e-10) {
            last_best = rep.value;
            since_best = 0;
        } else if (++since_best >= 200) {
            break;
        }
    }
    if (!rep.diverging && !rep.attained) {
        double gn = 0.0;
        for (double v : grad) gn = std::max(gn, std::abs(v));
        rep.attained = gn <= 1e-9;
    }
    return rep;
}

DualAscentReport dual_value(const Transfer& t, const Measure& mu, const Measure& nu) {
    if (t.is_cost_like()) {
        OTResult ot = primal_ot(*t.cost, mu, nu);
        DualAscentReport rep;
        rep.maximizer = ot.potential_g;
        // evaluate the dual objective at the LP potential explicitly
        std::vector<double> Tg = t.backward->apply(ot.potential_g);
        double val = 0.0;
        for (int y = 0; y < nu.size(); ++y) val += nu[y] * ot.potential_g[y];
        for (int x = 0; x < mu.size(); ++x)
            if (mu[x] != 0.0) val -= mu[x] * Tg[x];
        rep.value = val;
        rep.gap = ot.value - val;
        rep.attained = true;
        rep.iterations = 0;
        return rep;
    }
    return dual_ascent(t, mu, nu);
}

double transfer_value(const Transfer& t, const Measure& mu, const Measure& nu, EvalMethod method) {
    if (!same_space(mu.space, t.source) || !same_space(nu.space, t.target))
        throw std::invalid_argument("transfer_value: measure spaces mismatch");
    if (method == EvalMethod::dual || method == EvalMethod::ascent) return dual_ascent(t, mu, nu).value;
    if (method == EvalMethod::primal && t.weak_cost && mu.size() <= 3 && nu.size() <= 3 && !t.is_cost_like())
        return primal_weak_bruteforce(t, mu, nu);

    switch (t.kind) {
        case TransferKind::cost:
        case TransferKind::metric:
        case TransferKind::power_cost:
            return primal_ot(*t.cost, mu, nu).value;
        case TransferKind::markov: {
            const Mat& P = *t.kernel;
            for (int y = 0; y < nu.size(); ++y) {
                double s = 0.0;
                for (int x = 0; x < mu.size(); ++x) s += mu[x] * P(x, y);
                if (std::abs(s - nu[y]) > 1e-9) return kInf;
            }
            return 0.0;
        }
        case TransferKind::pushforward: {
            std::vector<double> push(nu.size(), 0.0);
            for (int x = 0; x < mu.size(); ++x) push[t.sigma_map[x]] += mu[x];
            for (int y = 0; y < nu.size(); ++y)
                if (std::abs(push[y] - nu[y]) > 1e-9) return kInf;
            return 0.0;
        }
        case TransferKind::balayage:
            return convex_order(mu, nu) ? 0.0 : kInf;
        case TransferKind::martingale: {
            // LP over martingale couplings: marginals plus per-row barycenter pinning
            if (!t.aux_cost) throw error("martingale transfer without a cost payload");
            const FiniteSpace& s = t.source;
            const Mat& C = *t.aux_cost;
            const int n = s.n;
            std::vector<std::pair<int, int>> cells;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (C(i, j) < kInf) cells.emplace_back(i, j);
            LinearProgram lp;
            lp.c.resize(cells.size());
            lp.A = Mat(3 * n, static_cast<int>(cells.size()));
            lp.b.assign(3 * n, 0.0);
            for (size_t v = 0; v < cells.size(); ++v) {
                auto [i, j] = cells[v];
                lp.c[v] = C(i, j);
                lp.A(i, static_cast<int>(v)) = 1.0;
                lp.A(n + j, static_cast<int>(v)) = 1.0;
                lp.A(2 * n + i, static_cast<int>(v)) = s.coord(j) - s.coord(i);
            }
            for (int i = 0; i < n; ++i) lp.b[i] = mu[i];
            for (int j = 0; j < n; ++j) lp.b[n + j] = nu[j];
            LPResult r = lp_solve(lp);
            if (r.status != LPStatus::optimal) return kInf;
            return r.value;
        }
        case TransferKind::variance: {
            if (!nu.space.has_coords()) throw error("variance transfer needs coords");
            return -variance(nu);
        }
        default:
            break;
    }
    if (t.weak_cost && mu.size() <= 3 && nu.size() <= 3) return primal_weak_bruteforce(t, mu, nu);
    return dual_ascent(t, mu, nu).value;
}

}  // namespace kantor
