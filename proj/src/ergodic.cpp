#include "kantor/ergodic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kantor/simplex.hpp"

namespace kantor {

namespace {

IMat to_scaled_int(const Mat& C, int64_t scale, int64_t shift) {
    // entries scale*C - shift, +inf preserved
    IMat out(C.a.size(), kIntInf);
    for (size_t i = 0; i < C.a.size(); ++i)
        if (C.a[i] != kInf) out[i] = scale * static_cast<int64_t>(C.a[i]) - shift;
    return out;
}

}  // namespace

MinMeanCycleResult mane_min_mean_cycle(const Mat& C) {
    const int n = C.rows;
    if (C.cols != n) throw std::invalid_argument("mane_min_mean_cycle: square table required");
    MinMeanCycleResult res;
    if (is_integral(C)) {
        // Karp on int64: D_k(v) = cheapest k-edge walk ending at v, all sources
        std::vector<std::vector<int64_t>> D(n + 1, std::vector<int64_t>(n, kIntInf));
        D[0].assign(n, 0);
        for (int k = 1; k <= n; ++k)
            for (int v = 0; v < n; ++v) {
                int64_t best = kIntInf;
                for (int u = 0; u < n; ++u) {
                    if (D[k - 1][u] >= kIntInf || C(u, v) == kInf) continue;
                    best = std::min(best, D[k - 1][u] + static_cast<int64_t>(C(u, v)));
                }
                D[k][v] = best;
            }
        bool found = false;
        int64_t bn = 0, bd = 1;
        for (int v = 0; v < n; ++v) {
            if (D[n][v] >= kIntInf) continue;
            // max over k of (D_n - D_k)/(n-k), fractions compared exactly
            int64_t mn = 0, md = 1;
            bool any = false;
            for (int k = 0; k < n; ++k) {
                if (D[k][v] >= kIntInf) continue;
                int64_t num = D[n][v] - D[k][v], den = n - k;
                if (!any || num * md > mn * den) {
                    mn = num;
                    md = den;
                    any = true;
                }
            }
            if (!any) continue;
            if (!found || mn * bd < bn * md) {
                bn = mn;
                bd = md;
                found = true;
            }
        }
        if (!found) return res;  // no cycle at all
        int64_t g = std::gcd(bn < 0 ? -bn : bn, bd);
        if (g > 1) {
            bn /= g;
            bd /= g;
        }
        res.num = bn;
        res.den = bd;
        res.exact = true;
        res.value = static_cast<double>(bn) / static_cast<double>(bd);
        return res;
    }
    // float path
    std::vector<std::vector<double>> D(n + 1, std::vector<double>(n, kInf));
    D[0].assign(n, 0.0);
    for (int k = 1; k <= n; ++k)
        for (int v = 0; v < n; ++v) {
            double best = kInf;
            for (int u = 0; u < n; ++u) {
                if (D[k - 1][u] == kInf || C(u, v) == kInf) continue;
                best = std::min(best, D[k - 1][u] + C(u, v));
            }
            D[k][v] = best;
        }
    bool found = false;
    double c = kInf;
    for (int v = 0; v < n; ++v) {
        if (D[n][v] == kInf) continue;
        double worst = -kInf;
        for (int k = 0; k < n; ++k) {
            if (D[k][v] == kInf) continue;
            worst = std::max(worst, (D[n][v] - D[k][v]) / (n - k));
        }
        if (worst == -kInf) continue;
        if (!found || worst < c) {
            c = worst;
            found = true;
        }
    }
    if (found) res.value = c;
    return res;
}

MinMeanCycleResult mane_diag_lp(const Mat& C) {
    const int n = C.rows;
    std::vector<std::pair<int, int>> cells;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (C(i, j) < kInf) cells.emplace_back(i, j);
    MinMeanCycleResult res;
    if (cells.empty()) return res;
    const int nv = static_cast<int>(cells.size());
    // constraints: mass 1; per node, out-mass = in-mass (last one redundant)
    if (is_integral(C)) {
        std::vector<Rat> c(nv), b(n + 1, Rat(0));
        std::vector<std::vector<Rat>> A(n + 1, std::vector<Rat>(nv, Rat(0)));
        for (int v = 0; v < nv; ++v) {
            auto [i, j] = cells[v];
            c[v] = Rat(static_cast<int64_t>(C(i, j)));
            A[0][v] = Rat(1);
            if (i != j) {
                A[1 + i][v] = A[1 + i][v] + Rat(1);
                A[1 + j][v] = A[1 + j][v] - Rat(1);
            }
        }
        b[0] = Rat(1);
        ExactLPResult lr = lp_solve_exact(c, A, b);
        if (lr.status != LPStatus::optimal) return res;
        res.num = lr.value.num;
        res.den = lr.value.den;
        res.exact = true;
        res.value = lr.value.to_double();
        return res;
    }
    LinearProgram lp;
    lp.c.resize(nv);
    lp.A = Mat(n + 1, nv);
    lp.b.assign(n + 1, 0.0);
    for (int v = 0; v < nv; ++v) {
        auto [i, j] = cells[v];
        lp.c[v] = C(i, j);
        lp.A(0, v) = 1.0;
        if (i != j) {
            lp.A(1 + i, v) += 1.0;
            lp.A(1 + j, v) -= 1.0;
        }
    }
    lp.b[0] = 1.0;
    LPResult lr = lp_solve(lp);
    if (lr.status != LPStatus::optimal) return res;
    res.value = lr.value;
    return res;
}

IterativeManeResult mane_iterative(const Transfer& t, const Potential& f, int n) {
    if (!t.has_backward()) throw error("mane_iterative needs the backward operator");
    IterativeManeResult out;
    out.n = n;
    std::vector<double> v = f.v;
    for (int k = 0; k < n; ++k) {
        v = t.backward->apply(v);
        double lo = *std::min_element(v.begin(), v.end());
        if (lo == -kInf) throw error("mane_iterative: iterate diverged to -inf (c = +inf case)");
    }
    out.estimate = -v[0] / n;
    double frange = *std::max_element(f.v.begin(), f.v.end()) - *std::min_element(f.v.begin(), f.v.end());
    double K = 0.0;
    if (t.is_cost_like()) {
        double lo = kInf, hi = -kInf;
        for (double x : t.cost->a)
            if (x != kInf) {
                lo = std::min(lo, x);
                hi = std::max(hi, x);
            }
        K = 2.0 * t.cost->rows * (hi - lo);
    }
    out.error_bound = (frange + K) / n;
    return out;
}

WeakKAMResult weak_kam_solve(const Transfer& t, double c, WeakKAMOptions opts) {
    if (!t.has_backward()) throw error("weak_kam_solve needs the backward operator");
    const OperatorPtr& T = t.backward;
    const int n = T->output().n;
    const int W = 4 * std::max(n, 1);

    WeakKAMResult res;
    std::vector<double> v(n, 0.0);
    std::vector<std::vector<double>> window;
    std::vector<double> wmax_prev;
    int stable = 0;
    int64_t k = 0;
    // stage 1: sliding-window running sup of T^k f + kc
    while (k < opts.max_iters) {
        v = T->apply(v);
        ++k;
        for (double& x : v) x += c;
        window.push_back(v);
        if (static_cast<int>(window.size()) > W) window.erase(window.begin());
        std::vector<double> wmax = window.front();
        for (const auto& row : window)
            for (int i = 0; i < n; ++i) wmax[i] = std::max(wmax[i], row[i]);
        if (!wmax_prev.empty() && static_cast<int>(window.size()) == W) {
            double diff = 0.0;
            for (int i = 0; i < n; ++i) diff = std::max(diff, std::abs(wmax[i] - wmax_prev[i]));
            stable = diff <= 1e-13 ? stable + 1 : 0;
            if (stable >= W) {
                wmax_prev = wmax;
                break;
            }
        }
        wmax_prev = wmax;
    }
    if (k >= opts.max_iters) throw error("weak_kam_solve: no stabilization within the iteration cap");
    res.stage1_iters = static_cast<int>(k);

    // stage 2: monotone iteration of the stabilized function
    std::vector<double> w = wmax_prev;
    int64_t j = 0;
    for (; j < opts.max_iters; ++j) {
        std::vector<double> next = T->apply(w);
        for (double& x : next) x += c;
        double inc = 0.0;
        for (int i = 0; i < n; ++i) inc = std::max(inc, std::abs(next[i] - w[i]));
        w = std::move(next);
        if (inc < opts.stage2_tol) break;
    }
    res.stage2_iters = static_cast<int>(j);

    double pin = w[opts.x0];
    for (double& x : w) x -= pin;
    std::vector<double> tw = T->apply(w);
    double resid = 0.0;
    for (int i = 0; i < n; ++i) resid = std::max(resid, std::abs(tw[i] + c - w[i]));
    res.u = Potential{T->output(), std::move(w)};
    res.residual = resid;
    return res;
}

namespace {

// critical nodes of an exactly tilted integer matrix: x is critical iff some
// closed k-walk at x has zero cost, k <= n (all cycle costs are >= 0)
std::vector<int> critical_nodes_int(const IMat& B, int n) {
    std::vector<int> crit;
    IMat P = B;
    std::vector<int64_t> best(n, kIntInf);
    for (int k = 1; k <= n; ++k) {
        for (int x = 0; x < n; ++x) best[x] = std::min(best[x], P[x * n + x]);
        if (k < n) P = iminplus_product(P, B, n);
    }
    for (int x = 0; x < n; ++x)
        if (best[x] == 0) crit.push_back(x);
    return crit;
}

std::vector<int> critical_nodes_float(const Mat& B, double tol, bool* ambiguous) {
    const int n = B.rows;
    std::vector<int> crit;
    Mat P = B;
    std::vector<double> best(n, kInf);
    for (int k = 1; k <= n; ++k) {
        for (int x = 0; x < n; ++x) best[x] = std::min(best[x], P(x, x));
        if (k < n) P = minplus_product(P, B);
    }
    for (int x = 0; x < n; ++x) {
        if (std::abs(best[x]) <= tol) {
            crit.push_back(x);
            if (best[x] != 0.0 && ambiguous) *ambiguous = true;
        }
    }
    return crit;
}

}  // namespace

PeierlsResult peierls_barrier(const Mat& C, const MinMeanCycleResult& c) {
    const int n = C.rows;
    PeierlsResult res;
    if (c.value == kInf) throw error("peierls_barrier: no finite cycle (c = +inf)");
    if (c.exact && is_integral(C)) {
        // scaled tilt: B = den*C - num has integer entries and min cycle mean 0
        IMat B = to_scaled_int(C, c.den, c.num);
        IMat star = ikleene_star(B, n);
        std::vector<int> crit = critical_nodes_int(B, n);
        res.exact = true;
        res.denom = c.den;
        res.c_inf_scaled.assign(static_cast<size_t>(n) * n, kIntInf);
        res.c_inf = Mat(n, n, kInf);
        for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y) {
                int64_t best = kIntInf;
                for (int z : crit) {
                    int64_t a = star[x * n + z], b = star[z * n + y];
                    if (a >= kIntInf || b >= kIntInf) continue;
                    best = std::min(best, a + b);
                }
                res.c_inf_scaled[x * n + y] = best;
                if (best < kIntInf) res.c_inf(x, y) = static_cast<double>(best) / c.den;
            }
        // aubry from the barrier itself: c_inf(x,x) = 0
        res.aubry.clear();
        for (int x = 0; x < n; ++x)
            if (res.c_inf_scaled[x * n + x] == 0) res.aubry.push_back(x);
        return res;
    }
    Mat B = C;
    for (double& v : B.a)
        if (v != kInf) v -= c.value;
    Mat star = kleene_star(B);
    bool ambiguous = false;
    std::vector<int> crit = critical_nodes_float(B, 1e-9, &ambiguous);
    res.tolerance_ambiguity = ambiguous;
    res.c_inf = Mat(n, n, kInf);
    for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
            double best = kInf;
            for (int z : crit) {
                if (star(x, z) == kInf || star(z, y) == kInf) continue;
                best = std::min(best, star(x, z) + star(z, y));
            }
            res.c_inf(x, y) = best;
        }
    for (int x = 0; x < n; ++x)
        if (std::abs(res.c_inf(x, x)) <= 1e-9) res.aubry.push_back(x);
    return res;
}

OperatorPtr effective_operator(const Transfer& t) {
    if (t.is_cost_like()) {
        MinMeanCycleResult c = mane_min_mean_cycle(*t.cost);
        PeierlsResult p = peierls_barrier(*t.cost, c);
        return std::make_shared<CostBackwardOp>(p.c_inf, t.source, t.target);
    }
    if (t.kind == TransferKind::entropic || t.kind == TransferKind::markov) {
        SchrodingerResult s = schrodinger_effective(*t.kernel);
        Mat rank1(t.kernel->rows, t.kernel->cols);
        for (int i = 0; i < rank1.rows; ++i)
            for (int j = 0; j < rank1.cols; ++j) rank1(i, j) = s.m[j];
        if (t.kind == TransferKind::entropic)
            return std::make_shared<EntropicOp>(std::move(rank1), t.source, t.target);
        return std::make_shared<MarkovOp>(std::move(rank1), t.source, t.target);
    }
    throw error("effective_operator: representation not in {cost, entropic, markov}");
}

Transfer effective_transfer(const Transfer& t) {
    if (t.is_cost_like()) {
        MinMeanCycleResult c = mane_min_mean_cycle(*t.cost);
        PeierlsResult p = peierls_barrier(*t.cost, c);
        return make_cost_transfer(p.c_inf, t.source, t.target);
    }
    SchrodingerResult s = schrodinger_effective(*t.kernel);
    Mat rank1(t.kernel->rows, t.kernel->cols);
    for (int i = 0; i < rank1.rows; ++i)
        for (int j = 0; j < rank1.cols; ++j) rank1(i, j) = s.m[j];
    return t.kind == TransferKind::entropic ? make_entropic_transfer(std::move(rank1), t.source, t.target)
                                            : make_markov_transfer(std::move(rank1), t.source, t.target);
}

Coupling mather_measure(const Mat& C, const FiniteSpace& space) {
    const int n = C.rows;
    MinMeanCycleResult c = mane_min_mean_cycle(C);
    if (c.value == kInf) throw error("mather_measure: no finite cycle");
    PeierlsResult p = peierls_barrier(C, c);

    // critical edge graph: (u,v) lies on a zero-mean cycle of the tilt
    IMat iB, istar;
    Mat fB, fstar;
    if (p.exact) {
        iB = to_scaled_int(C, c.den, c.num);
        istar = ikleene_star(iB, n);
    } else {
        fB = C;
        for (double& x : fB.a)
            if (x != kInf) x -= c.value;
        fstar = kleene_star(fB);
    }
    auto edge_critical = [&](int u, int v) {
        if (C(u, v) == kInf) return false;
        if (p.exact) {
            int64_t back = istar[v * n + u];
            return back < kIntInf && iB[u * n + v] + back == 0;
        }
        return fstar(v, u) != kInf && std::abs(fB(u, v) + fstar(v, u)) <= 1e-9;
    };

    if (p.aubry.empty()) throw error("mather_measure: empty critical set (internal inconsistency)");
    // canonical cycle: walk the critical graph from the lowest critical node,
    // always taking the lowest-index critical successor
    int start = p.aubry.front();
    std::vector<int> path{start};
    std::vector<int> seen(n, -1);
    seen[start] = 0;
    int cur = start;
    std::vector<int> cyc;
    while (true) {
        int next = -1;
        for (int v = 0; v < n; ++v)
            if (edge_critical(cur, v)) {
                next = v;
                break;
            }
        if (next < 0) throw error("mather_measure: critical node without critical successor");
        if (seen[next] >= 0) {
            cyc.assign(path.begin() + seen[next], path.end());
            break;
        }
        seen[next] = static_cast<int>(path.size());
        path.push_back(next);
        cur = next;
    }

    const int len = static_cast<int>(cyc.size());
    Mat w(n, n);
    double value = 0.0;
    for (int e = 0; e < len; ++e) {
        int u = cyc[e], v = cyc[(e + 1) % len];
        w(u, v) += 1.0 / len;
        value += C(u, v) / len;
    }
    if (std::abs(value - c.value) > 1e-8) throw error("mather_measure: extracted cycle is not optimal");
    // support law: C(x,y) + c_inf(y,x) = c on every charged pair
    for (int u = 0; u < n; ++u)
        for (int v = 0; v < n; ++v)
            if (w(u, v) > 0 && std::abs(C(u, v) + p.c_inf(v, u) - c.value) > 1e-9)
                throw error("mather_measure: support outside the generalized Aubry set");
    return Coupling{space, space, std::move(w)};
}

namespace {

Mat matmul(const Mat& A, const Mat& B) {
    Mat C(A.rows, B.cols);
    for (int i = 0; i < A.rows; ++i)
        for (int k = 0; k < A.cols; ++k) {
            double a = A(i, k);
            if (a == 0.0) continue;
            for (int j = 0; j < B.cols; ++j) C(i, j) += a * B(k, j);
        }
    return C;
}

}  // namespace

SchrodingerResult schrodinger_effective(const Mat& P) {
    const int n = P.rows;
    SchrodingerResult out;
    Mat M = P;
    for (int it = 1; it <= 100000; ++it) {
        // column spread measures the distance to the rank-one limit 1 m^T
        double spread = 0.0;
        for (int j = 0; j < n; ++j) {
            double lo = kInf, hi = -kInf;
            for (int i = 0; i < n; ++i) {
                lo = std::min(lo, M(i, j));
                hi = std::max(hi, M(i, j));
            }
            spread = std::max(spread, hi - lo);
        }
        if (spread <= 1e-12) {
            out.m.assign(n, 0.0);
            for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int i = 0; i < n; ++i) s += M(i, j);
                out.m[j] = s / n;
            }
            out.iterations = it;
            return out;
        }
        M = matmul(M, P);
    }
    throw error("schrodinger_effective: kernel powers did not converge (periodicity?)");
}

ErgodicSummary ergodic_summary(const Transfer& t) {
    if (!t.is_cost_like()) throw error("ergodic_summary: cost representation required");
    ErgodicSummary s;
    s.c_detail = mane_min_mean_cycle(*t.cost);
    s.c = s.c_detail.value;
    s.method.push_back(s.c_detail.exact ? "mane=karp/exact" : "mane=karp/float");
    WeakKAMResult w = weak_kam_solve(t, s.c);
    s.u = w.u;
    s.residual = w.residual;
    s.method.push_back("weak_kam=two-stage(window=4n)");
    PeierlsResult p = peierls_barrier(*t.cost, s.c_detail);
    s.peierls = p.c_inf;
    s.aubry = p.aubry;
    s.method.push_back(p.exact ? "peierls=kleene/exact" : "peierls=kleene/float");
    s.mather = mather_measure(*t.cost, t.source);
    s.method.push_back("mather=critical-cycle");
    return s;
}

}  // namespace kantor
