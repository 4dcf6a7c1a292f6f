#include "kantor/transfer.hpp"

#include <algorithm>
#include <cmath>

namespace kantor {

namespace {

WeakCost linear_weak_cost(const Transfer& t) {
    Mat C = *t.cost;
    return [C](int x, const std::vector<double>& sigma) {
        double s = 0.0;
        for (int y = 0; y < C.cols; ++y) {
            if (sigma[y] == 0.0) continue;
            if (C(x, y) == kInf) return kInf;
            s += sigma[y] * C(x, y);
        }
        return s;
    };
}

}  // namespace

Transfer make_cost_transfer(Mat cost, FiniteSpace source, FiniteSpace target) {
    Transfer t;
    t.kind = TransferKind::cost;
    t.source = std::move(source);
    t.target = std::move(target);
    t.cost = std::move(cost);
    t.backward = std::make_shared<CostBackwardOp>(*t.cost, t.source, t.target);
    t.forward = std::make_shared<CostForwardOp>(*t.cost, t.source, t.target);
    t.weak_cost = linear_weak_cost(t);
    return t;
}

Transfer make_cost_transfer(Mat cost, const FiniteSpace& space) {
    return make_cost_transfer(std::move(cost), space, space);
}

Transfer make_metric_transfer(const FiniteSpace& space) {
    if (!space.has_metric()) throw error("metric transfer needs a metric");
    Transfer t = make_cost_transfer(*space.metric, space, space);
    t.kind = TransferKind::metric;
    t.symmetric = true;
    return t;
}

Transfer make_markov_transfer(Mat kernel, FiniteSpace source, FiniteSpace target) {
    Transfer t;
    t.kind = TransferKind::markov;
    t.source = std::move(source);
    t.target = std::move(target);
    t.kernel = std::move(kernel);
    t.backward = std::make_shared<MarkovOp>(*t.kernel, t.source, t.target);
    Mat P = *t.kernel;
    t.weak_cost = [P](int x, const std::vector<double>& sigma) {
        for (int y = 0; y < P.cols; ++y)
            if (std::abs(sigma[y] - P(x, y)) > 1e-9) return kInf;
        return 0.0;
    };
    return t;
}

Transfer make_entropic_transfer(Mat kernel, FiniteSpace source, FiniteSpace target) {
    Transfer t;
    t.kind = TransferKind::entropic;
    t.source = std::move(source);
    t.target = std::move(target);
    t.kernel = std::move(kernel);
    t.backward = std::make_shared<EntropicOp>(*t.kernel, t.source, t.target);
    Mat S = *t.kernel;
    t.weak_cost = [S](int x, const std::vector<double>& sigma) {
        // KL(sigma || S(x,.))
        double s = 0.0;
        for (int y = 0; y < S.cols; ++y) {
            if (sigma[y] == 0.0) continue;
            if (S(x, y) == 0.0) return kInf;
            s += sigma[y] * std::log(sigma[y] / S(x, y));
        }
        return s;
    };
    return t;
}

Transfer make_pushforward_transfer(std::vector<int> sigma, FiniteSpace source, FiniteSpace target) {
    Transfer t;
    t.kind = TransferKind::pushforward;
    t.source = std::move(source);
    t.target = std::move(target);
    t.sigma_map = std::move(sigma);
    t.backward = std::make_shared<PushforwardOp>(t.sigma_map, t.source, t.target);
    std::vector<int> sm = t.sigma_map;
    t.weak_cost = [sm](int x, const std::vector<double>& s) {
        for (size_t y = 0; y < s.size(); ++y) {
            double want = (static_cast<int>(y) == sm[x]) ? 1.0 : 0.0;
            if (std::abs(s[y] - want) > 1e-9) return kInf;
        }
        return 0.0;
    };
    return t;
}

Transfer identity_transfer(const FiniteSpace& space) {
    std::vector<int> id(space.n);
    for (int i = 0; i < space.n; ++i) id[i] = i;
    Transfer t = make_pushforward_transfer(std::move(id), space, space);
    t.forward = identity_op(space, Direction::forward);
    t.symmetric = true;
    return t;
}

Transfer zero_transfer(const FiniteSpace& space) {
    Transfer t;
    t.kind = TransferKind::cost;
    t.source = space;
    t.target = space;
    t.cost = Mat(space.n, space.n, 0.0);
    t.backward = sup_op(space);
    t.forward = std::make_shared<CostForwardOp>(*t.cost, space, space);
    t.weak_cost = [](int, const std::vector<double>&) { return 0.0; };
    return t;
}

Transfer convolve(const Transfer& a, const Transfer& b) {
    if (!same_space(a.target, b.source)) throw std::invalid_argument("convolve: middle spaces differ");
    if (a.is_cost_like() && b.is_cost_like()) {
        Mat prod = minplus_product(*a.cost, *b.cost);
        Transfer t = make_cost_transfer(std::move(prod), a.source, b.target);
        return t;
    }
    if (!a.has_backward() || !b.has_backward()) throw error("convolve: backward operators required");
    Transfer t;
    t.kind = TransferKind::composite;
    t.source = a.source;
    t.target = b.target;
    t.children = {a, b};
    t.backward = std::make_shared<CompositeOp>(a.backward, b.backward);
    if (a.has_forward() && b.has_forward()) t.forward = std::make_shared<CompositeOp>(b.forward, a.forward);
    return t;
}

Transfer tensor(const Transfer& a, const Transfer& b) {
    if (!a.is_cost_like() || !b.is_cost_like()) throw error("tensor: cost representations only");
    FiniteSpace src = product_space(a.source, b.source);
    FiniteSpace tgt = product_space(a.target, b.target);
    Mat C(src.n, tgt.n);
    for (int i1 = 0; i1 < a.source.n; ++i1)
        for (int i2 = 0; i2 < b.source.n; ++i2)
            for (int j1 = 0; j1 < a.target.n; ++j1)
                for (int j2 = 0; j2 < b.target.n; ++j2)
                    C(i1 * b.source.n + i2, j1 * b.target.n + j2) =
                        xadd((*a.cost)(i1, j1), (*b.cost)(i2, j2));
    return make_cost_transfer(std::move(C), std::move(src), std::move(tgt));
}

Transfer scalar_mult(double a, const Transfer& t) {
    if (!(a > 0)) throw std::invalid_argument("scalar_mult needs a > 0");
    if (t.is_cost_like()) {
        Mat C = *t.cost;
        for (double& v : C.a)
            if (v != kInf) v *= a;
        Transfer s = make_cost_transfer(std::move(C), t.source, t.target);
        s.kind = t.kind == TransferKind::metric && a == 1.0 ? TransferKind::metric : TransferKind::cost;
        return s;
    }
    Transfer s;
    s.kind = TransferKind::custom;
    s.source = t.source;
    s.target = t.target;
    if (t.has_backward()) s.backward = std::make_shared<ScaledOp>(a, t.backward);
    if (t.has_forward()) s.forward = std::make_shared<ScaledOp>(a, t.forward);
    if (t.weak_cost) {
        WeakCost base = t.weak_cost;
        s.weak_cost = [a, base](int x, const std::vector<double>& sig) { return a * base(x, sig); };
    }
    return s;
}

Transfer dual_sum(const Transfer& a, const Transfer& b) {
    if (!same_space(a.source, b.source) || !same_space(a.target, b.target))
        throw std::invalid_argument("dual_sum: spaces differ");
    Transfer t;
    t.kind = TransferKind::dual_sum;
    t.source = a.source;
    t.target = a.target;
    t.children = {a, b};
    if (a.has_backward() && b.has_backward()) t.backward = std::make_shared<SumOp>(a.backward, b.backward);
    if (a.has_forward() && b.has_forward()) t.forward = std::make_shared<SumOp>(a.forward, b.forward);
    if (!t.backward && !t.forward) throw error("dual_sum: direction mismatch");
    return t;
}

namespace {

// recession of a cost operator: T_r f(x) = max{ f(y) : c(x,y) < inf }
class CostRecessionOp final : public Operator {
  public:
    CostRecessionOp(const Mat& cost, FiniteSpace in, FiniteSpace out)
        : Operator(Direction::backward, std::move(in), std::move(out)), finite_(cost.rows, cost.cols) {
        for (int i = 0; i < cost.rows; ++i)
            for (int j = 0; j < cost.cols; ++j) finite_(i, j) = cost(i, j) == kInf ? kInf : 0.0;
    }
    std::vector<double> apply(const std::vector<double>& f) const override {
        return maxplus_apply(finite_, f);
    }

  private:
    Mat finite_;
};

class LimitRecessionOp final : public Operator {
  public:
    LimitRecessionOp(OperatorPtr base) : Operator(Direction::backward, base->input(), base->output()), base_(std::move(base)) {}
    std::vector<double> apply(const std::vector<double>& f) const override {
        std::vector<double> prev;
        double lambda = 1.0;
        for (int k = 0; k <= 60; ++k) {
            std::vector<double> g(f.size());
            for (size_t i = 0; i < f.size(); ++i) g[i] = lambda * f[i];
            std::vector<double> v = base_->apply(g);
            for (double& x : v) x /= lambda;
            if (!prev.empty()) {
                double diff = 0.0;
                for (size_t i = 0; i < v.size(); ++i) diff = std::max(diff, std::abs(v[i] - prev[i]));
                if (diff < 1e-9) return v;
            }
            prev = std::move(v);
            lambda *= 2.0;
        }
        throw error("recession limit did not converge within k <= 60");
    }

  private:
    OperatorPtr base_;
};

}  // namespace

OperatorPtr recession(const Transfer& t) {
    if (!t.has_backward()) throw error("recession needs the backward operator");
    if (t.is_cost_like())
        return std::make_shared<CostRecessionOp>(*t.cost, t.backward->input(), t.backward->output());
    return std::make_shared<LimitRecessionOp>(t.backward);
}

namespace {

class AlphaEnvelopeOp final : public Operator {
  public:
    AlphaEnvelopeOp(OperatorPtr base, std::function<double(double)> aconj, AlphaEnvelopeOptions opts)
        : Operator(Direction::backward, base->input(), base->output()),
          base_(std::move(base)),
          aconj_(std::move(aconj)),
          opts_(opts) {}

    std::vector<double> apply(const std::vector<double>& f) const override {
        // coarse log grid, then per-point refinement: each pass rescans a
        // window of the previous resolution at 8x finer steps
        std::vector<double> out(output().n, kInf);
        const double lo = std::log(opts_.s_min), hi = std::log(opts_.s_max);
        const double coarse_step = (hi - lo) / (opts_.grid - 1);
        std::vector<double> best_s(output().n, 1.0);

        auto visit = [&](const std::vector<double>& grid) {
            for (double s : grid) {
                double pen = aconj_(s);
                if (pen == kInf) continue;
                std::vector<double> g(f.size());
                for (size_t i = 0; i < f.size(); ++i) g[i] = f[i] / s;
                std::vector<double> v = base_->apply(g);
                for (int x = 0; x < output().n; ++x) {
                    double val = s * v[x] + pen;
                    if (val < out[x]) {
                        out[x] = val;
                        best_s[x] = s;
                    }
                }
            }
        };

        std::vector<double> grid;
        for (int i = 0; i < opts_.grid; ++i) grid.push_back(std::exp(lo + coarse_step * i));
        grid.push_back(1.0);  // the identity scale, exactly
        visit(grid);

        double width = coarse_step;
        for (int pass = 1; pass <= opts_.refine_passes; ++pass) {
            double step = width / 8.0;
            grid.clear();
            for (double s0 : best_s)
                for (int i = -8; i <= 8; ++i) grid.push_back(s0 * std::exp(i * step));
            std::sort(grid.begin(), grid.end());
            grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
            visit(grid);
            width = step;
        }

        // s -> s T(f/s) + conj(s) is convex, so a ternary polish inside the
        // final window nails the infimum past grid resolution
        auto value_at = [&](double s, int x) {
            double pen = aconj_(s);
            if (pen == kInf) return kInf;
            std::vector<double> g(f.size());
            for (size_t i = 0; i < f.size(); ++i) g[i] = f[i] / s;
            return s * base_->apply(g)[x] + pen;
        };
        for (int x = 0; x < output().n; ++x) {
            double llo = std::log(best_s[x]) - width, lhi = std::log(best_s[x]) + width;
            for (int it = 0; it < 120; ++it) {
                double m1 = llo + (lhi - llo) / 3, m2 = lhi - (lhi - llo) / 3;
                if (value_at(std::exp(m1), x) < value_at(std::exp(m2), x))
                    lhi = m2;
                else
                    llo = m1;
            }
            double v = value_at(std::exp(0.5 * (llo + lhi)), x);
            out[x] = std::min(out[x], v);
        }
        return out;
    }

  private:
    OperatorPtr base_;
    std::function<double(double)> aconj_;
    AlphaEnvelopeOptions opts_;
};

}  // namespace

OperatorPtr alpha_envelope(const Transfer& t, const std::function<double(double)>& alpha,
                           std::function<double(double)> alpha_conj, AlphaEnvelopeOptions opts) {
    if (!t.has_backward()) throw error("alpha_envelope needs the backward operator");
    // alpha must be increasing on probes
    double prev = alpha(opts.s_min);
    for (double x = opts.s_min; x <= 16.0; x = x * 2 + 0.25) {
        double cur = alpha(x);
        if (cur < prev - 1e-12) throw std::invalid_argument("alpha_envelope: alpha not increasing");
        prev = cur;
    }
    if (!alpha_conj) {
        auto a = alpha;
        alpha_conj = [a](double s) {
            // increasing conjugate sup_{t>=0} { st - alpha(t) } on a log grid
            double best = -a(0.0);
            for (double t = 1e-8; t <= 1e8; t *= 1.2589254117941673) best = std::max(best, s * t - a(t));
            return best;
        };
    }
    return std::make_shared<AlphaEnvelopeOp>(t.backward, std::move(alpha_conj), opts);
}

namespace {

struct EnvelopeEval {
    std::vector<double> value;       // per output point
    std::vector<size_t> incumbent_g; // inner minimizer at the best sigma
};

EnvelopeEval envelope_minimax(const Operator& T, const std::vector<double>& f,
                              const std::vector<std::vector<double>>& sigmas,
                              const std::vector<std::vector<double>>& gs) {
    const int m = T.input().n;
    const int nx = T.output().n;
    std::vector<std::vector<double>> Tg(gs.size());
    for (size_t k = 0; k < gs.size(); ++k) Tg[k] = T.apply(gs[k]);

    EnvelopeEval ev;
    ev.value.assign(nx, -kInf);
    ev.incumbent_g.assign(nx, 0);
    for (int x = 0; x < nx; ++x) {
        for (const auto& sig : sigmas) {
            double fdot = 0.0;
            for (int i = 0; i < m; ++i) fdot += f[i] * sig[i];
            double inner = kInf;
            size_t inner_g = 0;
            for (size_t k = 0; k < gs.size(); ++k) {
                double gdot = 0.0;
                for (int i = 0; i < m; ++i) gdot += gs[k][i] * sig[i];
                double val = fdot - gdot + Tg[k][x];
                if (val < inner) {
                    inner = val;
                    inner_g = k;
                }
            }
            if (inner > ev.value[x]) {
                ev.value[x] = inner;
                ev.incumbent_g[x] = inner_g;
            }
        }
    }
    return ev;
}

}  // namespace

std::vector<double> kantorovich_envelope_apply(const Operator& T, const std::vector<double>& f,
                                               EnvelopeGridOptions opts) {
    const int m = T.input().n;
    const int nx = T.output().n;
    if (m > 4) throw error("kantorovich_envelope: |target| <= 4 required");

    // compositions of sigma_steps into m parts: the simplex grid (corners included)
    std::vector<std::vector<double>> sigmas;
    std::vector<int> comp(m, 0);
    std::function<void(int, int)> rec = [&](int idx, int left) {
        if (idx == m - 1) {
            comp[idx] = left;
            std::vector<double> s(m);
            for (int i = 0; i < m; ++i) s[i] = static_cast<double>(comp[i]) / opts.sigma_steps;
            sigmas.push_back(std::move(s));
            return;
        }
        for (int v = 0; v <= left; ++v) {
            comp[idx] = v;
            rec(idx + 1, left - v);
        }
    };
    rec(0, opts.sigma_steps);

    double radius = opts.g_radius;
    if (radius <= 0) {
        double lo = *std::min_element(f.begin(), f.end());
        double hi = *std::max_element(f.begin(), f.end());
        radius = 3.0 * std::max(hi - lo, 1.0);
    }

    const int gv = opts.g_values;
    auto box_around = [&](const std::vector<double>& c0, double r, std::vector<std::vector<double>>& gs) {
        std::vector<int> idx(m, 0);
        while (true) {
            std::vector<double> g(m);
            for (int i = 0; i < m; ++i) g[i] = c0[i] - r + 2.0 * r * idx[i] / (gv - 1);
            gs.push_back(std::move(g));
            int d = 0;
            while (d < m && ++idx[d] == gv) idx[d++] = 0;
            if (d == m) break;
        }
    };

    // Candidate potentials accumulate across passes: finer boxes only ever
    // improve the inner minimization, the sigma grid stays fixed.
    std::vector<std::vector<double>> gs;
    box_around(std::vector<double>(m, 0.0), radius, gs);
    double r = radius;
    EnvelopeEval ev = envelope_minimax(T, f, sigmas, gs);
    for (int pass = 1; pass <= opts.refine_passes; ++pass) {
        r /= (gv - 1) / 2.0;
        std::vector<std::vector<double>> centers;
        for (int x = 0; x < nx; ++x) centers.push_back(gs[ev.incumbent_g[x]]);
        std::sort(centers.begin(), centers.end());
        centers.erase(std::unique(centers.begin(), centers.end()), centers.end());
        for (const auto& c0 : centers) box_around(c0, r, gs);
        ev = envelope_minimax(T, f, sigmas, gs);
    }
    return ev.value;
}

std::pair<Potential, Potential> conjugate_pair(const Transfer& t, const Potential& g) {
    if (!t.has_backward() || !t.has_forward()) throw error("conjugate_pair needs both directions");
    Potential psi0 = (*t.backward)(g);
    Potential psi1 = (*t.forward)(psi0);
    Potential back = (*t.backward)(psi1);
    Potential forth = (*t.forward)(back);
    for (int i = 0; i < psi0.size(); ++i)
        if (std::abs(back[i] - psi0[i]) > 1e-10) throw error("conjugate_pair: psi0 != T- psi1 (representation bug)");
    for (int i = 0; i < psi1.size(); ++i)
        if (std::abs(forth[i] - psi1[i]) > 1e-10) throw error("conjugate_pair: psi1 != T+ psi0 (representation bug)");
    return {psi0, psi1};
}

}  // namespace kantor
