#include "kantor/gallery.hpp"

#include <algorithm>
#include <cmath>

namespace kantor {

namespace {

struct HullPoint {
    double x, y;
    int idx;  // grid index the point came from
};

// Left-turn test with a relative tolerance: points within rounding error of
// a chord count as collinear and are dropped, which keeps re-enveloping an
// envelope bit-identical (the chords are rebuilt from the same vertices).
bool drop_middle(const HullPoint& o, const HullPoint& a, const HullPoint& b) {
    double lhs = (a.x - o.x) * (b.y - o.y);
    double rhs = (a.y - o.y) * (b.x - o.x);
    double tol = 1e-12 * (std::abs(lhs) + std::abs(rhs));
    return lhs - rhs >= -tol;
}

// Upper hull of (x, y) points, x ascending. -inf y's never enter the hull.
std::vector<HullPoint> upper_hull(const std::vector<HullPoint>& pts) {
    std::vector<HullPoint> h;
    for (const auto& p : pts) {
        if (p.y == -kInf) continue;
        while (h.size() >= 2 && drop_middle(h[h.size() - 2], h[h.size() - 1], p)) h.pop_back();
        h.push_back(p);
    }
    return h;
}

// hull evaluation at abscissa x plus the bracketing segment endpoints and the chord weight
struct HullEval {
    double value;
    int left, right;  // grid indices of the bracketing hull vertices
    double lam;       // weight on left
};

HullEval eval_hull(const std::vector<HullPoint>& h, double x) {
    if (h.empty()) return {-kInf, -1, -1, 1.0};
    if (x <= h.front().x) return {h.front().y, h.front().idx, h.front().idx, 1.0};
    if (x >= h.back().x) return {h.back().y, h.back().idx, h.back().idx, 1.0};
    for (size_t k = 1; k < h.size(); ++k) {
        if (x <= h[k].x) {
            double lam = (h[k].x - x) / (h[k].x - h[k - 1].x);
            return {lam * h[k - 1].y + (1 - lam) * h[k].y, h[k - 1].idx, h[k].idx, lam};
        }
    }
    return {h.back().y, h.back().idx, h.back().idx, 1.0};
}

std::vector<double> require_increasing_coords(const FiniteSpace& s) {
    if (!s.has_coords()) throw error("envelope kinds need coords");
    const auto& c = *s.coords;
    for (size_t i = 1; i < c.size(); ++i)
        if (!(c[i] > c[i - 1])) throw std::invalid_argument("coords must be strictly increasing");
    return c;
}

std::vector<HullPoint> graph_points(const std::vector<double>& coords, const std::vector<double>& f) {
    std::vector<HullPoint> pts(coords.size());
    for (size_t i = 0; i < coords.size(); ++i) pts[i] = {coords[i], f[i], static_cast<int>(i)};
    return pts;
}

}  // namespace

std::vector<double> concave_envelope(const std::vector<double>& coords, const std::vector<double>& f) {
    if (coords.size() != f.size()) throw std::invalid_argument("concave_envelope: size mismatch");
    for (size_t i = 1; i < coords.size(); ++i)
        if (!(coords[i] > coords[i - 1])) throw std::invalid_argument("coords must be strictly increasing");
    for (double v : f)
        if (v == kInf) throw error("concave_envelope of +inf");
    auto h = upper_hull(graph_points(coords, f));
    std::vector<double> out(f.size());
    for (size_t i = 0; i < f.size(); ++i) out[i] = eval_hull(h, coords[i]).value;
    return out;
}

Potential concave_envelope(const Potential& f) {
    auto coords = require_increasing_coords(f.space);
    return Potential{f.space, concave_envelope(coords, f.v)};
}

namespace {

// Balayage: T-f = concave envelope of f (backward), T+f = convex envelope (forward).
class BalayageOp final : public Operator {
  public:
    BalayageOp(const FiniteSpace& s, Direction d) : Operator(d, s, s), coords_(require_increasing_coords(s)) {}

    std::vector<double> apply(const std::vector<double>& f) const override {
        if (direction() == Direction::backward) return concave_envelope(coords_, f);
        std::vector<double> neg(f.size());
        for (size_t i = 0; i < f.size(); ++i) neg[i] = -f[i];
        std::vector<double> env = concave_envelope(coords_, neg);
        for (double& v : env) v = -v;
        return env;
    }

    Mat supergradient(const std::vector<double>& f) const override {
        if (direction() != Direction::backward) throw error("supergradient: backward only");
        auto h = upper_hull(graph_points(coords_, f));
        Mat G(output().n, input().n);
        for (int i = 0; i < output().n; ++i) {
            HullEval e = eval_hull(h, coords_[i]);
            if (e.left < 0) continue;
            G(i, e.left) += e.lam;
            if (e.right != e.left) G(i, e.right) += 1.0 - e.lam;
        }
        return G;
    }
    bool has_supergradient() const override { return direction() == Direction::backward; }

  private:
    std::vector<double> coords_;
};

// maximize (linear chord) - gamma over one hull segment; gamma convex so the
// objective is concave: closed form for gamma(s)=s^2, ternary search otherwise
double segment_max(double x0, double y0, double x1, double y1, GammaKind gamma, double* arg) {
    auto val = [&](double s) {
        double lam = (x1 == x0) ? 0.0 : (x1 - s) / (x1 - x0);
        double chord = lam * y0 + (1 - lam) * y1;
        double g = gamma == GammaKind::square ? s * s : s;
        return chord - g;
    };
    double lo = x0, hi = x1;
    if (gamma == GammaKind::square && x1 > x0) {
        double slope = (y1 - y0) / (x1 - x0);
        double s = std::clamp(slope / 2.0, lo, hi);
        if (arg) *arg = s;
        return val(s);
    }
    if (gamma == GammaKind::identity) {
        // linear minus linear: extreme point
        double a = val(lo), b = val(hi);
        if (arg) *arg = a >= b ? lo : hi;
        return std::max(a, b);
    }
    for (int it = 0; it < 200; ++it) {
        double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
        if (val(m1) < val(m2))
            lo = m1;
        else
            hi = m2;
    }
    if (arg) *arg = 0.5 * (lo + hi);
    return val(0.5 * (lo + hi));
}

// Variance transfer operator: T-f = sup_z { env(f+q)(z) - q(z) }, q(z) = z^2.
// The output does not depend on x.
class VarianceOp final : public Operator {
  public:
    explicit VarianceOp(const FiniteSpace& s) : Operator(Direction::backward, s, s), coords_(require_increasing_coords(s)) {}

    std::vector<double> apply(const std::vector<double>& f) const override {
        std::vector<double> fq(f.size());
        for (size_t i = 0; i < f.size(); ++i) fq[i] = xadd(f[i], coords_[i] * coords_[i]);
        auto h = upper_hull(graph_points(coords_, fq));
        if (h.empty()) return std::vector<double>(output().n, -kInf);
        double best = -kInf;
        for (size_t k = 0; k + 1 < h.size(); ++k)
            best = std::max(best, segment_max(h[k].x, h[k].y, h[k + 1].x, h[k + 1].y, GammaKind::square, nullptr));
        for (const auto& p : h) best = std::max(best, p.y - p.x * p.x);
        return std::vector<double>(output().n, best);
    }

    Mat supergradient(const std::vector<double>& f) const override {
        std::vector<double> fq(f.size());
        for (size_t i = 0; i < f.size(); ++i) fq[i] = xadd(f[i], coords_[i] * coords_[i]);
        auto h = upper_hull(graph_points(coords_, fq));
        double best = -kInf, bestz = coords_[0];
        for (size_t k = 0; k + 1 < h.size(); ++k) {
            double z;
            double v = segment_max(h[k].x, h[k].y, h[k + 1].x, h[k + 1].y, GammaKind::square, &z);
            if (v > best) {
                best = v;
                bestz = z;
            }
        }
        for (const auto& p : h) {
            if (p.y - p.x * p.x > best) {
                best = p.y - p.x * p.x;
                bestz = p.x;
            }
        }
        HullEval e = eval_hull(h, bestz);
        Mat G(output().n, input().n);
        for (int i = 0; i < output().n; ++i) {
            if (e.left < 0) continue;
            G(i, e.left) += e.lam;
            if (e.right != e.left) G(i, e.right) += 1.0 - e.lam;
        }
        return G;
    }
    bool has_supergradient() const override { return true; }

  private:
    std::vector<double> coords_;
};

// Martingale transport: T-f(x) = envelope of y -> f(y) - c(x,y), evaluated at x.
class MartingaleOp final : public Operator {
  public:
    MartingaleOp(const FiniteSpace& s, Mat cost)
        : Operator(Direction::backward, s, s), coords_(require_increasing_coords(s)), cost_(std::move(cost)) {
        if (cost_.rows != s.n || cost_.cols != s.n) throw std::invalid_argument("martingale cost shape");
    }

    std::vector<double> apply(const std::vector<double>& f) const override {
        std::vector<double> out(output().n);
        std::vector<double> h(input().n);
        for (int x = 0; x < output().n; ++x) {
            for (int y = 0; y < input().n; ++y)
                h[y] = cost_(x, y) == kInf ? -kInf : xadd(f[y], -cost_(x, y));
            auto hull = upper_hull(graph_points(coords_, h));
            out[x] = eval_hull(hull, coords_[x]).value;
        }
        return out;
    }

    Mat supergradient(const std::vector<double>& f) const override {
        Mat G(output().n, input().n);
        std::vector<double> h(input().n);
        for (int x = 0; x < output().n; ++x) {
            for (int y = 0; y < input().n; ++y)
                h[y] = cost_(x, y) == kInf ? -kInf : xadd(f[y], -cost_(x, y));
            auto hull = upper_hull(graph_points(coords_, h));
            HullEval e = eval_hull(hull, coords_[x]);
            if (e.left < 0) continue;
            G(x, e.left) += e.lam;
            if (e.right != e.left) G(x, e.right) += 1.0 - e.lam;
        }
        return G;
    }
    bool has_supergradient() const override { return true; }

  private:
    std::vector<double> coords_;
    Mat cost_;
};

// Marton weak transport: T-f(x) = sup_sigma { int f dsigma - gamma(int d(x,.) dsigma) }.
// For fixed x the feasible (int d dsigma, int f dsigma) pairs fill the convex
// hull of {(d(x,y), f(y))}, so the sup is max over s of upper-hull(s) - gamma(s).
class MartonOp final : public Operator {
  public:
    MartonOp(const FiniteSpace& s, Mat dtable, GammaKind gamma)
        : Operator(Direction::backward, s, s), d_(std::move(dtable)), gamma_(gamma) {
        if (d_.rows != s.n || d_.cols != s.n) throw std::invalid_argument("marton distance shape");
    }

    std::vector<double> apply(const std::vector<double>& f) const override {
        std::vector<double> out(output().n);
        for (int x = 0; x < output().n; ++x) out[x] = value_at(x, f, nullptr);
        return out;
    }

    Mat supergradient(const std::vector<double>& f) const override {
        Mat G(output().n, input().n);
        for (int x = 0; x < output().n; ++x) {
            std::vector<double> w(input().n, 0.0);
            value_at(x, f, &w);
            for (int y = 0; y < input().n; ++y) G(x, y) = w[y];
        }
        return G;
    }
    bool has_supergradient() const override { return true; }

  private:
    double value_at(int x, const std::vector<double>& f, std::vector<double>* weights) const {
        // points (d(x,y), f(y)) sorted by abscissa; ties keep the larger f
        std::vector<HullPoint> pts(input().n);
        for (int y = 0; y < input().n; ++y) pts[y] = {d_(x, y), f[y], y};
        std::sort(pts.begin(), pts.end(), [](const HullPoint& a, const HullPoint& b) {
            return a.x < b.x || (a.x == b.x && a.y > b.y);
        });
        auto h = upper_hull(pts);
        if (h.empty()) return -kInf;
        double best = -kInf, bests = h[0].x;
        for (const auto& p : h) {
            double v = p.y - (gamma_ == GammaKind::square ? p.x * p.x : p.x);
            if (v > best) {
                best = v;
                bests = p.x;
            }
        }
        for (size_t k = 0; k + 1 < h.size(); ++k) {
            double s;
            double v = segment_max(h[k].x, h[k].y, h[k + 1].x, h[k + 1].y, gamma_, &s);
            if (v > best) {
                best = v;
                bests = s;
            }
        }
        if (weights) {
            HullEval e = eval_hull(h, bests);
            if (e.left >= 0) {
                (*weights)[e.left] += e.lam;
                if (e.right != e.left) (*weights)[e.right] += 1.0 - e.lam;
            }
        }
        return best;
    }

    Mat d_;
    GammaKind gamma_;
};

}  // namespace

Mat power_cost_matrix(const FiniteSpace& space, double p, double divisor) {
    if (!space.has_coords()) throw error("power cost needs coords");
    if (!(p > 0)) throw std::invalid_argument("power cost needs p > 0");
    Mat C(space.n, space.n);
    for (int i = 0; i < space.n; ++i)
        for (int j = 0; j < space.n; ++j)
            C(i, j) = std::pow(std::abs(space.coord(i) - space.coord(j)), p) / divisor;
    return C;
}

bool convex_order(const Measure& mu, const Measure& nu, double tol) {
    if (!mu.space.has_coords() || !same_space(mu.space, nu.space)) throw error("convex_order needs shared coords");
    if (std::abs(barycenter(mu) - barycenter(nu)) > tol) return false;
    // call payoffs (x - t)+ at every grid coordinate dominate
    for (int k = 0; k < mu.size(); ++k) {
        double t = mu.space.coord(k), a = 0.0, b = 0.0;
        for (int i = 0; i < mu.size(); ++i) {
            a += mu[i] * std::max(mu.space.coord(i) - t, 0.0);
            b += nu[i] * std::max(nu.space.coord(i) - t, 0.0);
        }
        if (a > b + tol) return false;
    }
    return true;
}

Transfer make_transfer(const GallerySpec& spec) {
    const FiniteSpace& src = spec.space;
    const FiniteSpace tgt = spec.target.value_or(src);
    switch (spec.kind) {
        case TransferKind::cost: {
            if (!spec.cost) throw std::invalid_argument("cost kind needs a cost table");
            return make_cost_transfer(*spec.cost, src, tgt);
        }
        case TransferKind::metric:
            return make_metric_transfer(src);
        case TransferKind::power_cost: {
            Transfer t = make_cost_transfer(power_cost_matrix(src, spec.p), src, src);
            t.kind = TransferKind::power_cost;
            t.power_p = spec.p;
            t.symmetric = true;
            return t;
        }
        case TransferKind::pushforward:
            return make_pushforward_transfer(spec.sigma, src, tgt);
        case TransferKind::markov: {
            if (!spec.kernel) throw std::invalid_argument("markov kind needs a kernel");
            return make_markov_transfer(*spec.kernel, src, tgt);
        }
        case TransferKind::entropic: {
            if (!spec.kernel) throw std::invalid_argument("entropic kind needs a kernel");
            return make_entropic_transfer(*spec.kernel, src, tgt);
        }
        case TransferKind::balayage: {
            Transfer t;
            t.kind = TransferKind::balayage;
            t.source = src;
            t.target = src;
            t.backward = std::make_shared<BalayageOp>(src, Direction::backward);
            t.forward = std::make_shared<BalayageOp>(src, Direction::forward);
            FiniteSpace s = src;
            t.weak_cost = [s](int x, const std::vector<double>& sig) {
                double bar = 0.0, mass = 0.0;
                for (size_t y = 0; y < sig.size(); ++y) {
                    bar += sig[y] * s.coord(static_cast<int>(y));
                    mass += sig[y];
                }
                return std::abs(bar - mass * s.coord(x)) <= 1e-9 ? 0.0 : kInf;
            };
            return t;
        }
        case TransferKind::martingale: {
            if (!spec.cost) throw std::invalid_argument("martingale kind needs a cost table");
            Transfer t;
            t.kind = TransferKind::martingale;
            t.source = src;
            t.target = src;
            t.aux_cost = *spec.cost;
            t.backward = std::make_shared<MartingaleOp>(src, *spec.cost);
            Mat c = *spec.cost;
            FiniteSpace s = src;
            t.weak_cost = [s, c](int x, const std::vector<double>& sig) {
                double bar = 0.0, mass = 0.0, cost = 0.0;
                for (size_t y = 0; y < sig.size(); ++y) {
                    bar += sig[y] * s.coord(static_cast<int>(y));
                    mass += sig[y];
                    if (sig[y] > 0) {
                        if (c(x, static_cast<int>(y)) == kInf) return kInf;
                        cost += sig[y] * c(x, static_cast<int>(y));
                    }
                }
                return std::abs(bar - mass * s.coord(x)) <= 1e-9 ? cost : kInf;
            };
            return t;
        }
        case TransferKind::variance: {
            Transfer t;
            t.kind = TransferKind::variance;
            t.source = src;
            t.target = src;
            t.backward = std::make_shared<VarianceOp>(src);
            FiniteSpace s = src;
            t.weak_cost = [s](int, const std::vector<double>& sig) {
                double bar = 0.0, sq = 0.0;
                for (size_t y = 0; y < sig.size(); ++y) {
                    bar += sig[y] * s.coord(static_cast<int>(y));
                    sq += sig[y] * s.coord(static_cast<int>(y)) * s.coord(static_cast<int>(y));
                }
                return bar * bar - sq;  // -var(sigma) for probability sigma
            };
            return t;
        }
        case TransferKind::marton: {
            Mat d = spec.dtable ? *spec.dtable : (src.has_metric() ? *src.metric : Mat());
            if (d.rows == 0) throw std::invalid_argument("marton kind needs a distance table or metric");
            Transfer t;
            t.kind = TransferKind::marton;
            t.source = src;
            t.target = src;
            t.backward = std::make_shared<MartonOp>(src, d, spec.gamma);
            GammaKind g = spec.gamma;
            Mat dd = d;
            t.weak_cost = [dd, g](int x, const std::vector<double>& sig) {
                double s = 0.0;
                for (size_t y = 0; y < sig.size(); ++y) s += sig[y] * dd(x, static_cast<int>(y));
                return g == GammaKind::square ? s * s : s;
            };
            return t;
        }
        default:
            throw std::invalid_argument("make_transfer: unsupported kind");
    }
}

double gallery_apply(const GallerySpec& spec, const Potential& f, int x) {
    Transfer t = make_transfer(spec);
    Potential out = (*t.backward)(f);
    return out[x];
}

}  // namespace kantor
