#include "kantor/space.hpp"

#include <cmath>

namespace kantor {

void FiniteSpace::validate() const {
    if (n < 1) throw std::invalid_argument("FiniteSpace needs n >= 1");
    if (static_cast<int>(labels.size()) != n) throw std::invalid_argument("label count != n");
    if (coords && static_cast<int>(coords->size()) != n) throw std::invalid_argument("coord count != n");
    if (metric) {
        const Mat& d = *metric;
        if (d.rows != n || d.cols != n) throw std::invalid_argument("metric shape != n x n");
        for (int i = 0; i < n; ++i) {
            if (std::abs(d(i, i)) > 1e-12) throw std::invalid_argument("metric diagonal not zero");
            for (int j = 0; j < n; ++j) {
                if (d(i, j) < 0) throw std::invalid_argument("metric entry negative");
                if (std::abs(d(i, j) - d(j, i)) > 1e-12) throw std::invalid_argument("metric not symmetric");
                for (int k = 0; k < n; ++k)
                    if (d(i, j) > d(i, k) + d(k, j) + 1e-12)
                        throw std::invalid_argument("metric violates triangle inequality");
            }
        }
    }
}

FiniteSpace make_space(int n) {
    FiniteSpace s;
    s.n = n;
    s.labels.reserve(n);
    for (int i = 0; i < n; ++i) s.labels.push_back(std::to_string(i));
    s.validate();
    return s;
}

FiniteSpace make_line_space(const std::vector<double>& coords) {
    FiniteSpace s = make_space(static_cast<int>(coords.size()));
    s.coords = coords;
    Mat d(s.n, s.n);
    for (int i = 0; i < s.n; ++i)
        for (int j = 0; j < s.n; ++j) d(i, j) = std::abs(coords[i] - coords[j]);
    s.metric = std::move(d);
    s.validate();
    return s;
}

FiniteSpace make_metric_space(int n, Mat metric) {
    FiniteSpace s = make_space(n);
    s.metric = std::move(metric);
    s.validate();
    return s;
}

FiniteSpace product_space(const FiniteSpace& a, const FiniteSpace& b) {
    FiniteSpace s;
    s.n = a.n * b.n;
    s.labels.reserve(s.n);
    for (int i = 0; i < a.n; ++i)
        for (int j = 0; j < b.n; ++j) s.labels.push_back(a.labels[i] + "x" + b.labels[j]);
    return s;
}

void Measure::validate() const {
    if (static_cast<int>(w.size()) != space.n) throw std::invalid_argument("weight count != n");
    double mass = 0.0;
    for (double x : w) {
        if (!(x >= 0.0)) throw std::invalid_argument("negative or NaN weight");
        mass += x;
    }
    if (std::abs(mass - 1.0) > kMassTol) throw std::invalid_argument("measure mass differs from 1 beyond 1e-12");
}

Measure make_measure(FiniteSpace space, std::vector<double> weights) {
    Measure m{std::move(space), std::move(weights)};
    m.validate();
    return m;
}

Measure dirac(const FiniteSpace& space, int i) {
    std::vector<double> w(space.n, 0.0);
    w[i] = 1.0;
    return {space, std::move(w)};
}

Measure uniform(const FiniteSpace& space) {
    return {space, std::vector<double>(space.n, 1.0 / space.n)};
}

void Coupling::validate() const {
    if (w.rows != row_space.n || w.cols != col_space.n) throw std::invalid_argument("coupling shape mismatch");
    double mass = 0.0;
    for (double x : w.a) {
        if (!(x >= 0.0)) throw std::invalid_argument("negative or NaN coupling entry");
        mass += x;
    }
    if (std::abs(mass - 1.0) > kMassTol) throw std::invalid_argument("coupling mass differs from 1 beyond 1e-12");
}

Coupling make_coupling(FiniteSpace rows, FiniteSpace cols, Mat weights) {
    Coupling pi{std::move(rows), std::move(cols), std::move(weights)};
    pi.validate();
    return pi;
}

Coupling product_coupling(const Measure& mu, const Measure& nu) {
    Mat w(mu.size(), nu.size());
    for (int i = 0; i < mu.size(); ++i)
        for (int j = 0; j < nu.size(); ++j) w(i, j) = mu[i] * nu[j];
    return {mu.space, nu.space, std::move(w)};
}

Coupling diagonal_coupling(const Measure& mu) {
    Mat w(mu.size(), mu.size());
    for (int i = 0; i < mu.size(); ++i) w(i, i) = mu[i];
    return {mu.space, mu.space, std::move(w)};
}

std::pair<Measure, Measure> marginals(const Coupling& pi) {
    std::vector<double> r(pi.row_space.n, 0.0), c(pi.col_space.n, 0.0);
    for (int i = 0; i < pi.w.rows; ++i)
        for (int j = 0; j < pi.w.cols; ++j) {
            r[i] += pi.w(i, j);
            c[j] += pi.w(i, j);
        }
    return {Measure{pi.row_space, std::move(r)}, Measure{pi.col_space, std::move(c)}};
}

Potential make_potential(FiniteSpace space, std::vector<double> values) {
    if (static_cast<int>(values.size()) != space.n) throw std::invalid_argument("potential size != n");
    for (double x : values)
        if (std::isnan(x)) throw std::invalid_argument("NaN potential entry");
    return {std::move(space), std::move(values)};
}

Potential zero_potential(const FiniteSpace& space) {
    return {space, std::vector<double>(space.n, 0.0)};
}

double kl_divergence(const Measure& nu, const Measure& mu) {
    if (!same_space(nu.space, mu.space)) throw std::invalid_argument("kl_divergence: spaces differ");
    double s = 0.0;
    for (int i = 0; i < nu.size(); ++i) {
        if (nu[i] == 0.0) continue;  // 0 log(0/.) = 0
        if (mu[i] == 0.0) return kInf;
        s += nu[i] * std::log(nu[i] / mu[i]);
    }
    return s;
}

double barycenter(const Measure& mu) {
    if (!mu.space.has_coords()) throw error("barycenter needs coords");
    double s = 0.0;
    for (int i = 0; i < mu.size(); ++i) s += mu[i] * mu.space.coord(i);
    return s;
}

double variance(const Measure& mu) {
    if (!mu.space.has_coords()) throw error("variance needs coords");
    double b = barycenter(mu), s = 0.0;
    for (int i = 0; i < mu.size(); ++i) s += mu[i] * mu.space.coord(i) * mu.space.coord(i);
    return s - b * b;
}

bool same_space(const FiniteSpace& a, const FiniteSpace& b) {
    return a.n == b.n && a.labels == b.labels && a.coords == b.coords;
}

}  // namespace kantor
