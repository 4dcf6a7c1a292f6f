#pragma once

// Ground types: finite spaces, probability measures, couplings and
// extended-real potentials. Everything is an immutable value; operations
// are pure functions.

#include <optional>
#include <string>
#include <vector>

#include "kantor/matrix.hpp"

namespace kantor {

inline constexpr double kMassTol = 1e-12;  // normalization tolerance, inputs outside are rejected

class error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

// Guarded extended-real sum: forming inf - inf is a bug, not a value.
inline double xadd(double a, double b) {
    if ((a == kInf && b == -kInf) || (a == -kInf && b == kInf))
        throw error("extended-real arithmetic formed inf - inf");
    return a + b;
}

struct FiniteSpace {
    int n = 0;
    std::vector<std::string> labels;            // one identifier per point
    std::optional<std::vector<double>> coords;  // optional real coordinate per point
    std::optional<Mat> metric;                  // optional metric table d(i,j)

    bool operator==(const FiniteSpace&) const = default;

    bool has_coords() const { return coords.has_value(); }
    bool has_metric() const { return metric.has_value(); }
    double coord(int i) const { return (*coords)[i]; }
    double dist(int i, int j) const { return (*metric)(i, j); }

    void validate() const;
};

// n points labeled "0".."n-1", no coords/metric.
FiniteSpace make_space(int n);
// points on the real line; metric |x_i - x_j| attached.
FiniteSpace make_line_space(const std::vector<double>& coords);
// explicit metric table (validated: symmetric, zero diagonal, triangle).
FiniteSpace make_metric_space(int n, Mat metric);
// product space with pair labels; coords/metric dropped.
FiniteSpace product_space(const FiniteSpace& a, const FiniteSpace& b);

struct Measure {
    FiniteSpace space;
    std::vector<double> w;

    double operator[](int i) const { return w[i]; }
    int size() const { return space.n; }
    void validate() const;
};

Measure make_measure(FiniteSpace space, std::vector<double> weights);
Measure dirac(const FiniteSpace& space, int i);
Measure uniform(const FiniteSpace& space);

struct Coupling {
    FiniteSpace row_space, col_space;
    Mat w;  // joint weights, total mass 1

    void validate() const;
};

Coupling make_coupling(FiniteSpace rows, FiniteSpace cols, Mat weights);
// independent product plan mu (x) nu
Coupling product_coupling(const Measure& mu, const Measure& nu);
// identity plan: all mass on the diagonal
Coupling diagonal_coupling(const Measure& mu);

// row sums and column sums of the plan
std::pair<Measure, Measure> marginals(const Coupling& pi);

// Real-valued function on a space, with +-inf sentinels allowed.
struct Potential {
    FiniteSpace space;
    std::vector<double> v;

    double operator[](int i) const { return v[i]; }
    int size() const { return space.n; }
};

Potential make_potential(FiniteSpace space, std::vector<double> values);
Potential zero_potential(const FiniteSpace& space);

inline double integral(const Potential& f, const Measure& mu) {
    double s = 0.0;
    for (int i = 0; i < mu.size(); ++i)
        if (mu[i] != 0.0) s = xadd(s, mu[i] * f[i]);
    return s;
}

// KL(nu || mu) = sum nu log(nu/mu), +inf when nu is not absolutely continuous w.r.t. mu.
double kl_divergence(const Measure& nu, const Measure& mu);

double barycenter(const Measure& mu);  // requires coords
double variance(const Measure& mu);    // requires coords

bool same_space(const FiniteSpace& a, const FiniteSpace& b);

}  // namespace kantor
