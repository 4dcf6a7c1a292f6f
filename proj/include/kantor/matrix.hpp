#pragma once

// Dense row-major matrix of extended reals. Instances in this library are
// tiny (tens of points), so a flat vector<double> is all we need.

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace kantor {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(int r, int c, double fill = 0.0) : rows(r), cols(c), a(static_cast<size_t>(r) * c, fill) {}

    double& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

    const double* row(int i) const { return a.data() + static_cast<size_t>(i) * cols; }
    double* row(int i) { return a.data() + static_cast<size_t>(i) * cols; }

    bool operator==(const Mat&) const = default;

    static Mat from_rows(std::initializer_list<std::initializer_list<double>> rows_) {
        Mat m(static_cast<int>(rows_.size()), rows_.size() ? static_cast<int>(rows_.begin()->size()) : 0);
        int i = 0;
        for (const auto& r : rows_) {
            if (static_cast<int>(r.size()) != m.cols) throw std::invalid_argument("ragged matrix literal");
            int j = 0;
            for (double v : r) m(i, j++) = v;
            ++i;
        }
        return m;
    }
};

// True when every finite entry is an integer small enough for exact
// int64 min-plus arithmetic (the integer fast path).
inline bool is_integral(const Mat& m, double limit = 1e12) {
    for (double v : m.a) {
        if (v == kInf || v == -kInf) continue;
        if (!std::isfinite(v) || std::floor(v) != v || std::abs(v) > limit) return false;
    }
    return true;
}

inline double max_abs_finite(const Mat& m) {
    double r = 0.0;
    for (double v : m.a)
        if (std::isfinite(v)) r = std::max(r, std::abs(v));
    return r;
}

}  // namespace kantor
