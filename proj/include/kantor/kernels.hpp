#pragma once

// Data-parallel inner loops shared by the operator and ergodic code, each in
// two variants: a plain serial reference and an OpenMP version parallelized
// over output rows/cells. Every output element is produced by exactly one
// thread with the same left-to-right reduction order as the serial code, so
// the two variants are bit-identical; tests enforce this.

#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "kantor/matrix.hpp"

namespace kantor {

inline constexpr int64_t kIntInf = INT64_C(1) << 60;  // +inf sentinel, safe to add twice

// ---- min-plus matrix algebra (extended reals) ----
// C(i,j) = min_k A(i,k) + B(k,j); inf entries mean "no edge".
Mat minplus_product_serial(const Mat& A, const Mat& B);
Mat minplus_product(const Mat& A, const Mat& B);

// Kleene star A* = min over paths of any length >= 0 (zero diagonal included).
// Requires no negative cycles. Floyd-Warshall; parallel over rows per pivot.
Mat kleene_star_serial(const Mat& A);
Mat kleene_star(const Mat& A);

// ---- min-plus matrix algebra (exact int64, kIntInf sentinel) ----
using IMat = std::vector<int64_t>;  // row-major n x n
IMat iminplus_product_serial(const IMat& A, const IMat& B, int n);
IMat iminplus_product(const IMat& A, const IMat& B, int n);
IMat ikleene_star(const IMat& A, int n);

// ---- operator row reductions ----
// out(x) = max_y f(y) - C(x,y), ties broken toward the lowest y; argmax
// recorded when arg != nullptr. inf - inf guards apply.
std::vector<double> maxplus_apply_serial(const Mat& C, const std::vector<double>& f,
                                         std::vector<int>* arg = nullptr);
std::vector<double> maxplus_apply(const Mat& C, const std::vector<double>& f,
                                  std::vector<int>* arg = nullptr);

// out(y) = min_x f(x) + C(x,y)  (forward operator of a cost)
std::vector<double> minplus_apply_serial(const Mat& C, const std::vector<double>& f,
                                         std::vector<int>* arg = nullptr);
std::vector<double> minplus_apply(const Mat& C, const std::vector<double>& f,
                                  std::vector<int>* arg = nullptr);

// out(x) = sum_y P(x,y) f(y)
std::vector<double> kernel_apply_serial(const Mat& P, const std::vector<double>& f);
std::vector<double> kernel_apply(const Mat& P, const std::vector<double>& f);

// out(x) = log sum_y S(x,y) exp(f(y)), computed stably; rows with all
// zero weights yield -inf.
std::vector<double> logsumexp_apply_serial(const Mat& S, const std::vector<double>& f);
std::vector<double> logsumexp_apply(const Mat& S, const std::vector<double>& f);

// ---- deterministic parallel scans ----
// Minimizes fn over [0, count); ties resolved toward the lowest index in
// both variants (thread-local bests merged in index order).
std::pair<double, int64_t> scan_min_serial(int64_t count, const std::function<double(int64_t)>& fn);
std::pair<double, int64_t> scan_min(int64_t count, const std::function<double(int64_t)>& fn);
std::pair<double, int64_t> scan_max(int64_t count, const std::function<double(int64_t)>& fn);

}  // namespace kantor
