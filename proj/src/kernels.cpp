#include "kantor/kernels.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "kantor/space.hpp"

namespace kantor {

namespace {

// below this many scalar operations the parallel-region setup dominates;
// the omp variants fall through to the serial loops (outputs are
// bit-identical either way)
constexpr int64_t kParallelGrain = 1 << 14;

inline bool small_work(int64_t rows, int64_t inner) { return rows * inner < kParallelGrain; }

inline double row_minplus(const double* arow, const Mat& B, int j, int n) {
    double best = kInf;
    for (int k = 0; k < n; ++k) {
        double a = arow[k], b = B(k, j);
        if (a == kInf || b == kInf) continue;
        best = std::min(best, a + b);
    }
    return best;
}

}  // namespace

Mat minplus_product_serial(const Mat& A, const Mat& B) {
    if (A.cols != B.rows) throw std::invalid_argument("minplus_product: shape mismatch");
    Mat C(A.rows, B.cols);
    for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < B.cols; ++j) C(i, j) = row_minplus(A.row(i), B, j, A.cols);
    return C;
}

Mat minplus_product(const Mat& A, const Mat& B) {
    if (A.cols != B.rows) throw std::invalid_argument("minplus_product: shape mismatch");
    if (small_work(A.rows, static_cast<int64_t>(A.cols) * B.cols)) return minplus_product_serial(A, B);
    Mat C(A.rows, B.cols);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < B.cols; ++j) C(i, j) = row_minplus(A.row(i), B, j, A.cols);
    return C;
}

Mat kleene_star_serial(const Mat& A) {
    int n = A.rows;
    Mat D = A;
    for (int i = 0; i < n; ++i) D(i, i) = std::min(D(i, i), 0.0);
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i) {
            double dik = D(i, k);
            if (dik == kInf) continue;
            for (int j = 0; j < n; ++j) {
                double dkj = D(k, j);
                if (dkj == kInf) continue;
                D(i, j) = std::min(D(i, j), dik + dkj);
            }
        }
    return D;
}

Mat kleene_star(const Mat& A) {
    if (small_work(A.rows, static_cast<int64_t>(A.rows) * A.rows)) return kleene_star_serial(A);
    int n = A.rows;
    Mat D = A;
    for (int i = 0; i < n; ++i) D(i, i) = std::min(D(i, i), 0.0);
    for (int k = 0; k < n; ++k) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < n; ++i) {
            double dik = D(i, k);
            if (dik == kInf) continue;
            for (int j = 0; j < n; ++j) {
                double dkj = D(k, j);
                if (dkj == kInf) continue;
                D(i, j) = std::min(D(i, j), dik + dkj);
            }
        }
    }
    return D;
}

IMat iminplus_product_serial(const IMat& A, const IMat& B, int n) {
    IMat C(static_cast<size_t>(n) * n, kIntInf);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            int64_t best = kIntInf;
            for (int k = 0; k < n; ++k) {
                int64_t a = A[i * n + k], b = B[k * n + j];
                if (a >= kIntInf || b >= kIntInf) continue;
                best = std::min(best, a + b);
            }
            C[i * n + j] = best;
        }
    return C;
}

IMat iminplus_product(const IMat& A, const IMat& B, int n) {
    if (small_work(n, static_cast<int64_t>(n) * n)) return iminplus_product_serial(A, B, n);
    IMat C(static_cast<size_t>(n) * n, kIntInf);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            int64_t best = kIntInf;
            for (int k = 0; k < n; ++k) {
                int64_t a = A[i * n + k], b = B[k * n + j];
                if (a >= kIntInf || b >= kIntInf) continue;
                best = std::min(best, a + b);
            }
            C[i * n + j] = best;
        }
    return C;
}

IMat ikleene_star(const IMat& A, int n) {
    IMat D = A;
    for (int i = 0; i < n; ++i) D[i * n + i] = std::min(D[i * n + i], INT64_C(0));
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i) {
            int64_t dik = D[i * n + k];
            if (dik >= kIntInf) continue;
            for (int j = 0; j < n; ++j) {
                int64_t dkj = D[k * n + j];
                if (dkj >= kIntInf) continue;
                D[i * n + j] = std::min(D[i * n + j], dik + dkj);
            }
        }
    return D;
}

namespace {

inline double reduce_maxplus_row(const double* crow, const std::vector<double>& f, int m, int* arg) {
    double best = -kInf;
    int besty = -1;
    for (int y = 0; y < m; ++y) {
        double c = crow[y];
        if (c == kInf) continue;  // unreachable target contributes -inf
        double v = xadd(f[y], -c);
        if (v > best) {
            best = v;
            besty = y;
        }
    }
    if (arg) *arg = besty;
    return best;
}

}  // namespace

std::vector<double> maxplus_apply_serial(const Mat& C, const std::vector<double>& f, std::vector<int>* arg) {
    std::vector<double> out(C.rows);
    if (arg) arg->assign(C.rows, -1);
    for (int x = 0; x < C.rows; ++x) out[x] = reduce_maxplus_row(C.row(x), f, C.cols, arg ? &(*arg)[x] : nullptr);
    return out;
}

std::vector<double> maxplus_apply(const Mat& C, const std::vector<double>& f, std::vector<int>* arg) {
    if (small_work(C.rows, C.cols)) return maxplus_apply_serial(C, f, arg);
    std::vector<double> out(C.rows);
    if (arg) arg->assign(C.rows, -1);
#pragma omp parallel for schedule(static)
    for (int x = 0; x < C.rows; ++x) out[x] = reduce_maxplus_row(C.row(x), f, C.cols, arg ? &(*arg)[x] : nullptr);
    return out;
}

std::vector<double> minplus_apply_serial(const Mat& C, const std::vector<double>& f, std::vector<int>* arg) {
    std::vector<double> out(C.cols);
    if (arg) arg->assign(C.cols, -1);
    for (int y = 0; y < C.cols; ++y) {
        double best = kInf;
        int bestx = -1;
        for (int x = 0; x < C.rows; ++x) {
            double c = C(x, y);
            if (c == kInf) continue;
            double v = xadd(f[x], c);
            if (v < best) {
                best = v;
                bestx = x;
            }
        }
        out[y] = best;
        if (arg) (*arg)[y] = bestx;
    }
    return out;
}

std::vector<double> minplus_apply(const Mat& C, const std::vector<double>& f, std::vector<int>* arg) {
    if (small_work(C.cols, C.rows)) return minplus_apply_serial(C, f, arg);
    std::vector<double> out(C.cols);
    if (arg) arg->assign(C.cols, -1);
#pragma omp parallel for schedule(static)
    for (int y = 0; y < C.cols; ++y) {
        double best = kInf;
        int bestx = -1;
        for (int x = 0; x < C.rows; ++x) {
            double c = C(x, y);
            if (c == kInf) continue;
            double v = xadd(f[x], c);
            if (v < best) {
                best = v;
                bestx = x;
            }
        }
        out[y] = best;
        if (arg) (*arg)[y] = bestx;
    }
    return out;
}

std::vector<double> kernel_apply_serial(const Mat& P, const std::vector<double>& f) {
    std::vector<double> out(P.rows);
    for (int x = 0; x < P.rows; ++x) {
        double s = 0.0;
        const double* row = P.row(x);
        for (int y = 0; y < P.cols; ++y) s += row[y] * f[y];
        out[x] = s;
    }
    return out;
}

std::vector<double> kernel_apply(const Mat& P, const std::vector<double>& f) {
    if (small_work(P.rows, P.cols)) return kernel_apply_serial(P, f);
    std::vector<double> out(P.rows);
#pragma omp parallel for schedule(static)
    for (int x = 0; x < P.rows; ++x) {
        double s = 0.0;
        const double* row = P.row(x);
        for (int y = 0; y < P.cols; ++y) s += row[y] * f[y];
        out[x] = s;
    }
    return out;
}

namespace {

inline double reduce_logsumexp_row(const double* srow, const std::vector<double>& f, int m) {
    double hi = -kInf;
    for (int y = 0; y < m; ++y)
        if (srow[y] > 0.0) hi = std::max(hi, f[y]);
    if (hi == -kInf) return -kInf;
    if (hi == kInf) return kInf;
    double s = 0.0;
    for (int y = 0; y < m; ++y)
        if (srow[y] > 0.0 && f[y] != -kInf) s += srow[y] * std::exp(f[y] - hi);
    return hi + std::log(s);
}

}  // namespace

std::vector<double> logsumexp_apply_serial(const Mat& S, const std::vector<double>& f) {
    std::vector<double> out(S.rows);
    for (int x = 0; x < S.rows; ++x) out[x] = reduce_logsumexp_row(S.row(x), f, S.cols);
    return out;
}

std::vector<double> logsumexp_apply(const Mat& S, const std::vector<double>& f) {
    if (small_work(S.rows, S.cols)) return logsumexp_apply_serial(S, f);
    std::vector<double> out(S.rows);
#pragma omp parallel for schedule(static)
    for (int x = 0; x < S.rows; ++x) out[x] = reduce_logsumexp_row(S.row(x), f, S.cols);
    return out;
}

std::pair<double, int64_t> scan_min_serial(int64_t count, const std::function<double(int64_t)>& fn) {
    double best = kInf;
    int64_t at = -1;
    for (int64_t i = 0; i < count; ++i) {
        double v = fn(i);
        if (v < best) {
            best = v;
            at = i;
        }
    }
    return {best, at};
}

std::pair<double, int64_t> scan_min(int64_t count, const std::function<double(int64_t)>& fn) {
    if (count < 4096) return scan_min_serial(count, fn);
#ifdef _OPENMP
    int nt = omp_get_max_threads();
    std::vector<double> bests(nt, kInf);
    std::vector<int64_t> ats(nt, -1);
#pragma omp parallel num_threads(nt)
    {
        int t = omp_get_thread_num();
        double best = kInf;
        int64_t at = -1;
#pragma omp for schedule(static)
        for (int64_t i = 0; i < count; ++i) {
            double v = fn(i);
            if (v < best) {
                best = v;
                at = i;
            }
        }
        bests[t] = best;
        ats[t] = at;
    }
    // static schedule hands each thread one contiguous ascending block, so
    // merging in thread order keeps the lowest-index tie-break: only a
    // strictly smaller value from a later block may replace the incumbent
    double best = kInf;
    int64_t at = -1;
    for (int t = 0; t < nt; ++t) {
        if (ats[t] < 0) continue;
        if (at < 0 || bests[t] < best) {
            best = bests[t];
            at = ats[t];
        }
    }
    return {best, at};
#else
    return scan_min_serial(count, fn);
#endif
}

std::pair<double, int64_t> scan_max(int64_t count, const std::function<double(int64_t)>& fn) {
    auto [v, i] = scan_min(count, [&fn](int64_t k) { return -fn(k); });
    return {-v, i};
}

}  // namespace kantor
