// Times the OpenMP kernels against their serial references and checks the
// outputs are bit-identical while at it.

#include <chrono>
#include <cstdio>
#include <random>

#include "kantor/kernels.hpp"
#include "kantor/stochastic.hpp"

using namespace kantor;
namespace chrono = std::chrono;

namespace {

double ms_since(chrono::high_resolution_clock::time_point t0) {
    return chrono::duration<double, std::milli>(chrono::high_resolution_clock::now() - t0).count();
}

template <class F>
double time_best_of(int reps, F&& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        auto t0 = chrono::high_resolution_clock::now();
        fn();
        best = std::min(best, ms_since(t0));
    }
    return best;
}

}  // namespace

int main() {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 10.0);

    const int n = 600;
    Mat A(n, n), B(n, n);
    for (double& v : A.a) v = u(rng);
    for (double& v : B.a) v = u(rng);
    std::vector<double> f(n);
    for (double& v : f) v = u(rng);

    std::printf("%-28s %12s %12s %9s\n", "kernel", "serial ms", "omp ms", "speedup");

    {
        Mat r1, r2;
        double ts = time_best_of(3, [&] { r1 = minplus_product_serial(A, B); });
        double tp = time_best_of(3, [&] { r2 = minplus_product(A, B); });
        std::printf("%-28s %12.2f %12.2f %8.2fx %s\n", "minplus_product", ts, tp, ts / tp,
                    r1 == r2 ? "" : "MISMATCH");
    }
    {
        Mat r1, r2;
        double ts = time_best_of(3, [&] { r1 = kleene_star_serial(A); });
        double tp = time_best_of(3, [&] { r2 = kleene_star(A); });
        std::printf("%-28s %12.2f %12.2f %8.2fx %s\n", "kleene_star", ts, tp, ts / tp,
                    r1 == r2 ? "" : "MISMATCH");
    }
    {
        std::vector<double> r1, r2;
        double ts = time_best_of(20, [&] { r1 = maxplus_apply_serial(A, f); });
        double tp = time_best_of(20, [&] { r2 = maxplus_apply(A, f); });
        std::printf("%-28s %12.3f %12.3f %8.2fx %s\n", "maxplus_apply", ts, tp, ts / tp,
                    r1 == r2 ? "" : "MISMATCH");
    }
    {
        std::vector<double> r1, r2;
        double ts = time_best_of(20, [&] { r1 = logsumexp_apply_serial(A, f); });
        double tp = time_best_of(20, [&] { r2 = logsumexp_apply(A, f); });
        std::printf("%-28s %12.3f %12.3f %8.2fx %s\n", "logsumexp_apply", ts, tp, ts / tp,
                    r1 == r2 ? "" : "MISMATCH");
    }
    {
        // Bellman backups on a torus chain
        ControlledChain ch = make_lazy_chain(64, 2, {{0, 0}, {1, 0}, {-1, 0}, {0, 1}, {0, -1}});
        Potential u0 = zero_potential(ch.space);
        double tb = time_best_of(5, [&] { bellman_apply(ch, u0); });
        std::printf("%-28s %12s %12.3f\n", "bellman_backup(64x64)", "-", tb);
    }
    {
        std::vector<double> vals(1 << 22);
        for (double& v : vals) v = u(rng);
        auto fn = [&](int64_t i) { return vals[static_cast<size_t>(i)]; };
        std::pair<double, int64_t> r1, r2;
        double ts = time_best_of(10, [&] { r1 = scan_min_serial(static_cast<int64_t>(vals.size()), fn); });
        double tp = time_best_of(10, [&] { r2 = scan_min(static_cast<int64_t>(vals.size()), fn); });
        std::printf("%-28s %12.3f %12.3f %8.2fx %s\n", "scan_min(4M)", ts, tp, ts / tp,
                    (r1 == r2) ? "" : "MISMATCH");
    }
    return 0;
}
