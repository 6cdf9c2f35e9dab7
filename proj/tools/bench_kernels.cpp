// bench_kernels — timing comparison of the serial reference kernels against
// the OpenMP variants, plus the fused evolve-reset step against the
// kron+conjugate+trace composition it replaces.
//
// Usage: bench_kernels [dim ...]   (default: 64 128 256 512)

#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include <omp.h>

#include "oqs/kernels.hpp"
#include "oqs/matrix.hpp"
#include "oqs/rng.hpp"

using namespace oqs;

namespace {

ComplexMatrix random_matrix(std::size_t n, Rng& rng) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = cd(rng.normal(), rng.normal());
    return m;
}

double time_best_of(int reps, const std::function<void()>& fn) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const double t0 = omp_get_wtime();
        fn();
        best = std::min(best, omp_get_wtime() - t0);
    }
    return best;
}

void bench_dim(std::size_t n) {
    Rng rng(7);
    const ComplexMatrix a = random_matrix(n, rng);
    const ComplexMatrix b = random_matrix(n, rng);
    const int reps = n >= 256 ? 3 : 5;

    static double sink = 0.0;
    auto consume = [&](const ComplexMatrix& m) { sink += m(0, 0).real(); };

    const double t_mm_s = time_best_of(reps, [&] { consume(kernels::serial::matmul(a, b)); });
    const double t_mm_p = time_best_of(reps, [&] { consume(kernels::par::matmul(a, b)); });

    const double gflop = 8.0 * double(n) * double(n) * double(n) * 1e-9;
    std::printf("matmul      %5zu  serial %8.4f s (%6.2f GF/s)  omp %8.4f s (%6.2f GF/s)  speedup %.2fx\n",
                n, t_mm_s, gflop / t_mm_s, t_mm_p, gflop / t_mm_p, t_mm_s / t_mm_p);

    // evolve-reset step: system qubit + environment of n/2 states
    const std::size_t db = n / 2;
    ComplexMatrix rho(2, 2);
    rho(0, 0) = 0.25;
    rho(1, 1) = 0.75;
    std::vector<double> w(db, 1.0 / double(db));

    const double t_st_s =
        time_best_of(reps, [&] { consume(kernels::serial::evolve_reset_step(a, rho, w)); });
    const double t_st_p =
        time_best_of(reps, [&] { consume(kernels::par::evolve_reset_step(a, rho, w)); });

    // composed reference: kron + two matmuls + partial trace
    ComplexMatrix envm(db, db);
    for (std::size_t i = 0; i < db; ++i) envm(i, i) = w[i];
    const double t_ref = time_best_of(reps, [&] {
        const ComplexMatrix full = kernels::par::kron(rho, envm);
        const ComplexMatrix ev = kernels::par::conjugate(a, full);
        consume(kernels::par::partial_trace(ev, {2, db}, {0}));
    });
    std::printf("reset-step  %5zu  serial %8.4f s  omp %8.4f s  composed %8.4f s  fused/composed %.1fx\n",
                n, t_st_s, t_st_p, t_ref, t_ref / t_st_p);
}

} // namespace

int main(int argc, char** argv) {
    std::vector<std::size_t> dims;
    for (int i = 1; i < argc; ++i) dims.push_back(static_cast<std::size_t>(std::atoi(argv[i])));
    if (dims.empty()) dims = {64, 128, 256, 512};

    std::printf("threads: %d\n", omp_get_max_threads());
    for (std::size_t n : dims) bench_dim(n);
    return 0;
}
