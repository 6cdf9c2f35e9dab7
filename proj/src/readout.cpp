#include "oqs/readout.hpp"

#include <cmath>
#include <stdexcept>

#include "oqs/qmath.hpp"
#include "oqs/rng.hpp"

namespace oqs::readout {

namespace {

double quadratic_form(const DensityMatrix& rho, const QuantumState& phi) {
    if (rho.dim() != phi.dim()) throw std::invalid_argument("swap_test: dimension mismatch");
    cd acc = 0.0;
    for (std::size_t i = 0; i < rho.dim(); ++i)
        for (std::size_t j = 0; j < rho.dim(); ++j)
            acc += std::conj(phi[i]) * rho.matrix()(i, j) * phi[j];
    return acc.real();
}

QuantumState two_index_state(std::size_t dim, std::size_t m, std::size_t n, cd coeff_n) {
    std::vector<cd> amps(dim, cd(0.0));
    const double inv = 1.0 / std::sqrt(2.0);
    amps[m] = inv;
    amps[n] = coeff_n * inv;
    return QuantumState(std::move(amps));
}

// <phi|rho|phi> through the estimator inversion 2 P(0) - 1
double overlap_via_swap(const DensityMatrix& rho, const QuantumState& phi,
                        const std::optional<ShotSpec>& shots, std::uint64_t stream) {
    if (!shots) return 2.0 * swap_test_probability(rho, phi).p0 - 1.0;
    const auto res =
        swap_test_probability(rho, phi, shots->count, Rng::derive(shots->seed, stream));
    return 2.0 * *res.p0_sampled - 1.0;
}

} // namespace

cd matrix_element(const DensityMatrix& rho, std::size_t m, std::size_t n) {
    if (m >= rho.dim() || n >= rho.dim()) throw std::out_of_range("matrix_element: index out of range");
    return rho.matrix()(m, n);
}

SwapTestResult swap_test_probability(const DensityMatrix& rho, const QuantumState& phi,
                                     std::optional<std::size_t> shots, std::uint64_t seed) {
    SwapTestResult r;
    r.p0 = 0.5 * (1.0 + quadratic_form(rho, phi));
    if (shots) {
        if (*shots == 0) throw std::invalid_argument("swap_test_probability: shots must be >= 1");
        Rng rng(seed);
        std::size_t zeros = 0;
        for (std::size_t s = 0; s < *shots; ++s)
            if (rng.bernoulli(r.p0)) ++zeros;
        r.p0_sampled = static_cast<double>(zeros) / static_cast<double>(*shots);
    }
    return r;
}

cd reconstruct_element(const DensityMatrix& rho, std::size_t m, std::size_t n,
                       std::optional<ShotSpec> shots) {
    if (m >= rho.dim() || n >= rho.dim())
        throw std::out_of_range("reconstruct_element: index out of range");
    const std::size_t dim = rho.dim();

    if (m == n) return overlap_via_swap(rho, qmath::basis_state(dim, n), shots, 0);

    const double vmm = overlap_via_swap(rho, qmath::basis_state(dim, m), shots, 0);
    const double vnn = overlap_via_swap(rho, qmath::basis_state(dim, n), shots, 1);
    const double vplus = overlap_via_swap(rho, two_index_state(dim, m, n, cd(1.0)), shots, 2);
    const double vimag = overlap_via_swap(rho, two_index_state(dim, m, n, cd(0.0, 1.0)), shots, 3);

    const double half_diag = 0.5 * (vmm + vnn);
    return {vplus - half_diag, half_diag - vimag};
}

double expectation(const DensityMatrix& rho, const ComplexMatrix& f) {
    f.require_square("expectation");
    if (f.rows() != rho.dim()) throw std::invalid_argument("expectation: dimension mismatch");
    if (!f.is_hermitian(1e-10)) throw std::invalid_argument("expectation: F not Hermitian");
    cd acc = 0.0;
    for (std::size_t i = 0; i < rho.dim(); ++i)
        for (std::size_t k = 0; k < rho.dim(); ++k) acc += rho.matrix()(i, k) * f(k, i);
    return acc.real();
}

} // namespace oqs::readout
