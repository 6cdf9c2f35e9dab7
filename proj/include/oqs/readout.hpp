// readout.hpp — Density-matrix elements and observable expectations, read
// directly or through the emulated swap-test estimator (probability level,
// optional binomial shot noise).

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

#include "oqs/matrix.hpp"

namespace oqs::readout {

cd matrix_element(const DensityMatrix& rho, std::size_t m, std::size_t n);

struct SwapTestResult {
    double p0 = 0.0;                   // exact P(0) = (1 + <phi|rho|phi>) / 2
    std::optional<double> p0_sampled;  // binomial estimate when shots given
};

SwapTestResult swap_test_probability(const DensityMatrix& rho, const QuantumState& phi,
                                     std::optional<std::size_t> shots = std::nullopt,
                                     std::uint64_t seed = 0);

struct ShotSpec {
    std::size_t count = 0;
    std::uint64_t seed = 0;
};

// rho_mn reconstructed from swap-test probabilities: diagonals via phi = |n>,
// Re from phi = (|m>+|n>)/sqrt(2), Im from phi = (|m>+i|n>)/sqrt(2) using
// <phi_i|rho|phi_i> = (rho_mm + rho_nn)/2 - Im(rho_mn). Expectation mode when
// shots is empty.
cd reconstruct_element(const DensityMatrix& rho, std::size_t m, std::size_t n,
                       std::optional<ShotSpec> shots = std::nullopt);

// Tr(rho F) for Hermitian F.
double expectation(const DensityMatrix& rho, const ComplexMatrix& f);

} // namespace oqs::readout
