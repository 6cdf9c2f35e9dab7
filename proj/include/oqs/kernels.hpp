// kernels.hpp — Dense linear-algebra kernels: serial reference + OpenMP.
//
// Every kernel exists twice: a straightforward serial implementation in
// kernels::serial (the reference the tests and the benchmark compare
// against) and an OpenMP version in kernels::par. The unqualified entry
// points dispatch on problem size. Each output entry is produced by exactly
// one thread with a fixed summation order, so a given variant returns
// bit-identical results at any thread count.

#pragma once

#include <cstddef>
#include <vector>

#include "oqs/matrix.hpp"

namespace oqs::kernels {

namespace serial {

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

// Reduced matrix over the subsystems in `keep` (ascending subsystem order),
// tracing out the rest. `dims` are the per-subsystem dimensions, leftmost
// factor first; their product must equal rho's dimension.
ComplexMatrix partial_trace(const ComplexMatrix& rho, const std::vector<std::size_t>& dims,
                            const std::vector<std::size_t>& keep);

// u * rho * u^dagger
ComplexMatrix conjugate(const ComplexMatrix& u, const ComplexMatrix& rho);

// One evolve-reset step, fused: Tr_env[ U (rho_sys ⊗ diag(env_weights)) U† ].
// The carried subsystem must be the leading (most significant) tensor factor;
// env_weights holds the diagonal of the freshly reset environment state.
// Zero weights are skipped, so a one-hot vector gives the pure-basis-state
// step used by the trajectory backend.
ComplexMatrix evolve_reset_step(const ComplexMatrix& u, const ComplexMatrix& rho_sys,
                                const std::vector<double>& env_weights);

} // namespace serial

namespace par {

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix partial_trace(const ComplexMatrix& rho, const std::vector<std::size_t>& dims,
                            const std::vector<std::size_t>& keep);
ComplexMatrix conjugate(const ComplexMatrix& u, const ComplexMatrix& rho);
ComplexMatrix evolve_reset_step(const ComplexMatrix& u, const ComplexMatrix& rho_sys,
                                const std::vector<double>& env_weights);

} // namespace par

// Size-dispatching entry points (parallel above a small-problem threshold).
ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexMatrix partial_trace(const ComplexMatrix& rho, const std::vector<std::size_t>& dims,
                            const std::vector<std::size_t>& keep);
ComplexMatrix conjugate(const ComplexMatrix& u, const ComplexMatrix& rho);
ComplexMatrix evolve_reset_step(const ComplexMatrix& u, const ComplexMatrix& rho_sys,
                                const std::vector<double>& env_weights);

// Reorder the qubit factors of a 2^n x 2^n matrix: new qubit position q holds
// old qubit perm[q]. Used to bring persistent ancillas adjacent to the system
// block so the fused step kernel applies.
ComplexMatrix permute_qubits(const ComplexMatrix& m, const std::vector<std::size_t>& perm);

// a * b^n by binary powering (square matrices; n >= 0 gives identity at n=0)
ComplexMatrix matrix_power(const ComplexMatrix& a, std::size_t n);

} // namespace oqs::kernels
