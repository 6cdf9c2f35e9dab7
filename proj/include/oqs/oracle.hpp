// oracle.hpp — Independent references: analytic Markovian rates, a Lindblad
// master-equation integrator, exact (non-Trotter) unitaries, exponential
// fitting, and the resource-count report.

#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "oqs/env_model.hpp"
#include "oqs/hamiltonian.hpp"
#include "oqs/matrix.hpp"

namespace oqs::oracle {

struct LindbladChannel {
    ComplexMatrix jump; // L_j
    double rate = 0.0;  // gamma_j >= 0
};

struct LindbladModel {
    ComplexMatrix hamiltonian;
    std::vector<LindbladChannel> channels;
};

struct MarkovianRates {
    double relaxation = 0.0; // 1/T1 = J(omega_s)/2
    double dephasing = 0.0;  // 1/T2 = J(omega_s)/4
};

MarkovianRates markovian_rates(const env::SpectralDensity& j, double omega_s);

// Two-level thermal reference: decay split by detailed balance into
// sigma_minus at rate*(1-p_inf) and sigma_plus at rate*p_inf with
// p_inf = 1/(1+exp(beta*omega_s)), so the excited population relaxes to the
// thermal value at total rate `relaxation`.
LindbladModel two_level_thermal_model(double omega_s, double relaxation, double beta);

// Fixed-step RK4 integration of
//   drho/dt = -i[H, rho] + sum_j gamma_j (L rho L† - 1/2 {L†L, rho});
// `times` must increase from 0, rho0 is the state at time 0. The step size is
// bounded by 0.1/||H||_F and 0.1/max(gamma); max_step (when > 0) tightens the
// bound further, which the tests use for convergence control.
std::vector<DensityMatrix> lindblad_integrate(const LindbladModel& model, const DensityMatrix& rho0,
                                              const std::vector<double>& times,
                                              double max_step = 0.0);

// exp(-i (sum of terms) tau) through the eigendecomposition — the
// Trotter-error baseline.
ComplexMatrix exact_unitary_reference(const ham::GlobalHamiltonianTerms& terms, double tau);

struct FitResult {
    double rate = 0.0;
    double asymptote = 0.0;
    double amplitude = 0.0;
    double residual_norm = 0.0;
};

// Least-squares fit of a + b*exp(-r t) (or b*exp(-r t) when with_asymptote is
// false) by scanning r and solving the linear subproblem, then refining.
FitResult fit_exponential(const std::vector<double>& times, const std::vector<double>& values,
                          bool with_asymptote);

struct ResourceReport {
    std::size_t qubits_approach1 = 0;              // 2*ceil(log2 N) + d + 1
    std::optional<std::size_t> qubits_approach2;   // 2*ceil(log2 N) + d_i + 1
    std::size_t qubits_reduced = 0;                // max(ceil(log2 N)+d, 2*ceil(log2 N)+1)
    double ops_table_approach1 = 0.0;              // m * (2d+1)^n0
    double ops_per_factor_approach1 = 0.0;         // m * (2d+1) * n0
    std::optional<double> ops_table_approach2;     // m * d/d_i * (2 d_i + 1)^n0
    std::optional<double> ops_per_factor_approach2;
};

// The operation counts are reported both as the published table's
// (2d+1)^n0 form and as the per-factor product count (2d+1)*n0.
ResourceReport resource_estimate(std::size_t n_hilbert, std::size_t d,
                                 std::optional<std::size_t> d_i, std::size_t m, std::size_t n0);

} // namespace oqs::oracle
