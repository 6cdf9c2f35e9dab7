// hamiltonian.hpp — Spin-bath model Hamiltonians as ordered term lists for
// the Trotter product: {H_S, H_B1, H_I1, ..., H_Bd, H_Id}.
//
// Sign convention: H_S = -1/2 omega_s sigma_z and H_Bk = -1/2 omega_k sigma_z,
// so |0> is the ground state and the excited state |e> is |1>.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "oqs/env_model.hpp"
#include "oqs/matrix.hpp"

namespace oqs::ham {

// Open-system side of the model: its Hamiltonian, the coupling operators
// (one per environment mode, or a single shared operator), and the
// transverse/longitudinal coupling weights.
struct SystemSpec {
    std::size_t n_system_qubits = 1;
    ComplexMatrix h_s;
    std::vector<ComplexMatrix> coupling_ops; // size 1 (shared) or one per mode
    double g_r = 1.0;
    double g_phi = 0.0;
};

struct GlobalHamiltonianTerms {
    std::size_t n_system_qubits = 0;
    std::size_t n_env_qubits = 0;
    std::vector<std::size_t> mode_indices;  // global mode ids for the env qubits
    std::vector<ComplexMatrix> terms;       // H_S, then {H_Bk, H_Ik} per mode

    std::size_t dim() const { return std::size_t(1) << (n_system_qubits + n_env_qubits); }
    std::size_t system_dim() const { return std::size_t(1) << n_system_qubits; }
    std::size_t env_dim() const { return std::size_t(1) << n_env_qubits; }

    ComplexMatrix sum() const;
};

// H_Bk = -1/2 omega_k sigma_z^(k), H_Ik = 1/2 c_k A_k ⊗ (g_r sigma_x^(k) + g_phi sigma_z^(k)).
GlobalHamiltonianTerms build_spin_bath_terms(const SystemSpec& sys, const env::ModeGrid& grid,
                                             const env::CouplingSet& c);

// Two-level example: H = -1/2 omega_s sigma_z - 1/2 sum_k omega_k sigma_z^(k)
//                        + 1/2 sigma_x ⊗ sum_k c_k sigma_x^(k)
GlobalHamiltonianTerms build_two_level_example(double omega_s, const env::ModeGrid& grid,
                                               const env::CouplingSet& c);

// Split the modes into d/d_i consecutive subsets, couplings scaled by
// sqrt(d/d_i); every subset keeps H_S. Subset i covers modes
// [i*d_i, (i+1)*d_i).
std::vector<GlobalHamiltonianTerms> rescale_for_sequential(const SystemSpec& sys,
                                                           const env::ModeGrid& grid,
                                                           const env::CouplingSet& c,
                                                           std::size_t d_i);

// Markovian-validity guard: warns when max(c_k * sqrt(d/d_i)) * tau > 0.1 or
// delta_omega * tau > 2*pi. Warnings only; the scaling requirements carry no
// sharp constants.
std::vector<std::string> timescale_warnings(const env::ModeGrid& grid, const env::CouplingSet& c,
                                            double tau, std::size_t d_i);

} // namespace oqs::ham
