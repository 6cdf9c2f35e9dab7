// engine.hpp — Trotterized unitary evolution and the Markovian evolve-reset
// loop, in joint and sequential-channel modes, with density-matrix and
// sampled-trajectory backends and persistent (never reset) ancillas.

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "oqs/env_model.hpp"
#include "oqs/hamiltonian.hpp"
#include "oqs/matrix.hpp"

namespace oqs::engine {

struct TrotterPlan {
    std::size_t n0 = 1000; // Trotter subdivisions per step; term order fixed as listed
};

enum class Backend { density_matrix, trajectories };

struct EvolveResetConfig {
    double tau = 0.0;
    std::size_t steps = 1; // joint steps, or full sweeps in sequential mode
    Backend backend = Backend::density_matrix;
    std::size_t n_trajectories = 0;
    std::uint64_t seed = 0;
    std::vector<std::size_t> persistent;            // env mode indices never reset
    std::vector<env::ThermalEnvState> env_schedule; // per-step override; empty = constant env
    std::size_t snapshot_stride = 1;
};

struct RunMetadata {
    double tau = 0.0;
    std::size_t steps = 0;
    std::size_t n0 = 0;
    std::string mode;
    Backend backend = Backend::density_matrix;
    std::uint64_t seed = 0;
    std::vector<std::string> warnings;
};

struct SimulationRecord {
    std::vector<double> times;                // simulated elapsed time per snapshot
    std::vector<DensityMatrix> system_states; // reduced to the open system
    std::vector<DensityMatrix> carried_states; // system ⊗ persistent ancillas
    RunMetadata metadata;
};

// [U_S(tau/n0) U_B1(tau/n0) U_I1(tau/n0) ... U_Bd(tau/n0) U_Id(tau/n0)]^n0
ComplexMatrix trotter_unitary(const ham::GlobalHamiltonianTerms& terms, double tau, std::size_t n0);

// Joint evolve-reset loop: per step, tensor the carried state with the fresh
// thermal environment, apply the Trotter unitary, trace out the non-persistent
// environment. rho0 lives on system ⊗ persistent ancillas. Snapshots are
// recorded at t=0 and then every snapshot_stride steps (final step always).
SimulationRecord evolve_reset_run(const ham::GlobalHamiltonianTerms& terms,
                                  const env::ThermalEnvState& environment, const DensityMatrix& rho0,
                                  const EvolveResetConfig& cfg, const TrotterPlan& plan);

// Sequential dissipation channels: cycles through the rescaled subsets, one
// micro-step of length tau each; a full sweep advances simulated time by
// tau * (number of subsets). Snapshots are per sweep.
SimulationRecord sequential_run(const std::vector<ham::GlobalHamiltonianTerms>& subset_terms,
                                const env::ThermalEnvState& environment, const DensityMatrix& rho0,
                                const EvolveResetConfig& cfg, const TrotterPlan& plan);

} // namespace oqs::engine
