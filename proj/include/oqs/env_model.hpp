// env_model.hpp — Bath description: spectral densities, mode grids, coupling
// solvers, finite-time delta kernel, thermal environment states.
//
// Units: frequencies and energies in the standard unit frequency, times in
// its inverse, hbar = 1.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "oqs/matrix.hpp"
#include "oqs/rng.hpp"

namespace oqs::env {

// J(omega) >= 0 on its domain. Ohmic: J = 2*pi*alpha*omega*exp(-omega/omega_c).
// Tabulated: linear interpolation between samples, error outside the table.
class SpectralDensity {
public:
    static SpectralDensity ohmic(double alpha, double omega_c);
    static SpectralDensity tabulated(std::vector<double> omegas, std::vector<double> values);
    // two-column numeric text file: omega J(omega), '#' comments allowed
    static SpectralDensity from_file(const std::string& path);

    double operator()(double omega) const;
    bool is_ohmic() const { return kind_ == Kind::ohmic; }
    double alpha() const { return alpha_; }
    double omega_c() const { return omega_c_; }

private:
    enum class Kind { ohmic, tabulated };
    SpectralDensity() = default;
    Kind kind_ = Kind::ohmic;
    double alpha_ = 0.0;
    double omega_c_ = 0.0;
    std::vector<double> tab_omega_;
    std::vector<double> tab_value_;
};

// Uniform grid of d mode frequencies omega_k = omega_min + k * delta_omega.
struct ModeGrid {
    std::vector<double> omega;
    double delta_omega = 0.0;
    std::size_t d() const { return omega.size(); }
};

ModeGrid make_grid(double omega_min, double delta_omega, std::size_t d);

// Alternative constructor that derives the spacing from a frequency span,
// delta_omega = (omega_max - omega_min) / d, modes at omega_min + k*delta_omega.
ModeGrid make_grid_span(double omega_min, double omega_max, std::size_t d);

enum class CouplingMethod { naive, improved };

struct CouplingSet {
    std::vector<double> c;           // coupling coefficient per mode, >= 0
    CouplingMethod method = CouplingMethod::naive;
    double tau = 0.0;                // kernel width parameter for `improved`
    bool interpolative = false;      // improved: exact nodal solve succeeded
    std::string note;                // improved fallback diagnostics, if any
};

// c_k = sqrt(J(omega_k) * delta_omega / pi)
CouplingSet couplings_naive(const SpectralDensity& j, const ModeGrid& grid);

// Finite-time delta approximant: (1 - cos[tau(omega-omega0)]) / (pi tau (omega-omega0)^2),
// with the removable singularity handled by its series value tau/(2 pi).
double delta_approximant(double omega, double omega0, double tau);

// pi * sum_k c_k^2 * delta_approximant(omega, omega_k, tau)
double effective_spectral_density(const CouplingSet& c, const ModeGrid& grid, double tau,
                                  double omega);

// Improved couplings: solve sum_k pi*delta(omega_j, omega_k, tau) c_k^2 = J(omega_j)
// at the grid nodes. When the exact solution is nonnegative it is returned and
// the effective density interpolates J at every node. When kernel overlap makes
// the exact solution negative (tau * delta_omega well below pi), `strict` mode
// throws with per-mode diagnostics; the default rescales the naive couplings so
// the effective density matches J exactly at the central grid node.
CouplingSet couplings_improved(const SpectralDensity& j, const ModeGrid& grid, double tau,
                               bool strict = false);

// Per-mode excitation probabilities p_k = 1 / (1 + exp(beta*omega_k)).
struct ThermalEnvState {
    double beta = 0.0;
    std::vector<double> omega;
    std::vector<double> p;
    std::size_t d() const { return p.size(); }
};

ThermalEnvState thermal_env(const ModeGrid& grid, double beta);

// Diagonal 2^d density matrix, tensor product of per-mode (1-p_k, p_k).
DensityMatrix thermal_density(const ThermalEnvState& env);

// Diagonal weights of thermal_density without forming the matrix.
std::vector<double> thermal_diagonal(const ThermalEnvState& env);

// Independent Bernoulli draw per mode (1 with probability p_k).
std::vector<std::uint8_t> sample_thermal_bits(const ThermalEnvState& env, Rng& rng);

} // namespace oqs::env
