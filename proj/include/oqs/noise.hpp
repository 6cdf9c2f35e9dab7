// noise.hpp — Classical telegraph-noise synthesis for pure dephasing:
// fluctuator ensembles, signal generation, spectrum estimation, and
// noise-averaged closed-system evolution.
//
// Convention: a fluctuator with switching rate gamma flips at Poisson rate
// gamma/2, so <xi(t) xi(0)> = (1/4) exp(-gamma |t|) and the per-fluctuator
// spectrum is exactly v^2 gamma / (4 pi (omega^2 + gamma^2)).

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "oqs/hamiltonian.hpp"
#include "oqs/matrix.hpp"

namespace oqs::noise {

struct Fluctuator {
    double v = 0.0;     // coupling strength
    double gamma = 0.0; // switching rate, >= 0
};

struct TelegraphSignal {
    double dt = 0.0;
    std::vector<double> values;                    // chi(t_j) on the uniform grid t_j = j*dt
    std::vector<std::vector<double>> switch_times; // exact Poisson event times per fluctuator
    std::vector<int> initial_sign;                 // +1/-1: xi starts at +1/2 or -1/2
    std::vector<Fluctuator> fluctuators;

    std::size_t samples() const { return values.size(); }
    double duration() const { return dt * static_cast<double>(values.size() - 1); }
};

// chi(t) = sum_i v_i xi_i(t), xi_i jumping between ±1/2 at Poisson times.
TelegraphSignal generate_telegraph(const std::vector<Fluctuator>& fluctuators, double duration,
                                   double dt, std::uint64_t seed);

// v^2 gamma / (4 pi (omega^2 + gamma^2))
double lorentzian_spectrum(const Fluctuator& f, double omega);

// Switching rates drawn log-uniformly on [gamma_min, gamma_max] (density ∝ 1/gamma).
std::vector<Fluctuator> sample_one_over_f(double gamma_min, double gamma_max, std::size_t n,
                                          double v, std::uint64_t seed);

// Empirical autocorrelation C(l*dt) for lags 0..n_lags (unbiased normalization).
std::vector<double> autocorrelation(const TelegraphSignal& signal, std::size_t n_lags);

// Autocorrelation averaged over `realizations` independently generated
// signals (seeds derived per realization; reduction in index order).
std::vector<double> ensemble_autocorrelation(const std::vector<Fluctuator>& fluctuators,
                                             double duration, double dt, std::size_t n_lags,
                                             std::size_t realizations, std::uint64_t seed);

// (1/pi) * integral cos(omega t) C(t) dt with a Hann lag window.
double spectrum_from_autocorrelation(const std::vector<double>& corr, double dt, double omega);

struct SpectrumEstimate {
    std::vector<double> omega;
    std::vector<double> value;
};

// One-shot estimate on an automatic log-spaced grid (n_lags = 0 picks
// samples/5). Ensemble use: average `autocorrelation` over signals and call
// spectrum_from_autocorrelation.
SpectrumEstimate estimate_spectrum(const TelegraphSignal& signal, std::size_t n_lags = 0,
                                   std::size_t n_omega = 64);

// two-column (t, chi) text export
void write_signal(const TelegraphSignal& signal, const std::string& path);

struct DephasingRecord {
    std::vector<double> times;
    std::vector<DensityMatrix> states; // averaged over realizations
    std::vector<std::string> warnings;
};

// Noise-averaged evolution under H(t) = H_S + sum_k chi_k(t) A_k with
// piecewise-constant chi per sample. Each coupling operator gets an
// independent signal drawn from the same fluctuator ensemble; realizations
// average with per-realization derived seeds. States are recorded every
// record_stride samples (0 picks a stride that keeps ~512 snapshots).
DephasingRecord dephasing_run(const ham::SystemSpec& sys, const DensityMatrix& rho0,
                              const std::vector<Fluctuator>& fluctuators, double duration,
                              double dt, std::size_t realizations, std::uint64_t seed,
                              std::size_t record_stride = 0);

} // namespace oqs::noise
