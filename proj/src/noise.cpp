#include "oqs/noise.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "oqs/errors.hpp"
#include "oqs/kernels.hpp"
#include "oqs/qmath.hpp"
#include "oqs/rng.hpp"

namespace oqs::noise {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TelegraphSignal generate_telegraph(const std::vector<Fluctuator>& fluctuators, double duration,
                                   double dt, std::uint64_t seed) {
    if (duration <= 0.0 || dt <= 0.0)
        throw std::invalid_argument("generate_telegraph: duration and dt must be > 0");
    for (const auto& f : fluctuators)
        if (f.gamma < 0.0) throw std::invalid_argument("generate_telegraph: gamma must be >= 0");

    TelegraphSignal sig;
    sig.dt = dt;
    sig.fluctuators = fluctuators;
    const auto n = static_cast<std::size_t>(std::floor(duration / dt)) + 1;
    sig.values.assign(n, 0.0);
    sig.switch_times.resize(fluctuators.size());
    sig.initial_sign.resize(fluctuators.size());

    Rng rng(seed);
    for (std::size_t i = 0; i < fluctuators.size(); ++i) {
        const double gamma = fluctuators[i].gamma;
        const double v = fluctuators[i].v;
        const int s0 = rng.bernoulli(0.5) ? 1 : -1;
        sig.initial_sign[i] = s0;

        auto& events = sig.switch_times[i];
        if (gamma > 0.0) {
            double t = rng.exponential(0.5 * gamma); // flips at rate gamma/2
            while (t < duration) {
                events.push_back(t);
                t += rng.exponential(0.5 * gamma);
            }
        }

        // accumulate this fluctuator's ±v/2 state onto the sample grid
        int sign = s0;
        std::size_t e = 0;
        for (std::size_t j = 0; j < n; ++j) {
            const double tj = static_cast<double>(j) * dt;
            while (e < events.size() && events[e] <= tj) {
                sign = -sign;
                ++e;
            }
            sig.values[j] += 0.5 * v * static_cast<double>(sign);
        }
    }
    return sig;
}

double lorentzian_spectrum(const Fluctuator& f, double omega) {
    if (f.gamma <= 0.0) throw std::invalid_argument("lorentzian_spectrum: gamma must be > 0");
    return f.v * f.v * f.gamma / (4.0 * kPi * (omega * omega + f.gamma * f.gamma));
}

std::vector<Fluctuator> sample_one_over_f(double gamma_min, double gamma_max, std::size_t n,
                                          double v, std::uint64_t seed) {
    if (!(gamma_min > 0.0) || !(gamma_max > gamma_min))
        throw std::invalid_argument("sample_one_over_f: need 0 < gamma_min < gamma_max");
    if (n < 1) throw std::invalid_argument("sample_one_over_f: n must be >= 1");
    Rng rng(seed);
    const double lr = std::log(gamma_max / gamma_min);
    std::vector<Fluctuator> out(n);
    for (auto& f : out) {
        f.v = v;
        f.gamma = gamma_min * std::exp(lr * rng.uniform());
    }
    return out;
}

std::vector<double> autocorrelation(const TelegraphSignal& signal, std::size_t n_lags) {
    const std::size_t n = signal.samples();
    if (n < 2) throw std::invalid_argument("autocorrelation: signal too short");
    if (n_lags >= n) throw std::invalid_argument("autocorrelation: n_lags must be < sample count");
    std::vector<double> c(n_lags + 1, 0.0);
    const auto& x = signal.values;
    for (std::size_t l = 0; l <= n_lags; ++l) {
        double s = 0.0;
        for (std::size_t j = 0; j + l < n; ++j) s += x[j] * x[j + l];
        c[l] = s / static_cast<double>(n - l);
    }
    return c;
}

std::vector<double> ensemble_autocorrelation(const std::vector<Fluctuator>& fluctuators,
                                             double duration, double dt, std::size_t n_lags,
                                             std::size_t realizations, std::uint64_t seed) {
    if (realizations < 1)
        throw std::invalid_argument("ensemble_autocorrelation: realizations must be >= 1");
    std::vector<std::vector<double>> per_real(realizations);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(realizations); ++r) {
        const TelegraphSignal sig = generate_telegraph(
            fluctuators, duration, dt, Rng::derive(seed, static_cast<std::uint64_t>(r)));
        per_real[static_cast<std::size_t>(r)] = autocorrelation(sig, n_lags);
    }
    std::vector<double> avg(n_lags + 1, 0.0);
    for (const auto& c : per_real)
        for (std::size_t l = 0; l <= n_lags; ++l) avg[l] += c[l];
    for (double& v : avg) v /= static_cast<double>(realizations);
    return avg;
}

double spectrum_from_autocorrelation(const std::vector<double>& corr, double dt, double omega) {
    if (corr.size() < 2) throw std::invalid_argument("spectrum_from_autocorrelation: need >= 2 lags");
    const std::size_t L = corr.size() - 1;
    double s = 0.5 * corr[0];
    for (std::size_t l = 1; l <= L; ++l) {
        const double w = 0.5 * (1.0 + std::cos(kPi * static_cast<double>(l) / static_cast<double>(L)));
        s += w * corr[l] * std::cos(omega * static_cast<double>(l) * dt);
    }
    return s * dt / kPi;
}

SpectrumEstimate estimate_spectrum(const TelegraphSignal& signal, std::size_t n_lags,
                                   std::size_t n_omega) {
    const std::size_t n = signal.samples();
    if (n < 2) throw std::invalid_argument("estimate_spectrum: signal too short");
    if (n_lags == 0) n_lags = std::max<std::size_t>(2, n / 5);
    n_lags = std::min(n_lags, n - 1);
    const auto corr = autocorrelation(signal, n_lags);

    SpectrumEstimate est;
    const double omega_min = 2.0 * kPi / (static_cast<double>(n_lags) * signal.dt);
    const double omega_max = kPi / signal.dt;
    est.omega.resize(n_omega);
    est.value.resize(n_omega);
    for (std::size_t i = 0; i < n_omega; ++i) {
        const double f = static_cast<double>(i) / static_cast<double>(n_omega - 1);
        est.omega[i] = omega_min * std::pow(omega_max / omega_min, f);
        est.value[i] = spectrum_from_autocorrelation(corr, signal.dt, est.omega[i]);
    }
    return est;
}

void write_signal(const TelegraphSignal& signal, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("write_signal: cannot open " + path);
    std::fprintf(f, "# t chi\n");
    for (std::size_t j = 0; j < signal.samples(); ++j)
        std::fprintf(f, "%.12g %.12g\n", static_cast<double>(j) * signal.dt, signal.values[j]);
    std::fclose(f);
}

DephasingRecord dephasing_run(const ham::SystemSpec& sys, const DensityMatrix& rho0,
                              const std::vector<Fluctuator>& fluctuators, double duration,
                              double dt, std::size_t realizations, std::uint64_t seed,
                              std::size_t record_stride) {
    if (realizations < 1) throw std::invalid_argument("dephasing_run: realizations must be >= 1");
    if (duration <= 0.0 || dt <= 0.0)
        throw std::invalid_argument("dephasing_run: duration and dt must be > 0");
    const std::size_t ds = std::size_t(1) << sys.n_system_qubits;
    if (rho0.dim() != ds) throw std::invalid_argument("dephasing_run: rho0 dimension mismatch");
    if (sys.h_s.rows() != ds || !sys.h_s.is_hermitian(1e-10))
        throw std::invalid_argument("dephasing_run: H_S must be Hermitian on 2^n_system_qubits");
    if (sys.coupling_ops.empty())
        throw std::invalid_argument("dephasing_run: need at least one coupling operator");
    for (const auto& a : sys.coupling_ops)
        if (a.rows() != ds || !a.is_hermitian(1e-10))
            throw std::invalid_argument("dephasing_run: coupling operators must be Hermitian, dim 2^n");

    DephasingRecord rec;
    double vsum = 0.0;
    for (const auto& f : fluctuators) vsum += std::abs(f.v);
    const double chi_max = 0.5 * vsum * static_cast<double>(sys.coupling_ops.size());
    if (dt * chi_max >= 0.1)
        rec.warnings.push_back("dephasing guard: dt*max|chi| = " + std::to_string(dt * chi_max) +
                               " >= 0.1; sample spacing too coarse for the noise amplitude");

    const auto n = static_cast<std::size_t>(std::floor(duration / dt)) + 1;
    if (record_stride == 0) record_stride = std::max<std::size_t>(1, n / 512);
    std::vector<std::size_t> record_at;
    for (std::size_t j = 0; j < n; ++j)
        if (j % record_stride == 0 || j + 1 == n) record_at.push_back(j);

    const std::size_t n_ops = sys.coupling_ops.size();
    const std::size_t n_rec = record_at.size();
    std::vector<std::vector<ComplexMatrix>> per_real(realizations);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::ptrdiff_t r = 0; r < static_cast<std::ptrdiff_t>(realizations); ++r) {
        // one independent signal per coupling operator
        std::vector<TelegraphSignal> signals;
        signals.reserve(n_ops);
        for (std::size_t k = 0; k < n_ops; ++k)
            signals.push_back(generate_telegraph(
                fluctuators, duration, dt,
                Rng::derive(seed, static_cast<std::uint64_t>(r) * n_ops + k)));

        ComplexMatrix rho = rho0.matrix();
        std::vector<ComplexMatrix> snaps;
        snaps.reserve(n_rec);
        std::size_t next = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (next < n_rec && record_at[next] == j) {
                snaps.push_back(rho);
                ++next;
            }
            if (j + 1 == n) break;
            ComplexMatrix h = sys.h_s;
            for (std::size_t k = 0; k < n_ops; ++k) {
                ComplexMatrix term = sys.coupling_ops[k];
                term *= cd(signals[k].values[j]);
                h += term;
            }
            const ComplexMatrix u = qmath::expm_hermitian(h, dt);
            rho = kernels::conjugate(u, rho);
        }
        per_real[static_cast<std::size_t>(r)] = std::move(snaps);
    }

    const double inv = 1.0 / static_cast<double>(realizations);
    for (std::size_t s = 0; s < n_rec; ++s) {
        ComplexMatrix avg(ds, ds);
        for (std::size_t r = 0; r < realizations; ++r) avg += per_real[r][s];
        avg *= cd(inv);
        DensityMatrix state(avg);
        qmath::validate_density(state, 1e-9, 1e-9, -1e-7);
        rec.states.push_back(std::move(state));
        rec.times.push_back(static_cast<double>(record_at[s]) * dt);
    }
    return rec;
}

} // namespace oqs::noise
