#include "oqs/env_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "oqs/errors.hpp"
#include "oqs/qmath.hpp"

namespace oqs::env {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Solve a (small, dense) linear system in place by partial-pivot elimination.
// Returns false when a pivot collapses.
bool solve_inplace(std::vector<double>& a, std::vector<double>& b, std::size_t n) {
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
        if (std::abs(a[piv * n + col]) < 1e-300) return false;
        if (piv != col) {
            for (std::size_t k = 0; k < n; ++k) std::swap(a[col * n + k], a[piv * n + k]);
            std::swap(b[col], b[piv]);
        }
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] / a[col * n + col];
            if (f == 0.0) continue;
            for (std::size_t k = col; k < n; ++k) a[r * n + k] -= f * a[col * n + k];
            b[r] -= f * b[col];
        }
    }
    for (std::size_t r = n; r-- > 0;) {
        double s = b[r];
        for (std::size_t k = r + 1; k < n; ++k) s -= a[r * n + k] * b[k];
        b[r] = s / a[r * n + r];
    }
    return true;
}

} // namespace

SpectralDensity SpectralDensity::ohmic(double alpha, double omega_c) {
    if (alpha <= 0.0 || omega_c <= 0.0)
        throw std::invalid_argument("SpectralDensity::ohmic: alpha and omega_c must be > 0");
    SpectralDensity j;
    j.kind_ = Kind::ohmic;
    j.alpha_ = alpha;
    j.omega_c_ = omega_c;
    return j;
}

SpectralDensity SpectralDensity::tabulated(std::vector<double> omegas, std::vector<double> values) {
    if (omegas.size() != values.size() || omegas.size() < 2)
        throw std::invalid_argument("SpectralDensity::tabulated: need >= 2 matching samples");
    for (std::size_t i = 1; i < omegas.size(); ++i)
        if (omegas[i] <= omegas[i - 1])
            throw std::invalid_argument("SpectralDensity::tabulated: omegas must be strictly increasing");
    for (double v : values)
        if (!(v >= 0.0)) throw std::invalid_argument("SpectralDensity::tabulated: J must be >= 0");
    SpectralDensity j;
    j.kind_ = Kind::tabulated;
    j.tab_omega_ = std::move(omegas);
    j.tab_value_ = std::move(values);
    return j;
}

SpectralDensity SpectralDensity::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("SpectralDensity::from_file: cannot open " + path);
    std::vector<double> ws, js;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double w, j;
        if (!(ls >> w)) continue; // blank line
        if (!(ls >> j))
            throw std::invalid_argument("SpectralDensity::from_file: " + path + ":" +
                                        std::to_string(lineno) + ": expected two columns");
        ws.push_back(w);
        js.push_back(j);
    }
    return tabulated(std::move(ws), std::move(js));
}

double SpectralDensity::operator()(double omega) const {
    if (kind_ == Kind::ohmic) {
        if (omega < 0.0) throw std::invalid_argument("SpectralDensity: omega must be >= 0");
        return 2.0 * kPi * alpha_ * omega * std::exp(-omega / omega_c_);
    }
    if (omega < tab_omega_.front() || omega > tab_omega_.back())
        throw std::invalid_argument("SpectralDensity: omega outside tabulated range");
    const auto it = std::upper_bound(tab_omega_.begin(), tab_omega_.end(), omega);
    if (it == tab_omega_.end()) return tab_value_.back();
    const std::size_t hi = static_cast<std::size_t>(it - tab_omega_.begin());
    if (hi == 0) return tab_value_.front();
    const double t = (omega - tab_omega_[hi - 1]) / (tab_omega_[hi] - tab_omega_[hi - 1]);
    return (1.0 - t) * tab_value_[hi - 1] + t * tab_value_[hi];
}

ModeGrid make_grid(double omega_min, double delta_omega, std::size_t d) {
    if (delta_omega <= 0.0) throw std::invalid_argument("make_grid: delta_omega must be > 0");
    if (omega_min <= 0.0) throw std::invalid_argument("make_grid: omega_min must be > 0");
    if (d < 1) throw std::invalid_argument("make_grid: d must be >= 1");
    ModeGrid g;
    g.delta_omega = delta_omega;
    g.omega.resize(d);
    for (std::size_t k = 0; k < d; ++k) g.omega[k] = omega_min + static_cast<double>(k) * delta_omega;
    return g;
}

ModeGrid make_grid_span(double omega_min, double omega_max, std::size_t d) {
    if (omega_max <= omega_min) throw std::invalid_argument("make_grid_span: omega_max must exceed omega_min");
    if (d < 1) throw std::invalid_argument("make_grid_span: d must be >= 1");
    return make_grid(omega_min, (omega_max - omega_min) / static_cast<double>(d), d);
}

CouplingSet couplings_naive(const SpectralDensity& j, const ModeGrid& grid) {
    CouplingSet cs;
    cs.method = CouplingMethod::naive;
    cs.c.resize(grid.d());
    for (std::size_t k = 0; k < grid.d(); ++k) {
        const double jk = j(grid.omega[k]);
        if (jk < 0.0) throw std::invalid_argument("couplings_naive: negative spectral density sample");
        cs.c[k] = std::sqrt(jk * grid.delta_omega / kPi);
    }
    return cs;
}

double delta_approximant(double omega, double omega0, double tau) {
    if (tau <= 0.0) throw std::invalid_argument("delta_approximant: tau must be > 0");
    const double x = tau * (omega - omega0);
    if (std::abs(x) < 1e-6) {
        // series of (1-cos x)/x^2 = 1/2 - x^2/24 + ...
        return tau / kPi * (0.5 - x * x / 24.0);
    }
    const double diff = omega - omega0;
    return (1.0 - std::cos(x)) / (kPi * tau * diff * diff);
}

double effective_spectral_density(const CouplingSet& c, const ModeGrid& grid, double tau,
                                  double omega) {
    if (c.c.size() != grid.d())
        throw std::invalid_argument("effective_spectral_density: coupling/grid size mismatch");
    double s = 0.0;
    for (std::size_t k = 0; k < grid.d(); ++k)
        s += c.c[k] * c.c[k] * delta_approximant(omega, grid.omega[k], tau);
    return kPi * s;
}

CouplingSet couplings_improved(const SpectralDensity& j, const ModeGrid& grid, double tau,
                               bool strict) {
    if (tau <= 0.0) throw std::invalid_argument("couplings_improved: tau must be > 0");
    const std::size_t d = grid.d();

    std::vector<double> a(d * d);
    std::vector<double> b(d);
    for (std::size_t r = 0; r < d; ++r) {
        for (std::size_t k = 0; k < d; ++k)
            a[r * d + k] = kPi * delta_approximant(grid.omega[r], grid.omega[k], tau);
        b[r] = j(grid.omega[r]);
    }

    std::vector<double> x = b;
    std::vector<double> awork = a;
    if (!solve_inplace(awork, x, d))
        throw numerical_error("couplings_improved: singular kernel system");

    double scale = 0.0;
    for (double v : x) scale = std::max(scale, std::abs(v));
    std::vector<std::size_t> negative;
    for (std::size_t k = 0; k < d; ++k) {
        if (x[k] < -1e-12 * scale) negative.push_back(k);
        else if (x[k] < 0.0) x[k] = 0.0; // roundoff
    }

    CouplingSet cs;
    cs.method = CouplingMethod::improved;
    cs.tau = tau;

    if (negative.empty()) {
        cs.interpolative = true;
        cs.c.resize(d);
        for (std::size_t k = 0; k < d; ++k) cs.c[k] = std::sqrt(x[k]);
        return cs;
    }

    std::string modes;
    for (std::size_t k : negative) modes += (modes.empty() ? "" : ",") + std::to_string(k);
    if (strict)
        throw numerical_error(
            "couplings_improved: exact nodal solve gives negative c^2 at mode(s) " + modes +
            " (kernel overlap too strong: tau*delta_omega=" + std::to_string(tau * grid.delta_omega) +
            "); enlarge delta_omega or tau, or use the non-strict fallback");

    // Overlapping-kernel fallback: rescale the naive couplings so the effective
    // density matches J exactly at the central grid node.
    CouplingSet naive = couplings_naive(j, grid);
    const std::size_t center = d / 2;
    const double target = j(grid.omega[center]);
    const double eff = effective_spectral_density(naive, grid, tau, grid.omega[center]);
    if (eff <= 0.0) throw numerical_error("couplings_improved: vanishing effective density at center node");
    const double s = std::sqrt(target / eff);
    cs.interpolative = false;
    cs.c = naive.c;
    for (double& v : cs.c) v *= s;
    cs.note = "exact solve negative at mode(s) " + modes + "; naive couplings rescaled by " +
              std::to_string(s) + " anchored at omega=" + std::to_string(grid.omega[center]);
    return cs;
}

ThermalEnvState thermal_env(const ModeGrid& grid, double beta) {
    if (beta < 0.0) throw std::invalid_argument("thermal_env: beta must be >= 0");
    ThermalEnvState env;
    env.beta = beta;
    env.omega = grid.omega;
    env.p.resize(grid.d());
    for (std::size_t k = 0; k < grid.d(); ++k) env.p[k] = 1.0 / (1.0 + std::exp(beta * grid.omega[k]));
    return env;
}

std::vector<double> thermal_diagonal(const ThermalEnvState& env) {
    const std::size_t d = env.d();
    std::vector<double> w(std::size_t(1) << d, 1.0);
    for (std::size_t idx = 0; idx < w.size(); ++idx) {
        double prod = 1.0;
        for (std::size_t k = 0; k < d; ++k) {
            const bool excited = (idx >> (d - 1 - k)) & 1u;
            prod *= excited ? env.p[k] : (1.0 - env.p[k]);
        }
        w[idx] = prod;
    }
    return w;
}

DensityMatrix thermal_density(const ThermalEnvState& env) {
    const std::size_t d = env.d();
    const std::size_t dim = std::size_t(1) << d;
    if (dim > qmath::hilbert_cap())
        throw std::invalid_argument("thermal_density: dimension cap exceeded");
    ComplexMatrix m(dim, dim);
    const auto w = thermal_diagonal(env);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = w[i];
    return DensityMatrix(std::move(m));
}

std::vector<std::uint8_t> sample_thermal_bits(const ThermalEnvState& env, Rng& rng) {
    std::vector<std::uint8_t> bits(env.d());
    for (std::size_t k = 0; k < env.d(); ++k) bits[k] = rng.bernoulli(env.p[k]) ? 1 : 0;
    return bits;
}

} // namespace oqs::env
