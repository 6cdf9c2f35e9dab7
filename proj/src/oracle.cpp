#include "oqs/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "oqs/errors.hpp"
#include "oqs/kernels.hpp"
#include "oqs/qmath.hpp"

namespace oqs::oracle {

namespace {

ComplexMatrix lindblad_rhs(const LindbladModel& m, const ComplexMatrix& rho) {
    const std::size_t n = rho.rows();
    ComplexMatrix out(n, n);
    // -i [H, rho]
    ComplexMatrix hr = kernels::matmul(m.hamiltonian, rho);
    ComplexMatrix rh = kernels::matmul(rho, m.hamiltonian);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) out(i, j) = cd(0.0, -1.0) * (hr(i, j) - rh(i, j));
    for (const auto& ch : m.channels) {
        if (ch.rate == 0.0) continue;
        ComplexMatrix lr = kernels::matmul(ch.jump, rho);
        ComplexMatrix lrl = kernels::matmul(lr, ch.jump.adjoint());
        ComplexMatrix ll = kernels::matmul(ch.jump.adjoint(), ch.jump);
        ComplexMatrix llr = kernels::matmul(ll, rho);
        ComplexMatrix rll = kernels::matmul(rho, ll);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                out(i, j) += ch.rate * (lrl(i, j) - 0.5 * (llr(i, j) + rll(i, j)));
    }
    return out;
}

ComplexMatrix rk4_step(const LindbladModel& m, const ComplexMatrix& rho, double h) {
    ComplexMatrix k1 = lindblad_rhs(m, rho);
    ComplexMatrix x = rho;
    ComplexMatrix tmp = k1; tmp *= cd(0.5 * h); x += tmp;
    ComplexMatrix k2 = lindblad_rhs(m, x);
    x = rho; tmp = k2; tmp *= cd(0.5 * h); x += tmp;
    ComplexMatrix k3 = lindblad_rhs(m, x);
    x = rho; tmp = k3; tmp *= cd(h); x += tmp;
    ComplexMatrix k4 = lindblad_rhs(m, x);

    ComplexMatrix next = rho;
    for (std::size_t i = 0; i < rho.rows(); ++i)
        for (std::size_t j = 0; j < rho.cols(); ++j)
            next(i, j) += (h / 6.0) * (k1(i, j) + 2.0 * k2(i, j) + 2.0 * k3(i, j) + k4(i, j));
    return next;
}

} // namespace

MarkovianRates markovian_rates(const env::SpectralDensity& j, double omega_s) {
    MarkovianRates r;
    const double jw = j(omega_s);
    r.relaxation = 0.5 * jw;
    r.dephasing = 0.25 * jw;
    return r;
}

LindbladModel two_level_thermal_model(double omega_s, double relaxation, double beta) {
    const double p_inf = 1.0 / (1.0 + std::exp(beta * omega_s));
    LindbladModel m;
    m.hamiltonian = qmath::pauli_z();
    m.hamiltonian *= cd(-0.5 * omega_s);
    ComplexMatrix down(2, 2); // |g><e| = |0><1|
    down(0, 1) = 1.0;
    ComplexMatrix up(2, 2);
    up(1, 0) = 1.0;
    m.channels.push_back({down, relaxation * (1.0 - p_inf)});
    m.channels.push_back({up, relaxation * p_inf});
    return m;
}

std::vector<DensityMatrix> lindblad_integrate(const LindbladModel& model, const DensityMatrix& rho0,
                                              const std::vector<double>& times, double max_step) {
    if (times.empty() || times.front() != 0.0)
        throw std::invalid_argument("lindblad_integrate: times must start at 0");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (times[i] <= times[i - 1])
            throw std::invalid_argument("lindblad_integrate: times must be strictly increasing");
    model.hamiltonian.require_square("lindblad_integrate");
    if (model.hamiltonian.rows() != rho0.dim())
        throw std::invalid_argument("lindblad_integrate: dimension mismatch");
    for (const auto& ch : model.channels) {
        if (ch.rate < 0.0) throw std::invalid_argument("lindblad_integrate: negative rate");
        if (ch.jump.rows() != rho0.dim() || ch.jump.cols() != rho0.dim())
            throw std::invalid_argument("lindblad_integrate: jump operator dimension mismatch");
    }

    double gmax = 0.0;
    for (const auto& ch : model.channels) gmax = std::max(gmax, ch.rate);
    const double hnorm = model.hamiltonian.norm();
    // 0.02/||H|| keeps the global RK4 error below ~1e-8 over O(100) Hamiltonian
    // periods; well inside the 0.1/||H|| stability bound
    double hmax = 0.1;
    if (hnorm > 0.0) hmax = std::min(hmax, 0.02 / hnorm);
    if (gmax > 0.0) hmax = std::min(hmax, 0.1 / gmax);
    if (max_step > 0.0) hmax = std::min(hmax, max_step);

    std::vector<DensityMatrix> out;
    out.reserve(times.size());
    ComplexMatrix rho = rho0.matrix();
    out.emplace_back(rho);
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double span = times[i] - times[i - 1];
        const auto nsub = static_cast<std::size_t>(std::ceil(span / hmax));
        const double h = span / static_cast<double>(nsub);
        for (std::size_t s = 0; s < nsub; ++s) rho = rk4_step(model, rho, h);
        if (!rho.all_finite()) throw numerical_error("lindblad_integrate: non-finite state");
        out.emplace_back(rho);
    }
    return out;
}

ComplexMatrix exact_unitary_reference(const ham::GlobalHamiltonianTerms& terms, double tau) {
    if (terms.dim() > qmath::hilbert_cap())
        throw std::invalid_argument("exact_unitary_reference: dimension cap exceeded");
    return qmath::expm_hermitian(terms.sum(), tau);
}

namespace {

struct LinearFit {
    double a = 0.0;
    double b = 0.0;
    double residual2 = 0.0;
    bool ok = false;
};

// best (a, b) for y ~ a + b e^{-rt}; a forced to 0 without asymptote
LinearFit linear_subproblem(const std::vector<double>& t, const std::vector<double>& y, double r,
                            bool with_asymptote) {
    const std::size_t n = t.size();
    double see = 0.0, se = 0.0, sy = 0.0, sey = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double e = std::exp(-r * t[i]);
        see += e * e;
        se += e;
        sy += y[i];
        sey += e * y[i];
    }
    LinearFit f;
    if (with_asymptote) {
        const double nn = static_cast<double>(n);
        const double det = nn * see - se * se;
        if (std::abs(det) < 1e-14 * std::max(1.0, nn * see)) {
            // exp term indistinguishable from a constant: constant-only fit
            f.a = sy / nn;
            f.b = 0.0;
        } else {
            f.a = (see * sy - se * sey) / det;
            f.b = (nn * sey - se * sy) / det;
        }
    } else {
        if (see < 1e-300) return f;
        f.a = 0.0;
        f.b = sey / see;
    }
    for (std::size_t i = 0; i < n; ++i) {
        const double m = f.a + f.b * std::exp(-r * t[i]);
        f.residual2 += (y[i] - m) * (y[i] - m);
    }
    f.ok = true;
    return f;
}

} // namespace

FitResult fit_exponential(const std::vector<double>& times, const std::vector<double>& values,
                          bool with_asymptote) {
    if (times.size() != values.size() || times.size() < 4)
        throw std::invalid_argument("fit_exponential: need >= 4 matching points");
    for (double v : values)
        if (!std::isfinite(v)) throw numerical_error("fit_exponential: non-finite value");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (times[i] <= times[i - 1])
            throw std::invalid_argument("fit_exponential: times must be strictly increasing");
    const double span = times.back() - times.front();

    // shift to t=0 so the amplitude refers to the first sample
    std::vector<double> t(times.size());
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = times[i] - times.front();

    double dt_min = span;
    for (std::size_t i = 1; i < t.size(); ++i) dt_min = std::min(dt_min, t[i] - t[i - 1]);

    const double r_lo = 1e-3 / span;
    const double r_hi = 10.0 / dt_min;
    const int n_grid = 240;

    double best_r = 0.0;
    LinearFit best = linear_subproblem(t, values, 0.0, with_asymptote);
    // r = 0 degenerates to a constant; keep it as the baseline for flat data
    if (!best.ok) best.residual2 = 1e300;

    for (int g = 0; g <= n_grid; ++g) {
        const double r = r_lo * std::pow(r_hi / r_lo, static_cast<double>(g) / n_grid);
        const LinearFit f = linear_subproblem(t, values, r, with_asymptote);
        if (f.ok && f.residual2 < best.residual2) {
            best = f;
            best_r = r;
        }
    }

    if (best_r > 0.0) {
        // golden-section refinement inside the bracketing grid cells
        const double step = std::pow(r_hi / r_lo, 1.0 / n_grid);
        double lo = best_r / step, hi = best_r * step;
        const double gr = 0.6180339887498949;
        double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
        double f1 = linear_subproblem(t, values, x1, with_asymptote).residual2;
        double f2 = linear_subproblem(t, values, x2, with_asymptote).residual2;
        for (int it = 0; it < 80; ++it) {
            if (f1 < f2) {
                hi = x2; x2 = x1; f2 = f1;
                x1 = hi - gr * (hi - lo);
                f1 = linear_subproblem(t, values, x1, with_asymptote).residual2;
            } else {
                lo = x1; x1 = x2; f1 = f2;
                x2 = lo + gr * (hi - lo);
                f2 = linear_subproblem(t, values, x2, with_asymptote).residual2;
            }
        }
        const double r_ref = 0.5 * (lo + hi);
        const LinearFit f = linear_subproblem(t, values, r_ref, with_asymptote);
        if (f.ok && f.residual2 <= best.residual2) {
            best = f;
            best_r = r_ref;
        }
    }

    if (!best.ok) throw numerical_error("fit_exponential: no usable fit");

    // a flat fit (|b| negligible against the data scale) pins the rate to 0
    double yscale = 0.0;
    for (double v : values) yscale = std::max(yscale, std::abs(v));
    if (std::abs(best.b) <= 1e-12 * std::max(yscale, 1e-300)) best_r = 0.0;

    FitResult out;
    out.rate = best_r;
    out.asymptote = with_asymptote ? best.a : 0.0;
    out.amplitude = best.b;
    out.residual_norm = std::sqrt(best.residual2);
    if (!std::isfinite(out.residual_norm)) throw numerical_error("fit_exponential: diverged");
    return out;
}

ResourceReport resource_estimate(std::size_t n_hilbert, std::size_t d,
                                 std::optional<std::size_t> d_i, std::size_t m, std::size_t n0) {
    if (n_hilbert < 1 || d < 1 || m < 1 || n0 < 1)
        throw std::invalid_argument("resource_estimate: all inputs must be positive");
    if (d_i && (*d_i == 0 || d % *d_i != 0))
        throw std::invalid_argument("resource_estimate: d_i must divide d");

    std::size_t log2n = 0;
    while ((std::size_t(1) << log2n) < n_hilbert) ++log2n;

    ResourceReport r;
    r.qubits_approach1 = 2 * log2n + d + 1;
    r.qubits_reduced = std::max(log2n + d, 2 * log2n + 1);
    const double md = static_cast<double>(m);
    r.ops_table_approach1 = md * std::pow(2.0 * static_cast<double>(d) + 1.0, static_cast<double>(n0));
    r.ops_per_factor_approach1 = md * (2.0 * static_cast<double>(d) + 1.0) * static_cast<double>(n0);
    if (d_i) {
        const double di = static_cast<double>(*d_i);
        const double sets = static_cast<double>(d) / di;
        r.qubits_approach2 = 2 * log2n + *d_i + 1;
        r.ops_table_approach2 = md * sets * std::pow(2.0 * di + 1.0, static_cast<double>(n0));
        r.ops_per_factor_approach2 = md * sets * (2.0 * di + 1.0) * static_cast<double>(n0);
    }
    return r;
}

} // namespace oqs::oracle
