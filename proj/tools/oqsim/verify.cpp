// verify.cpp — Built-in property and oracle suite behind `oqsim verify`.
// Prints one pass/fail line per check; any failure exits nonzero.

#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "commands.hpp"
#include "oqs/engine.hpp"
#include "oqs/env_model.hpp"
#include "oqs/hamiltonian.hpp"
#include "oqs/kernels.hpp"
#include "oqs/noise.hpp"
#include "oqs/oracle.hpp"
#include "oqs/qmath.hpp"
#include "oqs/readout.hpp"
#include "oqs/rng.hpp"

namespace oqsim {

using namespace oqs;

namespace {

constexpr double kPi = 3.14159265358979323846;

void require(bool ok, const std::string& what) {
    if (!ok) throw std::runtime_error(what);
}

ComplexMatrix random_matrix(std::size_t n, Rng& rng) {
    ComplexMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = cd(rng.normal(), rng.normal());
    return m;
}

ComplexMatrix random_hermitian(std::size_t n, Rng& rng) {
    ComplexMatrix a = random_matrix(n, rng);
    ComplexMatrix h(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) h(i, j) = 0.5 * (a(i, j) + std::conj(a(j, i)));
    return h;
}

DensityMatrix random_density(std::size_t n, Rng& rng) {
    ComplexMatrix g = random_matrix(n, rng);
    ComplexMatrix rho = kernels::matmul(g, g.adjoint());
    rho *= cd(1.0 / rho.trace().real());
    return DensityMatrix(std::move(rho));
}

double max_diff(const ComplexMatrix& a, const ComplexMatrix& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
    return m;
}

env::SpectralDensity ohmic8_density() { return env::SpectralDensity::ohmic(2e-4, 100.0); }
env::ModeGrid ohmic8_grid() { return env::make_grid(0.80, 0.05, 8); }

void check_kron_identities() {
    Rng rng(1);
    for (int rep = 0; rep < 10; ++rep) {
        const auto a = random_matrix(2, rng), b = random_matrix(2, rng);
        const auto c = random_matrix(2, rng), d = random_matrix(2, rng);
        const auto lhs = kernels::matmul(qmath::kron(a, b), qmath::kron(c, d));
        const auto rhs = qmath::kron(kernels::matmul(a, c), kernels::matmul(b, d));
        require(max_diff(lhs, rhs) < 1e-12, "mixed-product identity violated");
    }
}

void check_partial_trace() {
    Rng rng(2);
    const DensityMatrix a = random_density(2, rng);
    const DensityMatrix b = random_density(4, rng);
    const auto prod = qmath::kron(a.matrix(), b.matrix());
    require(max_diff(kernels::partial_trace(prod, {2, 4}, {0}), a.matrix()) < 1e-12,
            "product-state reduction failed");
    const DensityMatrix rho = random_density(4, rng);
    ComplexMatrix oracle(2, 2);
    for (std::size_t p = 0; p < 2; ++p)
        for (std::size_t q = 0; q < 2; ++q) {
            cd s = 0.0;
            for (std::size_t t = 0; t < 2; ++t) s += rho.matrix()(p * 2 + t, q * 2 + t);
            oracle(p, q) = s;
        }
    require(max_diff(kernels::partial_trace(rho.matrix(), {2, 2}, {0}), oracle) < 1e-13,
            "index-summation oracle mismatch");
}

void check_expm() {
    Rng rng(3);
    const ComplexMatrix h = random_hermitian(4, rng);
    const auto u = qmath::expm_hermitian(h, 0.3);
    ComplexMatrix taylor = ComplexMatrix::identity(4);
    ComplexMatrix power = ComplexMatrix::identity(4);
    for (int k = 1; k <= 30; ++k) {
        power = kernels::matmul(power, h);
        ComplexMatrix term = power;
        cd coeff = std::pow(cd(0.0, -0.3), k);
        for (int f = 2; f <= k; ++f) coeff /= double(f);
        term *= coeff;
        taylor += term;
    }
    require(max_diff(u, taylor) < 1e-8, "Taylor-series mismatch");
    require(max_diff(kernels::matmul(u, u.adjoint()), ComplexMatrix::identity(4)) < 1e-10,
            "unitarity violated");
    const auto z2 = qmath::embed_pauli(qmath::Pauli::z, 1, 3);
    require(max_diff(kernels::matmul(z2, z2), ComplexMatrix::identity(8)) == 0.0,
            "embedded Pauli not involutory");
}

void check_couplings() {
    const auto j = ohmic8_density();
    const auto g = ohmic8_grid();
    const auto c = env::couplings_naive(j, g);
    for (std::size_t k = 0; k < 8; ++k)
        require(std::abs(kPi * c.c[k] * c.c[k] - j(g.omega[k]) * 0.05) < 1e-15,
                "naive identity pi c^2 = J dw violated");
    require(std::abs(c.c[4] - 4.4498310838708656e-3) < 1e-12, "worked-example coupling drifted");

    const auto single = env::make_grid(1.0, 0.1, 1);
    const auto c1 = env::couplings_improved(j, single, 30.0);
    require(std::abs(c1.c[0] * c1.c[0] - 2.0 * j(1.0) / 30.0) < 1e-15, "1x1 improved solve wrong");

    const auto cw = env::couplings_improved(j, g, 100.0);
    require(cw.interpolative, "well-posed improved solve did not interpolate");
    for (std::size_t k = 0; k < 8; ++k)
        require(std::abs(env::effective_spectral_density(cw, g, 100.0, g.omega[k]) - j(g.omega[k])) <
                    1e-9 * j(g.omega[k]) + 1e-15,
                "interpolation property violated");

    const auto cf = env::couplings_improved(j, g, 30.0);
    require(!cf.interpolative && !cf.note.empty(), "worked-example fallback not engaged");
    require(std::abs(env::effective_spectral_density(cf, g, 30.0, 1.0) - j(1.0)) < 1e-12,
            "fallback anchor mismatch at omega = 1");
}

void check_delta_kernel() {
    require(std::abs(env::delta_approximant(1.0, 1.0, 30.0) - 30.0 / (2.0 * kPi)) < 1e-12,
            "peak value wrong");
    double integral = 0.0;
    const std::size_t n = 8001;
    const double a = 1.0 - 40.0, b = 1.0 + 40.0, h = (b - a) / double(n - 1);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = a + h * double(i);
        const double f = env::delta_approximant(w, 1.0, 30.0);
        integral += (i == 0 || i + 1 == n) ? f : ((i % 2) ? 4.0 * f : 2.0 * f);
    }
    integral *= h / 3.0;
    require(std::abs(integral - 1.0) < 1e-3, "normalization drifted");
}

void check_thermal() {
    const auto g = env::make_grid(1.0, 0.5, 2);
    const auto environment = env::thermal_env(g, 1.0);
    require(std::abs(environment.p[0] - 1.0 / (1.0 + std::exp(1.0))) < 1e-15, "p_k formula wrong");
    const auto rho = env::thermal_density(environment);
    double z = 0.0;
    double e[4];
    for (std::size_t idx = 0; idx < 4; ++idx) {
        const double s1 = (idx & 2) ? +0.5 : -0.5;
        const double s2 = (idx & 1) ? +0.5 : -0.5;
        e[idx] = s1 * g.omega[0] + s2 * g.omega[1];
        z += std::exp(-e[idx]);
    }
    for (std::size_t idx = 0; idx < 4; ++idx)
        require(std::abs(rho.matrix()(idx, idx).real() - std::exp(-e[idx]) / z) < 1e-12,
                "partition-function oracle mismatch");
}

void check_lindblad() {
    oracle::LindbladModel m;
    m.hamiltonian = qmath::pauli_z();
    m.hamiltonian *= cd(-0.5);
    ComplexMatrix down(2, 2);
    down(0, 1) = 1.0;
    m.channels.push_back({down, 0.5});
    const auto out = oracle::lindblad_integrate(m, qmath::pure_density(qmath::basis_state(2, 1)),
                                                {0.0, 1.0, 3.0});
    for (std::size_t i = 0; i < 3; ++i) {
        const double t = (i == 0) ? 0.0 : (i == 1 ? 1.0 : 3.0);
        require(std::abs(out[i].matrix()(1, 1).real() - std::exp(-0.5 * t)) < 1e-6,
                "amplitude damping drifted");
        require(out[i].trace_defect() < 1e-9, "trace not preserved");
    }
}

void check_trotter() {
    env::ModeGrid g = env::make_grid(0.9, 0.2, 2);
    env::CouplingSet c;
    c.c = {0.3, 0.4};
    const auto terms = ham::build_two_level_example(1.0, g, c);
    const auto exact = oracle::exact_unitary_reference(terms, 0.5);
    const auto e1 = max_diff(engine::trotter_unitary(terms, 0.5, 8), exact);
    const auto e2 = max_diff(engine::trotter_unitary(terms, 0.5, 16), exact);
    require(e1 / e2 > 1.7 && e1 / e2 < 2.3, "first-order halving violated");
}

void check_evolve_reset() {
    const auto g = ohmic8_grid();
    const auto c = env::couplings_naive(ohmic8_density(), g);
    ham::SystemSpec spec;
    spec.n_system_qubits = 1;
    spec.h_s = qmath::pauli_z();
    spec.h_s *= cd(-0.5);
    spec.coupling_ops = {qmath::pauli_x()};
    const auto subsets = ham::rescale_for_sequential(spec, g, c, 1);
    const auto environment = env::thermal_env(g, 1.0);

    engine::EvolveResetConfig cfg;
    cfg.tau = 30.0;
    cfg.steps = 6;
    const auto rec = engine::sequential_run(subsets, environment,
                                            qmath::pure_density(qmath::basis_state(2, 1)), cfg,
                                            {512});
    for (const auto& s : rec.system_states) {
        require(s.trace_defect() < 1e-9, "snapshot trace out of bounds");
        require(s.hermiticity_defect() < 1e-9, "snapshot Hermiticity out of bounds");
        require(qmath::min_eigenvalue(s.matrix()) > -1e-7, "snapshot positivity out of bounds");
    }
    require(rec.system_states.back().matrix()(1, 1).real() <
                rec.system_states.front().matrix()(1, 1).real(),
            "no relaxation observed");
}

void check_sequential_equivalence() {
    const auto g = env::make_grid(0.9, 0.1, 2);
    env::CouplingSet c;
    c.c = {0.05, 0.07};
    ham::SystemSpec spec;
    spec.n_system_qubits = 1;
    spec.h_s = qmath::pauli_z();
    spec.h_s *= cd(-0.5);
    spec.coupling_ops = {qmath::pauli_x()};
    const auto joint_terms = ham::build_spin_bath_terms(spec, g, c);
    const auto subsets = ham::rescale_for_sequential(spec, g, c, 2);
    const auto environment = env::thermal_env(g, 1.0);
    engine::EvolveResetConfig cfg;
    cfg.tau = 7.0;
    cfg.steps = 5;
    const auto rho0 = qmath::pure_density(qmath::basis_state(2, 1));
    const auto joint = engine::evolve_reset_run(joint_terms, environment, rho0, cfg, {64});
    const auto seq = engine::sequential_run(subsets, environment, rho0, cfg, {64});
    for (std::size_t i = 0; i < joint.times.size(); ++i)
        require(max_diff(joint.system_states[i].matrix(), seq.system_states[i].matrix()) < 1e-12,
                "d_i = d sequential deviates from joint");
}

void check_estimator() {
    Rng rng(4);
    for (int rep = 0; rep < 20; ++rep) {
        const DensityMatrix rho = random_density(4, rng);
        const std::size_t m = rng.next_u64() % 4, n = rng.next_u64() % 4;
        const cd direct = readout::matrix_element(rho, m, n);
        const cd rec = readout::reconstruct_element(rho, m, n);
        require(std::abs(direct - rec) < 1e-12, "estimator identity violated");
    }
    ComplexMatrix half(2, 2);
    half(0, 0) = 0.5;
    half(1, 1) = 0.5;
    const auto res = readout::swap_test_probability(DensityMatrix(half), qmath::basis_state(2, 0));
    require(std::abs(res.p0 - 0.75) < 1e-12, "maximally mixed swap probability wrong");
}

void check_resources() {
    const auto full = oracle::resource_estimate(2, 8, std::nullopt, 100, 10);
    require(full.qubits_approach1 == 11, "approach-1 qubit count wrong");
    require(full.qubits_reduced == 9, "reduced qubit count wrong");
    const auto seq = oracle::resource_estimate(2, 8, 1, 100, 10);
    require(seq.qubits_approach2 && *seq.qubits_approach2 == 4, "approach-2 qubit count wrong");
}

void check_fit() {
    std::vector<double> t, y;
    for (int i = 0; i < 40; ++i) {
        t.push_back(0.5 * i);
        y.push_back(0.3 + 0.7 * std::exp(-0.12 * t.back()));
    }
    const auto fit = oracle::fit_exponential(t, y, true);
    require(std::abs(fit.rate - 0.12) < 1e-7, "rate recovery failed");
    require(std::abs(fit.asymptote - 0.3) < 1e-7, "asymptote recovery failed");
}

void check_determinism() {
    const auto g = env::make_grid(1.0, 0.1, 2);
    env::CouplingSet c;
    c.c = {0.05, 0.06};
    const auto terms = ham::build_two_level_example(1.0, g, c);
    const auto environment = env::thermal_env(g, 1.0);
    engine::EvolveResetConfig cfg;
    cfg.tau = 5.0;
    cfg.steps = 8;
    cfg.backend = engine::Backend::trajectories;
    cfg.n_trajectories = 16;
    cfg.seed = 7;
    const auto rho0 = qmath::pure_density(qmath::basis_state(2, 1));
    const auto a = engine::evolve_reset_run(terms, environment, rho0, cfg, {64});
    const auto b = engine::evolve_reset_run(terms, environment, rho0, cfg, {64});
    for (std::size_t i = 0; i < a.times.size(); ++i)
        require(max_diff(a.system_states[i].matrix(), b.system_states[i].matrix()) == 0.0,
                "trajectory runs not bit-identical");
}

void check_telegraph() {
    const noise::TelegraphSignal sig = noise::generate_telegraph({{0.8, 0.0}}, 5.0, 0.5, 3);
    for (double v : sig.values)
        require(std::abs(std::abs(v) - 0.4) < 1e-15, "frozen fluctuator not constant");
    const noise::Fluctuator f{1.5, 0.7};
    require(std::abs(noise::lorentzian_spectrum(f, 0.0) - 1.5 * 1.5 / (4.0 * kPi * 0.7)) < 1e-15,
            "Lorentzian normalization wrong");
    require(std::abs(noise::lorentzian_spectrum(f, 0.7) - 0.5 * noise::lorentzian_spectrum(f, 0.0)) <
                1e-15,
            "half-width value wrong");
}

} // namespace

int cmd_verify() {
    const std::vector<std::pair<std::string, std::function<void()>>> checks{
        {"kron mixed-product identity", check_kron_identities},
        {"partial trace oracle", check_partial_trace},
        {"hermitian exponential", check_expm},
        {"coupling solvers", check_couplings},
        {"delta kernel", check_delta_kernel},
        {"thermal environment", check_thermal},
        {"lindblad integrator", check_lindblad},
        {"trotter convergence", check_trotter},
        {"evolve-reset CPTP bounds", check_evolve_reset},
        {"sequential equivalence", check_sequential_equivalence},
        {"swap-test estimator", check_estimator},
        {"resource formulas", check_resources},
        {"exponential fitting", check_fit},
        {"trajectory determinism", check_determinism},
        {"telegraph noise", check_telegraph},
    };

    int failures = 0;
    for (const auto& [name, fn] : checks) {
        try {
            fn();
            std::printf("[ok]   %s\n", name.c_str());
        } catch (const std::exception& e) {
            ++failures;
            std::printf("[FAIL] %s: %s\n", name.c_str(), e.what());
        }
    }
    std::printf("%d/%zu checks passed\n", int(checks.size()) - failures, checks.size());
    return failures == 0 ? 0 : 1;
}

} // namespace oqsim
