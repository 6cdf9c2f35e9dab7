#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "oqs/engine.hpp"
#include "oqs/errors.hpp"
#include "oqs/kernels.hpp"
#include "oqs/oracle.hpp"
#include "oqs/qmath.hpp"
#include "test_util.hpp"

using namespace oqs;
using namespace oqs::oracle;
using testutil::max_abs_diff;

TEST_CASE("markovian rates: frozen worked-example values") {
    const auto j = env::SpectralDensity::ohmic(2e-4, 100.0);
    const MarkovianRates r = markovian_rates(j, 1.0);
    CHECK(r.relaxation == doctest::Approx(6.220666568788365e-4).epsilon(1e-12));
    CHECK(1.0 / r.relaxation == doctest::Approx(1607.5447686224015).epsilon(1e-12));
    // 1/T2 = 1/(2 T1) for every input
    CHECK(r.dephasing == doctest::Approx(0.5 * r.relaxation).epsilon(1e-14));
}

TEST_CASE("markovian rates: zero density and linearity in J") {
    const auto zero = env::SpectralDensity::tabulated({0.1, 10.0}, {0.0, 0.0});
    const MarkovianRates r0 = markovian_rates(zero, 1.0);
    CHECK(r0.relaxation == 0.0);
    CHECK(r0.dephasing == 0.0);

    const auto j1 = env::SpectralDensity::tabulated({0.1, 10.0}, {2.0, 2.0});
    const auto j3 = env::SpectralDensity::tabulated({0.1, 10.0}, {6.0, 6.0});
    CHECK(markovian_rates(j3, 1.0).relaxation ==
          doctest::Approx(3.0 * markovian_rates(j1, 1.0).relaxation).epsilon(1e-14));
}

TEST_CASE("lindblad with no channels matches unitary evolution") {
    Rng rng(51);
    const ComplexMatrix h = testutil::random_hermitian(3, rng);
    const DensityMatrix rho0 = testutil::random_density(3, rng);
    LindbladModel m;
    m.hamiltonian = h;

    const std::vector<double> times{0.0, 0.4, 1.1};
    const auto out = lindblad_integrate(m, rho0, times);
    for (std::size_t i = 0; i < times.size(); ++i) {
        const ComplexMatrix u = qmath::expm_hermitian(h, times[i]);
        const ComplexMatrix ref = kernels::conjugate(u, rho0.matrix());
        CHECK(max_abs_diff(out[i].matrix(), ref) < 1e-8);
    }
}

TEST_CASE("lindblad amplitude damping: rho_ee = exp(-Gamma t)") {
    const double gamma = 0.8;
    LindbladModel m;
    m.hamiltonian = qmath::pauli_z();
    m.hamiltonian *= cd(-0.5);
    ComplexMatrix down(2, 2);
    down(0, 1) = 1.0;
    m.channels.push_back({down, gamma});

    const DensityMatrix excited = qmath::pure_density(qmath::basis_state(2, 1));
    std::vector<double> times;
    for (int i = 0; i <= 10; ++i) times.push_back(0.4 * i);
    const auto out = lindblad_integrate(m, excited, times);
    for (std::size_t i = 0; i < times.size(); ++i) {
        CHECK(out[i].matrix()(1, 1).real() ==
              doctest::Approx(std::exp(-gamma * times[i])).epsilon(1e-6));
        CHECK(out[i].trace_defect() < 1e-9);
        CHECK(out[i].hermiticity_defect() < 1e-9);
        CHECK(qmath::min_eigenvalue(out[i].matrix()) > -1e-7);
    }
}

TEST_CASE("two-level thermal model relaxes to the thermal population") {
    const double omega_s = 1.0, beta = 1.0, gamma = 0.05;
    const double p_inf = 1.0 / (1.0 + std::exp(beta * omega_s));
    const LindbladModel m = two_level_thermal_model(omega_s, gamma, beta);

    const DensityMatrix excited = qmath::pure_density(qmath::basis_state(2, 1));
    std::vector<double> times;
    for (int i = 0; i <= 12; ++i) times.push_back(10.0 * i);
    const auto out = lindblad_integrate(m, excited, times);
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double expected = p_inf + (1.0 - p_inf) * std::exp(-gamma * times[i]);
        CHECK(out[i].matrix()(1, 1).real() == doctest::Approx(expected).epsilon(1e-6));
    }
}

TEST_CASE("lindblad convergence control: halving the step barely moves the result") {
    const LindbladModel m = two_level_thermal_model(1.0, 0.1, 1.0);
    const DensityMatrix excited = qmath::pure_density(qmath::basis_state(2, 1));
    const std::vector<double> times{0.0, 5.0, 15.0};
    const auto coarse = lindblad_integrate(m, excited, times);
    const auto fine = lindblad_integrate(m, excited, times, 0.05);
    for (std::size_t i = 0; i < times.size(); ++i)
        CHECK(max_abs_diff(coarse[i].matrix(), fine[i].matrix()) < 1e-7);
}

TEST_CASE("lindblad input validation") {
    LindbladModel m;
    m.hamiltonian = qmath::pauli_z();
    const DensityMatrix rho = qmath::pure_density(qmath::basis_state(2, 0));
    CHECK_THROWS_AS(lindblad_integrate(m, rho, {0.5, 1.0}), std::invalid_argument);
    CHECK_THROWS_AS(lindblad_integrate(m, rho, {0.0, 1.0, 0.5}), std::invalid_argument);
    m.channels.push_back({qmath::pauli_x(), -1.0});
    CHECK_THROWS_AS(lindblad_integrate(m, rho, {0.0, 1.0}), std::invalid_argument);
}

TEST_CASE("exact unitary reference: commuting terms and identity at tau=0") {
    // all sigma_z type terms commute: Trotter is exact for any n0
    env::ModeGrid g = env::make_grid(0.9, 0.2, 2);
    ham::SystemSpec sys;
    sys.n_system_qubits = 1;
    sys.h_s = qmath::pauli_z();
    sys.h_s *= cd(-0.6);
    sys.coupling_ops = {qmath::pauli_z()};
    sys.g_r = 0.0;
    sys.g_phi = 1.0;
    env::CouplingSet c;
    c.c = {0.3, 0.2};
    const auto terms = ham::build_spin_bath_terms(sys, g, c);

    const ComplexMatrix exact = exact_unitary_reference(terms, 0.7);
    for (std::size_t n0 : {1u, 4u}) {
        const ComplexMatrix trot = engine::trotter_unitary(terms, 0.7, n0);
        CHECK(max_abs_diff(exact, trot) < 1e-9);
    }
    CHECK(max_abs_diff(exact_unitary_reference(terms, 0.0), ComplexMatrix::identity(8)) < 1e-14);
}

TEST_CASE("fit_exponential recovers exact synthetic parameters") {
    std::vector<double> t, y;
    for (int i = 0; i < 60; ++i) {
        t.push_back(0.3 * i);
        y.push_back(0.27 + 0.73 * std::exp(-0.21 * t.back()));
    }
    const FitResult f = fit_exponential(t, y, true);
    CHECK(f.rate == doctest::Approx(0.21).epsilon(1e-8));
    CHECK(f.asymptote == doctest::Approx(0.27).epsilon(1e-8));
    CHECK(f.amplitude == doctest::Approx(0.73).epsilon(1e-8));
    CHECK(f.residual_norm < 1e-8);

    // without asymptote
    std::vector<double> y2;
    for (double ti : t) y2.push_back(0.5 * std::exp(-0.8 * ti));
    const FitResult f2 = fit_exponential(t, y2, false);
    CHECK(f2.rate == doctest::Approx(0.8).epsilon(1e-8));
    CHECK(f2.amplitude == doctest::Approx(0.5).epsilon(1e-8));
}

TEST_CASE("fit_exponential on a constant series returns rate zero") {
    std::vector<double> t, y;
    for (int i = 0; i < 12; ++i) {
        t.push_back(double(i));
        y.push_back(0.42);
    }
    const FitResult f = fit_exponential(t, y, true);
    CHECK(f.rate == 0.0);
    CHECK(f.asymptote == doctest::Approx(0.42).epsilon(1e-12));
}

TEST_CASE("fit_exponential noise calibration over 100 seeds") {
    const double rate = 0.15;
    double sum_rel_err = 0.0;
    double max_rel_err = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(900 + seed);
        std::vector<double> t, y;
        for (int i = 0; i < 80; ++i) {
            t.push_back(0.25 * i);
            const double clean = 0.2 + 0.8 * std::exp(-rate * t.back());
            y.push_back(clean + 0.01 * rng.normal()); // 1% of the initial amplitude
        }
        const FitResult f = fit_exponential(t, y, true);
        const double rel = std::abs(f.rate - rate) / rate;
        sum_rel_err += rel;
        max_rel_err = std::max(max_rel_err, rel);
    }
    CHECK(sum_rel_err / 100.0 < 0.03);
    CHECK(max_rel_err < 0.12);
}

TEST_CASE("fit_exponential input validation") {
    CHECK_THROWS_AS(fit_exponential({0.0, 1.0, 2.0}, {1.0, 0.5, 0.2}, true), std::invalid_argument);
    CHECK_THROWS_AS(fit_exponential({0.0, 1.0, 2.0, 3.0}, {1.0, 0.5, 0.2, std::nan("")}, true),
                    numerical_error);
}

TEST_CASE("resource report: published qubit formulas") {
    const ResourceReport full = resource_estimate(2, 8, std::nullopt, 100, 10);
    CHECK(full.qubits_approach1 == 11); // 2*1 + 8 + 1
    CHECK(full.qubits_reduced == 9);    // max(1+8, 2*1+1)
    CHECK_FALSE(full.qubits_approach2.has_value());
    CHECK(full.ops_table_approach1 == doctest::Approx(100.0 * std::pow(17.0, 10.0)).epsilon(1e-12));
    CHECK(full.ops_per_factor_approach1 == doctest::Approx(100.0 * 17.0 * 10.0).epsilon(1e-12));

    const ResourceReport seq = resource_estimate(2, 8, 1, 100, 10);
    CHECK(*seq.qubits_approach2 == 4); // 2*1 + 1 + 1
    CHECK(*seq.ops_table_approach2 == doctest::Approx(100.0 * 8.0 * std::pow(3.0, 10.0)).epsilon(1e-12));
    CHECK(*seq.ops_per_factor_approach2 == doctest::Approx(100.0 * 8.0 * 3.0 * 10.0).epsilon(1e-12));

    // a grid of qubit-formula checks
    for (std::size_t n : {2u, 4u, 8u})
        for (std::size_t d : {1u, 2u, 4u, 8u}) {
            std::size_t log2n = 0;
            while ((std::size_t(1) << log2n) < n) ++log2n;
            const ResourceReport r = resource_estimate(n, d, d, 5, 3);
            CHECK(r.qubits_approach1 == 2 * log2n + d + 1);
            CHECK(*r.qubits_approach2 == 2 * log2n + d + 1);
            CHECK(r.qubits_reduced == std::max(log2n + d, 2 * log2n + 1));
        }

    CHECK_THROWS_AS(resource_estimate(2, 8, 3, 100, 10), std::invalid_argument);
    CHECK_THROWS_AS(resource_estimate(0, 8, std::nullopt, 100, 10), std::invalid_argument);
}
