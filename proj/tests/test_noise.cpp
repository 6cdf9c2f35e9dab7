#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "oqs/noise.hpp"
#include "oqs/oracle.hpp"
#include "oqs/qmath.hpp"
#include "test_util.hpp"

using namespace oqs;
using namespace oqs::noise;

namespace {

constexpr double kPi = 3.14159265358979323846;

DensityMatrix plus_state() {
    return qmath::pure_density(qmath::normalized_state({cd(1.0), cd(1.0)}));
}

} // namespace

TEST_CASE("frozen fluctuator produces a constant +-v/2 signal") {
    const TelegraphSignal sig = generate_telegraph({{0.8, 0.0}}, 10.0, 0.1, 3);
    REQUIRE(sig.samples() == 101);
    const double first = sig.values.front();
    CHECK(std::abs(std::abs(first) - 0.4) < 1e-15);
    for (double v : sig.values) CHECK(v == first);
    CHECK(sig.switch_times[0].empty());
}

TEST_CASE("signal values are exact sums of +-v_i/2") {
    const std::vector<Fluctuator> fl{{1.0, 0.7}, {0.5, 2.0}};
    const TelegraphSignal sig = generate_telegraph(fl, 20.0, 0.05, 11);
    // possible values: ±0.5 ± 0.25
    for (double v : sig.values) {
        const double a = std::abs(std::abs(v) - 0.75);
        const double b = std::abs(std::abs(v) - 0.25);
        CHECK(std::min(a, b) < 1e-12);
    }
}

TEST_CASE("mean flip count matches the gamma/2 Poisson rate") {
    const double gamma = 1.0, duration = 20.0;
    const std::size_t runs = 4000;
    double total = 0.0;
    for (std::size_t r = 0; r < runs; ++r) {
        const TelegraphSignal sig = generate_telegraph({{1.0, gamma}}, duration, 0.5, 100 + r);
        total += static_cast<double>(sig.switch_times[0].size());
    }
    const double mean = total / double(runs);
    const double expected = 0.5 * gamma * duration;
    const double sigma = std::sqrt(expected / double(runs));
    CHECK(std::abs(mean - expected) < 3.0 * sigma);
}

TEST_CASE("ensemble autocorrelation approaches (v^2/4) exp(-gamma t)") {
    const double gamma = 1.0, v = 2.0, dt = 0.1;
    const auto corr = ensemble_autocorrelation({{v, gamma}}, 60.0, dt, 40, 600, 17);
    for (std::size_t l = 0; l <= 40; l += 5) {
        const double expected = (v * v / 4.0) * std::exp(-gamma * double(l) * dt);
        CHECK(corr[l] == doctest::Approx(expected).epsilon(0.08));
    }
}

TEST_CASE("lorentzian spectrum values") {
    const Fluctuator f{1.5, 0.7};
    CHECK(lorentzian_spectrum(f, 0.0) ==
          doctest::Approx(1.5 * 1.5 / (4.0 * kPi * 0.7)).epsilon(1e-12));
    // half the zero-frequency value at omega = gamma
    CHECK(lorentzian_spectrum(f, 0.7) ==
          doctest::Approx(0.5 * lorentzian_spectrum(f, 0.0)).epsilon(1e-12));
    CHECK_THROWS_AS(lorentzian_spectrum({1.0, 0.0}, 1.0), std::invalid_argument);
}

TEST_CASE("estimated RTN spectrum matches the Lorentzian within 10% over two decades") {
    const double gamma = 1.0, v = 1.5, dt = 0.05, duration = 800.0;
    const std::size_t n_lags = 240; // 12 correlation times
    const auto corr = ensemble_autocorrelation({{v, gamma}}, duration, dt, n_lags, 800, 23);
    for (int i = 0; i < 15; ++i) {
        const double omega = 0.1 * std::pow(100.0, double(i) / 14.0);
        const double est = spectrum_from_autocorrelation(corr, dt, omega);
        const double ref = lorentzian_spectrum({v, gamma}, omega);
        CHECK(est == doctest::Approx(ref).epsilon(0.10));
    }
}

TEST_CASE("transform of the analytic autocorrelation reproduces the Lorentzian") {
    // feed C(t) = (v^2/4) exp(-gamma t) directly into the cosine transform:
    // only discretization and window effects remain
    const double gamma = 1.0, v = 2.0, dt = 0.02;
    const std::size_t n_lags = 800; // 16 correlation times
    std::vector<double> corr(n_lags + 1);
    for (std::size_t l = 0; l <= n_lags; ++l)
        corr[l] = (v * v / 4.0) * std::exp(-gamma * double(l) * dt);
    for (double omega : {0.1, 0.5, 1.0, 3.0, 10.0}) {
        const double est = spectrum_from_autocorrelation(corr, dt, omega);
        const double ref = lorentzian_spectrum({v, gamma}, omega);
        CHECK(est == doctest::Approx(ref).epsilon(0.02));
    }
}

TEST_CASE("spectrum sanity on a synthetic cosine") {
    TelegraphSignal sig;
    sig.dt = 0.05;
    const double omega0 = 2.0;
    for (int j = 0; j < 8000; ++j) sig.values.push_back(std::cos(omega0 * sig.dt * double(j)));
    const SpectrumEstimate est = estimate_spectrum(sig, 1200, 80);
    double best = 0.0, best_omega = 0.0;
    for (std::size_t i = 0; i < est.omega.size(); ++i)
        if (est.value[i] > best) {
            best = est.value[i];
            best_omega = est.omega[i];
        }
    CHECK(best_omega == doctest::Approx(omega0).epsilon(0.06));
}

TEST_CASE("spectrum integral recovers the signal variance") {
    const double gamma = 1.0, v = 1.2, dt = 0.05;
    const auto corr = ensemble_autocorrelation({{v, gamma}}, 400.0, dt, 240, 400, 31);
    // 2 * integral_0^{pi/dt} S domega = <chi^2>
    const std::size_t nq = 4000;
    const double omega_max = kPi / dt;
    double integral = 0.0;
    for (std::size_t i = 0; i <= nq; ++i) {
        const double om = omega_max * double(i) / double(nq);
        const double s = spectrum_from_autocorrelation(corr, dt, om);
        integral += (i == 0 || i == nq) ? 0.5 * s : s;
    }
    integral *= omega_max / double(nq);
    CHECK(2.0 * integral == doctest::Approx(v * v / 4.0).epsilon(0.10));
}

TEST_CASE("log-uniform ensemble: analytic spectrum slope is -1 over the central decades") {
    const auto fl = sample_one_over_f(1e-3, 10.0, 300, 0.05, 41);
    REQUIRE(fl.size() == 300);
    for (const auto& f : fl) {
        CHECK(f.gamma >= 1e-3);
        CHECK(f.gamma <= 10.0);
        CHECK(f.v == 0.05);
    }

    auto total = [&](double omega) {
        double s = 0.0;
        for (const auto& f : fl) s += lorentzian_spectrum(f, omega);
        return s;
    };
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const int n = 21;
    for (int i = 0; i < n; ++i) {
        const double omega = 1e-2 * std::pow(100.0, double(i) / double(n - 1));
        const double x = std::log(omega), y = std::log(total(omega));
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    CHECK(slope == doctest::Approx(-1.0).epsilon(0.1));

    // G = omega * S(omega) consistent across the central decades within 15%
    double gmin = 1e300, gmax = 0.0;
    for (int i = 0; i < n; ++i) {
        const double omega = 1e-2 * std::pow(100.0, double(i) / double(n - 1));
        const double g = omega * total(omega);
        gmin = std::min(gmin, g);
        gmax = std::max(gmax, g);
    }
    const double gmid = 0.5 * (gmin + gmax);
    CHECK(gmax - gmid < 0.15 * gmid);

    // a single fluctuator is a Lorentzian, not 1/f: slope far from -1
    const auto one = sample_one_over_f(0.5, 0.500001, 1, 0.05, 7);
    const double low = lorentzian_spectrum(one[0], 0.05);
    const double high = lorentzian_spectrum(one[0], 5.0);
    CHECK(low / high > 20.0); // ~omega^-2 tail, much steeper than 1/f

    CHECK_THROWS_AS(sample_one_over_f(1.0, 0.5, 10, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(sample_one_over_f(1e-3, 10.0, 0, 1.0, 1), std::invalid_argument);
}

TEST_CASE("pure dephasing keeps populations and decays coherences") {
    ham::SystemSpec sys;
    sys.n_system_qubits = 1;
    sys.h_s = qmath::pauli_z();
    sys.h_s *= cd(-0.5);
    sys.coupling_ops = {qmath::pauli_z()};

    const auto rec = dephasing_run(sys, plus_state(), {{0.4, 1.0}}, 40.0, 0.05, 60, 13);
    CHECK(rec.warnings.empty());
    for (std::size_t i = 0; i < rec.states.size(); ++i) {
        CHECK(rec.states[i].matrix()(1, 1).real() == doctest::Approx(0.5).epsilon(1e-10));
        CHECK(rec.states[i].trace_defect() < 1e-9);
    }
    // coherence decays substantially over the run
    const double c0 = std::abs(rec.states.front().matrix()(0, 1));
    const double c1 = std::abs(rec.states.back().matrix()(0, 1));
    CHECK(c0 == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(c1 < 0.25 * c0);
}

TEST_CASE("zero fluctuators: unitary evolution under H_S alone") {
    ham::SystemSpec sys;
    sys.n_system_qubits = 1;
    sys.h_s = qmath::pauli_z();
    sys.h_s *= cd(-0.5);
    sys.coupling_ops = {qmath::pauli_z()};

    const auto rec = dephasing_run(sys, plus_state(), {}, 10.0, 0.1, 3, 1);
    for (std::size_t i = 0; i < rec.states.size(); ++i) {
        // |rho_01| stays exactly 1/2; the phase advances as e^{i omega t}
        CHECK(std::abs(rec.states[i].matrix()(0, 1)) == doctest::Approx(0.5).epsilon(1e-10));
    }
    // H_S = -omega/2 sigma_z advances rho_01 by e^{+i omega t}
    const std::size_t last = rec.states.size() - 1;
    const cd expected = 0.5 * std::polar(1.0, rec.times[last]);
    CHECK(std::abs(rec.states[last].matrix()(0, 1) - expected) < 1e-9);
}

TEST_CASE("weak fast fluctuator: decay rate matches a high-resolution oracle within 5%") {
    // motional narrowing regime: v << gamma
    const double v = 0.2, gamma = 2.0;
    ham::SystemSpec sys;
    sys.n_system_qubits = 1;
    sys.h_s = ComplexMatrix::zero(2, 2);
    sys.coupling_ops = {qmath::pauli_z()};

    const double duration = 150.0;
    auto fitted_rate = [&](double dt, std::size_t reals, std::uint64_t seed) {
        const auto rec = dephasing_run(sys, plus_state(), {{v, gamma}}, duration, dt, reals, seed);
        std::vector<double> coh;
        for (const auto& s : rec.states) coh.push_back(std::abs(s.matrix()(0, 1)));
        return oracle::fit_exponential(rec.times, coh, false).rate;
    };

    const double coarse = fitted_rate(0.25, 300, 7);
    const double fine = fitted_rate(0.025, 3000, 8); // dt/10, 10x realizations
    CHECK(coarse == doctest::Approx(fine).epsilon(0.05));
}

TEST_CASE("dephasing guard warns when dt is too coarse for the noise amplitude") {
    ham::SystemSpec sys;
    sys.n_system_qubits = 1;
    sys.h_s = ComplexMatrix::zero(2, 2);
    sys.coupling_ops = {qmath::pauli_z()};
    const auto rec = dephasing_run(sys, plus_state(), {{10.0, 0.5}}, 2.0, 0.1, 2, 1);
    REQUIRE(rec.warnings.size() == 1);
    CHECK(rec.warnings[0].find("dephasing guard") != std::string::npos);
}

TEST_CASE("signal export writes two numeric columns") {
    const TelegraphSignal sig = generate_telegraph({{1.0, 1.0}}, 1.0, 0.25, 5);
    const std::string path = "test_noise_signal.txt";
    write_signal(sig, path);
    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK(header == "# t chi");
    double t, chi;
    std::size_t rows = 0;
    while (in >> t >> chi) {
        CHECK(t == doctest::Approx(0.25 * double(rows)).epsilon(1e-12));
        CHECK(std::abs(std::abs(chi) - 0.5) < 1e-12);
        ++rows;
    }
    CHECK(rows == sig.samples());
    std::remove(path.c_str());
}

TEST_CASE("telegraph generation input validation") {
    CHECK_THROWS_AS(generate_telegraph({{1.0, 1.0}}, 0.0, 0.1, 1), std::invalid_argument);
    CHECK_THROWS_AS(generate_telegraph({{1.0, -1.0}}, 1.0, 0.1, 1), std::invalid_argument);
    TelegraphSignal sig = generate_telegraph({{1.0, 1.0}}, 1.0, 0.1, 1);
    CHECK_THROWS_AS(autocorrelation(sig, sig.samples()), std::invalid_argument);
}
