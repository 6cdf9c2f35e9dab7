#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "oqs/engine.hpp"
#include "oqs/env_model.hpp"
#include "oqs/errors.hpp"
#include "oqs/hamiltonian.hpp"
#include "oqs/noise.hpp"
#include "oqs/oracle.hpp"
#include "oqs/qmath.hpp"
#include "oqs/readout.hpp"
#include "oqs/rng.hpp"

namespace oqsim {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace oqs;

namespace {

constexpr double kPi = 3.14159265358979323846;

// ---------------------------- output helpers --------------------------------

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const fs::path& path, const std::vector<std::string>& columns) {
        f_ = std::fopen(path.string().c_str(), "w");
        if (!f_) throw std::runtime_error("cannot open output file: " + path.string());
        for (std::size_t i = 0; i < columns.size(); ++i)
            std::fprintf(f_, "%s%s", i ? ", " : "", columns[i].c_str());
        std::fprintf(f_, "\n");
    }
    ~CsvWriter() {
        if (f_) std::fclose(f_);
    }
    void row(const std::vector<double>& values) {
        for (std::size_t i = 0; i < values.size(); ++i)
            std::fprintf(f_, "%s%s", i ? ", " : "", fmt(values[i]).c_str());
        std::fprintf(f_, "\n");
    }

private:
    std::FILE* f_ = nullptr;
};

void write_json(const fs::path& path, const json& doc) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path.string());
    out << doc.dump(2) << "\n";
}

void write_manifest(const RunContext& ctx, const std::string& subcommand,
                    const std::vector<std::string>& outputs,
                    const std::vector<std::string>& warnings) {
    json m;
    m["subcommand"] = subcommand;
    m["version"] = kVersion;
    m["seed"] = ctx.config.seed;
    m["config_hash"] = config_hash(ctx.config.effective);
    m["config"] = ctx.config.effective;
    m["warnings"] = warnings;
    m["outputs"] = outputs;
    const fs::path path = fs::path(ctx.out_dir) /
                          (ctx.config.output.prefix + "_" + subcommand + "_manifest.json");
    write_json(path, m);
}

// ---------------------------- model assembly --------------------------------

struct BathModel {
    env::SpectralDensity density = env::SpectralDensity::ohmic(1.0, 1.0);
    env::ModeGrid grid;
    env::CouplingSet couplings;
    env::ThermalEnvState environment;
};

const SystemSection& need_system(const RunContext& ctx) {
    if (!ctx.config.system) throw config_error("system: section required for this subcommand");
    return *ctx.config.system;
}

const BathSection& need_bath(const RunContext& ctx) {
    if (!ctx.config.bath) throw config_error("bath: section required for this subcommand");
    return *ctx.config.bath;
}

const EvolutionSection& need_evolution(const RunContext& ctx) {
    if (!ctx.config.evolution) throw config_error("evolution: section required for this subcommand");
    return *ctx.config.evolution;
}

const NoiseSection& need_noise(const RunContext& ctx) {
    if (!ctx.config.noise) throw config_error("noise: section required for this subcommand");
    return *ctx.config.noise;
}

BathModel build_bath(const BathSection& b, double tau) {
    BathModel m;
    m.density = (b.kind == "ohmic") ? env::SpectralDensity::ohmic(b.alpha, b.omega_c)
                                    : env::SpectralDensity::from_file(b.file);
    m.grid = env::make_grid(b.omega_min, b.delta_omega, b.d);
    m.couplings = (b.couplings == "improved") ? env::couplings_improved(m.density, m.grid, tau)
                                              : env::couplings_naive(m.density, m.grid);
    m.environment = env::thermal_env(m.grid, b.beta);
    return m;
}

engine::EvolveResetConfig engine_config(const EvolutionSection& e, std::uint64_t seed,
                                        std::size_t steps) {
    engine::EvolveResetConfig cfg;
    cfg.tau = e.tau;
    cfg.steps = steps;
    cfg.backend = (e.backend == "trajectories") ? engine::Backend::trajectories
                                                : engine::Backend::density_matrix;
    cfg.n_trajectories = e.trajectories;
    cfg.seed = seed;
    cfg.snapshot_stride = e.snapshot_stride;
    return cfg;
}

// One relaxation/dephasing run of the configured flavor from a given initial state.
engine::SimulationRecord run_two_level(const SystemSection& sys, const EvolutionSection& evo,
                                       const BathModel& bath, const DensityMatrix& rho0,
                                       double omega_s, std::uint64_t seed, std::size_t steps) {
    const engine::TrotterPlan plan{evo.trotter_n0};
    const engine::EvolveResetConfig cfg = engine_config(evo, seed, steps);
    if (sys.n_qubits != 1)
        throw config_error("system.n_qubits: the bundled experiments drive a single system qubit");
    if (evo.mode == "sequential") {
        ham::SystemSpec spec;
        spec.n_system_qubits = 1;
        spec.h_s = qmath::pauli_z();
        spec.h_s *= cd(-0.5 * omega_s);
        spec.coupling_ops = {qmath::pauli_x()};
        const auto subsets = ham::rescale_for_sequential(spec, bath.grid, bath.couplings, evo.d_i);
        return engine::sequential_run(subsets, bath.environment, rho0, cfg, plan);
    }
    const auto terms = ham::build_two_level_example(omega_s, bath.grid, bath.couplings);
    return engine::evolve_reset_run(terms, bath.environment, rho0, cfg, plan);
}

DensityMatrix excited_state() { return qmath::pure_density(qmath::basis_state(2, 1)); }
DensityMatrix superposition_state() {
    return qmath::pure_density(qmath::normalized_state({cd(1.0), cd(1.0)}));
}

} // namespace

// ------------------------------- relax ---------------------------------------

int cmd_relax(const RunContext& ctx) {
    const auto& sys = need_system(ctx);
    const auto& bth = need_bath(ctx);
    const auto& evo = need_evolution(ctx);

    const BathModel bath = build_bath(bth, evo.tau);
    std::vector<std::string> warnings = ham::timescale_warnings(
        bath.grid, bath.couplings, evo.tau, evo.mode == "sequential" ? evo.d_i : bth.d);
    if (!bath.couplings.note.empty()) warnings.push_back("couplings: " + bath.couplings.note);

    // relaxation from |e> and coherence decay from (|g> + |e>)/sqrt(2)
    const auto rec_t1 = run_two_level(sys, evo, bath, excited_state(), sys.omega_s,
                                      Rng::derive(ctx.config.seed, 1), evo.steps);
    const auto rec_t2 = run_two_level(sys, evo, bath, superposition_state(), sys.omega_s,
                                      Rng::derive(ctx.config.seed, 2), evo.steps);
    for (const auto& w : rec_t1.metadata.warnings) warnings.push_back(w);

    // Markovian reference from the smooth spectral density
    const auto rates = oracle::markovian_rates(bath.density, sys.omega_s);
    const auto model = oracle::two_level_thermal_model(sys.omega_s, rates.relaxation, bth.beta);
    const auto oracle_t1 = oracle::lindblad_integrate(model, excited_state(), rec_t1.times);
    const auto oracle_t2 = oracle::lindblad_integrate(model, superposition_state(), rec_t2.times);

    std::vector<double> ee, ge_abs, ee_ref, ge_ref;
    for (std::size_t i = 0; i < rec_t1.times.size(); ++i) {
        ee.push_back(rec_t1.system_states[i].matrix()(1, 1).real());
        ge_abs.push_back(std::abs(rec_t2.system_states[i].matrix()(0, 1)));
        ee_ref.push_back(oracle_t1[i].matrix()(1, 1).real());
        ge_ref.push_back(std::abs(oracle_t2[i].matrix()(0, 1)));
    }

    const auto fit_t1 = oracle::fit_exponential(rec_t1.times, ee, true);
    const auto fit_t2 = oracle::fit_exponential(rec_t2.times, ge_abs, false);
    const double t1_exact = 1.0 / rates.relaxation;

    std::vector<std::string> columns{"t", "rho_ee", "abs_rho_ge", "rho_ee_oracle",
                                     "abs_rho_ge_oracle"};
    const bool with_shots = ctx.config.readout.shots > 0;
    if (with_shots) {
        columns.push_back("rho_ee_est");
        columns.push_back("abs_rho_ge_est");
    }

    const fs::path csv_path = fs::path(ctx.out_dir) / (ctx.config.output.prefix + "_relax.csv");
    CsvWriter csv(csv_path, columns);
    for (std::size_t i = 0; i < rec_t1.times.size(); ++i) {
        std::vector<double> row{rec_t1.times[i], ee[i], ge_abs[i], ee_ref[i], ge_ref[i]};
        if (with_shots) {
            const readout::ShotSpec spec{ctx.config.readout.shots,
                                         Rng::derive(ctx.config.seed, 0xEE00 + i)};
            const readout::ShotSpec spec2{ctx.config.readout.shots,
                                          Rng::derive(ctx.config.seed, 0x6E00 + i)};
            row.push_back(readout::reconstruct_element(rec_t1.system_states[i], 1, 1, spec).real());
            row.push_back(std::abs(readout::reconstruct_element(rec_t2.system_states[i], 0, 1, spec2)));
        }
        csv.row(row);
    }

    json summary;
    summary["omega_s"] = sys.omega_s;
    summary["mode"] = rec_t1.metadata.mode;
    summary["couplings"] = (bth.couplings == "improved") ? "improved" : "naive";
    summary["T1_fit"] = 1.0 / fit_t1.rate;
    summary["T2_fit"] = 1.0 / fit_t2.rate;
    summary["T1_exact"] = t1_exact;
    summary["T1_over_T1_exact"] = (1.0 / fit_t1.rate) / t1_exact;
    summary["T2_over_T1_exact"] = (1.0 / fit_t2.rate) / t1_exact;
    summary["rate_fit"] = fit_t1.rate;
    summary["rate_exact"] = rates.relaxation;
    summary["rate_eff_prediction"] =
        0.5 * env::effective_spectral_density(bath.couplings, bath.grid, evo.tau, sys.omega_s);
    summary["fit_residual_T1"] = fit_t1.residual_norm;
    summary["fit_residual_T2"] = fit_t2.residual_norm;
    const fs::path sum_path = fs::path(ctx.out_dir) / (ctx.config.output.prefix + "_relax_summary.json");
    write_json(sum_path, summary);

    write_manifest(ctx, "relax", {csv_path.filename().string(), sum_path.filename().string()},
                   warnings);
    std::printf("relax: T1/T1_exact = %.4f, T2/T1_exact = %.4f (%s couplings, %s)\n",
                (1.0 / fit_t1.rate) / t1_exact, (1.0 / fit_t2.rate) / t1_exact,
                bth.couplings.c_str(), rec_t1.metadata.mode.c_str());
    return 0;
}

// ------------------------------ rate-scan ------------------------------------

int cmd_rate_scan(const RunContext& ctx) {
    const auto& sys = need_system(ctx);
    const auto& bth = need_bath(ctx);
    const auto& evo = need_evolution(ctx);
    if (!sys.omega_scan) throw config_error("system.omega_scan: required for rate-scan");

    const BathModel bath = build_bath(bth, evo.tau);
    std::vector<std::string> warnings = ham::timescale_warnings(
        bath.grid, bath.couplings, evo.tau, evo.mode == "sequential" ? evo.d_i : bth.d);
    if (!bath.couplings.note.empty()) warnings.push_back("couplings: " + bath.couplings.note);

    const double step_time = (evo.mode == "sequential")
                                 ? evo.tau * static_cast<double>(bth.d / evo.d_i)
                                 : evo.tau;

    std::vector<double> omegas;
    for (double w = sys.omega_scan->from; w <= sys.omega_scan->to + 1e-12;
         w += sys.omega_scan->step)
        omegas.push_back(w);

    const fs::path csv_path = fs::path(ctx.out_dir) / (ctx.config.output.prefix + "_rate_scan.csv");
    CsvWriter csv(csv_path, {"omega_s", "rate_sim", "rate_eff", "rate_exact"});

    json points = json::array();
    double max_rel_dev = 0.0;
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        const double w = omegas[i];
        const double rate_eff =
            0.5 * env::effective_spectral_density(bath.couplings, bath.grid, evo.tau, w);
        const double rate_exact = 0.5 * bath.density(w);

        // enough steps for ~2.5 predicted decay times, capped by the config
        std::size_t steps = evo.steps;
        if (rate_eff > 0.0) {
            const double t_target = 2.5 / rate_eff;
            steps = std::min<std::size_t>(
                evo.steps,
                std::max<std::size_t>(24, static_cast<std::size_t>(std::ceil(t_target / step_time))));
        }

        const auto rec = run_two_level(sys, evo, bath, excited_state(), w,
                                       Rng::derive(ctx.config.seed, 100 + i), steps);
        std::vector<double> ee;
        for (const auto& s : rec.system_states) ee.push_back(s.matrix()(1, 1).real());
        const auto fit = oracle::fit_exponential(rec.times, ee, true);

        csv.row({w, fit.rate, rate_eff, rate_exact});
        json p;
        p["omega_s"] = w;
        p["rate_sim"] = fit.rate;
        p["rate_eff"] = rate_eff;
        p["rate_exact"] = rate_exact;
        p["steps"] = steps;
        points.push_back(p);
        if (rate_eff > 0.0) max_rel_dev = std::max(max_rel_dev, std::abs(fit.rate / rate_eff - 1.0));
        std::printf("rate-scan: omega_s=%.3f rate_sim=%.4e rate_eff=%.4e rate_exact=%.4e\n", w,
                    fit.rate, rate_eff, rate_exact);
    }

    json summary;
    summary["points"] = points;
    summary["max_rel_dev_vs_eff"] = max_rel_dev;
    summary["couplings"] = bth.couplings;
    const fs::path sum_path =
        fs::path(ctx.out_dir) / (ctx.config.output.prefix + "_rate_scan_summary.json");
    write_json(sum_path, summary);
    write_manifest(ctx, "rate-scan", {csv_path.filename().string(), sum_path.filename().string()},
                   warnings);
    return 0;
}

// ------------------------------- dephase -------------------------------------

int cmd_dephase(const RunContext& ctx) {
    const auto& sys = need_system(ctx);
    const auto& noi = need_noise(ctx);

    std::vector<noise::Fluctuator> fluctuators;
    if (!noi.explicit_fluctuators.empty()) {
        for (const auto& [v, gamma] : noi.explicit_fluctuators) fluctuators.push_back({v, gamma});
    } else {
        fluctuators = noise::sample_one_over_f(noi.gamma_min, noi.gamma_max, noi.n_fluctuators,
                                               noi.v, Rng::derive(ctx.config.seed, 0xF1));
    }

    ham::SystemSpec spec;
    spec.n_system_qubits = 1;
    spec.h_s = qmath::pauli_z();
    spec.h_s *= cd(-0.5 * sys.omega_s);
    spec.coupling_ops = {qmath::pauli_z()}; // longitudinal noise: pure dephasing

    const auto rec = noise::dephasing_run(spec, superposition_state(), fluctuators, noi.duration,
                                          noi.dt, noi.realizations,
                                          Rng::derive(ctx.config.seed, 0xD1));

    const fs::path csv_path = fs::path(ctx.out_dir) / (ctx.config.output.prefix + "_dephase.csv");
    CsvWriter csv(csv_path, {"t", "abs_rho_ge", "rho_ee"});
    std::vector<double> coh;
    for (std::size_t i = 0; i < rec.times.size(); ++i) {
        coh.push_back(std::abs(rec.states[i].matrix()(0, 1)));
        csv.row({rec.times[i], coh.back(), rec.states[i].matrix()(1, 1).real()});
    }

    // spectrum of the driving noise: ensemble estimate vs the Lorentzian sum
    const auto n_samples = static_cast<std::size_t>(std::floor(noi.duration / noi.dt)) + 1;
    const std::size_t n_lags = std::min<std::size_t>(n_samples / 5, 4096);
    const auto corr = noise::ensemble_autocorrelation(fluctuators, noi.duration, noi.dt, n_lags,
                                                      noi.realizations,
                                                      Rng::derive(ctx.config.seed, 0x5E));
    const double omega_lo = 2.0 * kPi / (static_cast<double>(n_lags) * noi.dt);
    const double omega_hi = kPi / noi.dt;
    const fs::path spec_path = fs::path(ctx.out_dir) / (ctx.config.output.prefix + "_spectrum.csv");
    CsvWriter spectrum_csv(spec_path, {"omega", "s_est", "s_analytic"});
    for (std::size_t i = 0; i < 64; ++i) {
        const double omega = omega_lo * std::pow(omega_hi / omega_lo, double(i) / 63.0);
        const double est = noise::spectrum_from_autocorrelation(corr, noi.dt, omega);
        double analytic = 0.0;
        for (const auto& f : fluctuators)
            if (f.gamma > 0.0) analytic += noise::lorentzian_spectrum(f, omega);
        spectrum_csv.row({omega, est, analytic});
    }

    const auto fit = oracle::fit_exponential(rec.times, coh, false);
    json summary;
    summary["n_fluctuators"] = fluctuators.size();
    summary["realizations"] = noi.realizations;
    summary["fitted_coherence_rate"] = fit.rate;
    summary["fit_residual"] = fit.residual_norm;
    summary["final_coherence"] = coh.back();
    const fs::path sum_path =
        fs::path(ctx.out_dir) / (ctx.config.output.prefix + "_dephase_summary.json");
    write_json(sum_path, summary);

    write_manifest(ctx, "dephase",
                   {csv_path.filename().string(), spec_path.filename().string(),
                    sum_path.filename().string()},
                   rec.warnings);
    std::printf("dephase: fitted coherence rate %.4e over %zu fluctuators\n", fit.rate,
                fluctuators.size());
    return 0;
}

// ------------------------------ resources ------------------------------------

int cmd_resources(const RunContext& ctx) {
    const auto& sys = need_system(ctx);
    const auto& bth = need_bath(ctx);
    const auto& evo = need_evolution(ctx);

    std::optional<std::size_t> d_i;
    if (evo.mode == "sequential") d_i = evo.d_i;
    const std::size_t n_hilbert = std::size_t(1) << sys.n_qubits;
    const auto report =
        oracle::resource_estimate(n_hilbert, bth.d, d_i, evo.steps, evo.trotter_n0);

    json doc;
    doc["N"] = n_hilbert;
    doc["d"] = bth.d;
    if (d_i) doc["d_i"] = *d_i;
    doc["m"] = evo.steps;
    doc["n0"] = evo.trotter_n0;
    doc["qubits_approach1"] = report.qubits_approach1;
    if (report.qubits_approach2) doc["qubits_approach2"] = *report.qubits_approach2;
    doc["qubits_reduced_readout_reuse"] = report.qubits_reduced;
    doc["ops_table_approach1"] = report.ops_table_approach1;
    doc["ops_per_factor_approach1"] = report.ops_per_factor_approach1;
    if (report.ops_table_approach2) {
        doc["ops_table_approach2"] = *report.ops_table_approach2;
        doc["ops_per_factor_approach2"] = *report.ops_per_factor_approach2;
    }

    const fs::path path = fs::path(ctx.out_dir) / (ctx.config.output.prefix + "_resources.json");
    write_json(path, doc);
    write_manifest(ctx, "resources", {path.filename().string()}, {});
    std::printf("%s\n", doc.dump(2).c_str());
    return 0;
}

} // namespace oqsim
