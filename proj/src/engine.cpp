#include "oqs/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "oqs/errors.hpp"
#include "oqs/kernels.hpp"
#include "oqs/qmath.hpp"
#include "oqs/rng.hpp"

namespace oqs::engine {

namespace {

// Snapshot bounds from the CPTP invariant suite.
constexpr double kTraceTol = 1e-9;
constexpr double kHermTol = 1e-9;
constexpr double kEigFloor = -1e-7;

struct ResetLayout {
    std::vector<std::size_t> carried_qubits; // global qubit positions, system first
    std::vector<std::size_t> reset_modes;    // env mode positions (0-based within env)
    std::size_t carried_dim = 1;
    std::size_t reset_dim = 1;
    bool identity_perm = true;
    std::vector<std::size_t> perm; // new qubit position -> old qubit position
};

ResetLayout make_layout(const ham::GlobalHamiltonianTerms& terms,
                        const std::vector<std::size_t>& persistent) {
    const std::size_t ns = terms.n_system_qubits;
    const std::size_t d = terms.n_env_qubits;

    std::vector<bool> is_persistent(d, false);
    for (std::size_t p : persistent) {
        if (p >= d) throw std::invalid_argument("evolve_reset_run: persistent index out of range");
        if (is_persistent[p]) throw std::invalid_argument("evolve_reset_run: duplicate persistent index");
        is_persistent[p] = true;
    }

    ResetLayout L;
    for (std::size_t q = 0; q < ns; ++q) L.carried_qubits.push_back(q);
    for (std::size_t k = 0; k < d; ++k)
        if (is_persistent[k]) L.carried_qubits.push_back(ns + k);
    for (std::size_t k = 0; k < d; ++k)
        if (!is_persistent[k]) L.reset_modes.push_back(k);

    L.carried_dim = std::size_t(1) << L.carried_qubits.size();
    L.reset_dim = std::size_t(1) << L.reset_modes.size();

    L.perm = L.carried_qubits;
    for (std::size_t k : L.reset_modes) L.perm.push_back(ns + k);
    for (std::size_t q = 0; q < L.perm.size(); ++q)
        if (L.perm[q] != q) L.identity_perm = false;
    return L;
}

// Thermal diagonal over the reset modes, in layout order.
std::vector<double> reset_weights(const env::ThermalEnvState& environment, const ResetLayout& L) {
    const std::size_t nr = L.reset_modes.size();
    std::vector<double> w(std::size_t(1) << nr, 1.0);
    for (std::size_t idx = 0; idx < w.size(); ++idx) {
        double prod = 1.0;
        for (std::size_t r = 0; r < nr; ++r) {
            const bool excited = (idx >> (nr - 1 - r)) & 1u;
            const double p = environment.p[L.reset_modes[r]];
            prod *= excited ? p : (1.0 - p);
        }
        w[idx] = prod;
    }
    return w;
}

std::size_t sampled_reset_index(const env::ThermalEnvState& environment, const ResetLayout& L,
                                Rng& rng) {
    const std::size_t nr = L.reset_modes.size();
    std::size_t idx = 0;
    for (std::size_t r = 0; r < nr; ++r)
        if (rng.bernoulli(environment.p[L.reset_modes[r]])) idx |= std::size_t(1) << (nr - 1 - r);
    return idx;
}

void check_env(const env::ThermalEnvState& environment, std::size_t d, const char* who) {
    if (environment.d() != d)
        throw std::invalid_argument(std::string(who) + ": environment mode count mismatch");
}

void record_snapshot(SimulationRecord& rec, double time, const ComplexMatrix& carried,
                     std::size_t sys_dim) {
    DensityMatrix full(carried);
    qmath::validate_density(full, kTraceTol, kHermTol, kEigFloor);
    if (carried.rows() == sys_dim) {
        rec.system_states.push_back(full);
    } else {
        const std::vector<std::size_t> dims{sys_dim, carried.rows() / sys_dim};
        DensityMatrix sys = qmath::partial_trace(full, dims, {0});
        qmath::validate_density(sys, kTraceTol, kHermTol, kEigFloor);
        rec.system_states.push_back(std::move(sys));
    }
    rec.carried_states.push_back(std::move(full));
    rec.times.push_back(time);
}

bool snapshot_due(std::size_t step, std::size_t total, std::size_t stride) {
    return step == total || step % stride == 0;
}

} // namespace

ComplexMatrix trotter_unitary(const ham::GlobalHamiltonianTerms& terms, double tau, std::size_t n0) {
    if (n0 < 1) throw std::invalid_argument("trotter_unitary: n0 must be >= 1");
    if (terms.terms.empty()) throw std::invalid_argument("trotter_unitary: empty term list");
    const double dt = tau / static_cast<double>(n0);
    // Right-associated product keeps the (sparse) per-term factors on the left
    // of each multiply, where the zero-skip makes them O(dim^2).
    ComplexMatrix step = qmath::expm_hermitian(terms.terms.back(), dt);
    for (std::size_t i = terms.terms.size() - 1; i-- > 0;)
        step = kernels::matmul(qmath::expm_hermitian(terms.terms[i], dt), step);
    return kernels::matrix_power(step, n0);
}

SimulationRecord evolve_reset_run(const ham::GlobalHamiltonianTerms& terms,
                                  const env::ThermalEnvState& environment, const DensityMatrix& rho0,
                                  const EvolveResetConfig& cfg, const TrotterPlan& plan) {
    if (cfg.tau <= 0.0) throw std::invalid_argument("evolve_reset_run: tau must be > 0");
    if (cfg.steps < 1) throw std::invalid_argument("evolve_reset_run: steps must be >= 1");
    if (cfg.snapshot_stride < 1) throw std::invalid_argument("evolve_reset_run: snapshot_stride must be >= 1");
    check_env(environment, terms.n_env_qubits, "evolve_reset_run");
    if (!cfg.env_schedule.empty()) {
        if (cfg.env_schedule.size() != cfg.steps)
            throw std::invalid_argument("evolve_reset_run: env_schedule size must equal steps");
        for (const auto& e : cfg.env_schedule) check_env(e, terms.n_env_qubits, "evolve_reset_run");
    }

    const ResetLayout L = make_layout(terms, cfg.persistent);
    if (rho0.dim() != L.carried_dim)
        throw std::invalid_argument("evolve_reset_run: rho0 dimension must match system ⊗ persistent ancillas");

    ComplexMatrix u = trotter_unitary(terms, cfg.tau, plan.n0);
    if (!L.identity_perm) u = kernels::permute_qubits(u, L.perm);

    SimulationRecord rec;
    rec.metadata.tau = cfg.tau;
    rec.metadata.steps = cfg.steps;
    rec.metadata.n0 = plan.n0;
    rec.metadata.mode = "joint";
    rec.metadata.backend = cfg.backend;
    rec.metadata.seed = cfg.seed;

    const std::size_t sys_dim = terms.system_dim();
    const bool no_reset = L.reset_modes.empty();

    auto env_at = [&](std::size_t step) -> const env::ThermalEnvState& {
        return cfg.env_schedule.empty() ? environment : cfg.env_schedule[step];
    };

    if (cfg.backend == Backend::density_matrix) {
        ComplexMatrix carried = rho0.matrix();
        record_snapshot(rec, 0.0, carried, sys_dim);
        for (std::size_t j = 0; j < cfg.steps; ++j) {
            if (no_reset) {
                carried = kernels::conjugate(u, carried);
            } else {
                carried = kernels::evolve_reset_step(u, carried, reset_weights(env_at(j), L));
            }
            if (snapshot_due(j + 1, cfg.steps, cfg.snapshot_stride))
                record_snapshot(rec, static_cast<double>(j + 1) * cfg.tau, carried, sys_dim);
        }
        return rec;
    }

    // trajectory backend: independent seeded work units, averaged in index order
    if (cfg.n_trajectories < 1)
        throw std::invalid_argument("evolve_reset_run: trajectory backend needs n_trajectories >= 1");

    std::vector<std::size_t> snap_steps;
    for (std::size_t j = 1; j <= cfg.steps; ++j)
        if (snapshot_due(j, cfg.steps, cfg.snapshot_stride)) snap_steps.push_back(j);

    const std::size_t n_traj = cfg.n_trajectories;
    const std::size_t n_snap = snap_steps.size();
    std::vector<std::vector<ComplexMatrix>> per_traj(n_traj);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::ptrdiff_t tr = 0; tr < static_cast<std::ptrdiff_t>(n_traj); ++tr) {
        Rng rng(Rng::derive(cfg.seed, static_cast<std::uint64_t>(tr)));
        ComplexMatrix carried = rho0.matrix();
        std::vector<ComplexMatrix> snaps;
        snaps.reserve(n_snap);
        std::size_t next = 0;
        for (std::size_t j = 0; j < cfg.steps; ++j) {
            if (no_reset) {
                carried = kernels::conjugate(u, carried);
            } else {
                std::vector<double> w(L.reset_dim, 0.0);
                w[sampled_reset_index(env_at(j), L, rng)] = 1.0;
                carried = kernels::evolve_reset_step(u, carried, w);
            }
            if (next < n_snap && snap_steps[next] == j + 1) {
                snaps.push_back(carried);
                ++next;
            }
        }
        per_traj[static_cast<std::size_t>(tr)] = std::move(snaps);
    }

    ComplexMatrix init = rho0.matrix();
    record_snapshot(rec, 0.0, init, sys_dim);
    const double inv = 1.0 / static_cast<double>(n_traj);
    for (std::size_t s = 0; s < n_snap; ++s) {
        ComplexMatrix avg(L.carried_dim, L.carried_dim);
        for (std::size_t tr = 0; tr < n_traj; ++tr) avg += per_traj[tr][s];
        avg *= cd(inv);
        record_snapshot(rec, static_cast<double>(snap_steps[s]) * cfg.tau, avg, sys_dim);
    }
    return rec;
}

SimulationRecord sequential_run(const std::vector<ham::GlobalHamiltonianTerms>& subset_terms,
                                const env::ThermalEnvState& environment, const DensityMatrix& rho0,
                                const EvolveResetConfig& cfg, const TrotterPlan& plan) {
    if (subset_terms.empty()) throw std::invalid_argument("sequential_run: no subsets");
    if (cfg.tau <= 0.0) throw std::invalid_argument("sequential_run: tau must be > 0");
    if (cfg.steps < 1) throw std::invalid_argument("sequential_run: steps must be >= 1");
    if (cfg.snapshot_stride < 1) throw std::invalid_argument("sequential_run: snapshot_stride must be >= 1");
    if (!cfg.persistent.empty())
        throw std::invalid_argument("sequential_run: persistent ancillas are a joint-mode feature");
    if (!cfg.env_schedule.empty())
        throw std::invalid_argument("sequential_run: env_schedule is a joint-mode feature");

    const std::size_t sys_dim = subset_terms.front().system_dim();
    const std::size_t d_i = subset_terms.front().n_env_qubits;
    std::size_t total_modes = 0;
    for (const auto& s : subset_terms) {
        if (s.system_dim() != sys_dim) throw std::invalid_argument("sequential_run: inconsistent system dims");
        if (s.n_env_qubits != d_i) throw std::invalid_argument("sequential_run: inconsistent subset sizes");
        for (std::size_t m : s.mode_indices)
            if (m >= environment.d())
                throw std::invalid_argument("sequential_run: subset mode index outside environment");
        total_modes += s.n_env_qubits;
    }
    check_env(environment, total_modes, "sequential_run");
    if (rho0.dim() != sys_dim) throw std::invalid_argument("sequential_run: rho0 must live on the system");

    const std::size_t n_subsets = subset_terms.size();
    std::vector<ComplexMatrix> unitaries;
    unitaries.reserve(n_subsets);
    for (const auto& s : subset_terms) unitaries.push_back(trotter_unitary(s, cfg.tau, plan.n0));

    // per-subset thermal weights over that subset's modes
    std::vector<std::vector<double>> weights(n_subsets);
    std::vector<std::vector<double>> probs(n_subsets);
    for (std::size_t i = 0; i < n_subsets; ++i) {
        const auto& modes = subset_terms[i].mode_indices;
        std::vector<double> p(modes.size());
        for (std::size_t k = 0; k < modes.size(); ++k) p[k] = environment.p[modes[k]];
        probs[i] = p;
        std::vector<double> w(std::size_t(1) << modes.size(), 1.0);
        for (std::size_t idx = 0; idx < w.size(); ++idx) {
            double prod = 1.0;
            for (std::size_t k = 0; k < modes.size(); ++k) {
                const bool excited = (idx >> (modes.size() - 1 - k)) & 1u;
                prod *= excited ? p[k] : (1.0 - p[k]);
            }
            w[idx] = prod;
        }
        weights[i] = std::move(w);
    }

    const double sweep_time = cfg.tau * static_cast<double>(n_subsets);

    SimulationRecord rec;
    rec.metadata.tau = cfg.tau;
    rec.metadata.steps = cfg.steps;
    rec.metadata.n0 = plan.n0;
    rec.metadata.mode = "sequential(d_i=" + std::to_string(d_i) + ")";
    rec.metadata.backend = cfg.backend;
    rec.metadata.seed = cfg.seed;

    if (cfg.backend == Backend::density_matrix) {
        ComplexMatrix rho = rho0.matrix();
        record_snapshot(rec, 0.0, rho, sys_dim);
        for (std::size_t sweep = 0; sweep < cfg.steps; ++sweep) {
            for (std::size_t i = 0; i < n_subsets; ++i)
                rho = kernels::evolve_reset_step(unitaries[i], rho, weights[i]);
            if (snapshot_due(sweep + 1, cfg.steps, cfg.snapshot_stride))
                record_snapshot(rec, static_cast<double>(sweep + 1) * sweep_time, rho, sys_dim);
        }
        return rec;
    }

    if (cfg.n_trajectories < 1)
        throw std::invalid_argument("sequential_run: trajectory backend needs n_trajectories >= 1");

    std::vector<std::size_t> snap_sweeps;
    for (std::size_t s = 1; s <= cfg.steps; ++s)
        if (snapshot_due(s, cfg.steps, cfg.snapshot_stride)) snap_sweeps.push_back(s);

    const std::size_t n_traj = cfg.n_trajectories;
    std::vector<std::vector<ComplexMatrix>> per_traj(n_traj);

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (std::ptrdiff_t tr = 0; tr < static_cast<std::ptrdiff_t>(n_traj); ++tr) {
        Rng rng(Rng::derive(cfg.seed, static_cast<std::uint64_t>(tr)));
        ComplexMatrix rho = rho0.matrix();
        std::vector<ComplexMatrix> snaps;
        std::size_t next = 0;
        for (std::size_t sweep = 0; sweep < cfg.steps; ++sweep) {
            for (std::size_t i = 0; i < n_subsets; ++i) {
                const auto& p = probs[i];
                std::size_t idx = 0;
                for (std::size_t k = 0; k < p.size(); ++k)
                    if (rng.bernoulli(p[k])) idx |= std::size_t(1) << (p.size() - 1 - k);
                std::vector<double> w(std::size_t(1) << p.size(), 0.0);
                w[idx] = 1.0;
                rho = kernels::evolve_reset_step(unitaries[i], rho, w);
            }
            if (next < snap_sweeps.size() && snap_sweeps[next] == sweep + 1) {
                snaps.push_back(rho);
                ++next;
            }
        }
        per_traj[static_cast<std::size_t>(tr)] = std::move(snaps);
    }

    ComplexMatrix init = rho0.matrix();
    record_snapshot(rec, 0.0, init, sys_dim);
    const double inv = 1.0 / static_cast<double>(n_traj);
    for (std::size_t s = 0; s < snap_sweeps.size(); ++s) {
        ComplexMatrix avg(sys_dim, sys_dim);
        for (std::size_t tr = 0; tr < n_traj; ++tr) avg += per_traj[tr][s];
        avg *= cd(inv);
        record_snapshot(rec, static_cast<double>(snap_sweeps[s]) * sweep_time, avg, sys_dim);
    }
    return rec;
}

} // namespace oqs::engine
