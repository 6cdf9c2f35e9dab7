#include "oqs/hamiltonian.hpp"

#include <cmath>
#include <stdexcept>

#include "oqs/qmath.hpp"

namespace oqs::ham {

namespace {

constexpr double kHermTol = 1e-10;
constexpr double kTwoPi = 6.28318530717958647692;

void check_system(const SystemSpec& sys, std::size_t n_modes) {
    const std::size_t ds = std::size_t(1) << sys.n_system_qubits;
    if (sys.h_s.rows() != ds || sys.h_s.cols() != ds)
        throw std::invalid_argument("build_spin_bath_terms: H_S dimension != 2^n_system_qubits");
    if (!sys.h_s.is_hermitian(kHermTol))
        throw std::invalid_argument("build_spin_bath_terms: H_S not Hermitian");
    if (sys.coupling_ops.size() != 1 && sys.coupling_ops.size() != n_modes)
        throw std::invalid_argument("build_spin_bath_terms: need one shared or one per-mode coupling operator");
    for (const auto& a : sys.coupling_ops) {
        if (a.rows() != ds || a.cols() != ds)
            throw std::invalid_argument("build_spin_bath_terms: coupling operator dimension mismatch");
        if (!a.is_hermitian(kHermTol))
            throw std::invalid_argument("build_spin_bath_terms: coupling operator not Hermitian");
    }
    if (sys.g_r * sys.g_r + sys.g_phi * sys.g_phi <= 0.0)
        throw std::invalid_argument("build_spin_bath_terms: g_r and g_phi both zero");
}

ComplexMatrix subset_term_env(const ComplexMatrix& env_op, std::size_t sys_dim) {
    return qmath::kron(ComplexMatrix::identity(sys_dim), env_op);
}

} // namespace

ComplexMatrix GlobalHamiltonianTerms::sum() const {
    ComplexMatrix h = ComplexMatrix::zero(dim(), dim());
    for (const auto& t : terms) h += t;
    return h;
}

GlobalHamiltonianTerms build_spin_bath_terms(const SystemSpec& sys, const env::ModeGrid& grid,
                                             const env::CouplingSet& c) {
    const std::size_t d = grid.d();
    if (c.c.size() != d) throw std::invalid_argument("build_spin_bath_terms: coupling/grid size mismatch");
    check_system(sys, d);

    GlobalHamiltonianTerms out;
    out.n_system_qubits = sys.n_system_qubits;
    out.n_env_qubits = d;
    out.mode_indices.resize(d);
    for (std::size_t k = 0; k < d; ++k) out.mode_indices[k] = k;

    const std::size_t sys_dim = out.system_dim();
    const std::size_t env_dim = out.env_dim();

    out.terms.push_back(qmath::kron(sys.h_s, ComplexMatrix::identity(env_dim)));
    for (std::size_t k = 0; k < d; ++k) {
        ComplexMatrix hb = qmath::embed_pauli(qmath::Pauli::z, k, d);
        hb *= cd(-0.5 * grid.omega[k]);
        out.terms.push_back(subset_term_env(hb, sys_dim));

        ComplexMatrix env_op = qmath::embed_pauli(qmath::Pauli::x, k, d);
        env_op *= cd(sys.g_r);
        if (sys.g_phi != 0.0) {
            ComplexMatrix zpart = qmath::embed_pauli(qmath::Pauli::z, k, d);
            zpart *= cd(sys.g_phi);
            env_op += zpart;
        }
        const ComplexMatrix& a = sys.coupling_ops.size() == 1 ? sys.coupling_ops[0] : sys.coupling_ops[k];
        ComplexMatrix hi = qmath::kron(a, env_op);
        hi *= cd(0.5 * c.c[k]);
        out.terms.push_back(std::move(hi));
    }
    return out;
}

GlobalHamiltonianTerms build_two_level_example(double omega_s, const env::ModeGrid& grid,
                                               const env::CouplingSet& c) {
    if (grid.d() == 0) throw std::invalid_argument("build_two_level_example: empty grid");
    SystemSpec sys;
    sys.n_system_qubits = 1;
    sys.h_s = qmath::pauli_z();
    sys.h_s *= cd(-0.5 * omega_s);
    sys.coupling_ops = {qmath::pauli_x()};
    sys.g_r = 1.0;
    sys.g_phi = 0.0;
    return build_spin_bath_terms(sys, grid, c);
}

std::vector<GlobalHamiltonianTerms> rescale_for_sequential(const SystemSpec& sys,
                                                           const env::ModeGrid& grid,
                                                           const env::CouplingSet& c,
                                                           std::size_t d_i) {
    const std::size_t d = grid.d();
    if (d_i == 0 || d % d_i != 0)
        throw std::invalid_argument("rescale_for_sequential: d_i must divide the mode count");
    if (c.c.size() != d) throw std::invalid_argument("rescale_for_sequential: coupling/grid size mismatch");
    check_system(sys, d);

    const double factor = std::sqrt(static_cast<double>(d) / static_cast<double>(d_i));
    const std::size_t n_subsets = d / d_i;

    std::vector<GlobalHamiltonianTerms> subsets;
    subsets.reserve(n_subsets);
    for (std::size_t i = 0; i < n_subsets; ++i) {
        env::ModeGrid sub;
        sub.delta_omega = grid.delta_omega;
        env::CouplingSet subc;
        subc.method = c.method;
        SystemSpec subsys = sys;
        if (sys.coupling_ops.size() != 1) subsys.coupling_ops.clear();
        for (std::size_t k = 0; k < d_i; ++k) {
            const std::size_t mode = i * d_i + k;
            sub.omega.push_back(grid.omega[mode]);
            subc.c.push_back(c.c[mode] * factor);
            if (sys.coupling_ops.size() != 1) subsys.coupling_ops.push_back(sys.coupling_ops[mode]);
        }
        GlobalHamiltonianTerms terms = build_spin_bath_terms(subsys, sub, subc);
        for (std::size_t k = 0; k < d_i; ++k) terms.mode_indices[k] = i * d_i + k;
        subsets.push_back(std::move(terms));
    }
    return subsets;
}

std::vector<std::string> timescale_warnings(const env::ModeGrid& grid, const env::CouplingSet& c,
                                            double tau, std::size_t d_i) {
    std::vector<std::string> warnings;
    if (grid.d() == 0 || d_i == 0 || grid.d() % d_i != 0) {
        warnings.push_back("timescale check skipped: invalid grid/subset sizes");
        return warnings;
    }
    const double factor = std::sqrt(static_cast<double>(grid.d()) / static_cast<double>(d_i));
    double cmax = 0.0;
    for (double v : c.c) cmax = std::max(cmax, v * factor);
    if (cmax * tau > 0.1)
        warnings.push_back("Markovian guard: max rescaled coupling * tau = " + std::to_string(cmax * tau) +
                           " exceeds 0.1; per-step system change may be non-perturbative");
    if (grid.delta_omega * tau > kTwoPi)
        warnings.push_back("grid guard: delta_omega * tau = " + std::to_string(grid.delta_omega * tau) +
                           " exceeds 2*pi; delta peaks no longer overlap into a smooth density");
    return warnings;
}

} // namespace oqs::ham
