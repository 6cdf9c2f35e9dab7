#include "oqs/qmath.hpp"

#include <atomic>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "oqs/errors.hpp"
#include "oqs/kernels.hpp"

#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace oqs::qmath {

namespace {

std::atomic<std::size_t> g_hilbert_cap{4096};

constexpr double kHermTol = 1e-10;

bool strictly_diagonal(const ComplexMatrix& h) {
    for (std::size_t i = 0; i < h.rows(); ++i)
        for (std::size_t j = 0; j < h.cols(); ++j)
            if (i != j && h(i, j) != cd(0.0)) return false;
    return true;
}

} // namespace

ComplexMatrix pauli(Pauli kind) {
    ComplexMatrix m(2, 2);
    switch (kind) {
        case Pauli::x: m(0, 1) = 1.0; m(1, 0) = 1.0; break;
        case Pauli::y: m(0, 1) = cd(0.0, -1.0); m(1, 0) = cd(0.0, 1.0); break;
        case Pauli::z: m(0, 0) = 1.0; m(1, 1) = -1.0; break;
    }
    return m;
}

ComplexMatrix pauli_x() { return pauli(Pauli::x); }
ComplexMatrix pauli_y() { return pauli(Pauli::y); }
ComplexMatrix pauli_z() { return pauli(Pauli::z); }

std::size_t hilbert_cap() { return g_hilbert_cap.load(); }
void set_hilbert_cap(std::size_t cap) {
    if (cap < 2) throw std::invalid_argument("set_hilbert_cap: cap must be at least 2");
    g_hilbert_cap.store(cap);
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("kron: empty operand");
    const std::size_t cap = hilbert_cap();
    if (a.rows() > cap / b.rows() || a.cols() > cap / b.cols())
        throw std::invalid_argument("kron: result dimension " + std::to_string(a.rows() * b.rows()) +
                                    " exceeds Hilbert cap " + std::to_string(cap) +
                                    " (oversized model?)");
    return kernels::kron(a, b);
}

ComplexMatrix embed_pauli(Pauli kind, std::size_t qubit, std::size_t n_qubits) {
    if (qubit >= n_qubits) throw std::out_of_range("embed_pauli: qubit index out of range");
    ComplexMatrix out = pauli(kind);
    if (qubit > 0) out = kron(ComplexMatrix::identity(std::size_t(1) << qubit), out);
    const std::size_t right = n_qubits - 1 - qubit;
    if (right > 0) out = kron(out, ComplexMatrix::identity(std::size_t(1) << right));
    return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::size_t>& dims,
                            const std::vector<std::size_t>& keep) {
    return DensityMatrix(kernels::partial_trace(rho.matrix(), dims, keep));
}

EigenSystem hermitian_eigensystem(const ComplexMatrix& h) {
    h.require_square("hermitian_eigensystem");
    const auto n = static_cast<lapack_int>(h.rows());
    EigenSystem es;
    es.values.resize(h.rows());
    es.vectors = h; // overwritten with eigenvectors
    const lapack_int info = LAPACKE_zheev(LAPACK_ROW_MAJOR, 'V', 'U', n, es.vectors.data(), n,
                                          es.values.data());
    if (info != 0)
        throw numerical_error("hermitian_eigensystem: zheev failed (info=" + std::to_string(info) + ")");
    return es;
}

std::vector<double> hermitian_eigenvalues(const ComplexMatrix& h) {
    h.require_square("hermitian_eigenvalues");
    const auto n = static_cast<lapack_int>(h.rows());
    std::vector<double> vals(h.rows());
    ComplexMatrix work = h;
    const lapack_int info =
        LAPACKE_zheev(LAPACK_ROW_MAJOR, 'N', 'U', n, work.data(), n, vals.data());
    if (info != 0)
        throw numerical_error("hermitian_eigenvalues: zheev failed (info=" + std::to_string(info) + ")");
    return vals;
}

double min_eigenvalue(const ComplexMatrix& h) { return hermitian_eigenvalues(h).front(); }

ComplexMatrix expm_hermitian(const ComplexMatrix& h, double t) {
    h.require_square("expm_hermitian");
    const double defect = h.hermiticity_defect();
    if (defect > kHermTol)
        throw std::invalid_argument("expm_hermitian: non-Hermitian input (defect=" +
                                    std::to_string(defect) + ")");
    const std::size_t n = h.rows();

    if (strictly_diagonal(h)) {
        ComplexMatrix u(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            const double e = h(i, i).real();
            u(i, i) = std::polar(1.0, -e * t);
        }
        return u;
    }

    // Involutory detection: h^2 = lambda^2 I gives exp(-iht) = cos(lt) I - i sin(lt) h/l.
    // Spin-bath interaction terms (Pauli strings) hit this path.
    {
        ComplexMatrix h2 = kernels::matmul(h, h);
        double lam2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) lam2 += h2(i, i).real();
        lam2 /= static_cast<double>(n);
        double dev = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                const cd expect = (i == j) ? cd(lam2) : cd(0.0);
                dev = std::max(dev, std::abs(h2(i, j) - expect));
            }
        const double scale = std::max(std::abs(lam2), h2.max_abs());
        if (lam2 >= 0.0 && dev <= 1e-12 * std::max(scale, 1e-300)) {
            const double lam = std::sqrt(lam2);
            ComplexMatrix u = ComplexMatrix::identity(n);
            if (lam == 0.0) return u;
            u *= cd(std::cos(lam * t));
            ComplexMatrix hterm = h;
            hterm *= cd(0.0, -std::sin(lam * t) / lam);
            u += hterm;
            return u;
        }
    }

    EigenSystem es = hermitian_eigensystem(h);
    ComplexMatrix scaled = es.vectors; // columns scaled by the eigenphases
    for (std::size_t k = 0; k < n; ++k) {
        const cd phase = std::polar(1.0, -es.values[k] * t);
        for (std::size_t i = 0; i < n; ++i) scaled(i, k) *= phase;
    }
    return kernels::matmul(scaled, es.vectors.adjoint());
}

void validate_density(const DensityMatrix& rho, double trace_tol, double herm_tol,
                      double eig_floor) {
    if (!rho.matrix().all_finite()) throw numerical_error("density matrix has non-finite entries");
    const double td = rho.trace_defect();
    if (td > trace_tol)
        throw numerical_error("density matrix trace deviates from 1 by " + std::to_string(td));
    const double hd = rho.hermiticity_defect();
    if (hd > herm_tol)
        throw numerical_error("density matrix Hermiticity defect " + std::to_string(hd));
    const double mev = min_eigenvalue(rho.matrix());
    if (mev < eig_floor)
        throw numerical_error("density matrix minimum eigenvalue " + std::to_string(mev));
}

QuantumState basis_state(std::size_t dim, std::size_t index) {
    if (index >= dim) throw std::out_of_range("basis_state: index out of range");
    std::vector<cd> amps(dim, cd(0.0));
    amps[index] = 1.0;
    return QuantumState(std::move(amps));
}

QuantumState normalized_state(std::vector<cd> raw) {
    double n2 = 0.0;
    for (const auto& a : raw) n2 += std::norm(a);
    if (n2 <= 0.0) throw std::invalid_argument("normalized_state: zero vector");
    const double inv = 1.0 / std::sqrt(n2);
    for (auto& a : raw) a *= inv;
    return QuantumState(std::move(raw));
}

DensityMatrix pure_density(const QuantumState& psi) {
    const std::size_t d = psi.dim();
    ComplexMatrix m(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) m(i, j) = psi[i] * std::conj(psi[j]);
    return DensityMatrix(std::move(m));
}

} // namespace oqs::qmath
