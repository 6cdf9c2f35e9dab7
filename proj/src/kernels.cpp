#include "oqs/kernels.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace oqs::kernels {

namespace {

void check_matmul_shapes(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dimensions differ");
}

// Shared index bookkeeping for partial_trace. Subsystem s has dimension
// dims[s] and stride prod(dims[s+1:]) in the composite row-major index.
struct TraceLayout {
    std::vector<std::size_t> keep;        // ascending subsystem indices kept
    std::vector<std::size_t> traced;      // ascending subsystem indices traced out
    std::vector<std::size_t> keep_stride; // composite stride per kept subsystem
    std::vector<std::size_t> keep_dim;
    std::vector<std::size_t> tr_stride;
    std::vector<std::size_t> tr_dim;
    std::size_t dim_keep = 1;
    std::size_t dim_traced = 1;
};

TraceLayout trace_layout(const ComplexMatrix& rho, const std::vector<std::size_t>& dims,
                         const std::vector<std::size_t>& keep) {
    std::size_t total = 1;
    for (std::size_t d : dims) {
        if (d == 0) throw std::invalid_argument("partial_trace: zero subsystem dimension");
        total *= d;
    }
    if (total != rho.rows() || rho.rows() != rho.cols())
        throw std::invalid_argument("partial_trace: subsystem dimensions do not match matrix");
    if (keep.empty()) throw std::invalid_argument("partial_trace: keep set must be nonempty");

    TraceLayout L;
    L.keep = keep;
    std::sort(L.keep.begin(), L.keep.end());
    if (std::adjacent_find(L.keep.begin(), L.keep.end()) != L.keep.end())
        throw std::invalid_argument("partial_trace: duplicate keep index");
    if (L.keep.back() >= dims.size()) throw std::invalid_argument("partial_trace: keep index out of range");

    std::vector<std::size_t> stride(dims.size(), 1);
    for (std::size_t s = dims.size(); s-- > 1;) stride[s - 1] = stride[s] * dims[s];

    std::size_t ki = 0;
    for (std::size_t s = 0; s < dims.size(); ++s) {
        if (ki < L.keep.size() && L.keep[ki] == s) {
            L.keep_stride.push_back(stride[s]);
            L.keep_dim.push_back(dims[s]);
            L.dim_keep *= dims[s];
            ++ki;
        } else {
            L.traced.push_back(s);
            L.tr_stride.push_back(stride[s]);
            L.tr_dim.push_back(dims[s]);
            L.dim_traced *= dims[s];
        }
    }
    return L;
}

// composite index of the p-th kept basis state (traced part zero)
std::size_t keep_offset(const TraceLayout& L, std::size_t p) {
    std::size_t off = 0;
    for (std::size_t s = L.keep_dim.size(); s-- > 0;) {
        off += (p % L.keep_dim[s]) * L.keep_stride[s];
        p /= L.keep_dim[s];
    }
    return off;
}

std::size_t traced_offset(const TraceLayout& L, std::size_t t) {
    std::size_t off = 0;
    for (std::size_t s = L.tr_dim.size(); s-- > 0;) {
        off += (t % L.tr_dim[s]) * L.tr_stride[s];
        t /= L.tr_dim[s];
    }
    return off;
}

void check_step_shapes(const ComplexMatrix& u, const ComplexMatrix& rho_sys,
                       const std::vector<double>& w) {
    u.require_square("evolve_reset_step");
    rho_sys.require_square("evolve_reset_step");
    if (w.empty() || rho_sys.rows() * w.size() != u.rows())
        throw std::invalid_argument("evolve_reset_step: dim(u) != dim(rho_sys) * dim(env)");
}

// Fused step, computed in two passes with a fixed per-entry summation order
// (serial and parallel versions agree bit for bit):
//   T[(i,a),(l,c)] = w_c * sum_k U[(i,a),(k,c)] rho[k,l]   (c with nonzero w)
//   out[i,j]       = sum_{a,l,c} T[(i,a),(l,c)] conj(U[(j,a),(l,c)])
void step_row_block(const ComplexMatrix& u, const ComplexMatrix& rho_sys,
                    const std::vector<double>& w, const std::vector<std::size_t>& active,
                    ComplexMatrix& scratch, std::size_t row_begin, std::size_t row_end) {
    const std::size_t ds = rho_sys.rows();
    const std::size_t db = w.size();
    const std::size_t dim = u.rows();
    const std::size_t na = active.size();

    for (std::size_t r = row_begin; r < row_end; ++r) {
        const cd* urow = u.data() + r * dim;
        cd* trow = scratch.data() + r * (ds * na);
        for (std::size_t l = 0; l < ds; ++l) {
            for (std::size_t ci = 0; ci < na; ++ci) {
                const std::size_t c = active[ci];
                cd acc = 0.0;
                for (std::size_t k = 0; k < ds; ++k) acc += urow[k * db + c] * rho_sys(k, l);
                trow[l * na + ci] = w[c] * acc;
            }
        }
    }
}

void step_assemble(const ComplexMatrix& u, const ComplexMatrix& rho_sys,
                   const std::vector<std::size_t>& active, const ComplexMatrix& scratch,
                   std::size_t db, std::size_t i_begin, std::size_t i_end, ComplexMatrix& out) {
    const std::size_t ds = rho_sys.rows();
    const std::size_t dim = u.rows();
    const std::size_t na = active.size();

    for (std::size_t i = i_begin; i < i_end; ++i) {
        for (std::size_t j = 0; j < ds; ++j) {
            cd acc = 0.0;
            for (std::size_t a = 0; a < db; ++a) {
                const cd* trow = scratch.data() + (i * db + a) * (ds * na);
                const cd* urow = u.data() + (j * db + a) * dim;
                for (std::size_t l = 0; l < ds; ++l)
                    for (std::size_t ci = 0; ci < na; ++ci)
                        acc += trow[l * na + ci] * std::conj(urow[l * db + active[ci]]);
            }
            out(i, j) = acc;
        }
    }
}

std::vector<std::size_t> active_weights(const std::vector<double>& w) {
    std::vector<std::size_t> active;
    for (std::size_t c = 0; c < w.size(); ++c)
        if (w[c] != 0.0) active.push_back(c);
    if (active.empty()) throw std::invalid_argument("evolve_reset_step: all environment weights zero");
    return active;
}

} // namespace

// --------------------------- serial reference -------------------------------

namespace serial {

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
    check_matmul_shapes(a, b);
    ComplexMatrix c(a.rows(), b.cols());
    const std::size_t n = a.rows(), m = a.cols(), p = b.cols();
    for (std::size_t i = 0; i < n; ++i) {
        cd* crow = c.data() + i * p;
        for (std::size_t k = 0; k < m; ++k) {
            const cd aik = a(i, k);
            if (aik == cd(0.0)) continue;
            const cd* brow = b.data() + k * p;
            for (std::size_t j = 0; j < p; ++j) crow[j] += aik * brow[j];
        }
    }
    return c;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix c(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const cd aij = a(i, j);
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l)
                    c(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
        }
    return c;
}

ComplexMatrix partial_trace(const ComplexMatrix& rho, const std::vector<std::size_t>& dims,
                            const std::vector<std::size_t>& keep) {
    const TraceLayout L = trace_layout(rho, dims, keep);
    ComplexMatrix out(L.dim_keep, L.dim_keep);
    for (std::size_t p = 0; p < L.dim_keep; ++p) {
        const std::size_t po = keep_offset(L, p);
        for (std::size_t q = 0; q < L.dim_keep; ++q) {
            const std::size_t qo = keep_offset(L, q);
            cd acc = 0.0;
            for (std::size_t t = 0; t < L.dim_traced; ++t) {
                const std::size_t to = traced_offset(L, t);
                acc += rho(po + to, qo + to);
            }
            out(p, q) = acc;
        }
    }
    return out;
}

ComplexMatrix conjugate(const ComplexMatrix& u, const ComplexMatrix& rho) {
    return matmul(matmul(u, rho), u.adjoint());
}

ComplexMatrix evolve_reset_step(const ComplexMatrix& u, const ComplexMatrix& rho_sys,
                                const std::vector<double>& w) {
    check_step_shapes(u, rho_sys, w);
    const auto active = active_weights(w);
    const std::size_t ds = rho_sys.rows(), db = w.size(), dim = u.rows();
    ComplexMatrix scratch(dim, ds * active.size());
    step_row_block(u, rho_sys, w, active, scratch, 0, dim);
    ComplexMatrix out(ds, ds);
    step_assemble(u, rho_sys, active, scratch, db, 0, ds, out);
    return out;
}

} // namespace serial

// --------------------------- OpenMP variants --------------------------------

namespace par {

// Split real/imaginary planes: four independent fused-multiply-add streams
// vectorize far better than interleaved std::complex arithmetic.
ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
    check_matmul_shapes(a, b);
    ComplexMatrix c(a.rows(), b.cols());
    const std::size_t n = a.rows(), m = a.cols(), p = b.cols();

    std::vector<double> br(m * p), bi(m * p);
    for (std::size_t k = 0; k < m * p; ++k) {
        br[k] = b.data()[k].real();
        bi[k] = b.data()[k].imag();
    }

#ifdef _OPENMP
#pragma omp parallel
#endif
    {
        std::vector<double> cr(p), ci(p);
#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
        for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
            const std::size_t i = static_cast<std::size_t>(ii);
            std::fill(cr.begin(), cr.end(), 0.0);
            std::fill(ci.begin(), ci.end(), 0.0);
            for (std::size_t k = 0; k < m; ++k) {
                const cd aik = a(i, k);
                if (aik == cd(0.0)) continue;
                const double ar = aik.real(), ai = aik.imag();
                const double* brow = br.data() + k * p;
                const double* birow = bi.data() + k * p;
                for (std::size_t j = 0; j < p; ++j) {
                    cr[j] += ar * brow[j] - ai * birow[j];
                    ci[j] += ar * birow[j] + ai * brow[j];
                }
            }
            cd* crow = c.data() + i * p;
            for (std::size_t j = 0; j < p; ++j) crow[j] = cd(cr[j], ci[j]);
        }
    }
    return c;
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    ComplexMatrix c(a.rows() * b.rows(), a.cols() * b.cols());
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(a.rows()); ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const cd aij = a(i, j);
            for (std::size_t k = 0; k < b.rows(); ++k)
                for (std::size_t l = 0; l < b.cols(); ++l)
                    c(i * b.rows() + k, j * b.cols() + l) = aij * b(k, l);
        }
    }
    return c;
}

ComplexMatrix partial_trace(const ComplexMatrix& rho, const std::vector<std::size_t>& dims,
                            const std::vector<std::size_t>& keep) {
    const TraceLayout L = trace_layout(rho, dims, keep);
    ComplexMatrix out(L.dim_keep, L.dim_keep);
    std::vector<std::size_t> offs(L.dim_keep);
    for (std::size_t p = 0; p < L.dim_keep; ++p) offs[p] = keep_offset(L, p);
    std::vector<std::size_t> toffs(L.dim_traced);
    for (std::size_t t = 0; t < L.dim_traced; ++t) toffs[t] = traced_offset(L, t);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::ptrdiff_t pp = 0; pp < static_cast<std::ptrdiff_t>(L.dim_keep); ++pp) {
        const std::size_t p = static_cast<std::size_t>(pp);
        for (std::size_t q = 0; q < L.dim_keep; ++q) {
            cd acc = 0.0;
            for (std::size_t t = 0; t < L.dim_traced; ++t) acc += rho(offs[p] + toffs[t], offs[q] + toffs[t]);
            out(p, q) = acc;
        }
    }
    return out;
}

ComplexMatrix conjugate(const ComplexMatrix& u, const ComplexMatrix& rho) {
    return matmul(matmul(u, rho), u.adjoint());
}

ComplexMatrix evolve_reset_step(const ComplexMatrix& u, const ComplexMatrix& rho_sys,
                                const std::vector<double>& w) {
    check_step_shapes(u, rho_sys, w);
    const auto active = active_weights(w);
    const std::size_t ds = rho_sys.rows(), db = w.size(), dim = u.rows();
    const std::size_t na = active.size();
    ComplexMatrix scratch(dim, ds * na);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::ptrdiff_t rr = 0; rr < static_cast<std::ptrdiff_t>(dim); ++rr) {
        const std::size_t r = static_cast<std::size_t>(rr);
        step_row_block(u, rho_sys, w, active, scratch, r, r + 1);
    }
    ComplexMatrix out(ds, ds);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(ds); ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        step_assemble(u, rho_sys, active, scratch, db, i, i + 1, out);
    }
    return out;
}

} // namespace par

// --------------------------- dispatch ----------------------------------------

namespace {
constexpr std::size_t kParallelThreshold = 64; // square dimension above which threads pay off
}

ComplexMatrix matmul(const ComplexMatrix& a, const ComplexMatrix& b) {
    return (a.rows() >= kParallelThreshold) ? par::matmul(a, b) : serial::matmul(a, b);
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    return (a.rows() * b.rows() >= kParallelThreshold) ? par::kron(a, b) : serial::kron(a, b);
}

ComplexMatrix partial_trace(const ComplexMatrix& rho, const std::vector<std::size_t>& dims,
                            const std::vector<std::size_t>& keep) {
    return (rho.rows() >= kParallelThreshold) ? par::partial_trace(rho, dims, keep)
                                              : serial::partial_trace(rho, dims, keep);
}

ComplexMatrix conjugate(const ComplexMatrix& u, const ComplexMatrix& rho) {
    return (u.rows() >= kParallelThreshold) ? par::conjugate(u, rho) : serial::conjugate(u, rho);
}

ComplexMatrix evolve_reset_step(const ComplexMatrix& u, const ComplexMatrix& rho_sys,
                                const std::vector<double>& w) {
    return (u.rows() >= kParallelThreshold) ? par::evolve_reset_step(u, rho_sys, w)
                                            : serial::evolve_reset_step(u, rho_sys, w);
}

ComplexMatrix permute_qubits(const ComplexMatrix& m, const std::vector<std::size_t>& perm) {
    m.require_square("permute_qubits");
    const std::size_t n = perm.size();
    if (m.rows() != (std::size_t(1) << n))
        throw std::invalid_argument("permute_qubits: dimension is not 2^#qubits");
    std::vector<bool> seen(n, false);
    for (std::size_t q : perm) {
        if (q >= n || seen[q]) throw std::invalid_argument("permute_qubits: invalid permutation");
        seen[q] = true;
    }
    const std::size_t dim = m.rows();
    // old composite index for each new index: new bit q comes from old bit perm[q]
    std::vector<std::size_t> gather(dim);
    for (std::size_t x = 0; x < dim; ++x) {
        std::size_t old = 0;
        for (std::size_t q = 0; q < n; ++q) {
            const std::size_t bit = (x >> (n - 1 - q)) & 1u;
            old |= bit << (n - 1 - perm[q]);
        }
        gather[x] = old;
    }
    ComplexMatrix out(dim, dim);
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) out(i, j) = m(gather[i], gather[j]);
    return out;
}

ComplexMatrix matrix_power(const ComplexMatrix& a, std::size_t n) {
    a.require_square("matrix_power");
    ComplexMatrix result = ComplexMatrix::identity(a.rows());
    ComplexMatrix base = a;
    while (n > 0) {
        if (n & 1u) result = matmul(result, base);
        n >>= 1;
        if (n > 0) base = matmul(base, base);
    }
    return result;
}

} // namespace oqs::kernels
