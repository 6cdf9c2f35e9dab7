// matrix.hpp — Dense complex matrices and quantum-state carriers.
//
// Index conventions used throughout the project:
//   * ComplexMatrix is row-major: entry (i, j) sits at data[i*cols + j].
//   * Composite Hilbert spaces are tensor products with qubit 0 as the
//     leftmost (most significant) factor; system qubits precede environment
//     qubits. Basis index of n qubits: b = sum_q bit_q * 2^(n-1-q).

#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace oqs {

using cd = std::complex<double>;

class ComplexMatrix {
public:
    ComplexMatrix() = default;

    ComplexMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols) {
        if (rows == 0 || cols == 0) throw std::invalid_argument("ComplexMatrix: empty dimensions");
    }

    static ComplexMatrix zero(std::size_t rows, std::size_t cols) { return ComplexMatrix(rows, cols); }

    static ComplexMatrix identity(std::size_t n) {
        ComplexMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    cd& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const cd& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    cd* data() { return data_.data(); }
    const cd* data() const { return data_.data(); }

    ComplexMatrix& operator+=(const ComplexMatrix& o) {
        require_same_shape(o, "operator+=");
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
        return *this;
    }

    ComplexMatrix& operator-=(const ComplexMatrix& o) {
        require_same_shape(o, "operator-=");
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
        return *this;
    }

    ComplexMatrix& operator*=(cd s) {
        for (auto& v : data_) v *= s;
        return *this;
    }

    friend ComplexMatrix operator+(ComplexMatrix a, const ComplexMatrix& b) { return a += b; }
    friend ComplexMatrix operator-(ComplexMatrix a, const ComplexMatrix& b) { return a -= b; }
    friend ComplexMatrix operator*(cd s, ComplexMatrix a) { return a *= s; }
    friend ComplexMatrix operator*(ComplexMatrix a, cd s) { return a *= s; }

    ComplexMatrix adjoint() const {
        ComplexMatrix out(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) out(j, i) = std::conj((*this)(i, j));
        return out;
    }

    ComplexMatrix transpose() const {
        ComplexMatrix out(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) out(j, i) = (*this)(i, j);
        return out;
    }

    cd trace() const {
        require_square("trace");
        cd t = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
        return t;
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& v : data_) m = std::max(m, std::abs(v));
        return m;
    }

    // Frobenius norm
    double norm() const {
        double s = 0.0;
        for (const auto& v : data_) s += std::norm(v);
        return std::sqrt(s);
    }

    double hermiticity_defect() const {
        require_square("hermiticity_defect");
        double m = 0.0;
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = i; j < cols_; ++j)
                m = std::max(m, std::abs((*this)(i, j) - std::conj((*this)(j, i))));
        return m;
    }

    bool is_hermitian(double tol = 1e-10) const { return hermiticity_defect() <= tol; }

    bool all_finite() const {
        for (const auto& v : data_)
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
        return true;
    }

    void require_square(const char* who) const {
        if (rows_ != cols_) throw std::invalid_argument(std::string(who) + ": matrix must be square");
    }

private:
    void require_same_shape(const ComplexMatrix& o, const char* who) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw std::invalid_argument(std::string(who) + ": shape mismatch");
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cd> data_;
};

// Pure state on a power-of-two Hilbert space, normalized to 1 within 1e-10.
class QuantumState {
public:
    explicit QuantumState(std::vector<cd> amplitudes) : amps_(std::move(amplitudes)) {
        if (amps_.empty()) throw std::invalid_argument("QuantumState: empty amplitude vector");
        if ((amps_.size() & (amps_.size() - 1)) != 0)
            throw std::invalid_argument("QuantumState: dimension must be a power of 2");
        double n2 = 0.0;
        for (const auto& a : amps_) n2 += std::norm(a);
        if (std::abs(n2 - 1.0) > 1e-10)
            throw std::invalid_argument("QuantumState: squared norm deviates from 1 by " +
                                        std::to_string(std::abs(n2 - 1.0)));
    }

    std::size_t dim() const { return amps_.size(); }
    const std::vector<cd>& amplitudes() const { return amps_; }
    const cd& operator[](std::size_t i) const { return amps_[i]; }

private:
    std::vector<cd> amps_;
};

// Density matrix carrier. Construction checks shape and finiteness; the
// trace/Hermiticity/positivity bounds are enforced where physically required
// (see qmath::validate_density, which needs the eigensolver).
class DensityMatrix {
public:
    explicit DensityMatrix(ComplexMatrix m) : mat_(std::move(m)) {
        mat_.require_square("DensityMatrix");
        if (!mat_.all_finite()) throw std::invalid_argument("DensityMatrix: non-finite entries");
    }

    std::size_t dim() const { return mat_.rows(); }
    const ComplexMatrix& matrix() const { return mat_; }
    ComplexMatrix& matrix() { return mat_; }

    double trace_defect() const { return std::abs(mat_.trace() - cd(1.0)); }
    double hermiticity_defect() const { return mat_.hermiticity_defect(); }

private:
    ComplexMatrix mat_;
};

} // namespace oqs
