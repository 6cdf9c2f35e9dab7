// qmath.hpp — Few-qubit operator algebra: Pauli embeddings, tensor products,
// partial traces, Hermitian matrix exponentials.
//
// Qubit 0 is the leftmost (most significant) tensor factor; system qubits
// precede environment qubits everywhere in this project.

#pragma once

#include <cstddef>
#include <vector>

#include "oqs/matrix.hpp"

namespace oqs::qmath {

enum class Pauli { x, y, z };

ComplexMatrix pauli(Pauli kind);
ComplexMatrix pauli_x();
ComplexMatrix pauli_y();
ComplexMatrix pauli_z();

// Guard against accidentally oversized models. kron throws when a product
// would exceed the cap. Default 4096 (12 qubits).
std::size_t hilbert_cap();
void set_hilbert_cap(std::size_t cap);

// Kronecker product with the dimension guard.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

// I ⊗ ... ⊗ sigma_kind ⊗ ... ⊗ I with the Pauli at position `qubit`.
ComplexMatrix embed_pauli(Pauli kind, std::size_t qubit, std::size_t n_qubits);

// Reduced density matrix over the kept subsystems (ascending order).
DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<std::size_t>& dims,
                            const std::vector<std::size_t>& keep);

// exp(-i h t) for Hermitian h, unitary up to roundoff. Diagonal and
// involutory (h^2 = const * I) inputs take closed-form paths; everything else
// goes through the eigendecomposition.
ComplexMatrix expm_hermitian(const ComplexMatrix& h, double t);

struct EigenSystem {
    std::vector<double> values;  // ascending
    ComplexMatrix vectors;       // column k is the eigenvector of values[k]
};

EigenSystem hermitian_eigensystem(const ComplexMatrix& h);
std::vector<double> hermitian_eigenvalues(const ComplexMatrix& h);
double min_eigenvalue(const ComplexMatrix& h);

// Throws numerical_error when rho violates the physical-state bounds.
void validate_density(const DensityMatrix& rho, double trace_tol = 1e-9, double herm_tol = 1e-9,
                      double eig_floor = -1e-7);

// State helpers.
QuantumState basis_state(std::size_t dim, std::size_t index);
QuantumState normalized_state(std::vector<cd> raw);
DensityMatrix pure_density(const QuantumState& psi);

} // namespace oqs::qmath
