#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <vector>

#include "oqs/kernels.hpp"
#include "oqs/qmath.hpp"
#include "test_util.hpp"

using namespace oqs;
using testutil::max_abs_diff;

namespace {

// independent index-summation oracle: (Tr_B rho)[a,a'] = sum_b rho[(a,b),(a',b)]
ComplexMatrix ptrace_last_oracle(const ComplexMatrix& rho, std::size_t da, std::size_t db) {
    ComplexMatrix out(da, da);
    for (std::size_t a = 0; a < da; ++a)
        for (std::size_t ap = 0; ap < da; ++ap) {
            cd s = 0.0;
            for (std::size_t b = 0; b < db; ++b) s += rho(a * db + b, ap * db + b);
            out(a, ap) = s;
        }
    return out;
}

} // namespace

TEST_CASE("matmul serial/parallel agree with naive definition") {
    Rng rng(11);
    for (std::size_t n : {3u, 17u, 80u}) {
        const ComplexMatrix a = testutil::random_matrix(n, n, rng);
        const ComplexMatrix b = testutil::random_matrix(n, n, rng);
        ComplexMatrix naive(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                cd s = 0.0;
                for (std::size_t k = 0; k < n; ++k) s += a(i, k) * b(k, j);
                naive(i, j) = s;
            }
        CHECK(max_abs_diff(kernels::serial::matmul(a, b), naive) < 1e-11);
        CHECK(max_abs_diff(kernels::par::matmul(a, b), naive) < 1e-11);
        CHECK(max_abs_diff(kernels::matmul(a, b), naive) < 1e-11);
    }
}

TEST_CASE("kron identities") {
    const ComplexMatrix i2 = ComplexMatrix::identity(2);
    CHECK(max_abs_diff(kernels::kron(i2, i2), ComplexMatrix::identity(4)) == 0.0);

    const ComplexMatrix zz = kernels::kron(qmath::pauli_z(), qmath::pauli_z());
    CHECK(zz(0, 0) == cd(1.0));
    CHECK(zz(1, 1) == cd(-1.0));
    CHECK(zz(2, 2) == cd(-1.0));
    CHECK(zz(3, 3) == cd(1.0));

    // mixed product: (A⊗B)(C⊗D) = (AC)⊗(BD), verified by direct multiplication
    Rng rng(12);
    for (int rep = 0; rep < 20; ++rep) {
        const auto a = testutil::random_matrix(2, 2, rng);
        const auto b = testutil::random_matrix(2, 2, rng);
        const auto c = testutil::random_matrix(2, 2, rng);
        const auto d = testutil::random_matrix(2, 2, rng);
        const auto lhs = kernels::matmul(kernels::kron(a, b), kernels::kron(c, d));
        const auto rhs = kernels::kron(kernels::matmul(a, c), kernels::matmul(b, d));
        CHECK(max_abs_diff(lhs, rhs) < 1e-12);
    }
}

TEST_CASE("kron associativity on random triples") {
    Rng rng(13);
    for (int rep = 0; rep < 10; ++rep) {
        const auto a = testutil::random_matrix(2, 3, rng);
        const auto b = testutil::random_matrix(3, 2, rng);
        const auto c = testutil::random_matrix(2, 2, rng);
        const auto lhs = kernels::kron(kernels::kron(a, b), c);
        const auto rhs = kernels::kron(a, kernels::kron(b, c));
        CHECK(max_abs_diff(lhs, rhs) < 1e-12);
    }
}

TEST_CASE("kron serial/parallel agree") {
    Rng rng(14);
    const auto a = testutil::random_matrix(12, 12, rng);
    const auto b = testutil::random_matrix(8, 8, rng);
    // ulp-level slack: the compiler may contract the complex multiplies
    // differently in the two loop structures
    CHECK(max_abs_diff(kernels::serial::kron(a, b), kernels::par::kron(a, b)) < 1e-14);
}

TEST_CASE("partial trace against index-summation oracle") {
    Rng rng(15);
    const DensityMatrix rho = testutil::random_density(4, rng);
    const std::vector<std::size_t> dims{2, 2};

    const auto reduced = kernels::partial_trace(rho.matrix(), dims, {0});
    const auto oracle = ptrace_last_oracle(rho.matrix(), 2, 2);
    CHECK(max_abs_diff(reduced, oracle) < 1e-13);

    // trace preserved, Hermiticity preserved
    CHECK(std::abs(reduced.trace() - cd(1.0)) < 1e-12);
    CHECK(reduced.hermiticity_defect() < 1e-12);

    CHECK(max_abs_diff(kernels::serial::partial_trace(rho.matrix(), dims, {1}),
                       kernels::par::partial_trace(rho.matrix(), dims, {1})) < 1e-14);
}

TEST_CASE("partial trace of a product state returns the kept factor") {
    Rng rng(16);
    const DensityMatrix a = testutil::random_density(2, rng);
    const DensityMatrix b = testutil::random_density(4, rng);
    const ComplexMatrix prod = kernels::kron(a.matrix(), b.matrix());
    CHECK(max_abs_diff(kernels::partial_trace(prod, {2, 4}, {0}), a.matrix()) < 1e-12);
    CHECK(max_abs_diff(kernels::partial_trace(prod, {2, 4}, {1}), b.matrix()) < 1e-12);
}

TEST_CASE("partial trace of the Bell state gives the maximally mixed qubit") {
    std::vector<cd> amps{1.0 / std::sqrt(2.0), 0.0, 0.0, 1.0 / std::sqrt(2.0)};
    const DensityMatrix bell = qmath::pure_density(QuantumState(std::move(amps)));
    const auto reduced = kernels::partial_trace(bell.matrix(), {2, 2}, {0});
    CHECK(std::abs(reduced(0, 0) - cd(0.5)) < 1e-12);
    CHECK(std::abs(reduced(1, 1) - cd(0.5)) < 1e-12);
    CHECK(std::abs(reduced(0, 1)) < 1e-12);
}

TEST_CASE("partial trace on three subsystems keeps middle factor") {
    Rng rng(17);
    const DensityMatrix a = testutil::random_density(2, rng);
    const DensityMatrix b = testutil::random_density(2, rng);
    const DensityMatrix c = testutil::random_density(2, rng);
    const ComplexMatrix prod =
        kernels::kron(kernels::kron(a.matrix(), b.matrix()), c.matrix());
    CHECK(max_abs_diff(kernels::partial_trace(prod, {2, 2, 2}, {1}), b.matrix()) < 1e-12);
}

TEST_CASE("fused evolve-reset step equals kron+conjugate+trace reference") {
    Rng rng(18);
    for (std::size_t denv : {1u, 2u}) {
        const std::size_t db = std::size_t(1) << denv;
        const std::size_t dim = 2 * db;
        const ComplexMatrix u = testutil::random_unitary(dim, rng);
        const DensityMatrix rho = testutil::random_density(2, rng);

        std::vector<double> w(db);
        double norm = 0.0;
        for (auto& x : w) {
            x = rng.uniform() + 0.01;
            norm += x;
        }
        for (auto& x : w) x /= norm;

        ComplexMatrix envm(db, db);
        for (std::size_t i = 0; i < db; ++i) envm(i, i) = w[i];
        const ComplexMatrix full = kernels::kron(rho.matrix(), envm);
        const ComplexMatrix evolved = kernels::conjugate(u, full);
        const ComplexMatrix reference = kernels::partial_trace(evolved, {2, db}, {0});

        CHECK(max_abs_diff(kernels::serial::evolve_reset_step(u, rho.matrix(), w), reference) < 1e-12);
        CHECK(max_abs_diff(kernels::par::evolve_reset_step(u, rho.matrix(), w), reference) < 1e-12);
    }
}

TEST_CASE("fused step with one-hot weights equals pure basis reset") {
    Rng rng(19);
    const ComplexMatrix u = testutil::random_unitary(8, rng);
    const DensityMatrix rho = testutil::random_density(2, rng);
    std::vector<double> w{0.0, 0.0, 1.0, 0.0};

    ComplexMatrix envm(4, 4);
    envm(2, 2) = 1.0;
    const ComplexMatrix reference =
        kernels::partial_trace(kernels::conjugate(u, kernels::kron(rho.matrix(), envm)), {2, 4}, {0});
    CHECK(max_abs_diff(kernels::evolve_reset_step(u, rho.matrix(), w), reference) < 1e-12);
}

TEST_CASE("permute_qubits swaps tensor factors") {
    Rng rng(20);
    const ComplexMatrix a = testutil::random_matrix(2, 2, rng);
    const ComplexMatrix b = testutil::random_matrix(2, 2, rng);
    const ComplexMatrix ab = kernels::kron(a, b);
    const ComplexMatrix ba = kernels::kron(b, a);
    CHECK(max_abs_diff(kernels::permute_qubits(ab, {1, 0}), ba) < 1e-14);

    // identity permutation is a no-op
    CHECK(max_abs_diff(kernels::permute_qubits(ab, {0, 1}), ab) == 0.0);

    // three qubits: rotate (0,1,2) -> (2,0,1)
    const ComplexMatrix c = testutil::random_matrix(2, 2, rng);
    const ComplexMatrix abc = kernels::kron(kernels::kron(a, b), c);
    const ComplexMatrix cab = kernels::kron(kernels::kron(c, a), b);
    CHECK(max_abs_diff(kernels::permute_qubits(abc, {2, 0, 1}), cab) < 1e-14);
}

TEST_CASE("matrix_power matches repeated multiplication") {
    Rng rng(21);
    const ComplexMatrix u = testutil::random_unitary(6, rng);
    ComplexMatrix ref = ComplexMatrix::identity(6);
    for (int k = 0; k < 13; ++k) ref = kernels::matmul(ref, u);
    CHECK(max_abs_diff(kernels::matrix_power(u, 13), ref) < 1e-12);
    CHECK(max_abs_diff(kernels::matrix_power(u, 0), ComplexMatrix::identity(6)) == 0.0);
}

TEST_CASE("kernel error paths") {
    const ComplexMatrix a(2, 3);
    const ComplexMatrix b(2, 2);
    CHECK_THROWS_AS(kernels::matmul(a, b), std::invalid_argument);
    CHECK_THROWS_AS(kernels::partial_trace(b, {2, 2}, {0}), std::invalid_argument);
    CHECK_THROWS_AS(kernels::partial_trace(ComplexMatrix::identity(4), {2, 2}, {}),
                    std::invalid_argument);
    CHECK_THROWS_AS(kernels::partial_trace(ComplexMatrix::identity(4), {2, 2}, {2}),
                    std::invalid_argument);
    CHECK_THROWS_AS(kernels::evolve_reset_step(ComplexMatrix::identity(4), b, {1.0, 0.0, 0.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(kernels::permute_qubits(ComplexMatrix::identity(4), {0, 0}),
                    std::invalid_argument);
}
