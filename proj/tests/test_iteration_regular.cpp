#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dynphase/iteration_regular.hpp"
#include "dynphase/krylov.hpp"
#include "dynphase/linalg.hpp"
#include "dynphase/rng.hpp"
#include "dynphase/spark.hpp"

using namespace dynphase;

namespace {
const Tolerance tol;

OperatorSpec rotation_spec() {
    CMat binv(2, 2);
    binv << Complex(1.0), Complex(1.0), Complex(0.0, 1.0), Complex(0.0, -1.0);
    CVec eig(2);
    eig << Complex(0.0, 1.0), Complex(0.0, -1.0);
    return OperatorSpec::diagonalizable(binv.inverse(), eig);
}

}  // namespace

TEST_CASE("the identity is iteration regular") {
    CHECK(iteration_regular(OperatorSpec::identity(4), tol).regular);
}

TEST_CASE("a singular matrix is not iteration regular, witness x") {
    CVec eig(3);
    eig << Complex(0.0), Complex(1.0), Complex(2.0);
    const IterationRegularity res = iteration_regular(OperatorSpec::diagonal(eig), tol);
    CHECK_FALSE(res.regular);
    CHECK(res.witness_k == 1);
    REQUIRE(res.witness.has_value());
    CHECK(res.witness->degree() == 1);
    CHECK(std::abs(res.witness->coefficient(1) - Complex(1.0)) < 1e-12);
    CHECK(std::abs(res.witness->coefficient(0)) < 1e-12);
}

TEST_CASE("diag(-1,2) is iteration regular") {
    CVec eig(2);
    eig << Complex(-1.0), Complex(2.0);
    CHECK(iteration_regular(OperatorSpec::diagonal(eig), tol).regular);
}

TEST_CASE("purely imaginary conjugate roots break iteration regularity") {
    const IterationRegularity res = iteration_regular(rotation_spec(), tol);
    CHECK_FALSE(res.regular);
    CHECK(res.witness_k == 2);
    REQUIRE(res.witness.has_value());
    // Witness x^2 + 1: two nonzero coefficients sharing both roots.
    CHECK(res.witness->degree() == 2);
    CHECK(std::abs(res.witness->coefficient(2) - Complex(1.0)) < 1e-9);
    CHECK(std::abs(res.witness->coefficient(1)) < 1e-9);
    CHECK(std::abs(res.witness->coefficient(0) - Complex(1.0)) < 1e-9);
    CHECK(res.witness->nonzero_count(1e-9) == 2);
}

TEST_CASE("diag(1,-1) has the sparse annihilator x^2-1") {
    CVec eig(2);
    eig << Complex(1.0), Complex(-1.0);
    const IterationRegularity res = iteration_regular(OperatorSpec::diagonal(eig), tol);
    CHECK_FALSE(res.regular);
    REQUIRE(res.witness.has_value());
    CHECK(std::abs(res.witness->coefficient(2) - Complex(1.0)) < 1e-9);
    CHECK(std::abs(res.witness->coefficient(0) + Complex(1.0)) < 1e-9);
}

TEST_CASE("witnesses are monic sparse k-partial annihilators") {
    // Whenever the verdict is negative, the witness must share k roots with
    // the minimal polynomial, have degree <= max(1, 2k-2) and at most k
    // nonzero coefficients.
    RngStream rng(314);
    int negative = 0;
    for (int trial = 0; trial < 40; ++trial) {
        RngStream sub = rng.derive(trial);
        const int d = 2 + static_cast<int>(sub.next_u64() % 3);
        CVec eig(d);
        for (int i = 0; i < d; ++i) eig(i) = Complex(sub.uniform(0.4, 2.4) * sub.sign(), 0.0);
        // A +-lambda pair supports the two-term annihilator x^2 - lambda^2,
        // so half the draws are planted violations.
        if (trial % 2 == 0) eig(1) = -eig(0);
        bool distinct = true;
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j)
                if (std::abs(eig(i) - eig(j)) < 0.05) distinct = false;
        if (!distinct) continue;

        const OperatorSpec spec = OperatorSpec::diagonal(eig);
        const IterationRegularity res = iteration_regular(spec, tol);
        if (res.regular) continue;
        ++negative;
        REQUIRE(res.witness.has_value());
        const Polynomial& q = *res.witness;
        const int k = res.witness_k;
        CHECK(q.is_monic(1e-9));
        CHECK(q.degree() <= std::max(1, 2 * k - 2));
        CHECK(q.nonzero_count(1e-7 * q.max_coefficient()) <= k);
        CHECK(static_cast<int>(res.witness_roots.size()) == k);
        for (const Complex root : res.witness_roots)
            CHECK(std::abs(q.eval(root)) < 1e-6 * std::max(1.0, q.max_coefficient()));
    }
    CHECK(negative > 0);
}

TEST_CASE("jordan_cell_regular matches the full test on Jordan specs") {
    CHECK(jordan_cell_regular(Complex(3.0), 4));
    CHECK_FALSE(jordan_cell_regular(Complex(0.0), 2));
    CHECK(jordan_cell_regular(Complex(-1.0), 1));

    for (const double lambda : {3.0, -1.0, 0.5}) {
        for (const int size : {1, 2, 3, 4}) {
            EigenvalueGroup g;
            g.value = Complex(lambda);
            g.block_sizes = {size};
            const OperatorSpec spec =
                OperatorSpec::jordan(CMat::Identity(size, size), {g});
            CHECK(iteration_regular(spec, tol).regular ==
                  jordan_cell_regular(Complex(lambda), size));
        }
    }
    {
        EigenvalueGroup g;
        g.value = Complex(0.0);
        g.block_sizes = {2};
        const OperatorSpec spec = OperatorSpec::jordan(CMat::Identity(2, 2), {g});
        const IterationRegularity res = iteration_regular(spec, tol);
        CHECK_FALSE(res.regular);
        CHECK(res.witness_k == 1);
    }
}

TEST_CASE("totally full spark power matrix implies iteration regularity") {
    RngStream rng(2718);
    int implications = 0;
    for (int trial = 0; trial < 25; ++trial) {
        RngStream sub = rng.derive(trial);
        const int d = 2 + static_cast<int>(sub.next_u64() % 4);
        CVec eig(d);
        for (int i = 0; i < d; ++i) eig(i) = Complex(sub.uniform(0.3, 3.0) * sub.sign(), 0.0);
        bool distinct = true;
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j)
                if (std::abs(eig(i) - eig(j)) < 0.08) distinct = false;
        if (!distinct) continue;

        const CMat lambda = build_lambda_matrix(eig, tol);
        if (totally_full_spark(lambda, tol).totally_full_spark) {
            ++implications;
            CHECK(iteration_regular(OperatorSpec::diagonal(eig), tol).regular);
        }
    }
    CHECK(implications > 0);
}

TEST_CASE("iteration regularity depends only on the spectral data") {
    CVec eig(3);
    eig << Complex(0.7), Complex(-1.3), Complex(2.2);
    const OperatorSpec plain = OperatorSpec::diagonal(eig);

    RngStream rng(42);
    Mat b = Mat::Identity(3, 3);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) b(i, j) += 0.3 * rng.normal();
    const OperatorSpec conjugated = OperatorSpec::diagonalizable(b.cast<Complex>(), eig);

    CHECK(iteration_regular(plain, tol).regular ==
          iteration_regular(conjugated, tol).regular);
}

TEST_CASE("krylov vector subsets of iteration-regular operators have full rank") {
    // For iteration-regular A and any x with maximal Krylov dimension k,
    // every k-subset of {x, Ax, ..., A^{max(1,2k-2)}x} is a basis.
    RngStream rng(987);
    int tested = 0;
    for (int trial = 0; trial < 80 && tested < 25; ++trial) {
        RngStream sub = rng.derive(trial);
        const int n = 2 + static_cast<int>(sub.next_u64() % 5);  // 2..6
        CVec eig(n);
        for (int i = 0; i < n; ++i) eig(i) = Complex(sub.uniform(0.4, 2.5) * sub.sign(), 0.0);
        bool distinct = true;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                if (std::abs(eig(i) - eig(j)) < 0.08) distinct = false;
        if (!distinct) continue;
        const OperatorSpec spec = OperatorSpec::diagonal(eig);
        if (!iteration_regular(spec, tol).regular) continue;
        ++tested;

        Vec x(n);
        for (int i = 0; i < n; ++i) x(i) = sub.normal();
        // Sparse generators exercise k < n.
        if (tested % 3 == 0) x(0) = 0.0;
        if (x.norm() < 1e-9) continue;

        const int k = krylov_rank(spec.matrix(), x, tol);
        REQUIRE(k >= 1);
        const int order = std::max(1, 2 * k - 2) + 1;
        Mat powers(n, order);
        Vec current = x;
        for (int l = 0; l < order; ++l) {
            powers.col(l) = current / std::max(current.norm(), 1e-300);
            current = spec.matrix() * current;
        }
        std::vector<int> subset = first_subset(k);
        do {
            Mat sub_m(n, k);
            for (int j = 0; j < k; ++j) sub_m.col(j) = powers.col(subset[static_cast<size_t>(j)]);
            CHECK(numerical_rank(sub_m, tol) == k);
        } while (next_subset(subset, order));
    }
    CHECK(tested >= 10);
}
