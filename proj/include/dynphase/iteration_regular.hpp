#pragma once

#include <optional>
#include <vector>

#include "dynphase/operator_spec.hpp"
#include "dynphase/polynomial.hpp"
#include "dynphase/types.hpp"

namespace dynphase {

/// Outcome of the iteration-regularity decision. On a negative verdict the
/// witness is a monic k-partial annihilator of degree <= max(1, 2k-2) with at
/// most k nonzero coefficients, the canonical (first in enumeration order)
/// violation.
struct IterationRegularity {
    bool regular = false;
    std::optional<Polynomial> witness;
    int witness_k = 0;
    /// Eigenvalues (with multiplicity) shared between the witness and the
    /// minimal polynomial.
    std::vector<Complex> witness_roots;

    explicit operator bool() const { return regular; }
};

/**
 * Decides iteration regularity by exhaustive search for a violating
 * k-partial annihilator. k = 1 reduces to invertibility; for k >= 2 every
 * k-subset of minimal-polynomial roots (counted with Jordan multiplicity)
 * is paired with every k-subset of exponents {0..2k-2}, and singularity of
 * the corresponding (confluent) Vandermonde submatrix yields a violation.
 *
 * The decision targets exact-arithmetic singularity. Arithmetic-progression
 * exponent subsets (steps 1 and 2, the only ones that fit in {0..2k-2}) are
 * settled in closed form: consecutive exponents are never singular for
 * distinct roots, step-2 exponents are singular exactly when two roots share
 * a square. All other subsets are screened by determinant ratios relative to
 * the best subset of their family and confirmed by the equilibrated
 * sigma_min/sigma_max against the double-precision noise floor. The
 * invertibility test (k = 1) uses singularity_tol.
 *
 * Refuses (EnumerationLimit) when the minimal-polynomial degree exceeds 15,
 * n exceeds 24, or the estimated enumeration is out of desk-scale reach.
 */
IterationRegularity iteration_regular(const OperatorSpec& spec, const Tolerance& tol);

/// A Jordan cell J(lambda) of any size n >= 1 is iteration regular iff
/// lambda != 0.
bool jordan_cell_regular(Complex lambda, int n);

}  // namespace dynphase
