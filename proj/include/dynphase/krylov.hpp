#pragma once

#include "dynphase/polynomial.hpp"
#include "dynphase/types.hpp"

namespace dynphase {

/// Snapshot of a grown Krylov sequence x, Ax, ..., A^{order-1}x together with
/// its numerical rank under the configured tolerance.
struct KrylovBasis {
    CVec generator;
    int order = 0;
    CMat vectors;  // n x order, column j = A^j x
    int rank = 0;
};

/// Grows the sequence until the rank stops increasing.
KrylovBasis grow_krylov_basis(const CMat& a, const CVec& x, const Tolerance& tol);

/// Dimension of the maximal Krylov subspace; 0 iff x vanishes within
/// tolerance.
int krylov_rank(const CMat& a, const CVec& x, const Tolerance& tol);
int krylov_rank(const Mat& a, const Vec& x, const Tolerance& tol);

/// Monic least-degree polynomial p with p(A)x = 0, of degree krylov_rank(A,x).
/// The residual ||p(A)x|| is checked against tol.rank_tol * ||x|| * max(1,
/// ||A||^deg); a violation raises NumericalDegeneracy. x must be nonzero.
Polynomial annihilator(const CMat& a, const CVec& x, const Tolerance& tol);
Polynomial annihilator(const Mat& a, const Vec& x, const Tolerance& tol);

/// Monic least-degree polynomial with p(A) = 0, computed from the Krylov
/// sequence of the matrix powers themselves.
Polynomial minimal_polynomial(const CMat& a, const Tolerance& tol);
Polynomial minimal_polynomial(const Mat& a, const Tolerance& tol);

/// p(A)x by Horner iteration; never forms p(A).
CVec eval_poly_on_operator(const Polynomial& p, const CMat& a, const CVec& x);
Vec eval_poly_on_operator(const Polynomial& p, const Mat& a, const Vec& x);

}  // namespace dynphase
