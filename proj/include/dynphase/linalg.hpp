#pragma once

#include "dynphase/types.hpp"

namespace dynphase {

/// Numerical rank: number of singular values above rank_tol times the largest.
int numerical_rank(const CMat& m, const Tolerance& tol);
int numerical_rank(const Mat& m, const Tolerance& tol);

/// Spectral norm (largest singular value).
double operator_norm(const CMat& m);

/// Right-singular vector for the smallest singular value of a square matrix.
CVec least_singular_vector(const CMat& m);

/// Unit vector orthogonal to the column span of m (empty span gives e_0 for
/// rows > 0). Throws if the columns already span the full space.
Vec orthogonal_complement_vector(const Mat& m, const Tolerance& tol);

/// sigma_min / sigma_max of a (not necessarily square) matrix; 0 for a zero
/// matrix.
double singular_value_ratio(const CMat& m);

/// singular_value_ratio after scaling every row to unit norm; 0 when a row
/// vanishes. Scale-free in both row magnitudes and dimension.
double equilibrated_singular_ratio(const CMat& m);

}  // namespace dynphase
