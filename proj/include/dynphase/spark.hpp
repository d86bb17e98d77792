#pragma once

#include <optional>
#include <vector>

#include "dynphase/types.hpp"

namespace dynphase {

/// Row/column index sets of a singular square submatrix.
struct SubmatrixWitness {
    std::vector<int> rows;
    std::vector<int> cols;
};

struct TotallyFullSparkResult {
    bool totally_full_spark = false;
    std::optional<SubmatrixWitness> witness;
};

/// Smallest size of a linearly dependent column subset; m+1 for a full-spark
/// m x n matrix (m <= n).
int spark(const CMat& b, const Tolerance& tol);
int spark(const Mat& b, const Tolerance& tol);

/// True iff every square submatrix of every size is invertible. Singularity
/// is judged on the row-norm-normalized |det|, compared against
/// singularity_tol times the best value among the column subsets sharing the
/// same rows; the relative comparison keeps the test scale-free in both the
/// entry magnitudes and the submatrix size. On failure the witness is the
/// first singular submatrix in (size, rows, cols) lexicographic order.
TotallyFullSparkResult totally_full_spark(const CMat& b, const Tolerance& tol);
TotallyFullSparkResult totally_full_spark(const Mat& b, const Tolerance& tol);

/// The d x (2d-1) matrix of eigenvalue powers lambda_j^l, l = 0..2d-2.
/// Throws on duplicate eigenvalues (gap below singularity_tol relative to
/// the eigenvalue scale).
CMat build_lambda_matrix(const CVec& distinct_eigenvalues, const Tolerance& tol);

/// Normalized determinant |det S| / prod_i ||row_i(S)||; 0 when a row
/// vanishes. Always in [0, 1] by Hadamard's inequality.
double normalized_determinant(const CMat& square);

/// First k-subset of {0..n-1} in lexicographic order, then next_subset steps
/// through them; returns false after the last subset.
std::vector<int> first_subset(int k);
bool next_subset(std::vector<int>& subset, int n);

}  // namespace dynphase
