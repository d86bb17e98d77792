#include "dynphase/spark.hpp"

#include <cmath>

#include <Eigen/LU>

#include "dynphase/linalg.hpp"

namespace dynphase {

std::vector<int> first_subset(int k) {
    std::vector<int> s(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) s[static_cast<size_t>(i)] = i;
    return s;
}

bool next_subset(std::vector<int>& subset, int n) {
    const int k = static_cast<int>(subset.size());
    int i = k - 1;
    while (i >= 0 && subset[static_cast<size_t>(i)] == n - k + i) --i;
    if (i < 0) return false;
    ++subset[static_cast<size_t>(i)];
    for (int j = i + 1; j < k; ++j)
        subset[static_cast<size_t>(j)] = subset[static_cast<size_t>(j - 1)] + 1;
    return true;
}

double normalized_determinant(const CMat& square) {
    const Index k = square.rows();
    double row_norm_product = 1.0;
    for (Index i = 0; i < k; ++i) {
        const double rn = square.row(i).norm();
        if (rn == 0.0) return 0.0;
        row_norm_product *= rn;
    }
    const double det = std::abs(square.determinant());
    return det / row_norm_product;
}

namespace {

CMat gather(const CMat& b, const std::vector<int>& rows, const std::vector<int>& cols) {
    CMat sub(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < cols.size(); ++j)
            sub(static_cast<Index>(i), static_cast<Index>(j)) = b(rows[i], cols[j]);
    return sub;
}

}  // namespace

int spark(const CMat& b, const Tolerance& tol) {
    const int m = static_cast<int>(b.rows());
    const int n = static_cast<int>(b.cols());
    if (m > n) throw std::invalid_argument("spark: expected m <= n");
    for (int k = 1; k <= m; ++k) {
        std::vector<int> cols = first_subset(k);
        do {
            CMat sub(b.rows(), k);
            for (int j = 0; j < k; ++j) sub.col(j) = b.col(cols[static_cast<size_t>(j)]);
            if (numerical_rank(sub, tol) < k) return k;
        } while (next_subset(cols, n));
    }
    return m + 1;
}

int spark(const Mat& b, const Tolerance& tol) { return spark(CMat(b.cast<Complex>()), tol); }

TotallyFullSparkResult totally_full_spark(const CMat& b, const Tolerance& tol) {
    const int m = static_cast<int>(b.rows());
    const int n = static_cast<int>(b.cols());
    const int kmax = std::min(m, n);
    for (int k = 1; k <= kmax; ++k) {
        std::vector<int> rows = first_subset(k);
        do {
            // Column subsets sharing this row set form one comparison family;
            // the reference scale is the best-conditioned member, so a common
            // ill-conditioned row factor cannot drown the whole family.
            std::vector<std::vector<int>> col_sets;
            std::vector<double> ndets;
            double max_ndet = 0.0;
            std::vector<int> cols = first_subset(k);
            do {
                const double nd = normalized_determinant(gather(b, rows, cols));
                max_ndet = std::max(max_ndet, nd);
                col_sets.push_back(cols);
                ndets.push_back(nd);
            } while (next_subset(cols, n));
            for (size_t i = 0; i < col_sets.size(); ++i)
                if (ndets[i] <= tol.singularity_tol * max_ndet)
                    return {false, SubmatrixWitness{rows, col_sets[i]}};
        } while (next_subset(rows, m));
    }
    return {true, std::nullopt};
}

TotallyFullSparkResult totally_full_spark(const Mat& b, const Tolerance& tol) {
    return totally_full_spark(CMat(b.cast<Complex>()), tol);
}

CMat build_lambda_matrix(const CVec& distinct_eigenvalues, const Tolerance& tol) {
    const Index d = distinct_eigenvalues.size();
    if (d < 1) throw std::invalid_argument("build_lambda_matrix: empty spectrum");
    for (Index i = 0; i < d; ++i)
        for (Index j = i + 1; j < d; ++j) {
            const double scale =
                std::max({1.0, std::abs(distinct_eigenvalues(i)), std::abs(distinct_eigenvalues(j))});
            if (std::abs(distinct_eigenvalues(i) - distinct_eigenvalues(j)) <=
                tol.singularity_tol * scale)
                throw std::invalid_argument("build_lambda_matrix: duplicate eigenvalues");
        }
    CMat lambda(d, 2 * d - 1);
    for (Index j = 0; j < d; ++j) {
        Complex power(1.0);
        for (Index l = 0; l < 2 * d - 1; ++l) {
            lambda(j, l) = power;
            power *= distinct_eigenvalues(j);
        }
    }
    return lambda;
}

}  // namespace dynphase
