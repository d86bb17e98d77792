#include "dynphase/krylov.hpp"

#include <cmath>

#include <Eigen/SVD>

#include "dynphase/linalg.hpp"

namespace dynphase {

namespace {

void check_dims(const CMat& a, const CVec& x) {
    if (a.rows() != a.cols()) throw std::invalid_argument("krylov: matrix must be square");
    if (a.rows() != x.size()) throw std::invalid_argument("krylov: dimension mismatch");
}

}  // namespace

KrylovBasis grow_krylov_basis(const CMat& a, const CVec& x, const Tolerance& tol) {
    check_dims(a, x);
    KrylovBasis basis;
    basis.generator = x;
    const Index n = a.rows();
    if (x.norm() <= tol.rank_tol) return basis;

    // Columns are normalized before the rank test; the span is unchanged and
    // large ||A||^t growth cannot swamp earlier vectors.
    CMat raw(n, n + 1);
    CMat scaled(n, n + 1);
    CVec current = x;
    int cols = 0;
    int rank = 0;
    while (cols <= n) {
        raw.col(cols) = current;
        const double norm = current.norm();
        scaled.col(cols) = norm > 0.0 ? CVec(current / norm) : current;
        ++cols;
        const int new_rank = numerical_rank(CMat(scaled.leftCols(cols)), tol);
        if (new_rank == rank) break;  // rank stopped increasing
        rank = new_rank;
        current = a * current;
    }
    basis.order = cols;
    basis.vectors = raw.leftCols(cols);
    basis.rank = rank;
    return basis;
}

int krylov_rank(const CMat& a, const CVec& x, const Tolerance& tol) {
    return grow_krylov_basis(a, x, tol).rank;
}

int krylov_rank(const Mat& a, const Vec& x, const Tolerance& tol) {
    return krylov_rank(CMat(a.cast<Complex>()), CVec(x.cast<Complex>()), tol);
}

Polynomial annihilator(const CMat& a, const CVec& x, const Tolerance& tol) {
    check_dims(a, x);
    if (x.norm() <= tol.rank_tol)
        throw std::invalid_argument("annihilator: x must be nonzero");

    const KrylovBasis basis = grow_krylov_basis(a, x, tol);
    const int k = basis.rank;
    // A^k x expressed in the span of the earlier powers; column scaling keeps
    // the least-squares system balanced.
    CMat lhs = basis.vectors.leftCols(k);
    CVec rhs = k < basis.order ? CVec(basis.vectors.col(k)) : CVec(a * basis.vectors.col(k - 1));
    Vec scales(k);
    for (int j = 0; j < k; ++j) {
        scales(j) = lhs.col(j).norm();
        if (scales(j) > 0.0) lhs.col(j) /= scales(j);
    }
    CVec solved = lhs.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(rhs);
    std::vector<Complex> coeffs(static_cast<size_t>(k) + 1, Complex(0.0));
    for (int j = 0; j < k; ++j)
        coeffs[static_cast<size_t>(j)] = -solved(j) / (scales(j) > 0.0 ? scales(j) : 1.0);
    coeffs.back() = Complex(1.0);
    Polynomial p{std::move(coeffs)};

    const double a_norm = operator_norm(a);
    const double bound =
        tol.rank_tol * x.norm() * std::max(1.0, std::pow(a_norm, static_cast<double>(k)));
    const double residual = eval_poly_on_operator(p, a, x).norm();
    if (residual > bound)
        throw NumericalDegeneracy("annihilator: Krylov system residual " +
                                  std::to_string(residual) + " exceeds bound " +
                                  std::to_string(bound));
    return p;
}

Polynomial annihilator(const Mat& a, const Vec& x, const Tolerance& tol) {
    return annihilator(CMat(a.cast<Complex>()), CVec(x.cast<Complex>()), tol);
}

Polynomial minimal_polynomial(const CMat& a, const Tolerance& tol) {
    if (a.rows() != a.cols())
        throw std::invalid_argument("minimal_polynomial: matrix must be square");
    const Index n = a.rows();
    // Krylov iteration on the vectorized matrix powers I, A, A^2, ...
    CMat big(n * n, n + 1);
    CMat scaled(n * n, n + 1);
    CMat power = CMat::Identity(n, n);
    int cols = 0;
    int rank = 0;
    while (cols <= n) {
        big.col(cols) = Eigen::Map<const CVec>(power.data(), n * n);
        const double norm = big.col(cols).norm();
        scaled.col(cols) = norm > 0.0 ? CVec(big.col(cols) / norm) : CVec(big.col(cols));
        ++cols;
        const int new_rank = numerical_rank(CMat(scaled.leftCols(cols)), tol);
        if (new_rank == rank) break;
        rank = new_rank;
        power = a * power;
    }
    const int k = rank;
    CMat lhs = big.leftCols(k);
    CVec rhs = big.col(k);
    Vec scales(k);
    for (int j = 0; j < k; ++j) {
        scales(j) = lhs.col(j).norm();
        if (scales(j) > 0.0) lhs.col(j) /= scales(j);
    }
    CVec solved = lhs.bdcSvd(Eigen::ComputeThinU | Eigen::ComputeThinV).solve(rhs);
    std::vector<Complex> coeffs(static_cast<size_t>(k) + 1, Complex(0.0));
    for (int j = 0; j < k; ++j)
        coeffs[static_cast<size_t>(j)] = -solved(j) / (scales(j) > 0.0 ? scales(j) : 1.0);
    coeffs.back() = Complex(1.0);
    return Polynomial{std::move(coeffs)};
}

Polynomial minimal_polynomial(const Mat& a, const Tolerance& tol) {
    return minimal_polynomial(CMat(a.cast<Complex>()), tol);
}

CVec eval_poly_on_operator(const Polynomial& p, const CMat& a, const CVec& x) {
    if (a.rows() != a.cols() || a.rows() != x.size())
        throw std::invalid_argument("eval_poly_on_operator: dimension mismatch");
    if (p.is_zero()) return CVec::Zero(x.size());
    CVec acc = p.leading_coefficient() * x;
    for (int k = p.degree() - 1; k >= 0; --k) acc = a * acc + p.coefficient(k) * x;
    return acc;
}

Vec eval_poly_on_operator(const Polynomial& p, const Mat& a, const Vec& x) {
    CVec r = eval_poly_on_operator(p, CMat(a.cast<Complex>()), CVec(x.cast<Complex>()));
    return r.real();
}

}  // namespace dynphase
