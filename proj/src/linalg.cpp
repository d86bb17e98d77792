#include "dynphase/linalg.hpp"

#include <Eigen/SVD>

namespace dynphase {

int numerical_rank(const CMat& m, const Tolerance& tol) {
    if (m.rows() == 0 || m.cols() == 0) return 0;
    Eigen::JacobiSVD<CMat> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) <= 0.0) return 0;
    int rank = 0;
    for (Index i = 0; i < sv.size(); ++i)
        if (sv(i) > tol.rank_tol * sv(0)) ++rank;
    return rank;
}

int numerical_rank(const Mat& m, const Tolerance& tol) {
    return numerical_rank(CMat(m.cast<Complex>()), tol);
}

double operator_norm(const CMat& m) {
    if (m.rows() == 0 || m.cols() == 0) return 0.0;
    Eigen::JacobiSVD<CMat> svd(m);
    return svd.singularValues()(0);
}

CVec least_singular_vector(const CMat& m) {
    Eigen::JacobiSVD<CMat> svd(m, Eigen::ComputeFullV);
    return svd.matrixV().col(m.cols() - 1);
}

Vec orthogonal_complement_vector(const Mat& m, const Tolerance& tol) {
    const Index n = m.rows();
    if (m.cols() == 0) {
        Vec e0 = Vec::Zero(n);
        e0(0) = 1.0;
        return e0;
    }
    Eigen::JacobiSVD<Mat> svd(m, Eigen::ComputeFullU);
    const auto& sv = svd.singularValues();
    int rank = 0;
    for (Index i = 0; i < sv.size(); ++i)
        if (sv(0) > 0.0 && sv(i) > tol.rank_tol * sv(0)) ++rank;
    if (rank >= n) throw std::invalid_argument("orthogonal_complement_vector: columns span the space");
    return svd.matrixU().col(n - 1);
}

double singular_value_ratio(const CMat& m) {
    Eigen::JacobiSVD<CMat> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0 || sv(0) <= 0.0) return 0.0;
    return sv(sv.size() - 1) / sv(0);
}

double equilibrated_singular_ratio(const CMat& m) {
    CMat scaled = m;
    for (Index i = 0; i < scaled.rows(); ++i) {
        const double norm = scaled.row(i).norm();
        if (norm == 0.0) return 0.0;
        scaled.row(i) /= norm;
    }
    return singular_value_ratio(scaled);
}

}  // namespace dynphase
