#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dynphase {

using Complex = std::complex<double>;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;
using Index = Eigen::Index;

/// Shared numerical tolerances: a relative singular-value cutoff for rank
/// decisions and a relative cutoff for declaring square submatrices singular.
struct Tolerance {
    double rank_tol = 1e-9;
    double singularity_tol = 1e-8;

    void validate() const {
        if (!(rank_tol > 0.0 && rank_tol < 1.0))
            throw std::invalid_argument("Tolerance: rank_tol must lie in (0,1)");
        if (!(singularity_tol > 0.0 && singularity_tol < 1.0))
            throw std::invalid_argument("Tolerance: singularity_tol must lie in (0,1)");
    }
};

/// Raised when a computation cannot be completed at the requested tolerance
/// (e.g. an ill-conditioned Krylov system whose residual exceeds its bound).
class NumericalDegeneracy : public std::runtime_error {
  public:
    explicit NumericalDegeneracy(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when an exhaustive enumeration would exceed its configured work cap.
class EnumerationLimit : public std::runtime_error {
  public:
    explicit EnumerationLimit(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace dynphase
