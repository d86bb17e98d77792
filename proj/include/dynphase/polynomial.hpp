#pragma once

#include <utility>
#include <vector>

#include "dynphase/types.hpp"

namespace dynphase {

/**
 * Univariate polynomial with complex coefficients, stored lowest degree
 * first. The zero polynomial has an empty coefficient vector; any other
 * polynomial keeps a nonzero leading coefficient.
 */
class Polynomial {
  public:
    Polynomial() = default;

    /// Builds from coefficients (index l = coefficient of x^l), trimming
    /// exactly-zero leading terms.
    explicit Polynomial(std::vector<Complex> coeffs);

    static Polynomial zero() { return Polynomial(); }
    static Polynomial constant(Complex c) { return Polynomial({c}); }
    /// c * x^k
    static Polynomial monomial(int k, Complex c = Complex(1.0));
    /// x - root
    static Polynomial linear_factor(Complex root) { return Polynomial({-root, Complex(1.0)}); }

    bool is_zero() const { return coeffs_.empty(); }
    /// Degree of a nonzero polynomial; throws for the zero polynomial, which
    /// carries the distinguished "ZERO" state instead of a degree.
    int degree() const;
    Complex leading_coefficient() const;
    Complex coefficient(int k) const {
        return k >= 0 && k < static_cast<int>(coeffs_.size()) ? coeffs_[static_cast<size_t>(k)]
                                                              : Complex(0.0);
    }
    const std::vector<Complex>& coefficients() const { return coeffs_; }

    bool is_monic(double tol = 1e-12) const;
    /// Scales so the leading coefficient is exactly 1.
    Polynomial monic() const;

    Complex eval(Complex x) const;
    Polynomial derivative() const;

    int nonzero_count(double tol = 0.0) const;
    double l2_norm() const;
    /// Maximum coefficient magnitude (0 for the zero polynomial).
    double max_coefficient() const;

    Polynomial operator+(const Polynomial& rhs) const;
    Polynomial operator-(const Polynomial& rhs) const;
    Polynomial operator*(const Polynomial& rhs) const;
    Polynomial operator*(Complex scale) const;

    /// Euclidean division: returns (quotient, remainder) with
    /// *this == quotient * divisor + remainder and deg remainder < deg divisor.
    std::pair<Polynomial, Polynomial> divmod(const Polynomial& divisor) const;

    /// True when the remainder of *this / divisor is below tol relative to
    /// the coefficient scale of *this.
    bool divisible_by(const Polynomial& divisor, double tol = 1e-8) const;

    /// Drops coefficients below tol * max|coeff| and re-trims the degree.
    Polynomial cleaned(double tol) const;

    std::string to_string() const;

  private:
    void trim();

    std::vector<Complex> coeffs_;
};

}  // namespace dynphase
