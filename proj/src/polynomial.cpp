#include "dynphase/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dynphase {

Polynomial::Polynomial(std::vector<Complex> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

void Polynomial::trim() {
    while (!coeffs_.empty() && coeffs_.back() == Complex(0.0)) coeffs_.pop_back();
}

Polynomial Polynomial::monomial(int k, Complex c) {
    if (k < 0) throw std::invalid_argument("Polynomial::monomial: negative exponent");
    std::vector<Complex> coeffs(static_cast<size_t>(k) + 1, Complex(0.0));
    coeffs.back() = c;
    return Polynomial(std::move(coeffs));
}

int Polynomial::degree() const {
    if (is_zero()) throw std::logic_error("Polynomial::degree: zero polynomial has no degree");
    return static_cast<int>(coeffs_.size()) - 1;
}

Complex Polynomial::leading_coefficient() const {
    if (is_zero()) return Complex(0.0);
    return coeffs_.back();
}

bool Polynomial::is_monic(double tol) const {
    return !is_zero() && std::abs(coeffs_.back() - Complex(1.0)) <= tol;
}

Polynomial Polynomial::monic() const {
    if (is_zero()) throw std::invalid_argument("Polynomial::monic: zero polynomial");
    std::vector<Complex> c = coeffs_;
    const Complex lead = c.back();
    for (auto& v : c) v /= lead;
    c.back() = Complex(1.0);
    return Polynomial(std::move(c));
}

Complex Polynomial::eval(Complex x) const {
    Complex acc(0.0);
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * x + *it;
    return acc;
}

Polynomial Polynomial::derivative() const {
    if (coeffs_.size() <= 1) return Polynomial();
    std::vector<Complex> d(coeffs_.size() - 1);
    for (size_t i = 1; i < coeffs_.size(); ++i)
        d[i - 1] = coeffs_[i] * static_cast<double>(i);
    return Polynomial(std::move(d));
}

int Polynomial::nonzero_count(double tol) const {
    int count = 0;
    for (const auto& c : coeffs_)
        if (std::abs(c) > tol) ++count;
    return count;
}

double Polynomial::l2_norm() const {
    double s = 0.0;
    for (const auto& c : coeffs_) s += std::norm(c);
    return std::sqrt(s);
}

double Polynomial::max_coefficient() const {
    double m = 0.0;
    for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
    return m;
}

Polynomial Polynomial::operator+(const Polynomial& rhs) const {
    std::vector<Complex> c(std::max(coeffs_.size(), rhs.coeffs_.size()), Complex(0.0));
    for (size_t i = 0; i < coeffs_.size(); ++i) c[i] += coeffs_[i];
    for (size_t i = 0; i < rhs.coeffs_.size(); ++i) c[i] += rhs.coeffs_[i];
    return Polynomial(std::move(c));
}

Polynomial Polynomial::operator-(const Polynomial& rhs) const {
    return *this + rhs * Complex(-1.0);
}

Polynomial Polynomial::operator*(const Polynomial& rhs) const {
    if (is_zero() || rhs.is_zero()) return Polynomial();
    std::vector<Complex> c(coeffs_.size() + rhs.coeffs_.size() - 1, Complex(0.0));
    for (size_t i = 0; i < coeffs_.size(); ++i)
        for (size_t j = 0; j < rhs.coeffs_.size(); ++j) c[i + j] += coeffs_[i] * rhs.coeffs_[j];
    return Polynomial(std::move(c));
}

Polynomial Polynomial::operator*(Complex scale) const {
    std::vector<Complex> c = coeffs_;
    for (auto& v : c) v *= scale;
    return Polynomial(std::move(c));
}

std::pair<Polynomial, Polynomial> Polynomial::divmod(const Polynomial& divisor) const {
    if (divisor.is_zero()) throw std::invalid_argument("Polynomial::divmod: division by zero");
    if (is_zero() || coeffs_.size() < divisor.coeffs_.size())
        return {Polynomial(), *this};
    std::vector<Complex> rem = coeffs_;
    const int dd = divisor.degree();
    std::vector<Complex> quot(rem.size() - static_cast<size_t>(dd), Complex(0.0));
    const Complex lead = divisor.coeffs_.back();
    for (int i = static_cast<int>(rem.size()) - 1; i >= dd; --i) {
        const Complex q = rem[static_cast<size_t>(i)] / lead;
        quot[static_cast<size_t>(i - dd)] = q;
        for (int j = 0; j < dd; ++j)
            rem[static_cast<size_t>(i - dd + j)] -= q * divisor.coeffs_[static_cast<size_t>(j)];
        rem[static_cast<size_t>(i)] = Complex(0.0);
    }
    return {Polynomial(std::move(quot)), Polynomial(std::move(rem))};
}

bool Polynomial::divisible_by(const Polynomial& divisor, double tol) const {
    const auto [q, r] = divmod(divisor);
    (void)q;
    const double scale = std::max(1.0, l2_norm());
    return r.l2_norm() <= tol * scale;
}

Polynomial Polynomial::cleaned(double tol) const {
    const double cutoff = tol * max_coefficient();
    std::vector<Complex> c = coeffs_;
    for (auto& v : c)
        if (std::abs(v) <= cutoff) v = Complex(0.0);
    return Polynomial(std::move(c));
}

std::string Polynomial::to_string() const {
    if (is_zero()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int k = degree(); k >= 0; --k) {
        const Complex c = coefficient(k);
        if (c == Complex(0.0)) continue;
        if (!first) os << " + ";
        first = false;
        if (c.imag() == 0.0)
            os << c.real();
        else
            os << "(" << c.real() << (c.imag() >= 0 ? "+" : "") << c.imag() << "i)";
        if (k > 0) os << "*x^" << k;
    }
    return os.str();
}

}  // namespace dynphase
