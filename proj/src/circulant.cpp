#include "dynphase/circulant.hpp"

#include <cmath>
#include <numeric>

#include "dynphase/rng.hpp"

namespace dynphase {

namespace {

void require_odd(Index n) {
    if (n < 3 || n % 2 == 0)
        throw std::invalid_argument("circulant: n must be odd and >= 3");
}

/// Inverse of the unnormalized transform: a_j = (1/n) sum_w a_hat(w) e^{2 pi i w j / n}.
CVec inverse_dft_unnormalized(const CVec& a_hat) {
    const Index n = a_hat.size();
    CVec a(n);
    for (Index j = 0; j < n; ++j) {
        Complex acc(0.0);
        for (Index w = 0; w < n; ++w) {
            const double angle = 2.0 * M_PI * static_cast<double>(w * j) / static_cast<double>(n);
            acc += a_hat(w) * Complex(std::cos(angle), std::sin(angle));
        }
        a(j) = acc / static_cast<double>(n);
    }
    return a;
}

CVec forward_dft_unnormalized(const Vec& a) {
    const Index n = a.size();
    CVec a_hat(n);
    for (Index w = 0; w < n; ++w) {
        Complex acc(0.0);
        for (Index j = 0; j < n; ++j) {
            const double angle = -2.0 * M_PI * static_cast<double>(w * j) / static_cast<double>(n);
            acc += a(j) * Complex(std::cos(angle), std::sin(angle));
        }
        a_hat(w) = acc;
    }
    return a_hat;
}

}  // namespace

CirculantKernel make_decreasing_kernel(Index n, const Vec& profile) {
    require_odd(n);
    const Index half = (n + 1) / 2;
    if (profile.size() != half)
        throw std::invalid_argument("make_decreasing_kernel: profile must have (n+1)/2 entries");
    for (Index i = 0; i < half; ++i) {
        if (!(profile(i) > 0.0))
            throw std::invalid_argument("make_decreasing_kernel: profile must be positive");
        if (i > 0 && !(profile(i) < profile(i - 1)))
            throw std::invalid_argument("make_decreasing_kernel: profile must be strictly decreasing");
    }

    CirculantKernel kernel;
    kernel.a_hat = CVec(n);
    kernel.a_hat(0) = profile(0);
    for (Index k = 1; k < half; ++k) {
        kernel.a_hat(k) = profile(k);
        kernel.a_hat(n - k) = profile(k);
    }
    const CVec a = inverse_dft_unnormalized(kernel.a_hat);
    if (a.imag().cwiseAbs().maxCoeff() > 1e-10 * profile(0))
        throw NumericalDegeneracy("make_decreasing_kernel: inverse transform is not real");
    kernel.a = a.real();
    kernel.symmetric = true;

    // Round trip: the forward transform must reproduce the mirrored profile.
    const CVec back = forward_dft_unnormalized(kernel.a);
    if ((back - kernel.a_hat).cwiseAbs().maxCoeff() > 1e-9 * profile(0))
        throw NumericalDegeneracy("make_decreasing_kernel: round-trip transform failed");
    return kernel;
}

bool coprime_criterion(const std::vector<int>& locations, Index n) {
    require_odd(n);
    if (locations.size() != 3)
        throw std::invalid_argument("coprime_criterion: exactly three residues expected");
    std::vector<long> residues;
    for (int i : locations) {
        long r = static_cast<long>(i) % static_cast<long>(n);
        if (r < 0) r += static_cast<long>(n);
        residues.push_back(r);
    }
    for (size_t a = 0; a < 3; ++a)
        for (size_t b = a + 1; b < 3; ++b) {
            if (residues[a] == residues[b])
                throw std::invalid_argument("coprime_criterion: residues must be distinct mod n");
            const long diff = std::labs(residues[a] - residues[b]);
            if (std::gcd(diff, static_cast<long>(n)) != 1) return false;
        }
    return true;
}

Vec circular_convolve(const Vec& kernel, const Vec& x) {
    const Index n = kernel.size();
    if (x.size() != n) throw std::invalid_argument("circular_convolve: dimension mismatch");
    Vec y = Vec::Zero(n);
    for (Index j = 0; j < n; ++j)
        for (Index k = 0; k < n; ++k) y(j) += kernel((j - k + n) % n) * x(k);
    return y;
}

CirculantSpectralData circulant_spectral_profile(const CirculantKernel& kernel) {
    const Index n = kernel.a.size();
    require_odd(n);
    if (!kernel.symmetric)
        throw std::invalid_argument("circulant_spectral_profile: symmetric kernel expected");
    const Index half = (n + 1) / 2;
    for (Index i = 0; i < half; ++i)
        for (Index j = i + 1; j < half; ++j)
            if (std::abs(kernel.a_hat(i) - kernel.a_hat(j)) <=
                1e-10 * std::max(1.0, std::abs(kernel.a_hat(0))))
                throw std::invalid_argument(
                    "circulant_spectral_profile: repeated transform values");

    CirculantSpectralData data{SpectralProfile{}, OperatorSpec::circulant(kernel.a), 0};
    data.profile = data.spec.spectral_profile();
    data.standard_basis_degree = static_cast<int>(half);
    return data;
}

RandomCirculant sample_random_circulant(Index n, std::uint64_t seed) {
    require_odd(n);
    RngStream stream(seed);
    CVec sigma(n);
    sigma(0) = Complex(stream.derive(0).sign(), 0.0);
    for (Index w = 1; w <= (n - 1) / 2; ++w) {
        const double theta = stream.derive(static_cast<std::uint64_t>(w)).uniform();
        sigma(w) = Complex(std::cos(2.0 * M_PI * theta), std::sin(2.0 * M_PI * theta));
        sigma(n - w) = std::conj(sigma(w));
    }

    // A = F* diag(sigma) F; realness follows from the conjugate symmetry and
    // is asserted by the spec constructor. The circulant kernel is column 0.
    const CVec a = inverse_dft_unnormalized(sigma) ;
    if (a.imag().cwiseAbs().maxCoeff() > 1e-10)
        throw NumericalDegeneracy("sample_random_circulant: kernel is not real");

    RandomCirculant result{RandomCirculantModel{n, seed, sigma}, OperatorSpec::circulant(a.real())};
    return result;
}

}  // namespace dynphase
