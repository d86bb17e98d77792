#pragma once

#include <cstdint>
#include <vector>

#include "dynphase/operator_spec.hpp"
#include "dynphase/types.hpp"

namespace dynphase {

/// Real circular-convolution kernel together with its (unnormalized) DFT.
struct CirculantKernel {
    Vec a;
    CVec a_hat;
    bool symmetric = false;
};

/// Builds the real symmetric kernel whose DFT equals the given positive,
/// strictly decreasing profile on {0..(n-1)/2} (mirrored onto the upper
/// half). n must be odd and >= 3; the construction is validated by a
/// round-trip transform.
CirculantKernel make_decreasing_kernel(Index n, const Vec& profile);

/// gcd(|i_k - i_j|, n) == 1 for all distinct pairs of the three residues.
bool coprime_criterion(const std::vector<int>& locations, Index n);

/// Direct O(n^2) circular convolution (reference implementation for tests
/// and forward checks).
Vec circular_convolve(const Vec& kernel, const Vec& x);

struct CirculantSpectralData {
    SpectralProfile profile;
    OperatorSpec spec;
    /// Annihilator degree of every standard-basis functional: (n+1)/2.
    int standard_basis_degree = 0;
};

/// Distinct eigenvalues a_hat(0..(n-1)/2), penthouse ranges {e_0} and
/// {e_k, e_{n-k}}, and the operator spec of the kernel. Requires the
/// decreasing-profile hypothesis (repeated eigenvalues are refused).
CirculantSpectralData circulant_spectral_profile(const CirculantKernel& kernel);

/// Unit-modulus spectrum with conjugate symmetry: sigma_0 = +-1,
/// sigma_w = exp(2 pi i theta_w) for the lower half, mirrored by conjugation.
struct RandomCirculantModel {
    Index n = 0;
    std::uint64_t seed = 0;
    CVec sigma;
};

struct RandomCirculant {
    RandomCirculantModel model;
    OperatorSpec spec;
};

/// Samples the model and assembles the real matrix F* diag(sigma) F;
/// deterministic per seed.
RandomCirculant sample_random_circulant(Index n, std::uint64_t seed);

}  // namespace dynphase
