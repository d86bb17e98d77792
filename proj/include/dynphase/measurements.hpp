#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "dynphase/injectivity.hpp"
#include "dynphase/operator_spec.hpp"
#include "dynphase/types.hpp"

namespace dynphase {

/// Unsigned (squared) space-time samples y(t,i) = |<A^t f, phi_i>|^2 + e(t,i)
/// over the complete grid times x locations. Noise may push entries negative;
/// they are stored as produced because the solver residual uses the raw value.
struct MeasurementRecord {
    Index n = 0;
    int max_time = 0;              // L; times run 0..L
    std::vector<int> locations;    // functional identifiers
    double sigma = 0.0;
    std::uint64_t seed = 0;
    Mat y;                         // (L+1) x |I|
    std::optional<Mat> clean;      // noise-free squared samples

    double value(int t, int loc_slot) const { return y(t, loc_slot); }
};

/// Iterates f, A f, A^2 f, ... and records squared inner products against
/// every functional; Gaussian noise (sigma > 0) is drawn from a per-cell
/// stream keyed by (seed, t, i), so extending L preserves earlier cells.
MeasurementRecord simulate(const OperatorSpec& spec, const Vec& f, const FunctionalSet& phi,
                           int max_time, double sigma, std::uint64_t seed,
                           const std::vector<int>& location_ids = {});

/// Success cutoff for noisy runs: sum over cells of (clean - y)^2.
double noise_threshold(const MeasurementRecord& record);

/// Columnar text format: a header line with n, L, I, sigma, seed, then one
/// row per cell "t i y [clean]".
void write_measurements(std::ostream& os, const MeasurementRecord& record);
MeasurementRecord read_measurements(std::istream& is);

}  // namespace dynphase
