#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dynphase/measurements.hpp"
#include "dynphase/types.hpp"

namespace dynphase {

/// Search box, step rule, stopping parameters and restart policy for the
/// nonconvex least-squares reconstruction.
struct SolveConfig {
    double radius = 1.0;               // ||g||_inf <= radius
    int max_iters = 5000;
    double initial_step = 1.0;
    double backtrack_factor = 0.5;
    double sufficient_decrease = 1e-4;
    int max_backtracks = 200;
    double grad_tol = 1e-10;           // projected-gradient stopping norm
    double objective_threshold = 1e-8; // success cutoff
    int restarts = 1;
    std::uint64_t seed = 0;
    /// Barzilai-Borwein trial step per iteration (safeguarded by the same
    /// backtracking); plain gradient descent stalls on these quartics.
    bool spectral_steps = true;

    void validate() const;
};

struct SolveResult {
    Vec g;
    double final_objective = 0.0;
    std::vector<double> objective_trace;  // accepted iterates, starting value first
    std::vector<double> err_trace;        // per-iterate recovery error (ground truth given)
    double err = -1.0;                    // relative recovery error; -1 without ground truth
    bool success = false;
    int restart_index = 0;
    int iterations = 0;
};

/// sum over cells of (|<A^t g, phi_i>|^2 - y(t,i))^2.
double objective(const Vec& g, const MeasurementRecord& record, const OperatorSpec& spec,
                 const FunctionalSet& phi);

/// Exact gradient: sum 4 (s^2 - y) s (A^T)^t phi_i with s = <A^t g, phi_i>,
/// accumulated backwards so (A^T)^t never gets formed.
Vec gradient(const Vec& g, const MeasurementRecord& record, const OperatorSpec& spec,
             const FunctionalSet& phi);

/// Projected gradient descent with Armijo backtracking from `restarts`
/// uniform starts in the box; returns the lowest-final-objective run (ties
/// to the lower restart index). Non-convergence is a non-success result.
SolveResult solve(const MeasurementRecord& record, const OperatorSpec& spec,
                  const FunctionalSet& phi, const SolveConfig& config,
                  const std::optional<Vec>& ground_truth = std::nullopt);

/// min(||f - rec||, ||f + rec||) / ||f||, the sign-blind relative error.
double recovery_error(const Vec& f, const Vec& f_rec);

}  // namespace dynphase
