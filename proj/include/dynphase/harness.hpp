#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dynphase/circulant.hpp"
#include "dynphase/injectivity.hpp"
#include "dynphase/solver.hpp"
#include "dynphase/types.hpp"

namespace dynphase {

/// Operator source for an experiment: a decreasing symmetric kernel profile,
/// a seeded random circulant, or an explicit factorization file.
struct OperatorConfig {
    std::string kind;  // "decreasing-kernel" | "random-circulant" | "file"
    Index n = 0;
    Vec profile;
    std::uint64_t seed = 0;
    std::string path;
};

struct ExperimentConfig {
    std::string schema = "dynphase-config/1";
    std::string experiment;  // "certify" | "reconstruct" | "sweep" | "simulate"
    OperatorConfig op;
    std::vector<std::vector<int>> location_sets;
    int max_time = -1;  // -1 derives 2n-2
    double sigma = 0.0;
    int trials = 100;
    std::uint64_t seed = 0;
    double signal_range = -1.0;  // -1 uses the solver radius
    SolveConfig solver;
    std::string out_dir;
    bool attach_certificates = true;

    void validate() const;
};

ExperimentConfig load_config(std::istream& is);
ExperimentConfig load_config_file(const std::string& path);
void save_config(std::ostream& os, const ExperimentConfig& config);

/// Builds the operator named by the config; for "decreasing-kernel" the
/// kernel is returned as well (it feeds the coprimality shortcut).
struct BuiltOperator {
    OperatorSpec spec;
    std::optional<CirculantKernel> kernel;
};
BuiltOperator build_operator(const OperatorConfig& op);

void save_operator(std::ostream& os, const OperatorSpec& spec);
OperatorSpec load_operator(std::istream& is);

/// Ground-truth signal with entries uniform in [-range, range].
Vec make_signal(Index n, double range, std::uint64_t seed);

/// Standard-basis functionals at the given residues.
FunctionalSet standard_basis_functionals(Index n, const std::vector<int>& locations);

struct TrialRow {
    int trial = 0;
    std::uint64_t seed = 0;
    std::vector<int> locations;
    double final_objective = 0.0;
    double err = -1.0;
    bool success = false;
};

struct LocationAggregate {
    std::vector<int> locations;
    int trials = 0;
    int successes = 0;
    double success_probability = 0.0;
    double mean_err_success = 0.0;  // NaN when no trial succeeded
    double threshold = 0.0;
};

struct CertificateRow {
    std::vector<int> locations;
    Certificate certificate;
    std::optional<bool> coprime;  // circulant shortcut, |I| = 3
};

struct ExperimentReport {
    Index n = 0;
    std::vector<TrialRow> trials;
    std::vector<LocationAggregate> aggregates;
    std::vector<CertificateRow> certificates;
    /// Objective/error decay of the best run per location set.
    std::vector<std::pair<std::vector<int>, SolveResult>> traces;
};

/// Certificates for every configured location set, with the coprimality
/// criterion cross-checked on the three-residue circulant path.
ExperimentReport run_certify(const ExperimentConfig& config);

/// Fixed ground truth and measurements per location set; `trials`
/// independent random starts each, rows recorded for every trial. Under
/// noise the success cutoff is the measured noise threshold.
ExperimentReport run_reconstruct(const ExperimentConfig& config);

/// run_reconstruct over the location-set list plus the success-probability /
/// mean-error curve.
ExperimentReport run_sweep(const ExperimentConfig& config);

/// CSV emission. Columns: trials(trial,seed,I,final_objective,err,success);
/// curve(card_I,P_I,mean_err); trace(iter,log10_obj,log10_err).
void write_trials_csv(std::ostream& os, const ExperimentReport& report);
void write_curve_csv(std::ostream& os, const ExperimentReport& report);
void write_trace_csv(std::ostream& os, const SolveResult& result);
void write_certificates_json(std::ostream& os, const ExperimentReport& report);

/// Writes trials.csv, curve.csv, certificates.json and per-set trace files
/// under dir (created if missing).
void emit_report(const ExperimentReport& report, const ExperimentConfig& config,
                 const std::string& dir);

}  // namespace dynphase
