#include "dynphase/solver.hpp"

#include <cmath>

#include "dynphase/rng.hpp"

namespace dynphase {

namespace {

Vec clamp_to_box(const Vec& g, double radius) {
    return g.cwiseMax(-radius).cwiseMin(radius);
}

/// Inner products s(t,i) for all cells, sharing the forward iteration.
Mat forward_samples(const Vec& g, const MeasurementRecord& record, const OperatorSpec& spec,
                    const FunctionalSet& phi) {
    const int m = static_cast<int>(phi.vectors.size());
    Mat s(record.max_time + 1, m);
    Vec state = g;
    for (int t = 0; t <= record.max_time; ++t) {
        for (int i = 0; i < m; ++i) s(t, i) = state.dot(phi.vectors[static_cast<size_t>(i)]);
        if (t < record.max_time) state = spec.matrix() * state;
    }
    return s;
}

void check_shapes(const Vec& g, const MeasurementRecord& record, const OperatorSpec& spec,
                  const FunctionalSet& phi) {
    if (g.size() != spec.n()) throw std::invalid_argument("solver: dimension mismatch");
    phi.validate(spec.n());
    if (record.y.rows() != record.max_time + 1 ||
        record.y.cols() != static_cast<Index>(phi.vectors.size()))
        throw std::invalid_argument("solver: record does not match the functional set");
}

struct DescentOutcome {
    Vec g;
    double objective = 0.0;
    std::vector<double> trace;
    std::vector<double> err_trace;
    int iterations = 0;
};

DescentOutcome descend(Vec g, const MeasurementRecord& record, const OperatorSpec& spec,
                       const FunctionalSet& phi, const SolveConfig& config,
                       const std::optional<Vec>& ground_truth) {
    DescentOutcome out;
    double value = objective(g, record, spec, phi);
    out.trace.push_back(value);
    if (ground_truth) out.err_trace.push_back(recovery_error(*ground_truth, g));

    Vec prev_g;
    Vec prev_grad;
    bool have_prev = false;
    for (int iter = 0; iter < config.max_iters; ++iter) {
        const Vec grad = gradient(g, record, spec, phi);
        const double pg_norm = (g - clamp_to_box(g - grad, config.radius)).norm();
        if (pg_norm < config.grad_tol) break;

        // Spectral trial step from the last accepted move; the backtracking
        // below keeps it safe.
        double step = config.initial_step;
        if (config.spectral_steps && have_prev) {
            const Vec s = g - prev_g;
            const Vec y = grad - prev_grad;
            const double sy = s.dot(y);
            if (sy > 1e-300) step = std::clamp(s.dot(s) / sy, 1e-8, 1e8);
        }
        prev_g = g;
        prev_grad = grad;
        have_prev = true;

        bool accepted = false;
        for (int bt = 0; bt <= config.max_backtracks; ++bt) {
            const Vec candidate = clamp_to_box(g - step * grad, config.radius);
            const double cand_value = objective(candidate, record, spec, phi);
            const double directional = grad.dot(candidate - g);  // <= 0
            if (cand_value <= value + config.sufficient_decrease * directional &&
                cand_value <= value) {
                g = candidate;
                value = cand_value;
                accepted = true;
                break;
            }
            step *= config.backtrack_factor;
        }
        out.iterations = iter + 1;
        if (!accepted) break;  // no admissible step at the smallest scale
        out.trace.push_back(value);
        if (ground_truth) out.err_trace.push_back(recovery_error(*ground_truth, g));
    }
    out.g = g;
    out.objective = value;
    return out;
}

}  // namespace

void SolveConfig::validate() const {
    if (!(radius > 0.0)) throw std::invalid_argument("SolveConfig: radius must be positive");
    if (!(objective_threshold > 0.0))
        throw std::invalid_argument("SolveConfig: threshold must be positive");
    if (restarts < 1) throw std::invalid_argument("SolveConfig: restarts must be >= 1");
    if (max_iters < 1) throw std::invalid_argument("SolveConfig: max_iters must be >= 1");
}

double objective(const Vec& g, const MeasurementRecord& record, const OperatorSpec& spec,
                 const FunctionalSet& phi) {
    check_shapes(g, record, spec, phi);
    const Mat s = forward_samples(g, record, spec, phi);
    return (s.array().square() - record.y.array()).square().sum();
}

Vec gradient(const Vec& g, const MeasurementRecord& record, const OperatorSpec& spec,
             const FunctionalSet& phi) {
    check_shapes(g, record, spec, phi);
    const int m = static_cast<int>(phi.vectors.size());
    const Mat s = forward_samples(g, record, spec, phi);

    // grad = sum_t (A^T)^t w_t with w_t = sum_i 4 (s^2 - y) s phi_i,
    // rolled up backwards (Horner in A^T).
    const Mat at = spec.matrix().transpose();
    Vec acc = Vec::Zero(g.size());
    for (int t = record.max_time; t >= 0; --t) {
        Vec w = Vec::Zero(g.size());
        for (int i = 0; i < m; ++i) {
            const double si = s(t, i);
            const double residual = si * si - record.y(t, i);
            w += (4.0 * residual * si) * phi.vectors[static_cast<size_t>(i)];
        }
        acc = (t == record.max_time) ? w : Vec(at * acc + w);
    }
    return acc;
}

SolveResult solve(const MeasurementRecord& record, const OperatorSpec& spec,
                  const FunctionalSet& phi, const SolveConfig& config,
                  const std::optional<Vec>& ground_truth) {
    config.validate();
    const RngStream base(config.seed);

    SolveResult best;
    bool have_best = false;
    for (int restart = 0; restart < config.restarts; ++restart) {
        RngStream stream = base.derive(static_cast<std::uint64_t>(restart));
        Vec start(spec.n());
        for (Index j = 0; j < spec.n(); ++j)
            start(j) = stream.uniform(-config.radius, config.radius);

        DescentOutcome out = descend(start, record, spec, phi, config, ground_truth);
        if (!have_best || out.objective < best.final_objective) {
            best.g = out.g;
            best.final_objective = out.objective;
            best.objective_trace = std::move(out.trace);
            best.err_trace = std::move(out.err_trace);
            best.restart_index = restart;
            best.iterations = out.iterations;
            have_best = true;
        }
    }
    best.success = best.final_objective < config.objective_threshold;
    if (ground_truth) best.err = recovery_error(*ground_truth, best.g);
    return best;
}

double recovery_error(const Vec& f, const Vec& f_rec) {
    const double norm = f.norm();
    if (norm == 0.0) throw std::invalid_argument("recovery_error: ground truth must be nonzero");
    if (f_rec.size() != f.size())
        throw std::invalid_argument("recovery_error: dimension mismatch");
    return std::min((f - f_rec).norm(), (f + f_rec).norm()) / norm;
}

}  // namespace dynphase
