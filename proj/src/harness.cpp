#include "dynphase/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "dynphase/rng.hpp"

namespace dynphase {

namespace {

using nlohmann::json;

std::string format_double(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::string join_locations(const std::vector<int>& locations) {
    std::ostringstream os;
    for (size_t i = 0; i < locations.size(); ++i) os << (i ? ";" : "") << locations[i];
    return os.str();
}

json complex_matrix_to_json(const CMat& m) {
    json re = json::array();
    json im = json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        json re_row = json::array();
        json im_row = json::array();
        for (Index c = 0; c < m.cols(); ++c) {
            re_row.push_back(m(r, c).real());
            im_row.push_back(m(r, c).imag());
        }
        re.push_back(std::move(re_row));
        im.push_back(std::move(im_row));
    }
    return json{{"re", re}, {"im", im}};
}

CMat complex_matrix_from_json(const json& j) {
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    const Index rows = static_cast<Index>(re.size());
    const Index cols = rows > 0 ? static_cast<Index>(re[0].size()) : 0;
    CMat m(rows, cols);
    for (Index r = 0; r < rows; ++r)
        for (Index c = 0; c < cols; ++c)
            m(r, c) = Complex(re[static_cast<size_t>(r)][static_cast<size_t>(c)].get<double>(),
                              im[static_cast<size_t>(r)][static_cast<size_t>(c)].get<double>());
    return m;
}

double log10_floored(double v) { return std::log10(std::max(v, 1e-300)); }

json certificate_to_json(const CertificateRow& row) {
    const Certificate& cert = row.certificate;
    json j;
    j["I"] = row.locations;
    j["verdict"] = to_string(cert.verdict);
    j["route"] = cert.sufficiency_route;
    j["locally_complementary"] = cert.locally_complementary;
    j["annihilator_degrees"] = cert.annihilator_degrees;
    j["time_budgets"] = cert.time_budgets;
    j["induced_family_size"] = cert.induced_family_size;
    j["reasons"] = cert.reasons;
    if (cert.lambda_totally_full_spark.has_value())
        j["lambda_totally_full_spark"] = *cert.lambda_totally_full_spark;
    if (cert.iteration_regularity.has_value())
        j["iteration_regular"] = *cert.iteration_regularity;
    if (cert.lc_witness.has_value())
        j["witness_partition"] = json{{"first", cert.lc_witness->first},
                                      {"second", cert.lc_witness->second}};
    if (row.coprime.has_value()) {
        j["coprime_criterion"] = *row.coprime;
        j["coprime_agrees_with_certificate"] = (*row.coprime == cert.guaranteed());
    }
    return j;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (schema != "dynphase-config/1")
        throw std::invalid_argument("ExperimentConfig: unknown schema tag");
    if (experiment != "certify" && experiment != "reconstruct" && experiment != "sweep" &&
        experiment != "simulate")
        throw std::invalid_argument("ExperimentConfig: unknown experiment kind");
    if (location_sets.empty())
        throw std::invalid_argument("ExperimentConfig: at least one location set expected");
    if (trials < 0) throw std::invalid_argument("ExperimentConfig: negative trial count");
    if (sigma < 0.0) throw std::invalid_argument("ExperimentConfig: negative noise level");
}

ExperimentConfig load_config(std::istream& is) {
    json j;
    is >> j;
    ExperimentConfig config;
    config.schema = j.value("schema", std::string{});
    config.experiment = j.at("experiment").get<std::string>();
    const json& op = j.at("operator");
    config.op.kind = op.at("kind").get<std::string>();
    config.op.n = op.value("n", 0);
    if (op.contains("profile")) {
        const auto prof = op["profile"].get<std::vector<double>>();
        config.op.profile = Eigen::Map<const Vec>(prof.data(), static_cast<Index>(prof.size()));
    }
    config.op.seed = op.value("seed", 0ULL);
    config.op.path = op.value("path", std::string{});
    for (const auto& set : j.at("locations"))
        config.location_sets.push_back(set.get<std::vector<int>>());
    config.max_time = j.value("L", -1);
    config.sigma = j.value("sigma", 0.0);
    config.trials = j.value("trials", 100);
    config.seed = j.value("seed", 0ULL);
    config.signal_range = j.value("signal_range", -1.0);
    config.out_dir = j.value("out_dir", std::string{});
    config.attach_certificates = j.value("certify", true);
    if (j.contains("solver")) {
        const json& s = j["solver"];
        config.solver.radius = s.value("radius", config.solver.radius);
        config.solver.max_iters = s.value("max_iters", config.solver.max_iters);
        config.solver.initial_step = s.value("initial_step", config.solver.initial_step);
        config.solver.backtrack_factor = s.value("backtrack_factor", config.solver.backtrack_factor);
        config.solver.sufficient_decrease =
            s.value("sufficient_decrease", config.solver.sufficient_decrease);
        config.solver.max_backtracks = s.value("max_backtracks", config.solver.max_backtracks);
        config.solver.grad_tol = s.value("grad_tol", config.solver.grad_tol);
        config.solver.objective_threshold = s.value("threshold", config.solver.objective_threshold);
        config.solver.restarts = s.value("restarts", config.solver.restarts);
        config.solver.spectral_steps = s.value("spectral_steps", config.solver.spectral_steps);
    }
    config.validate();
    return config;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("load_config_file: cannot open " + path);
    return load_config(is);
}

void save_config(std::ostream& os, const ExperimentConfig& config) {
    json j;
    j["schema"] = config.schema;
    j["experiment"] = config.experiment;
    json op;
    op["kind"] = config.op.kind;
    if (config.op.n > 0) op["n"] = config.op.n;
    if (config.op.profile.size() > 0)
        op["profile"] = std::vector<double>(config.op.profile.data(),
                                            config.op.profile.data() + config.op.profile.size());
    if (config.op.kind == "random-circulant") op["seed"] = config.op.seed;
    if (!config.op.path.empty()) op["path"] = config.op.path;
    j["operator"] = op;
    j["locations"] = config.location_sets;
    j["L"] = config.max_time;
    j["sigma"] = config.sigma;
    j["trials"] = config.trials;
    j["seed"] = config.seed;
    j["signal_range"] = config.signal_range;
    j["out_dir"] = config.out_dir;
    j["certify"] = config.attach_certificates;
    j["solver"] = json{{"radius", config.solver.radius},
                       {"max_iters", config.solver.max_iters},
                       {"initial_step", config.solver.initial_step},
                       {"backtrack_factor", config.solver.backtrack_factor},
                       {"sufficient_decrease", config.solver.sufficient_decrease},
                       {"max_backtracks", config.solver.max_backtracks},
                       {"grad_tol", config.solver.grad_tol},
                       {"threshold", config.solver.objective_threshold},
                       {"restarts", config.solver.restarts},
                       {"spectral_steps", config.solver.spectral_steps}};
    os << j.dump(2) << "\n";
}

BuiltOperator build_operator(const OperatorConfig& op) {
    if (op.kind == "decreasing-kernel") {
        CirculantKernel kernel = make_decreasing_kernel(op.n, op.profile);
        OperatorSpec spec = OperatorSpec::circulant(kernel.a);
        return {std::move(spec), std::move(kernel)};
    }
    if (op.kind == "random-circulant") {
        RandomCirculant rc = sample_random_circulant(op.n, op.seed);
        return {std::move(rc.spec), std::nullopt};
    }
    if (op.kind == "file") {
        std::ifstream is(op.path);
        if (!is) throw std::invalid_argument("build_operator: cannot open " + op.path);
        return {load_operator(is), std::nullopt};
    }
    throw std::invalid_argument("build_operator: unknown operator kind '" + op.kind + "'");
}

void save_operator(std::ostream& os, const OperatorSpec& spec) {
    json j;
    j["schema"] = "dynphase-operator/1";
    switch (spec.kind()) {
        case OperatorSpec::Kind::Circulant: {
            j["kind"] = "circulant";
            const Vec& a = spec.kernel();
            j["kernel"] = std::vector<double>(a.data(), a.data() + a.size());
            break;
        }
        case OperatorSpec::Kind::Diagonalizable: {
            j["kind"] = "diagonalizable";
            j["B"] = complex_matrix_to_json(spec.similarity());
            j["eigenvalues"] = complex_matrix_to_json(CMat(spec.jordan_matrix().diagonal()));
            break;
        }
        case OperatorSpec::Kind::Jordan: {
            j["kind"] = "jordan";
            j["B"] = complex_matrix_to_json(spec.similarity());
            json groups = json::array();
            for (const auto& g : spec.eigenvalue_groups())
                groups.push_back(json{{"re", g.value.real()},
                                      {"im", g.value.imag()},
                                      {"sizes", g.block_sizes}});
            j["groups"] = groups;
            break;
        }
    }
    os << j.dump(2) << "\n";
}

OperatorSpec load_operator(std::istream& is) {
    json j;
    is >> j;
    if (j.value("schema", std::string{}) != "dynphase-operator/1")
        throw std::invalid_argument("load_operator: unknown schema tag");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "circulant") {
        const auto k = j.at("kernel").get<std::vector<double>>();
        return OperatorSpec::circulant(
            Eigen::Map<const Vec>(k.data(), static_cast<Index>(k.size())));
    }
    if (kind == "diagonalizable") {
        const CMat b = complex_matrix_from_json(j.at("B"));
        const CMat eig = complex_matrix_from_json(j.at("eigenvalues"));
        return OperatorSpec::diagonalizable(b, CVec(eig.col(0)));
    }
    if (kind == "jordan") {
        const CMat b = complex_matrix_from_json(j.at("B"));
        std::vector<EigenvalueGroup> groups;
        for (const auto& g : j.at("groups")) {
            EigenvalueGroup group;
            group.value = Complex(g.at("re").get<double>(), g.at("im").get<double>());
            group.block_sizes = g.at("sizes").get<std::vector<int>>();
            groups.push_back(std::move(group));
        }
        return OperatorSpec::jordan(b, groups);
    }
    throw std::invalid_argument("load_operator: unknown kind '" + kind + "'");
}

Vec make_signal(Index n, double range, std::uint64_t seed) {
    RngStream stream = RngStream(seed).derive(0x5164a1ULL);
    Vec f(n);
    for (Index i = 0; i < n; ++i) f(i) = stream.uniform(-range, range);
    return f;
}

FunctionalSet standard_basis_functionals(Index n, const std::vector<int>& locations) {
    FunctionalSet phi;
    for (int loc : locations) {
        if (loc < 0 || loc >= n)
            throw std::invalid_argument("standard_basis_functionals: location out of range");
        Vec e = Vec::Zero(n);
        e(loc) = 1.0;
        phi.vectors.push_back(std::move(e));
    }
    return phi;
}

ExperimentReport run_certify(const ExperimentConfig& config) {
    config.validate();
    BuiltOperator built = build_operator(config.op);
    ExperimentReport report;
    report.n = built.spec.n();
    const Tolerance tol;
    for (const auto& locations : config.location_sets) {
        CertificateRow row;
        row.locations = locations;
        const FunctionalSet phi = standard_basis_functionals(built.spec.n(), locations);
        row.certificate = certify(built.spec, phi, tol);
        if (built.kernel.has_value() && locations.size() == 3)
            row.coprime = coprime_criterion(locations, built.spec.n());
        report.certificates.push_back(std::move(row));
    }
    return report;
}

namespace {

/// Reconstruction batch for one location set: shared measurements, per-trial
/// independent starts. Trials are distributed over a small worker pool;
/// per-trial seeds depend only on (config seed, set index, trial), so the
/// merged rows are schedule-independent.
void run_location_batch(const ExperimentConfig& config, const OperatorSpec& spec,
                        int set_index, const std::vector<int>& locations,
                        ExperimentReport& report) {
    const double range = config.signal_range > 0.0 ? config.signal_range : config.solver.radius;
    const Vec f = make_signal(spec.n(), range, config.seed);
    const FunctionalSet phi = standard_basis_functionals(spec.n(), locations);
    const int max_time = config.max_time >= 0 ? config.max_time
                                              : 2 * static_cast<int>(spec.n()) - 2;
    const MeasurementRecord record =
        simulate(spec, f, phi, max_time, config.sigma, config.seed, locations);

    double threshold = config.solver.objective_threshold;
    if (config.sigma > 0.0) threshold = noise_threshold(record);

    SolveConfig solver = config.solver;
    solver.objective_threshold = threshold;
    solver.restarts = 1;

    std::vector<SolveResult> results(static_cast<size_t>(config.trials));
    const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
    std::vector<std::future<void>> futures;
    std::atomic<int> next{0};
    for (unsigned w = 0; w < workers; ++w) {
        futures.push_back(std::async(std::launch::async, [&]() {
            for (int trial = next.fetch_add(1); trial < config.trials;
                 trial = next.fetch_add(1)) {
                SolveConfig per_trial = solver;
                per_trial.seed = RngStream(config.seed)
                                     .derive(static_cast<std::uint64_t>(set_index),
                                             static_cast<std::uint64_t>(trial))
                                     .next_u64();
                results[static_cast<size_t>(trial)] =
                    solve(record, spec, phi, per_trial, f);
            }
        }));
    }
    for (auto& fut : futures) fut.get();

    LocationAggregate agg;
    agg.locations = locations;
    agg.trials = config.trials;
    agg.threshold = threshold;
    double err_sum = 0.0;
    int best = -1;
    for (int trial = 0; trial < config.trials; ++trial) {
        const SolveResult& res = results[static_cast<size_t>(trial)];
        TrialRow row;
        row.trial = trial;
        row.seed = RngStream(config.seed)
                       .derive(static_cast<std::uint64_t>(set_index),
                               static_cast<std::uint64_t>(trial))
                       .next_u64();
        row.locations = locations;
        row.final_objective = res.final_objective;
        row.err = res.err;
        row.success = res.success;
        report.trials.push_back(std::move(row));
        if (res.success) {
            ++agg.successes;
            err_sum += res.err;
        }
        if (best < 0 || res.final_objective <
                            results[static_cast<size_t>(best)].final_objective)
            best = trial;
    }
    agg.success_probability =
        config.trials > 0 ? static_cast<double>(agg.successes) / config.trials
                          : std::numeric_limits<double>::quiet_NaN();
    agg.mean_err_success = agg.successes > 0
                               ? err_sum / agg.successes
                               : std::numeric_limits<double>::quiet_NaN();
    report.aggregates.push_back(std::move(agg));
    if (best >= 0)
        report.traces.emplace_back(locations, results[static_cast<size_t>(best)]);

    if (config.attach_certificates) {
        CertificateRow crow;
        crow.locations = locations;
        crow.certificate = certify(spec, phi, Tolerance{});
        report.certificates.push_back(std::move(crow));
    }
}

}  // namespace

ExperimentReport run_reconstruct(const ExperimentConfig& config) {
    config.validate();
    BuiltOperator built = build_operator(config.op);
    ExperimentReport report;
    report.n = built.spec.n();
    for (size_t s = 0; s < config.location_sets.size(); ++s)
        run_location_batch(config, built.spec, static_cast<int>(s), config.location_sets[s],
                           report);
    return report;
}

ExperimentReport run_sweep(const ExperimentConfig& config) {
    ExperimentConfig sweep = config;
    sweep.attach_certificates = false;  // curves only; certificates via run_certify
    return run_reconstruct(sweep);
}

void write_trials_csv(std::ostream& os, const ExperimentReport& report) {
    os << "trial,seed,I,final_objective,err,success\n";
    for (const auto& row : report.trials) {
        os << row.trial << "," << row.seed << "," << join_locations(row.locations) << ","
           << format_double(row.final_objective) << "," << format_double(row.err) << ","
           << (row.success ? 1 : 0) << "\n";
    }
}

void write_curve_csv(std::ostream& os, const ExperimentReport& report) {
    os << "card_I,P_I,mean_err\n";
    for (const auto& agg : report.aggregates)
        os << agg.locations.size() << "," << format_double(agg.success_probability) << ","
           << format_double(agg.mean_err_success) << "\n";
}

void write_trace_csv(std::ostream& os, const SolveResult& result) {
    os << "iter,log10_obj,log10_err\n";
    for (size_t i = 0; i < result.objective_trace.size(); ++i) {
        os << i << "," << format_double(log10_floored(result.objective_trace[i])) << ",";
        if (i < result.err_trace.size())
            os << format_double(log10_floored(result.err_trace[i]));
        else
            os << "nan";
        os << "\n";
    }
}

void write_certificates_json(std::ostream& os, const ExperimentReport& report) {
    json j = json::array();
    for (const auto& row : report.certificates) j.push_back(certificate_to_json(row));
    os << j.dump(2) << "\n";
}

void emit_report(const ExperimentReport& report, const ExperimentConfig& config,
                 const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    {
        std::ofstream os(fs::path(dir) / "run.json");
        save_config(os, config);
    }
    if (!report.trials.empty()) {
        std::ofstream os(fs::path(dir) / "trials.csv");
        write_trials_csv(os, report);
    }
    if (!report.aggregates.empty()) {
        std::ofstream os(fs::path(dir) / "curve.csv");
        write_curve_csv(os, report);
    }
    if (!report.certificates.empty()) {
        std::ofstream os(fs::path(dir) / "certificates.json");
        write_certificates_json(os, report);
    }
    for (size_t i = 0; i < report.traces.size(); ++i) {
        std::ofstream os(fs::path(dir) / ("trace_" + std::to_string(i) + ".csv"));
        write_trace_csv(os, report.traces[i].second);
    }
}

}  // namespace dynphase
