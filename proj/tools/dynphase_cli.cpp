#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "dynphase/harness.hpp"
#include "dynphase/iteration_regular.hpp"
#include "dynphase/measurements.hpp"

namespace {

using namespace dynphase;

std::string resolve_out_dir(const std::string& flag_value, const ExperimentConfig& config) {
    if (!flag_value.empty()) return flag_value;
    if (!config.out_dir.empty()) return config.out_dir;
    if (const char* env = std::getenv("DYNPHASE_OUT_DIR")) return env;
    return "out";
}

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int trials = -1;
    double sigma = -1.0;
    double radius = -1.0;
    double threshold = -1.0;

    void attach(CLI::App* cmd, bool config_required = true) {
        auto* opt = cmd->add_option("--config", config_path, "experiment config (JSON)");
        if (config_required) opt->required();
        cmd->add_option("--out-dir", out_dir, "output directory (overrides config)");
        cmd->add_option("--seed", seed, "experiment seed (overrides config)")
            ->each([this](const std::string&) { seed_set = true; });
        cmd->add_option("--trials", trials, "trial count (overrides config)");
        cmd->add_option("--sigma", sigma, "noise level (overrides config)");
        cmd->add_option("--radius", radius, "search box radius (overrides config)");
        cmd->add_option("--threshold", threshold, "success threshold (overrides config)");
    }

    ExperimentConfig load() const {
        ExperimentConfig config = load_config_file(config_path);
        if (seed_set) config.seed = seed;
        if (trials >= 0) config.trials = trials;
        if (sigma >= 0.0) config.sigma = sigma;
        if (radius > 0.0) config.solver.radius = radius;
        if (threshold > 0.0) config.solver.objective_threshold = threshold;
        return config;
    }
};

void print_certificates(const ExperimentReport& report) {
    for (const auto& row : report.certificates) {
        std::cout << "I={";
        for (size_t i = 0; i < row.locations.size(); ++i)
            std::cout << (i ? "," : "") << row.locations[i];
        std::cout << "}: " << to_string(row.certificate.verdict);
        if (row.coprime.has_value())
            std::cout << " (coprime criterion: " << (*row.coprime ? "true" : "false") << ")";
        std::cout << "\n";
    }
}

void print_aggregates(const ExperimentReport& report) {
    for (const auto& agg : report.aggregates) {
        std::cout << "I={";
        for (size_t i = 0; i < agg.locations.size(); ++i)
            std::cout << (i ? "," : "") << agg.locations[i];
        std::cout << "}: successes " << agg.successes << "/" << agg.trials
                  << " (P=" << agg.success_probability
                  << ", mean err among successes=" << agg.mean_err_success << ")\n";
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"phaseless space-time sampling: certificates and reconstruction"};
    app.require_subcommand(1);

    CommonFlags certify_flags;
    auto* cmd_certify = app.add_subcommand("certify", "certificate verdicts per location set");
    certify_flags.attach(cmd_certify);

    CommonFlags reconstruct_flags;
    auto* cmd_reconstruct =
        app.add_subcommand("reconstruct", "multi-start reconstruction trials per location set");
    reconstruct_flags.attach(cmd_reconstruct);

    CommonFlags sweep_flags;
    auto* cmd_sweep =
        app.add_subcommand("sweep", "success-probability curve over the location sets");
    sweep_flags.attach(cmd_sweep);

    CommonFlags simulate_flags;
    auto* cmd_simulate = app.add_subcommand("simulate", "emit a measurement table");
    simulate_flags.attach(cmd_simulate);

    auto* cmd_random = app.add_subcommand("random-circulant", "sample and store a random circulant");
    Index rc_n = 15;
    std::uint64_t rc_seed = 0;
    std::string rc_out;
    bool rc_check = false;
    cmd_random->add_option("--n", rc_n, "dimension (odd)")->required();
    cmd_random->add_option("--seed", rc_seed, "sampling seed");
    cmd_random->add_option("--out", rc_out, "operator file to write");
    cmd_random->add_flag("--check-regularity", rc_check, "also run the iteration-regularity test");

    try {
        app.parse(argc, argv);

        if (cmd_certify->parsed()) {
            const ExperimentConfig config = certify_flags.load();
            const ExperimentReport report = run_certify(config);
            emit_report(report, config, resolve_out_dir(certify_flags.out_dir, config));
            print_certificates(report);
        } else if (cmd_reconstruct->parsed()) {
            const ExperimentConfig config = reconstruct_flags.load();
            const ExperimentReport report = run_reconstruct(config);
            emit_report(report, config, resolve_out_dir(reconstruct_flags.out_dir, config));
            print_aggregates(report);
        } else if (cmd_sweep->parsed()) {
            const ExperimentConfig config = sweep_flags.load();
            const ExperimentReport report = run_sweep(config);
            emit_report(report, config, resolve_out_dir(sweep_flags.out_dir, config));
            print_aggregates(report);
        } else if (cmd_simulate->parsed()) {
            const ExperimentConfig config = simulate_flags.load();
            const BuiltOperator built = build_operator(config.op);
            const double range =
                config.signal_range > 0.0 ? config.signal_range : config.solver.radius;
            const Vec f = make_signal(built.spec.n(), range, config.seed);
            const int max_time = config.max_time >= 0
                                     ? config.max_time
                                     : 2 * static_cast<int>(built.spec.n()) - 2;
            const std::string dir = resolve_out_dir(simulate_flags.out_dir, config);
            std::filesystem::create_directories(dir);
            for (size_t s = 0; s < config.location_sets.size(); ++s) {
                const auto& locations = config.location_sets[s];
                const FunctionalSet phi = standard_basis_functionals(built.spec.n(), locations);
                const MeasurementRecord record =
                    simulate(built.spec, f, phi, max_time, config.sigma, config.seed, locations);
                std::ofstream os(std::filesystem::path(dir) /
                                 ("measurements_" + std::to_string(s) + ".txt"));
                write_measurements(os, record);
            }
            std::cout << "wrote " << config.location_sets.size() << " measurement table(s) to "
                      << dir << "\n";
        } else if (cmd_random->parsed()) {
            const RandomCirculant rc = sample_random_circulant(rc_n, rc_seed);
            if (!rc_out.empty()) {
                std::ofstream os(rc_out);
                save_operator(os, rc.spec);
                std::cout << "wrote operator to " << rc_out << "\n";
            }
            std::cout << "n=" << rc_n << " seed=" << rc_seed
                      << " |sigma|=1 spectrum with conjugate symmetry\n";
            if (rc_check) {
                const IterationRegularity reg = iteration_regular(rc.spec, Tolerance{});
                std::cout << "iteration regular: " << (reg.regular ? "true" : "false") << "\n";
                if (!reg.regular)
                    std::cout << "witness: " << reg.witness->to_string() << "\n";
            }
        }
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
