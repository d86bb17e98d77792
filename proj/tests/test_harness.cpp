#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dynphase/harness.hpp"

using namespace dynphase;

namespace {

ExperimentConfig small_reconstruct_config() {
    std::istringstream json(R"({
      "schema": "dynphase-config/1",
      "experiment": "reconstruct",
      "operator": {"kind": "decreasing-kernel", "n": 5, "profile": [1.0, 0.7, 0.4]},
      "locations": [[0, 1, 2]],
      "L": 8,
      "sigma": 0.0,
      "trials": 6,
      "seed": 4242,
      "signal_range": 1.0,
      "solver": {"radius": 1.0, "max_iters": 400, "threshold": 1e-8},
      "certify": true
    })");
    return load_config(json);
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream is(p);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config round trip preserves every field") {
    const ExperimentConfig config = small_reconstruct_config();
    std::stringstream buffer;
    save_config(buffer, config);
    const ExperimentConfig back = load_config(buffer);
    CHECK(back.experiment == config.experiment);
    CHECK(back.op.kind == config.op.kind);
    CHECK(back.op.n == config.op.n);
    CHECK((back.op.profile - config.op.profile).cwiseAbs().maxCoeff() == 0.0);
    CHECK(back.location_sets == config.location_sets);
    CHECK(back.max_time == config.max_time);
    CHECK(back.trials == config.trials);
    CHECK(back.seed == config.seed);
    CHECK(back.solver.radius == config.solver.radius);
    CHECK(back.solver.objective_threshold == config.solver.objective_threshold);
}

TEST_CASE("operator files round trip for all three kinds") {
    {
        Vec p(3);
        p << 1.0, 0.7, 0.4;
        const OperatorSpec spec = OperatorSpec::circulant(make_decreasing_kernel(5, p).a);
        std::stringstream buffer;
        save_operator(buffer, spec);
        const OperatorSpec back = load_operator(buffer);
        CHECK((back.matrix() - spec.matrix()).cwiseAbs().maxCoeff() < 1e-14);
    }
    {
        CVec eig(3);
        eig << Complex(0.5), Complex(1.5), Complex(2.5);
        const OperatorSpec spec = OperatorSpec::diagonal(eig);
        std::stringstream buffer;
        save_operator(buffer, spec);
        CHECK((load_operator(buffer).matrix() - spec.matrix()).cwiseAbs().maxCoeff() < 1e-14);
    }
    {
        EigenvalueGroup g;
        g.value = Complex(2.0);
        g.block_sizes = {2, 1};
        const OperatorSpec spec = OperatorSpec::jordan(CMat::Identity(3, 3), {g});
        std::stringstream buffer;
        save_operator(buffer, spec);
        CHECK((load_operator(buffer).matrix() - spec.matrix()).cwiseAbs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("certify run cross-checks the coprimality shortcut at n=9") {
    ExperimentConfig config;
    config.experiment = "certify";
    config.op.kind = "decreasing-kernel";
    config.op.n = 9;
    config.op.profile = Vec(5);
    config.op.profile << 5, 4, 3, 2, 1;
    config.location_sets = {{1, 2, 3}, {1, 4, 7}};
    config.trials = 0;
    const ExperimentReport report = run_certify(config);
    REQUIRE(report.certificates.size() == 2);
    CHECK(report.certificates[0].certificate.verdict == CertificateVerdict::Guaranteed);
    REQUIRE(report.certificates[0].coprime.has_value());
    CHECK(*report.certificates[0].coprime);
    CHECK(report.certificates[1].certificate.verdict != CertificateVerdict::Guaranteed);
    CHECK_FALSE(*report.certificates[1].coprime);
}

TEST_CASE("reconstruct produces complete rows and consistent aggregates") {
    const ExperimentConfig config = small_reconstruct_config();
    const ExperimentReport report = run_reconstruct(config);
    CHECK(report.trials.size() == 6);
    REQUIRE(report.aggregates.size() == 1);
    const LocationAggregate& agg = report.aggregates[0];
    int successes = 0;
    for (const auto& row : report.trials)
        if (row.success) ++successes;
    CHECK(agg.successes == successes);
    CHECK(agg.success_probability == static_cast<double>(successes) / 6.0);
    REQUIRE(report.certificates.size() == 1);
}

TEST_CASE("empty trial batches mark aggregates as undefined") {
    ExperimentConfig config = small_reconstruct_config();
    config.trials = 0;
    config.attach_certificates = false;
    const ExperimentReport report = run_reconstruct(config);
    CHECK(report.trials.empty());
    REQUIRE(report.aggregates.size() == 1);
    CHECK(std::isnan(report.aggregates[0].success_probability));
    CHECK(std::isnan(report.aggregates[0].mean_err_success));
}

TEST_CASE("sweep emits one curve row per location set") {
    ExperimentConfig config = small_reconstruct_config();
    config.experiment = "sweep";
    config.location_sets = {{0}, {0, 1}, {0, 1, 2}};
    config.trials = 2;
    const ExperimentReport report = run_sweep(config);
    CHECK(report.aggregates.size() == 3);
    std::stringstream curve;
    write_curve_csv(curve, report);
    std::string line;
    int lines = 0;
    while (std::getline(curve, line)) ++lines;
    CHECK(lines == 4);  // header + 3 rows
}

TEST_CASE("identical config and seed give byte-identical reports") {
    const ExperimentConfig config = small_reconstruct_config();
    const auto dir1 = std::filesystem::temp_directory_path() / "dynphase_det_a";
    const auto dir2 = std::filesystem::temp_directory_path() / "dynphase_det_b";
    std::filesystem::remove_all(dir1);
    std::filesystem::remove_all(dir2);
    emit_report(run_reconstruct(config), config, dir1.string());
    emit_report(run_reconstruct(config), config, dir2.string());
    for (const char* name : {"run.json", "trials.csv", "curve.csv", "certificates.json"}) {
        CAPTURE(name);
        CHECK(slurp(dir1 / name) == slurp(dir2 / name));
        CHECK_FALSE(slurp(dir1 / name).empty());
    }
    std::filesystem::remove_all(dir1);
    std::filesystem::remove_all(dir2);
}

TEST_CASE("invalid configs are rejected") {
    ExperimentConfig config = small_reconstruct_config();
    config.experiment = "explode";
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config = small_reconstruct_config();
    config.location_sets.clear();
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config = small_reconstruct_config();
    config.sigma = -1.0;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}

TEST_CASE("trace files carry the log-decay columns") {
    const ExperimentConfig config = small_reconstruct_config();
    const ExperimentReport report = run_reconstruct(config);
    REQUIRE_FALSE(report.traces.empty());
    std::stringstream trace;
    write_trace_csv(trace, report.traces[0].second);
    std::string header;
    std::getline(trace, header);
    CHECK(header == "iter,log10_obj,log10_err");
    std::string first;
    std::getline(trace, first);
    CHECK(first.rfind("0,", 0) == 0);
}
