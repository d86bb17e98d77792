// Acceptance suite: one check per release criterion, one verdict line each.
// Exit code = number of failed criteria.

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "dynphase/circulant.hpp"
#include "dynphase/harness.hpp"
#include "dynphase/injectivity.hpp"
#include "dynphase/iteration_regular.hpp"
#include "dynphase/krylov.hpp"
#include "dynphase/linalg.hpp"
#include "dynphase/measurements.hpp"
#include "dynphase/rng.hpp"
#include "dynphase/solver.hpp"
#include "dynphase/spark.hpp"

using namespace dynphase;

namespace {

const Tolerance tol;

struct Outcome {
    bool pass = false;
    std::string detail;
};

Vec vec2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

// ---------------------------------------------------------------------------
// 1. Iteration-regularity verdicts on the four canonical examples.
Outcome criterion_1() {
    bool ok = true;

    ok &= iteration_regular(OperatorSpec::identity(4), tol).regular;

    CVec singular(3);
    singular << Complex(0.0), Complex(1.0), Complex(2.0);
    const IterationRegularity s = iteration_regular(OperatorSpec::diagonal(singular), tol);
    ok &= !s.regular && s.witness.has_value() && s.witness->degree() == 1 &&
          std::abs(s.witness->coefficient(0)) < 1e-12 &&
          std::abs(s.witness->coefficient(1) - Complex(1.0)) < 1e-12;

    CVec mixed(2);
    mixed << Complex(-1.0), Complex(2.0);
    ok &= iteration_regular(OperatorSpec::diagonal(mixed), tol).regular;

    CMat binv(2, 2);
    binv << Complex(1.0), Complex(1.0), Complex(0.0, 1.0), Complex(0.0, -1.0);
    CVec imag_pair(2);
    imag_pair << Complex(0.0, 1.0), Complex(0.0, -1.0);
    const OperatorSpec rotation = OperatorSpec::diagonalizable(binv.inverse(), imag_pair);
    const IterationRegularity r = iteration_regular(rotation, tol);
    ok &= !r.regular && r.witness.has_value() &&
          std::abs(r.witness->coefficient(2) - Complex(1.0)) < 1e-9 &&
          std::abs(r.witness->coefficient(1)) < 1e-9 &&
          std::abs(r.witness->coefficient(0) - Complex(1.0)) < 1e-9;

    return {ok, "identity/singular/diag(-1,2)/imaginary-pair verdicts with witnesses"};
}

// ---------------------------------------------------------------------------
// 2. The two halves of the gap example: oracle true with an inconclusive
//    certificate, and local complementarity without the complement property.
Outcome criterion_2() {
    bool ok = true;

    // (a) R^2: power family passes the oracle, Lambda fails totally full
    // spark, certificate INCONCLUSIVE.
    const std::vector<Vec> family{vec2(1, 1), vec2(1, -1), vec2(1, 2), vec2(1, -2)};
    ok &= complement_property(family, tol).holds();

    CVec pm(2);
    pm << Complex(1.0), Complex(-1.0);
    ok &= !totally_full_spark(build_lambda_matrix(pm, tol), tol).totally_full_spark;

    const OperatorSpec spec2 = OperatorSpec::diagonal(pm);
    FunctionalSet phi2;
    phi2.vectors = {vec2(1, 1), vec2(1, 2)};
    const Certificate cert2 = certify(spec2, phi2, tol);
    ok &= cert2.verdict == CertificateVerdict::Inconclusive;
    ok &= complement_property(dedup_vectors(induced_vector_family(spec2, phi2, tol), tol), tol)
              .holds();

    // (b) R^4: three (1,m,1,m) vectors are locally complementary, yet the
    // induced family has 6 < 7 distinct vectors and fails the oracle.
    CVec eig4(4);
    eig4 << Complex(1.0), Complex(1.0), Complex(-1.0), Complex(-1.0);
    const OperatorSpec spec4 = OperatorSpec::diagonal(eig4);
    FunctionalSet phi4;
    std::vector<CVec> psi4;
    for (int m = 1; m <= 3; ++m) {
        Vec v(4);
        v << 1.0, m, 1.0, m;
        phi4.vectors.push_back(v);
        psi4.push_back(v.cast<Complex>());
    }
    ok &= locally_complementary(psi4, spec4.spectral_profile(), tol).holds();
    const auto family4 = dedup_vectors(induced_vector_family(spec4, phi4, tol), tol);
    ok &= family4.size() == 6;
    ok &= complement_property(family4, tol).verdict == PartitionVerdict::Fails;
    ok &= certify(spec4, phi4, tol).verdict != CertificateVerdict::Guaranteed;

    return {ok, "oracle/certificate gap in R^2 and R^4 reproduced exactly"};
}

// ---------------------------------------------------------------------------
// 3. Exhaustive agreement of the coprimality criterion with the certificate
//    pipeline over all 84 three-subsets at n=9.
Outcome criterion_3() {
    Vec profile(5);
    profile << 5, 4, 3, 2, 1;
    const OperatorSpec spec = OperatorSpec::circulant(make_decreasing_kernel(9, profile).a);

    int agreements = 0;
    int total = 0;
    for (int a = 0; a < 9; ++a)
        for (int b = a + 1; b < 9; ++b)
            for (int c = b + 1; c < 9; ++c) {
                const std::vector<int> locations{a, b, c};
                const bool coprime = coprime_criterion(locations, 9);
                const Certificate cert =
                    certify(spec, standard_basis_functionals(9, locations), tol);
                ++total;
                if (coprime == cert.guaranteed()) ++agreements;
            }
    std::ostringstream detail;
    detail << agreements << "/" << total << " subsets agree with the certificate";
    return {agreements == total && total == 84, detail.str()};
}

// ---------------------------------------------------------------------------
// 4. Qualitative replica of the n=9 reconstruction experiment.
Outcome criterion_4() {
    ExperimentConfig config;
    config.experiment = "reconstruct";
    config.op.kind = "decreasing-kernel";
    config.op.n = 9;
    config.op.profile = Vec(5);
    config.op.profile << 1.0, 0.8, 0.6, 0.4, 0.2;
    config.location_sets = {{1, 2, 3}, {1, 4, 7}};
    config.max_time = 8;
    config.sigma = 0.0;
    config.trials = 100;
    config.seed = 20260809;
    config.signal_range = 4.0;
    config.solver.radius = 4.0;
    config.solver.max_iters = 5000;
    config.solver.objective_threshold = 1e-8;
    config.attach_certificates = false;

    const ExperimentReport report = run_reconstruct(config);

    int good_sub = 0;
    bool good_errors_small = true;
    int bad_sub = 0;
    bool bad_large_error_seen = false;
    for (const auto& row : report.trials) {
        if (row.locations == std::vector<int>{1, 2, 3}) {
            if (row.success) {
                ++good_sub;
                if (!(row.err < 1e-3)) good_errors_small = false;
            }
        } else if (row.success) {
            ++bad_sub;
            if (row.err > 0.1) bad_large_error_seen = true;
        }
    }

    std::ostringstream detail;
    detail << "I={1,2,3}: " << good_sub << "/100 below 1e-8 (errors small: "
           << (good_errors_small ? "yes" : "no") << "); I={1,4,7}: " << bad_sub
           << " below threshold, spurious minimizer: " << (bad_large_error_seen ? "yes" : "no");
    const bool ok =
        good_sub >= 5 && good_sub <= 60 && good_errors_small && bad_large_error_seen;
    return {ok, detail.str()};
}

// ---------------------------------------------------------------------------
// 5. Analytic gradient against central finite differences.
Outcome criterion_5() {
    bool ok = true;
    double worst = 0.0;
    for (const int n : {2, 9}) {
        OperatorSpec spec = [&]() {
            if (n == 9) {
                Vec profile(5);
                profile << 1.0, 0.8, 0.6, 0.4, 0.2;
                return OperatorSpec::circulant(make_decreasing_kernel(9, profile).a);
            }
            CVec eig(2);
            eig << Complex(0.9), Complex(0.4);
            return OperatorSpec::diagonal(eig);
        }();
        const std::vector<int> locations =
            n == 9 ? std::vector<int>{1, 2, 3} : std::vector<int>{0, 1};
        const FunctionalSet phi = standard_basis_functionals(n, locations);
        const Vec f = make_signal(n, 1.0, 500 + n);
        const MeasurementRecord record =
            simulate(spec, f, phi, 2 * n - 2, 0.0, 500 + n, locations);

        RngStream rng(900 + n);
        for (int point = 0; point < 20; ++point) {
            Vec g(n);
            for (int i = 0; i < n; ++i) g(i) = rng.uniform(-1.0, 1.0);
            const Vec grad = gradient(g, record, spec, phi);
            const double h = 1e-5;
            Vec fd(n);
            for (int i = 0; i < n; ++i) {
                Vec gp = g, gm = g;
                gp(i) += h;
                gm(i) -= h;
                fd(i) = (objective(gp, record, spec, phi) - objective(gm, record, spec, phi)) /
                        (2.0 * h);
            }
            const double rel = (grad - fd).norm() / std::max(grad.norm(), 1e-12);
            worst = std::max(worst, rel);
            if (!(rel < 1e-6)) ok = false;
        }
    }
    std::ostringstream detail;
    detail << "40 random points, worst relative deviation " << worst;
    return {ok, detail.str()};
}

// ---------------------------------------------------------------------------
// 6. Certificates against the brute-force oracle on random positive
//    diagonalizable specs.
Outcome criterion_6() {
    RngStream rng(628318);
    int tested = 0;
    int agreements = 0;
    int guaranteed_count = 0;
    int failed_count = 0;
    for (int trial = 0; tested < 100 && trial < 400; ++trial) {
        RngStream sub = rng.derive(trial);
        const int n = 2 + static_cast<int>(sub.next_u64() % 4);  // 2..5
        const int d = 1 + static_cast<int>(sub.next_u64() % std::min(n, 4));

        // Distinct strictly positive eigenvalues with a safe gap, spread over
        // the coordinates.
        CVec eig(n);
        std::vector<double> values;
        bool valid = true;
        for (int s = 0; s < d; ++s) {
            double v = -1.0;
            for (int attempt = 0; attempt < 50 && v < 0.0; ++attempt) {
                const double candidate = sub.uniform(0.5, 2.5);
                bool clear = true;
                for (double u : values)
                    if (std::abs(u - candidate) < 0.2) clear = false;
                if (clear) v = candidate;
            }
            if (v < 0.0) valid = false;
            values.push_back(v);
        }
        if (!valid) continue;
        for (int i = 0; i < n; ++i) eig(i) = Complex(values[static_cast<size_t>(i % d)], 0.0);

        Mat b = Mat::Identity(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) b(i, j) += 0.25 * sub.normal();
        const OperatorSpec spec = OperatorSpec::diagonalizable(b.cast<Complex>(), eig);

        FunctionalSet phi;
        const int m = 1 + static_cast<int>(sub.next_u64() % 3);
        for (int i = 0; i < m; ++i) {
            Vec v(n);
            for (int j = 0; j < n; ++j) v(j) = sub.normal();
            phi.vectors.push_back(v);
        }

        const Certificate cert = certify(spec, phi, tol);
        const auto family = dedup_vectors(induced_vector_family(spec, phi, tol), tol);
        if (family.size() > 20) continue;
        const bool oracle = complement_property(family, tol).holds();
        ++tested;

        const bool here = (cert.guaranteed() == oracle) &&
                          (cert.verdict != CertificateVerdict::NecessaryConditionFailed || !oracle);
        if (here) ++agreements;
        if (cert.guaranteed()) ++guaranteed_count;
        if (cert.verdict == CertificateVerdict::NecessaryConditionFailed) ++failed_count;
    }
    std::ostringstream detail;
    detail << agreements << "/" << tested << " agree (" << guaranteed_count << " guaranteed, "
           << failed_count << " necessary-condition failures)";
    return {tested >= 100 && agreements == tested && guaranteed_count > 0 && failed_count > 0,
            detail.str()};
}

// ---------------------------------------------------------------------------
// 7. Krylov subsets of iteration-regular diagonal operators.
Outcome criterion_7() {
    RngStream rng(161803);
    int tested = 0;
    bool ok = true;
    for (int trial = 0; tested < 50 && trial < 200; ++trial) {
        RngStream sub = rng.derive(trial);
        const int n = 2 + static_cast<int>(sub.next_u64() % 5);  // 2..6
        CVec eig(n);
        bool distinct = true;
        for (int i = 0; i < n; ++i) {
            eig(i) = Complex(sub.uniform(0.4, 2.5) * sub.sign(), 0.0);
            for (int j = 0; j < i; ++j)
                if (std::abs(eig(i) - eig(j)) < 0.08) distinct = false;
        }
        if (!distinct) continue;
        const OperatorSpec spec = OperatorSpec::diagonal(eig);
        if (!iteration_regular(spec, tol).regular) continue;

        Vec x(n);
        for (int i = 0; i < n; ++i) x(i) = sub.normal();
        if (tested % 3 == 0) x(0) = 0.0;  // exercise k < n
        if (x.norm() < 1e-9) continue;
        ++tested;

        const int k = krylov_rank(spec.matrix(), x, tol);
        const int order = std::max(1, 2 * k - 2) + 1;
        Mat powers(n, order);
        Vec current = x;
        for (int l = 0; l < order; ++l) {
            powers.col(l) = current / current.norm();
            current = spec.matrix() * current;
        }
        std::vector<int> subset = first_subset(k);
        do {
            Mat sub_m(n, k);
            for (int j = 0; j < k; ++j)
                sub_m.col(j) = powers.col(subset[static_cast<size_t>(j)]);
            if (numerical_rank(sub_m, tol) != k) ok = false;
        } while (next_subset(subset, order));
    }
    std::ostringstream detail;
    detail << tested << " regular specs, every k-subset of the Krylov family at full rank";
    return {ok && tested >= 50, detail.str()};
}

// ---------------------------------------------------------------------------
// 8. Random circulants at n=15 are iteration regular (empirical stand-in for
//    the probability-one statement).
Outcome criterion_8() {
    const int count = 50;
    std::vector<int> verdicts(static_cast<size_t>(count), -1);
    std::atomic<int> next{0};
    std::vector<std::future<void>> workers;
    const unsigned pool = std::min(2u, std::max(1u, std::thread::hardware_concurrency()));
    for (unsigned w = 0; w < pool; ++w) {
        workers.push_back(std::async(std::launch::async, [&]() {
            for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
                const RandomCirculant rc =
                    sample_random_circulant(15, 37000 + static_cast<std::uint64_t>(i));
                verdicts[static_cast<size_t>(i)] =
                    iteration_regular(rc.spec, tol).regular ? 1 : 0;
            }
        }));
    }
    for (auto& w : workers) w.get();

    int regular = 0;
    for (int v : verdicts)
        if (v == 1) ++regular;
    std::ostringstream detail;
    detail << regular << "/" << count << " sampled circulants iteration regular";
    return {regular == count, detail.str()};
}

// ---------------------------------------------------------------------------
// 9. Success probability and recovery error trends across the location sweep
//    under noise (scale substitution n=15 recorded in the detail line).
Outcome criterion_9() {
    ExperimentConfig config;
    config.experiment = "sweep";
    config.op.kind = "random-circulant";
    config.op.n = 15;
    config.op.seed = 4711;
    config.location_sets = {{1, 2}, {1, 2, 3}, {1, 2, 3, 4}};
    for (const int size : {8, 12, 14}) {
        std::vector<int> set;
        for (int i = 1; i <= size; ++i) set.push_back(i % 15);
        config.location_sets.push_back(set);
    }
    config.max_time = 28;  // 2n-2
    config.sigma = 0.01;
    config.trials = 60;
    config.seed = 99;
    config.signal_range = 0.5;
    config.solver.radius = 0.5;
    config.solver.max_iters = 3000;
    config.attach_certificates = false;

    const ExperimentReport report = run_sweep(config);

    bool nondecreasing = true;
    for (size_t i = 1; i < report.aggregates.size(); ++i)
        if (report.aggregates[i].success_probability <
            report.aggregates[i - 1].success_probability - 0.1)
            nondecreasing = false;

    double first_err = std::numeric_limits<double>::quiet_NaN();
    double last_err = std::numeric_limits<double>::quiet_NaN();
    for (const auto& agg : report.aggregates)
        if (agg.successes > 0) {
            if (std::isnan(first_err)) first_err = agg.mean_err_success;
            last_err = agg.mean_err_success;
        }
    const bool err_decreases = !std::isnan(first_err) && last_err < first_err;

    std::ostringstream detail;
    detail << "scale n=15 (substituted for 45); P_I =";
    for (const auto& agg : report.aggregates) detail << " " << agg.success_probability;
    detail << "; mean err " << first_err << " -> " << last_err;
    return {nondecreasing && err_decreases, detail.str()};
}

// ---------------------------------------------------------------------------
// 10. Byte-identical reruns.
Outcome criterion_10() {
    ExperimentConfig config;
    config.experiment = "reconstruct";
    config.op.kind = "decreasing-kernel";
    config.op.n = 9;
    config.op.profile = Vec(5);
    config.op.profile << 1.0, 0.8, 0.6, 0.4, 0.2;
    config.location_sets = {{1, 2, 3}};
    config.max_time = 8;
    config.sigma = 0.01;
    config.trials = 12;
    config.seed = 7;
    config.signal_range = 4.0;
    config.solver.radius = 4.0;
    config.solver.max_iters = 800;

    const auto dir1 = std::filesystem::temp_directory_path() / "dynphase_acc_det_a";
    const auto dir2 = std::filesystem::temp_directory_path() / "dynphase_acc_det_b";
    std::filesystem::remove_all(dir1);
    std::filesystem::remove_all(dir2);
    emit_report(run_reconstruct(config), config, dir1.string());
    emit_report(run_reconstruct(config), config, dir2.string());

    bool ok = true;
    for (const char* name : {"run.json", "trials.csv", "curve.csv", "certificates.json"}) {
        std::ifstream a(dir1 / name), b(dir2 / name);
        std::stringstream sa, sb;
        sa << a.rdbuf();
        sb << b.rdbuf();
        if (sa.str().empty() || sa.str() != sb.str()) ok = false;
    }
    std::filesystem::remove_all(dir1);
    std::filesystem::remove_all(dir2);
    return {ok, "rerun with identical config and seed is byte-identical"};
}

struct Criterion {
    int id;
    const char* name;
    double time_limit_s;  // 0 = unbounded
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {1, "iteration-regularity example verdicts", 1.0, criterion_1},
        {2, "necessary/sufficient gap examples", 1.0, criterion_2},
        {3, "coprimality equals certificate over Z_9 triples", 60.0, criterion_3},
        {4, "n=9 reconstruction replica", 600.0, criterion_4},
        {5, "gradient versus finite differences", 0.0, criterion_5},
        {6, "certificates versus brute-force oracle", 300.0, criterion_6},
        {7, "Krylov subset ranks under iteration regularity", 0.0, criterion_7},
        {8, "random circulants at n=15 iteration regular", 0.0, criterion_8},
        {9, "noisy sweep trends", 0.0, criterion_9},
        {10, "deterministic reruns", 0.0, criterion_10},
    };

    int failures = 0;
    for (const auto& criterion : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = criterion.run();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = criterion.time_limit_s <= 0.0 || elapsed <= criterion.time_limit_s;
        const bool pass = outcome.pass && in_time;
        if (!pass) ++failures;
        std::printf("[%2d] %s  %s — %s (%.2f s%s)\n", criterion.id, pass ? "PASS" : "FAIL",
                    criterion.name, outcome.detail.c_str(), elapsed,
                    in_time ? "" : ", over the time limit");
        std::fflush(stdout);
    }
    std::printf("acceptance: %d/%zu criteria passed\n",
                static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures;
}
