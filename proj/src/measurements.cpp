#include "dynphase/measurements.hpp"

#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "dynphase/rng.hpp"

namespace dynphase {

MeasurementRecord simulate(const OperatorSpec& spec, const Vec& f, const FunctionalSet& phi,
                           int max_time, double sigma, std::uint64_t seed,
                           const std::vector<int>& location_ids) {
    if (max_time < 0) throw std::invalid_argument("simulate: L must be >= 0");
    if (sigma < 0.0) throw std::invalid_argument("simulate: sigma must be >= 0");
    if (f.size() != spec.n()) throw std::invalid_argument("simulate: dimension mismatch");
    phi.validate(spec.n());

    const int m = static_cast<int>(phi.vectors.size());
    MeasurementRecord record;
    record.n = spec.n();
    record.max_time = max_time;
    record.sigma = sigma;
    record.seed = seed;
    if (!location_ids.empty()) {
        if (static_cast<int>(location_ids.size()) != m)
            throw std::invalid_argument("simulate: one location id per functional expected");
        record.locations = location_ids;
    } else {
        record.locations.resize(static_cast<size_t>(m));
        for (int i = 0; i < m; ++i) record.locations[static_cast<size_t>(i)] = i;
    }

    record.y = Mat(max_time + 1, m);
    record.clean = Mat(max_time + 1, m);
    const RngStream base(seed);
    Vec state = f;
    for (int t = 0; t <= max_time; ++t) {
        for (int i = 0; i < m; ++i) {
            const double sample = state.dot(phi.vectors[static_cast<size_t>(i)]);
            const double squared = sample * sample;
            (*record.clean)(t, i) = squared;
            double noise = 0.0;
            if (sigma > 0.0) {
                RngStream cell = base.derive(static_cast<std::uint64_t>(t),
                                             static_cast<std::uint64_t>(
                                                 record.locations[static_cast<size_t>(i)]));
                noise = sigma * cell.normal();
            }
            record.y(t, i) = squared + noise;
        }
        if (t < max_time) state = spec.matrix() * state;
    }
    return record;
}

double noise_threshold(const MeasurementRecord& record) {
    if (!record.clean.has_value())
        throw std::invalid_argument("noise_threshold: clean values absent");
    return (record.y - *record.clean).array().square().sum();
}

void write_measurements(std::ostream& os, const MeasurementRecord& record) {
    os << "# dynphase-measurements v1\n";
    os << std::setprecision(17);
    os << "n=" << record.n << " L=" << record.max_time << " sigma=" << record.sigma
       << " seed=" << record.seed << "\n";
    os << "I=";
    for (size_t i = 0; i < record.locations.size(); ++i)
        os << (i ? "," : "") << record.locations[i];
    os << "\n";
    os << (record.clean.has_value() ? "t i y clean\n" : "t i y\n");
    for (int t = 0; t <= record.max_time; ++t)
        for (int i = 0; i < static_cast<int>(record.locations.size()); ++i) {
            os << t << " " << record.locations[static_cast<size_t>(i)] << " " << record.y(t, i);
            if (record.clean.has_value()) os << " " << (*record.clean)(t, i);
            os << "\n";
        }
}

MeasurementRecord read_measurements(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("# dynphase-measurements", 0) != 0)
        throw std::invalid_argument("read_measurements: missing format header");

    MeasurementRecord record;
    if (!std::getline(is, line)) throw std::invalid_argument("read_measurements: truncated header");
    {
        std::istringstream hs(line);
        std::string token;
        while (hs >> token) {
            const auto eq = token.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = token.substr(0, eq);
            const std::string value = token.substr(eq + 1);
            if (key == "n") record.n = std::stol(value);
            else if (key == "L") record.max_time = std::stoi(value);
            else if (key == "sigma") record.sigma = std::stod(value);
            else if (key == "seed") record.seed = std::stoull(value);
        }
    }
    if (!std::getline(is, line) || line.rfind("I=", 0) != 0)
        throw std::invalid_argument("read_measurements: missing location list");
    {
        std::istringstream ls(line.substr(2));
        std::string item;
        while (std::getline(ls, item, ',')) record.locations.push_back(std::stoi(item));
    }
    if (!std::getline(is, line)) throw std::invalid_argument("read_measurements: missing column row");
    const bool has_clean = line.find("clean") != std::string::npos;

    const int m = static_cast<int>(record.locations.size());
    record.y = Mat(record.max_time + 1, m);
    if (has_clean) record.clean = Mat(record.max_time + 1, m);
    std::vector<int> seen(static_cast<size_t>(record.max_time + 1), 0);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream rs(line);
        int t = 0;
        int loc = 0;
        double y = 0.0;
        rs >> t >> loc >> y;
        int slot = -1;
        for (int i = 0; i < m; ++i)
            if (record.locations[static_cast<size_t>(i)] == loc) slot = i;
        if (t < 0 || t > record.max_time || slot < 0)
            throw std::invalid_argument("read_measurements: cell outside the declared grid");
        record.y(t, slot) = y;
        if (has_clean) {
            double clean = 0.0;
            rs >> clean;
            (*record.clean)(t, slot) = clean;
        }
        ++seen[static_cast<size_t>(t)];
    }
    for (int t = 0; t <= record.max_time; ++t)
        if (seen[static_cast<size_t>(t)] != m)
            throw std::invalid_argument("read_measurements: incomplete table");
    return record;
}

}  // namespace dynphase
