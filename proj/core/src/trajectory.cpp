#include "torusflow/trajectory.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace torusflow {

namespace {
constexpr const char* kMagic = "torusflow-trajectory v1";

double parse_header_real(const std::string& line, const char* key) {
    const std::string prefix = std::string(key) + "=";
    if (line.rfind(prefix, 0) != 0)
        throw validation_error("load_trajectory: expected '" + prefix + "...', got '" + line + "'");
    try {
        size_t used = 0;
        const double v = std::stod(line.substr(prefix.size()), &used);
        if (used != line.size() - prefix.size())
            throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw validation_error("load_trajectory: unparsable header line '" + line + "'");
    }
}
} // namespace

void save_trajectory(std::ostream& os, const TrajectoryView& tr) {
    const std::int64_t states = tr.segments() + 1;
    char buf[64];
    os << kMagic << "\n";
    std::snprintf(buf, sizeof buf, "dt=%.17g\n", tr.dt());
    os << buf;
    os << "states=" << states << "\n";
    for (std::int64_t i = 0; i < states; ++i) save_field(os, tr.field(i));
    if (!os) throw validation_error("save_trajectory: stream write failed");
}

StoredTrajectory load_trajectory(std::istream& is) {
    std::string line;
    if (!std::getline(is, line) || line != kMagic)
        throw validation_error("load_trajectory: missing '" + std::string(kMagic) + "' header");
    if (!std::getline(is, line)) throw validation_error("load_trajectory: truncated header");
    const double dt = parse_header_real(line, "dt");
    if (!(dt > 0.0)) throw validation_error("load_trajectory: dt must be positive");
    if (!std::getline(is, line)) throw validation_error("load_trajectory: truncated header");
    const double states_real = parse_header_real(line, "states");
    const auto states = static_cast<std::int64_t>(states_real);
    if (states < 2 || double(states) != states_real)
        throw validation_error("load_trajectory: state count must be an integer >= 2");
    StoredTrajectory tr(dt);
    tr.reserve(states);
    for (std::int64_t i = 0; i < states; ++i) {
        SpectralVelocity f = load_field(is);
        if (i > 0 && f.cutoff() != tr.field(0).cutoff())
            throw validation_error("load_trajectory: mixed cutoffs between states");
        tr.append(std::move(f));
    }
    return tr;
}

void save_trajectory_file(const std::string& path, const TrajectoryView& tr) {
    std::ofstream os(path);
    if (!os) throw validation_error("save_trajectory_file: cannot open '" + path + "'");
    save_trajectory(os, tr);
}

StoredTrajectory load_trajectory_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw validation_error("load_trajectory_file: cannot open '" + path + "'");
    return load_trajectory(is);
}

} // namespace torusflow
