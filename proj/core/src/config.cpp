#include "torusflow/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace torusflow {

int auto_grid(int cutoff) {
    const int m = 3 * cutoff;
    return m + (m % 2);
}

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

double parse_real(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw validation_error("config key '" + key + "': expected a number, got '" +
                               value + "'");
    }
}

template <typename Int>
Int parse_int(const std::string& key, const std::string& value) {
    Int v{};
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc{} || ptr != value.data() + value.size())
        throw validation_error("config key '" + key + "': expected an integer, got '" +
                               value + "'");
    return v;
}

} // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw validation_error("config line " + std::to_string(lineno) +
                                   ": expected 'key = value', got '" + trim(line) + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw validation_error("config line " + std::to_string(lineno) +
                                   ": empty key or value");
        if (key == "epsilon")
            cfg.epsilon = parse_real(key, value);
        else if (key == "dt")
            cfg.dt = parse_real(key, value);
        else if (key == "N")
            cfg.cutoff = parse_int<int>(key, value);
        else if (key == "M")
            cfg.grid = parse_int<int>(key, value);
        else if (key == "T")
            cfg.horizon = parse_real(key, value);
        else if (key == "seed")
            cfg.seed = parse_int<std::uint64_t>(key, value);
        else if (key == "alpha")
            cfg.alpha = parse_real(key, value);
        else if (key == "s")
            cfg.sobolev = parse_real(key, value);
        else if (key == "L")
            cfg.threshold = parse_int<int>(key, value);
        else if (key == "c")
            cfg.amplitude = parse_real(key, value);
        else if (key == "burn_in")
            cfg.burn_in = parse_real(key, value);
        else if (key == "thin")
            cfg.thin = parse_int<int>(key, value);
        else
            throw validation_error("config line " + std::to_string(lineno) +
                                   ": unknown key '" + key + "'");
    }
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

SimParams sim_params(const RunConfig& cfg) {
    SimParams p;
    p.epsilon = cfg.epsilon;
    p.dt = cfg.dt;
    p.cutoff = cfg.cutoff;
    p.grid = cfg.grid > 0 ? cfg.grid : auto_grid(cfg.cutoff);
    p.horizon = cfg.horizon;
    p.seed = cfg.seed;
    if (cfg.burn_in < 0.0) throw validation_error("burn_in must be non-negative");
    if (cfg.thin < 1) throw validation_error("thin must be >= 1");
    p.validate();
    return p;
}

ForcingSpec forcing_spec(const RunConfig& cfg) {
    return build_forcing(cfg.cutoff, cfg.sobolev, cfg.alpha, cfg.threshold, cfg.amplitude);
}

} // namespace torusflow
