#include "torusflow/manifest.hpp"

#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace torusflow {

std::uint64_t fnv1a64(const void* data, std::size_t size) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t fnv1a64(const std::string& s) { return fnv1a64(s.data(), s.size()); }

std::string digest_hex(std::uint64_t digest) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(digest));
    return buf;
}

std::uint64_t digest_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw validation_error("cannot read file for digest: '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return fnv1a64(buf.str());
}

namespace {

std::string real_repr(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string iso_now() {
    const std::time_t t = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace

std::string canonical_core(const ManifestInfo& info) {
    std::ostringstream out;
    out << "subcommand=" << info.subcommand << '\n';
    out << "software=" << kSoftwareVersion << '\n';
    out << "noise_scheme=" << kNoiseSchemeId << '\n';
    out << "stepper_scheme=" << kStepperSchemeId << '\n';
    const RunConfig& c = info.config;
    out << "epsilon=" << real_repr(c.epsilon) << '\n';
    out << "dt=" << real_repr(c.dt) << '\n';
    out << "N=" << c.cutoff << '\n';
    out << "M=" << (c.grid > 0 ? c.grid : auto_grid(c.cutoff)) << '\n';
    out << "T=" << real_repr(c.horizon) << '\n';
    out << "seed=" << c.seed << '\n';
    out << "alpha=" << real_repr(c.alpha) << '\n';
    out << "s=" << real_repr(c.sobolev) << '\n';
    out << "L=" << c.threshold << '\n';
    out << "c=" << real_repr(c.amplitude) << '\n';
    out << "burn_in=" << real_repr(c.burn_in) << '\n';
    out << "thin=" << c.thin << '\n';
    out << "eval_mode=" << info.eval_mode << '\n';
    out << "spline_factor=" << info.spline_factor << '\n';
    out << "substeps=" << info.substeps << '\n';
    for (const auto& [key, value] : info.extras) out << key << '=' << value << '\n';
    return out.str();
}

std::string config_digest(const ManifestInfo& info) {
    return digest_hex(fnv1a64(canonical_core(info)));
}

namespace {

nlohmann::json manifest_json(const ManifestInfo& info, const std::string& status,
                             const std::string& failure, bool digest_outputs) {
    nlohmann::json j;
    j["software"] = kSoftwareVersion;
    j["subcommand"] = info.subcommand;
    j["schemes"] = {{"noise", kNoiseSchemeId},
                    {"stepper", kStepperSchemeId},
                    {"eval_mode", info.eval_mode},
                    {"spline_factor", info.spline_factor},
                    {"substeps", info.substeps}};
    const RunConfig& c = info.config;
    j["params"] = {{"epsilon", c.epsilon},
                   {"dt", c.dt},
                   {"N", c.cutoff},
                   {"M", c.grid > 0 ? c.grid : auto_grid(c.cutoff)},
                   {"T", c.horizon},
                   {"seed", c.seed},
                   {"alpha", c.alpha},
                   {"s", c.sobolev},
                   {"L", c.threshold},
                   {"c", c.amplitude},
                   {"burn_in", c.burn_in},
                   {"thin", c.thin}};
    auto& extras = j["extras"] = nlohmann::json::object();
    for (const auto& [key, value] : info.extras) extras[key] = value;
    j["config_digest"] = config_digest(info);
    j["timestamp"] = iso_now();
    auto& inputs = j["inputs"] = nlohmann::json::object();
    for (const auto& path : info.inputs) inputs[path] = digest_hex(digest_file(path));
    auto& outputs = j["outputs"] = nlohmann::json::object();
    for (const auto& path : info.outputs) {
        if (!digest_outputs) {
            outputs[path] = "pending";
            continue;
        }
        try {
            outputs[path] = digest_hex(digest_file(path));
        } catch (const validation_error&) {
            outputs[path] = "missing";
        }
    }
    j["status"] = status;
    if (!failure.empty()) j["failure"] = failure;
    return j;
}

void write_json(const std::string& path, const nlohmann::json& j) {
    std::ofstream out(path);
    if (!out) throw validation_error("cannot write manifest '" + path + "'");
    out << j.dump(2) << '\n';
}

} // namespace

void write_manifest_started(const std::string& path, const ManifestInfo& info) {
    write_json(path, manifest_json(info, "running", "", false));
}

void write_manifest_finished(const std::string& path, const ManifestInfo& info, bool ok,
                             const std::string& failure) {
    write_json(path, manifest_json(info, ok ? "ok" : "failed", failure, true));
}

} // namespace torusflow
