#pragma once

// Reproducibility manifests.  Every run directory holds exactly one
// manifest.json: written with status "running" before compute starts,
// rewritten with status "ok"/"failed" (plus the failure cause and output file
// digests) afterwards, so a crash leaves an honest record next to any partial
// outputs.
//
// config_digest is FNV-1a-64 over a canonical text block of everything that
// determines the numbers: subcommand, software version, scheme identifiers,
// all run parameters, and subcommand extras.  Timestamps and file digests are
// deliberately outside the block.  Every CSV/JSON output cites this digest.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "torusflow/config.hpp"
#include "torusflow/tracer.hpp"

namespace torusflow {

inline constexpr const char* kSoftwareVersion = "torusflow 0.1.0";
inline constexpr const char* kNoiseSchemeId = "splitmix64-as241-v1";
inline constexpr const char* kStepperSchemeId = "lawson-ifrk4-exact-ou-v1";

std::uint64_t fnv1a64(const void* data, std::size_t size);
std::uint64_t fnv1a64(const std::string& s);
std::string digest_hex(std::uint64_t digest);
std::uint64_t digest_file(const std::string& path);

struct ManifestInfo {
    std::string subcommand;
    RunConfig config;
    std::string eval_mode = "automatic";  // tracer evaluation mode in effect
    int spline_factor = 8;
    int substeps = 1;
    // Subcommand-specific parameters, in insertion order (part of the digest).
    std::vector<std::pair<std::string, std::string>> extras;
    std::vector<std::string> inputs;   // digested when the manifest is written
    std::vector<std::string> outputs;  // digested once the run finished
};

// The canonical `key=value` block the digest runs over.
std::string canonical_core(const ManifestInfo& info);
std::string config_digest(const ManifestInfo& info);

void write_manifest_started(const std::string& path, const ManifestInfo& info);
void write_manifest_finished(const std::string& path, const ManifestInfo& info, bool ok,
                             const std::string& failure = "");

} // namespace torusflow
