#pragma once

#include <string>
#include <utility>
#include <vector>

namespace ffdg {

// FNV-1a 64 over the file bytes, as 16 hex digits.
std::string file_hash_hex(const std::string& path);

// Run record written next to every artifact a command produces. The manifest
// carries wall-clock time and is therefore the one non-reproducible output.
struct RunManifest {
    std::string command;
    std::vector<std::pair<std::string, std::string>> config;  // resolved flag values
    std::vector<std::pair<std::string, std::string>> inputs;  // path -> hash
    std::vector<std::pair<std::string, std::string>> outputs; // path -> hash
    std::string tool_version;
    std::string prng;
    double wall_clock_s = 0.0;
};

void write_manifest(const RunManifest& manifest, const std::string& path);

// Returns the recorded hash of `file` from the manifest that sits next to
// it (same directory, manifest.json), or empty when there is none.
std::string manifest_recorded_hash(const std::string& file);

}  // namespace ffdg
