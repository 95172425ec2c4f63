#include "ffdg/manifest.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "ffdg/errors.hpp"
#include "ffdg/rng.hpp"

namespace ffdg {

std::string file_hash_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open " + path + " for hashing");
    std::uint64_t h = 0xCBF29CE484222325ull;
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        const std::streamsize n = in.gcount();
        for (std::streamsize i = 0; i < n; ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 0x100000001B3ull;
        }
    }
    char hex[17];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(h));
    return hex;
}

void write_manifest(const RunManifest& manifest, const std::string& path) {
    nlohmann::ordered_json j;
    j["command"] = manifest.command;
    nlohmann::ordered_json cfg = nlohmann::ordered_json::object();
    for (const auto& [k, v] : manifest.config) cfg[k] = v;
    j["config"] = cfg;
    nlohmann::ordered_json in = nlohmann::ordered_json::object();
    for (const auto& [k, v] : manifest.inputs) in[k] = v;
    j["inputs"] = in;
    nlohmann::ordered_json out = nlohmann::ordered_json::object();
    for (const auto& [k, v] : manifest.outputs) out[k] = v;
    j["outputs"] = out;
    j["tool_version"] = manifest.tool_version;
    j["prng"] = manifest.prng;
    j["wall_clock_s"] = manifest.wall_clock_s;

    std::ofstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot write " + path);
    f << j.dump(2) << "\n";
}

std::string manifest_recorded_hash(const std::string& file) {
    namespace fs = std::filesystem;
    const fs::path target(file);
    const fs::path manifest_path = target.parent_path() / "manifest.json";
    if (!fs::exists(manifest_path)) return "";
    std::ifstream in(manifest_path);
    if (!in) return "";
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception&) {
        return "";
    }
    if (!j.contains("outputs")) return "";
    const std::string name = target.filename().string();
    for (const auto& [key, value] : j["outputs"].items()) {
        if (fs::path(key).filename().string() == name && value.is_string())
            return value.get<std::string>();
    }
    return "";
}

}  // namespace ffdg
