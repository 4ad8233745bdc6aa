#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace granoise::io {

/// Lower-case hex SHA-256 digest.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

struct ManifestOutput {
    std::string path;  // relative to the manifest directory
    std::string sha256;
    std::uintmax_t bytes = 0;
};

/// Sidecar describing one CLI invocation.
struct RunManifest {
    std::string tool_version;
    std::string command;
    std::string timestamp;  // UTC, ISO 8601
    std::uint64_t seed = 0;
    unsigned threads = 0;
    std::string format;
    std::string config_hash;  // SHA-256 of the merged scenario and the seed
    std::string input_file;
    std::string input_digest;  // SHA-256 of the scenario file bytes
    std::vector<ManifestOutput> outputs;

    /// Records an output already written to dir / name.
    void add_output(const std::filesystem::path& dir, const std::string& name);
    std::string to_json() const;
    static RunManifest from_json(std::string_view text);
};

std::string utc_timestamp();

/// SHA-256 over the canonical scenario JSON followed by the seed.
std::string config_hash(std::string_view canonical_json, std::uint64_t seed);

/// Names of outputs whose current digest differs from the manifest (missing
/// files included). Empty means the manifest validates.
std::vector<std::string> verify_manifest(const std::filesystem::path& manifest_path);

}  // namespace granoise::io
