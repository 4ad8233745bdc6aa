#include "granoise/io/manifest.hpp"

#include <array>
#include <chrono>
#include <fstream>
#include <memory>
#include <sstream>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "granoise/errors.hpp"

namespace granoise::io {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string read_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
    const std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx.get(), digest.data(), &len) != 1)
        throw Error("sha256: digest computation failed");
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

std::string sha256_file(const std::filesystem::path& path) {
    return sha256_hex(read_bytes(path));
}

std::string utc_timestamp() {
    const auto now = std::chrono::floor<std::chrono::seconds>(std::chrono::system_clock::now());
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::array<char, 32> buf{};
    std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf.data();
}

std::string config_hash(std::string_view canonical_json, std::uint64_t seed) {
    std::string material(canonical_json);
    material += "\nseed=" + std::to_string(seed);
    return sha256_hex(material);
}

void RunManifest::add_output(const std::filesystem::path& dir, const std::string& name) {
    const std::filesystem::path p = dir / name;
    outputs.push_back({name, sha256_file(p), std::filesystem::file_size(p)});
}

std::string RunManifest::to_json() const {
    ordered_json j;
    j["tool_version"] = tool_version;
    j["command"] = command;
    j["timestamp"] = timestamp;
    j["seed"] = seed;
    j["threads"] = threads;
    j["format"] = format;
    j["config_hash"] = config_hash;
    j["input_file"] = input_file;
    j["input_digest"] = input_digest;
    j["outputs"] = ordered_json::array();
    for (const auto& o : outputs) j["outputs"].push_back({{"path", o.path}, {"sha256", o.sha256}, {"bytes", o.bytes}});
    return j.dump(2) + "\n";
}

RunManifest RunManifest::from_json(std::string_view text) {
    try {
        const auto j = nlohmann::json::parse(text);
        RunManifest m;
        m.tool_version = j.at("tool_version").get<std::string>();
        m.command = j.at("command").get<std::string>();
        m.timestamp = j.at("timestamp").get<std::string>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.threads = j.at("threads").get<unsigned>();
        m.format = j.at("format").get<std::string>();
        m.config_hash = j.at("config_hash").get<std::string>();
        m.input_file = j.at("input_file").get<std::string>();
        m.input_digest = j.at("input_digest").get<std::string>();
        for (const auto& o : j.at("outputs"))
            m.outputs.push_back({o.at("path").get<std::string>(), o.at("sha256").get<std::string>(),
                                 o.at("bytes").get<std::uintmax_t>()});
        return m;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("manifest: ") + e.what());
    }
}

std::vector<std::string> verify_manifest(const std::filesystem::path& manifest_path) {
    const RunManifest m = RunManifest::from_json(read_bytes(manifest_path));
    const std::filesystem::path dir = manifest_path.parent_path();
    std::vector<std::string> bad;
    for (const auto& o : m.outputs) {
        const std::filesystem::path p = dir / o.path;
        if (!std::filesystem::exists(p) || sha256_file(p) != o.sha256) bad.push_back(o.path);
    }
    return bad;
}

}  // namespace granoise::io
