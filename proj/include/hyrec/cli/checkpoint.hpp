#pragma once

// Checkpoints are two files: a JSON manifest at <path> and a raw
// little-endian float32 blob at <path>.bin. The manifest indexes the blob by
// tensor name and carries FNV-1a checksums of the blob and of itself.

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hyrec/error.hpp"
#include "hyrec/numerics/tensor.hpp"

namespace hyrec::cli {

using json = nlohmann::json;

inline constexpr const char* kCheckpointFormat = "HYREC-CKPT";
inline constexpr int kCheckpointVersion = 1;

inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xcbf29ce484222325ull) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

/// Writes `contents` to a sibling temp file, then renames it over `path`.
inline void atomic_write(const std::filesystem::path& path, std::string_view contents) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error("cannot write '" + tmp.string() + "'");
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) throw Error("short write to '" + tmp.string() + "'");
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw Error("cannot rename '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
}

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::filesystem::path blob_path(const std::filesystem::path& manifest) {
    auto p = manifest;
    p += ".bin";
    return p;
}

namespace detail {

inline void put_f32(std::string& out, float v) {
    auto bits = std::bit_cast<std::uint32_t>(v);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
    char b[4];
    std::memcpy(b, &bits, 4);
    out.append(b, 4);
}

inline float get_f32(const char* p) {
    std::uint32_t bits;
    std::memcpy(&bits, p, 4);
    if constexpr (std::endian::native == std::endian::big) bits = __builtin_bswap32(bits);
    return std::bit_cast<float>(bits);
}

/// Checksum of the manifest with its own "manifest_checksum" field removed.
inline std::string manifest_digest(json m) {
    m.erase("manifest_checksum");
    return hex64(fnv1a64(m.dump()));
}

}  // namespace detail

struct LoadedCheckpoint {
    json manifest;
    std::map<std::string, num::Tensor<float>> tensors;
};

/// Saves `manifest` (model kind, config, seed, metrics...) together with the
/// parameters. Tensor index, format fields and checksums are filled in here.
template <class Params>
void save_checkpoint(const std::filesystem::path& path, json manifest, const Params& params) {
    std::string blob;
    json index = json::array();
    for (const auto& p : params) {
        const auto& t = p.var.value();
        index.push_back({{"name", p.name}, {"offset", blob.size()}, {"shape", t.shape()}});
        for (auto v : t.data()) detail::put_f32(blob, static_cast<float>(v));
    }
    manifest["format"] = kCheckpointFormat;
    manifest["version"] = kCheckpointVersion;
    manifest["tensors"] = index;
    manifest["blob"] = {{"file", blob_path(path).filename().string()},
                        {"bytes", blob.size()},
                        {"dtype", "float32-le"},
                        {"checksum", hex64(fnv1a64(blob))}};
    manifest["manifest_checksum"] = detail::manifest_digest(manifest);
    atomic_write(blob_path(path), blob);
    atomic_write(path, manifest.dump(2) + "\n");
}

/// Reads and verifies a checkpoint. Throws FormatError on a version mismatch
/// (with the differing fields) or on any checksum failure.
inline LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
    LoadedCheckpoint ck;
    try {
        ck.manifest = json::parse(read_file(path));
    } catch (const json::exception& e) {
        throw FormatError("checkpoint manifest '" + path.string() + "' is not valid JSON: " + e.what());
    }
    const auto& m = ck.manifest;
    if (m.value("format", std::string()) != kCheckpointFormat || m.value("version", -1) != kCheckpointVersion) {
        std::ostringstream diff;
        diff << "checkpoint '" << path.string() << "' has an incompatible manifest:\n"
             << "  - format: " << m.value("format", std::string("<missing>")) << "\n  + format: " << kCheckpointFormat
             << "\n  - version: " << (m.contains("version") ? m["version"].dump() : "<missing>")
             << "\n  + version: " << kCheckpointVersion;
        throw FormatError(diff.str());
    }
    if (m.value("manifest_checksum", std::string()) != detail::manifest_digest(m))
        throw FormatError("checkpoint manifest '" + path.string() + "' failed its checksum");
    const auto blob = read_file(blob_path(path));
    if (blob.size() != m.at("blob").at("bytes").get<std::size_t>() ||
        hex64(fnv1a64(blob)) != m.at("blob").at("checksum").get<std::string>())
        throw FormatError("checkpoint blob '" + blob_path(path).string() + "' failed its checksum");
    for (const auto& t : m.at("tensors")) {
        auto shape = t.at("shape").get<num::Shape>();
        auto offset = t.at("offset").get<std::size_t>();
        const auto n = num::shape_size(shape);
        if (offset + 4 * n > blob.size()) throw FormatError("tensor '" + t.at("name").get<std::string>() + "' overruns blob");
        std::vector<float> data(n);
        for (std::size_t i = 0; i < n; ++i) data[i] = detail::get_f32(blob.data() + offset + 4 * i);
        ck.tensors.emplace(t.at("name").get<std::string>(), num::Tensor<float>(std::move(shape), std::move(data)));
    }
    return ck;
}

/// Copies loaded tensors into a model's parameters; names and shapes must match.
template <class Params>
void restore_parameters(Params& params, const LoadedCheckpoint& ck) {
    if (ck.tensors.size() != params.size())
        throw FormatError("checkpoint holds " + std::to_string(ck.tensors.size()) + " tensors, model expects " +
                          std::to_string(params.size()));
    for (auto& p : params) {
        auto it = ck.tensors.find(p.name);
        if (it == ck.tensors.end()) throw FormatError("checkpoint lacks parameter '" + p.name + "'");
        auto& dst = p.var.mutable_value();
        if (dst.shape() != it->second.shape())
            throw FormatError("parameter '" + p.name + "' has shape " + num::shape_str(it->second.shape()) +
                              ", model expects " + num::shape_str(dst.shape()));
        for (std::size_t i = 0; i < dst.size(); ++i)
            dst[i] = static_cast<typename std::decay_t<decltype(dst)>::value_type>(it->second[i]);
    }
}

}  // namespace hyrec::cli
