#include "seriesforge/training/checkpoint.hpp"

#include <openssl/evp.h>

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "seriesforge/error.hpp"

namespace seriesforge::training {

namespace {

constexpr std::string_view kMagic = "SFORGECK";
constexpr std::size_t kDigestSize = 32;
constexpr std::size_t kPrefixSize = 8 + 4 + 8;

std::array<unsigned char, kDigestSize> sha256(std::string_view bytes) {
    std::array<unsigned char, kDigestSize> out{};
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 || len != kDigestSize) {
        throw Error("checkpoint: SHA-256 computation failed");
    }
    return out;
}

void put_le(std::string& out, std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint64_t get_le(std::string_view in, std::size_t offset, int bytes) {
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) {
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(in[offset + i])) << (8 * i);
    }
    return v;
}

}  // namespace

std::string serialize_checkpoint(const Checkpoint& ckpt) {
    nlohmann::json header;
    header["config"] = to_json(ckpt.config);
    header["features"] = ckpt.features;
    header["scaler"] = {{"min", ckpt.scaler.min}, {"max", ckpt.scaler.max}};
    header["phase"] = ckpt.phase;
    header["epoch"] = ckpt.epoch;
    header["rng_state"] = ckpt.rng_state;
    nlohmann::json table = nlohmann::json::array();
    for (const auto& a : ckpt.arrays) {
        if (numkit::shape_size(a.shape) != a.values.size()) {
            throw ContractError("checkpoint: array '" + a.name + "' has " + std::to_string(a.values.size()) +
                                " values for shape " + numkit::shape_str(a.shape));
        }
        table.push_back({{"name", a.name}, {"shape", a.shape}});
    }
    header["arrays"] = table;
    const std::string text = header.dump();

    std::string out(kMagic);
    put_le(out, kCheckpointVersion, 4);
    put_le(out, text.size(), 8);
    out += text;
    for (const auto& a : ckpt.arrays) {
        for (double v : a.values) put_le(out, std::bit_cast<std::uint64_t>(v), 8);
    }
    const auto digest = sha256(out);
    out.append(reinterpret_cast<const char*>(digest.data()), digest.size());
    return out;
}

Checkpoint parse_checkpoint(std::string_view bytes) {
    if (bytes.size() < kPrefixSize + kDigestSize) throw CorruptionError("checkpoint: truncated file");
    if (bytes.substr(0, kMagic.size()) != kMagic) throw CorruptionError("checkpoint: bad magic");
    const std::string_view body = bytes.substr(0, bytes.size() - kDigestSize);
    const auto digest = sha256(body);
    if (std::memcmp(digest.data(), bytes.data() + body.size(), kDigestSize) != 0) {
        throw CorruptionError("checkpoint: digest mismatch (file truncated or modified)");
    }
    const auto version = static_cast<std::uint32_t>(get_le(bytes, 8, 4));
    if (version != kCheckpointVersion) {
        throw VersionError("checkpoint: unsupported version " + std::to_string(version) + " (expected " +
                           std::to_string(kCheckpointVersion) + ")");
    }
    const std::uint64_t header_len = get_le(bytes, 12, 8);
    if (header_len > body.size() - kPrefixSize) throw CorruptionError("checkpoint: header length out of range");

    Checkpoint ckpt;
    std::size_t offset = kPrefixSize + header_len;
    try {
        const auto header = nlohmann::json::parse(body.substr(kPrefixSize, header_len));
        ckpt.config = train_config_from_json(header.at("config"));
        ckpt.features = header.at("features").get<std::size_t>();
        ckpt.scaler.min = header.at("scaler").at("min").get<std::vector<double>>();
        ckpt.scaler.max = header.at("scaler").at("max").get<std::vector<double>>();
        ckpt.phase = header.at("phase").get<int>();
        ckpt.epoch = header.at("epoch").get<std::size_t>();
        ckpt.rng_state = header.at("rng_state").get<std::string>();
        for (const auto& entry : header.at("arrays")) {
            nets::NamedArray a;
            a.name = entry.at("name").get<std::string>();
            a.shape = entry.at("shape").get<numkit::Shape>();
            const std::size_t count = numkit::shape_size(a.shape);
            if (count > (body.size() - offset) / 8) throw CorruptionError("checkpoint: payload shorter than table");
            a.values.resize(count);
            for (std::size_t i = 0; i < count; ++i) {
                a.values[i] = std::bit_cast<double>(get_le(body, offset, 8));
                offset += 8;
            }
            ckpt.arrays.push_back(std::move(a));
        }
    } catch (const nlohmann::json::exception& e) {
        throw CorruptionError(std::string("checkpoint: malformed header: ") + e.what());
    } catch (const ConfigError& e) {
        throw CorruptionError(std::string("checkpoint: malformed config echo: ") + e.what());
    }
    if (offset != body.size()) throw CorruptionError("checkpoint: trailing bytes after payload");
    return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
    const std::string bytes = serialize_checkpoint(ckpt);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_checkpoint(ss.str());
}

nets::NetworkBundle bundle_from_checkpoint(const Checkpoint& ckpt) {
    numkit::Rng scratch(0);
    auto bundle = nets::NetworkBundle::init(ckpt.config.bundle_dims(ckpt.features), scratch);
    try {
        bundle.restore(ckpt.arrays);
    } catch (const Error& e) {
        throw CorruptionError(std::string("checkpoint: arrays do not match the configured model: ") + e.what());
    }
    return bundle;
}

}  // namespace seriesforge::training
