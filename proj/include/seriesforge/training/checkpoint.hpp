#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "seriesforge/data/series.hpp"
#include "seriesforge/nets/bundle.hpp"
#include "seriesforge/training/config.hpp"

namespace seriesforge::training {

inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
    TrainConfig config;
    std::size_t features = 0;
    data::ScalerParams scaler;
    int phase = 0;
    std::size_t epoch = 0;
    std::string rng_state;
    nets::NamedArrays arrays;

    friend bool operator==(const Checkpoint& a, const Checkpoint& b) {
        return nlohmann::json(to_json(a.config)) == nlohmann::json(to_json(b.config)) && a.features == b.features &&
               a.scaler == b.scaler && a.phase == b.phase && a.epoch == b.epoch && a.rng_state == b.rng_state &&
               a.arrays == b.arrays;
    }
};

// Layout: "SFORGECK", u32 version, u64 header length, JSON header (config,
// scaler, counters, array table), little-endian f64 payload in table order,
// then the SHA-256 of everything before it.
std::string serialize_checkpoint(const Checkpoint& ckpt);
// CorruptionError on a bad magic, truncation or digest mismatch;
// VersionError on an unsupported version.
Checkpoint parse_checkpoint(std::string_view bytes);

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path);
Checkpoint load_checkpoint(const std::filesystem::path& path);

// A bundle shaped by the checkpoint's config and filled with its arrays.
nets::NetworkBundle bundle_from_checkpoint(const Checkpoint& ckpt);

}  // namespace seriesforge::training
