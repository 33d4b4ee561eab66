#pragma once

#include <json.hpp>

#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "seriesforge/error.hpp"

namespace seriesforge::detail {

// Reads keys from one JSON object, rejecting anything it was not asked about.
class Reader {
public:
    Reader(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(where() + "expected an object");
    }

    template <class T>
    void get(std::string_view key, T& out) {
        seen_.emplace_back(key);
        auto it = j_.find(std::string(key));
        if (it == j_.end()) return;
        try {
            if constexpr (std::is_same_v<T, bool>) {
                if (!it->is_boolean()) throw ConfigError(where() + std::string(key) + ": expected a boolean");
            } else if constexpr (std::is_integral_v<T>) {
                if (!it->is_number_unsigned()) {
                    throw ConfigError(where() + std::string(key) + ": expected a non-negative integer");
                }
            } else if constexpr (std::is_floating_point_v<T>) {
                if (!it->is_number()) throw ConfigError(where() + std::string(key) + ": expected a number");
            }
            out = it->template get<T>();
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError(where() + std::string(key) + ": " + e.what());
        }
    }

    Reader child(std::string_view key) {
        seen_.emplace_back(key);
        auto it = j_.find(std::string(key));
        static const nlohmann::json empty = nlohmann::json::object();
        return Reader(it == j_.end() ? empty : *it, path_ + std::string(key) + ".");
    }

    void mark(std::string_view key) { seen_.emplace_back(key); }

    bool has(std::string_view key) const { return j_.contains(std::string(key)); }

    void finish() const {
        for (const auto& [k, v] : j_.items()) {
            bool known = false;
            for (const auto& s : seen_) known = known || s == k;
            if (!known) throw ConfigError(where() + "unknown key '" + k + "'");
        }
    }

private:
    std::string where() const { return path_.empty() ? "config: " : "config " + path_.substr(0, path_.size() - 1) + ": "; }

    const nlohmann::json& j_;
    std::string path_;
    std::vector<std::string> seen_;
};

}  // namespace seriesforge::detail
