#pragma once

// Plain-text `key = value` configuration shared by every subcommand.
//
//   # comment
//   dx_mm = 0.5
//   gen_channels = 512, 256, 128
//
// Keys are flat; each consumer pulls the keys it owns and the file as a
// whole is checked against the union of known keys, so typos fail loudly.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rgan/error.hpp"
#include "rgan/rng.hpp"

namespace rgan {

class KeyValueConfig {
public:
    KeyValueConfig() = default;

    static KeyValueConfig parse(std::string_view text, std::string_view origin = "<string>")
    {
        KeyValueConfig cfg;
        std::istringstream in{std::string(text)};
        std::string line;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
            const auto body = trim(line);
            if (body.empty()) continue;
            const auto eq = body.find('=');
            if (eq == std::string_view::npos) {
                fail(ErrorCategory::config, std::string(origin) + ":" + std::to_string(lineno) + ": expected key = value");
            }
            const auto key = std::string(trim(body.substr(0, eq)));
            const auto value = std::string(trim(body.substr(eq + 1)));
            if (key.empty()) fail(ErrorCategory::config, std::string(origin) + ":" + std::to_string(lineno) + ": empty key");
            if (cfg.values_.count(key)) {
                fail(ErrorCategory::config, std::string(origin) + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
            }
            cfg.values_[key] = value;
        }
        return cfg;
    }

    static KeyValueConfig load(const std::string& path)
    {
        std::ifstream f(path);
        if (!f) fail(ErrorCategory::config, "cannot open config file '" + path + "'");
        std::stringstream ss;
        ss << f.rdbuf();
        return parse(ss.str(), path);
    }

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
    const std::map<std::string, std::string>& entries() const { return values_; }

    /// Throws a config error naming the first key not in `known`.
    void reject_unknown(const std::set<std::string>& known) const
    {
        for (const auto& [k, v] : values_) {
            if (!known.count(k)) fail(ErrorCategory::config, "unknown config key '" + k + "'");
        }
    }

    double get_double(const std::string& key, double fallback) const
    {
        auto it = values_.find(key);
        return it == values_.end() ? fallback : to_double(key, it->second);
    }

    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const
    {
        auto it = values_.find(key);
        return it == values_.end() ? fallback : to_u64(key, it->second);
    }

    std::string get_string(const std::string& key, const std::string& fallback) const
    {
        auto it = values_.find(key);
        return it == values_.end() ? fallback : it->second;
    }

    std::vector<std::uint64_t> get_u64_list(const std::string& key, std::vector<std::uint64_t> fallback) const
    {
        auto it = values_.find(key);
        if (it == values_.end()) return fallback;
        std::vector<std::uint64_t> out;
        std::string_view rest = it->second;
        while (!rest.empty()) {
            const auto comma = rest.find(',');
            const auto item = trim(rest.substr(0, comma));
            if (item.empty()) fail(ErrorCategory::config, "empty list element in '" + key + "'");
            out.push_back(to_u64(key, std::string(item)));
            if (comma == std::string_view::npos) break;
            rest = rest.substr(comma + 1);
        }
        return out;
    }

    /// Stable hash of the effective key/value set (used in reproducibility stamps).
    std::uint64_t hash() const
    {
        Fnv1a h;
        for (const auto& [k, v] : values_) {
            h.update(k);
            h.update("=");
            h.update(v);
            h.update("\n");
        }
        return h.digest();
    }

private:
    static std::string_view trim(std::string_view s)
    {
        const auto ws = " \t\r\n";
        const auto b = s.find_first_not_of(ws);
        if (b == std::string_view::npos) return {};
        const auto e = s.find_last_not_of(ws);
        return s.substr(b, e - b + 1);
    }

    static double to_double(const std::string& key, const std::string& v)
    {
        try {
            std::size_t used = 0;
            double d = std::stod(v, &used);
            if (used != v.size()) throw std::invalid_argument(v);
            return d;
        } catch (const std::exception&) {
            fail(ErrorCategory::config, "config key '" + key + "': not a number: '" + v + "'");
        }
    }

    static std::uint64_t to_u64(const std::string& key, const std::string& v)
    {
        std::uint64_t out = 0;
        auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
        if (ec != std::errc{} || ptr != v.data() + v.size()) {
            fail(ErrorCategory::config, "config key '" + key + "': not a non-negative integer: '" + v + "'");
        }
        return out;
    }

    std::map<std::string, std::string> values_;
};

} // namespace rgan
