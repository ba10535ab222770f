#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace rgan {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Counter-based child seed: depends only on (parent, stream, index), never
/// on how many other children were drawn.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t stream,
                                    std::uint64_t index) noexcept
{
    return splitmix64(splitmix64(parent ^ splitmix64(stream + 0x632be59bd9b4e019ULL)) ^ index);
}

/// Incremental 64-bit FNV-1a, used for file checksums and config hashes.
class Fnv1a {
public:
    void update(std::span<const std::byte> bytes) noexcept
    {
        for (std::byte b : bytes) {
            state_ ^= static_cast<std::uint64_t>(b);
            state_ *= 0x100000001b3ULL;
        }
    }

    void update(const void* data, std::size_t size) noexcept
    {
        update(std::span<const std::byte>(static_cast<const std::byte*>(data), size));
    }

    void update(std::string_view text) noexcept { update(text.data(), text.size()); }

    std::uint64_t digest() const noexcept { return state_; }

private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

inline std::uint64_t fnv1a64(const void* data, std::size_t size) noexcept
{
    Fnv1a h;
    h.update(data, size);
    return h.digest();
}

} // namespace rgan
