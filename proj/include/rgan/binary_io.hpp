#pragma once

// Little-endian primitives over std::ostream / std::istream. The build only
// targets little-endian hosts, so values are written in native order.

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "rgan/error.hpp"
#include "rgan/rng.hpp"

namespace rgan {

static_assert(std::endian::native == std::endian::little, "binary formats assume a little-endian host");

/// Writer that folds everything it emits into a running FNV-1a checksum.
class BinaryWriter {
public:
    explicit BinaryWriter(std::ostream& out) : out_(out) {}

    void bytes(const void* data, std::size_t size)
    {
        out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
        hash_.update(data, size);
        if (!out_) fail(ErrorCategory::io, "write failed");
    }

    template <class T>
        requires std::is_arithmetic_v<T>
    void value(T v)
    {
        bytes(&v, sizeof v);
    }

    template <class T>
        requires std::is_arithmetic_v<T>
    void array(std::span<const T> v)
    {
        bytes(v.data(), v.size_bytes());
    }

    void string(const std::string& s)
    {
        value<std::uint64_t>(s.size());
        bytes(s.data(), s.size());
    }

    std::uint64_t checksum() const { return hash_.digest(); }
    void reset_checksum() { hash_ = Fnv1a{}; }

private:
    std::ostream& out_;
    Fnv1a hash_;
};

class BinaryReader {
public:
    explicit BinaryReader(std::istream& in, std::string what) : in_(in), what_(std::move(what)) {}

    void bytes(void* data, std::size_t size)
    {
        in_.read(static_cast<char*>(data), static_cast<std::streamsize>(size));
        if (static_cast<std::size_t>(in_.gcount()) != size) fail(ErrorCategory::format, what_ + ": truncated");
        hash_.update(data, size);
    }

    template <class T>
        requires std::is_arithmetic_v<T>
    T value()
    {
        T v{};
        bytes(&v, sizeof v);
        return v;
    }

    template <class T>
        requires std::is_arithmetic_v<T>
    void array(std::span<T> v)
    {
        bytes(v.data(), v.size_bytes());
    }

    std::string string(std::size_t max_len = std::size_t{1} << 28)
    {
        const auto n = value<std::uint64_t>();
        if (n > max_len) fail(ErrorCategory::format, what_ + ": implausible string length");
        std::string s(n, '\0');
        bytes(s.data(), n);
        return s;
    }

    void expect_magic(std::string_view magic)
    {
        std::string got(magic.size(), '\0');
        bytes(got.data(), got.size());
        if (got != magic) fail(ErrorCategory::format, what_ + ": bad magic");
    }

    /// Reads a trailing checksum and compares it with everything read so far.
    void expect_checksum()
    {
        const auto expected = hash_.digest();
        std::uint64_t stored = 0;
        in_.read(reinterpret_cast<char*>(&stored), sizeof stored);
        if (in_.gcount() != sizeof stored) fail(ErrorCategory::format, what_ + ": truncated");
        if (stored != expected) fail(ErrorCategory::format, what_ + ": checksum mismatch");
    }

    bool at_end()
    {
        return in_.peek() == std::char_traits<char>::eof();
    }

    std::uint64_t checksum() const { return hash_.digest(); }
    void reset_checksum() { hash_ = Fnv1a{}; }
    const std::string& what() const { return what_; }

private:
    std::istream& in_;
    std::string what_;
    Fnv1a hash_;
};

} // namespace rgan
