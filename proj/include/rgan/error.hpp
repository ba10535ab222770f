#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace rgan {

/// Coarse failure classes. The CLI prints the category name as the first
/// token of its one-line error report and maps it to an exit code.
enum class ErrorCategory {
    config,
    validation,
    geometry,
    divergence,
    format,
    dimension,
    conflict,
    not_found,
    io,
};

inline constexpr std::string_view category_name(ErrorCategory c) noexcept
{
    switch (c) {
    case ErrorCategory::config: return "config";
    case ErrorCategory::validation: return "validation";
    case ErrorCategory::geometry: return "geometry";
    case ErrorCategory::divergence: return "divergence";
    case ErrorCategory::format: return "format";
    case ErrorCategory::dimension: return "dimension";
    case ErrorCategory::conflict: return "conflict";
    case ErrorCategory::not_found: return "not_found";
    case ErrorCategory::io: return "io";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorCategory category, const std::string& message)
        : std::runtime_error(message), category_(category)
    {
    }

    ErrorCategory category() const noexcept { return category_; }

private:
    ErrorCategory category_;
};

[[noreturn]] inline void fail(ErrorCategory category, const std::string& message)
{
    throw Error(category, message);
}

/// create_directories with failures reported as io errors.
inline void make_directories(const std::filesystem::path& dir)
{
    if (dir.empty()) return;
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) fail(ErrorCategory::io, "cannot create directory '" + dir.string() + "': " + ec.message());
}

inline void make_parent_directories(const std::filesystem::path& file) { make_directories(file.parent_path()); }

} // namespace rgan
