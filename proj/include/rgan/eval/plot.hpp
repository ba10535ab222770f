#pragma once

// CSV tables and minimal SVG renderings (line plots and heatmaps).

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "rgan/error.hpp"
#include "rgan/eval/spectrogram.hpp"

namespace rgan {

inline std::ofstream open_output(const std::filesystem::path& path)
{
    make_parent_directories(path);
    std::ofstream f(path, std::ios::trunc);
    if (!f) fail(ErrorCategory::io, "cannot write '" + path.string() + "'");
    f << std::setprecision(17);
    return f;
}

/// Columns of equal length under a header row.
inline void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
                      const std::vector<std::vector<double>>& columns)
{
    if (header.size() != columns.size()) fail(ErrorCategory::dimension, "csv header/column count mismatch");
    const std::size_t rows = columns.empty() ? 0 : columns.front().size();
    for (const auto& c : columns)
        if (c.size() != rows) fail(ErrorCategory::dimension, "csv columns differ in length");
    auto f = open_output(path);
    for (std::size_t k = 0; k < header.size(); ++k) f << (k ? "," : "") << header[k];
    f << "\n";
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t k = 0; k < columns.size(); ++k) f << (k ? "," : "") << columns[k][r];
        f << "\n";
    }
}

/// Frames as rows: time_s, then one column per bin frequency.
inline void write_spectrogram_csv(const std::filesystem::path& path, const Spectrogram& s)
{
    auto f = open_output(path);
    f << "# window=" << s.window << " window_len=" << s.params.window_len << " overlap=" << s.params.overlap << "\n";
    f << "time_s";
    for (std::size_t b = 0; b < s.bins; ++b) f << "," << s.frequency(b);
    f << "\n";
    for (std::size_t fr = 0; fr < s.frames; ++fr) {
        f << s.frame_time(fr);
        for (std::size_t b = 0; b < s.bins; ++b) f << "," << s.at(fr, b);
        f << "\n";
    }
}

struct Series {
    std::string name;
    std::vector<double> y;
};

inline void write_line_svg(const std::filesystem::path& path, const std::vector<Series>& series, const std::string& title,
                           int width = 800, int height = 300)
{
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
    double lo = 0.0, hi = 0.0;
    std::size_t n = 1;
    for (const auto& s : series) {
        n = std::max(n, s.y.size());
        for (double v : s.y) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (hi == lo) hi = lo + 1.0;
    const double pad = 30.0, w = width - 2 * pad, h = height - 2 * pad;
    auto f = open_output(path);
    f << std::setprecision(6);
    f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height << "\">\n";
    f << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    f << "<text x=\"" << pad << "\" y=\"18\" font-size=\"14\">" << title << "</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        f << "<polyline fill=\"none\" stroke-width=\"1\" stroke=\"" << palette[k % 5] << "\" points=\"";
        for (std::size_t i = 0; i < s.y.size(); ++i) {
            const double x = pad + w * static_cast<double>(i) / static_cast<double>(std::max<std::size_t>(n - 1, 1));
            const double y = pad + h * (hi - s.y[i]) / (hi - lo);
            f << x << "," << y << " ";
        }
        f << "\"/>\n";
        f << "<text x=\"" << width - pad - 120 << "\" y=\"" << 18 + 14 * k << "\" font-size=\"12\" fill=\""
          << palette[k % 5] << "\">" << s.name << "</text>\n";
    }
    f << "</svg>\n";
}

/// dB-scaled heatmap, time left to right, frequency bottom to top.
inline void write_spectrogram_svg(const std::filesystem::path& path, const Spectrogram& s, double floor_db = -60.0)
{
    double peak = 0.0;
    for (double v : s.magnitude) peak = std::max(peak, v);
    if (!(peak > 0.0)) peak = 1.0;
    const int cw = 2, ch = 1;
    auto f = open_output(path);
    f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << s.frames * cw << "\" height=\"" << s.bins * ch
      << "\" shape-rendering=\"crispEdges\">\n";
    for (std::size_t fr = 0; fr < s.frames; ++fr) {
        for (std::size_t b = 0; b < s.bins; ++b) {
            const double db = 20.0 * std::log10(std::max(s.at(fr, b) / peak, 1e-12));
            const double u = std::clamp(1.0 - db / floor_db, 0.0, 1.0);
            const int r = static_cast<int>(255 * u), g = static_cast<int>(255 * u * u), bl = static_cast<int>(255 * (1 - u));
            f << "<rect x=\"" << fr * cw << "\" y=\"" << (s.bins - 1 - b) * ch << "\" width=\"" << cw << "\" height=\"" << ch
              << "\" fill=\"rgb(" << r << "," << g << "," << bl << ")\"/>\n";
        }
    }
    f << "</svg>\n";
}

} // namespace rgan
