#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "rgan/error.hpp"
#include "rgan/eval/fft.hpp"

namespace rgan {

/// Symmetric Hamming window, 0.54 - 0.46 cos(2 pi n / (N - 1)).
inline std::vector<double> hamming_window(std::size_t n)
{
    if (n == 0) fail(ErrorCategory::dimension, "window length must be >= 1");
    std::vector<double> w(n, 1.0);
    if (n == 1) return w;
    for (std::size_t k = 0; k < n; ++k)
        w[k] = 0.54 - 0.46 * std::cos(2.0 * phys::pi * static_cast<double>(k) / static_cast<double>(n - 1));
    return w;
}

struct SpectrogramParams {
    std::size_t window_len = 700;
    std::size_t overlap = 680;

    std::size_t hop() const { return window_len - overlap; }
    std::size_t bins() const { return window_len / 2 + 1; }
    std::size_t frames(std::size_t len) const { return len < window_len ? 0 : (len - window_len) / hop() + 1; }

    void validate() const
    {
        if (window_len == 0 || overlap >= window_len)
            fail(ErrorCategory::config, "spectrogram needs window_len >= 1 and overlap < window_len");
    }
};

/// One-sided STFT magnitude; row f holds frame f, column b frequency bin b.
struct Spectrogram {
    std::size_t frames = 0, bins = 0;
    SpectrogramParams params;
    double dt_record = 0.0;
    std::string window = "hamming";
    std::vector<double> magnitude;

    double at(std::size_t f, std::size_t b) const { return magnitude[f * bins + b]; }
    double frequency(std::size_t b) const
    {
        return static_cast<double>(b) / (static_cast<double>(params.window_len) * dt_record);
    }
    /// Time at the window centre.
    double frame_time(std::size_t f) const
    {
        return (static_cast<double>(f * params.hop()) + 0.5 * static_cast<double>(params.window_len - 1)) * dt_record;
    }
};

inline Spectrogram spectrogram(const std::vector<double>& trace, double dt_record, const SpectrogramParams& p = {})
{
    p.validate();
    if (trace.size() < p.window_len)
        fail(ErrorCategory::dimension, "trace length " + std::to_string(trace.size()) + " shorter than window " +
                                           std::to_string(p.window_len));
    Spectrogram s;
    s.params = p;
    s.dt_record = dt_record;
    s.frames = p.frames(trace.size());
    s.bins = p.bins();
    s.magnitude.resize(s.frames * s.bins);

    const auto w = hamming_window(p.window_len);
    const FftPlan plan(p.window_len);
    std::vector<cplx> buf(p.window_len);
    for (std::size_t f = 0; f < s.frames; ++f) {
        const std::size_t off = f * p.hop();
        for (std::size_t n = 0; n < p.window_len; ++n) buf[n] = trace[off + n] * w[n];
        const auto spec = plan.forward(buf);
        for (std::size_t b = 0; b < s.bins; ++b) s.magnitude[f * s.bins + b] = std::abs(spec[b]);
    }
    return s;
}

} // namespace rgan
