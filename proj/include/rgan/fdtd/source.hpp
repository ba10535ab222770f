#pragma once

#include <cmath>

#include "rgan/fdtd/sim_config.hpp"

namespace rgan {

/// Gaussian-modulated sine: amplitude * exp(-(t-delay)^2 / (2 sigma^2)) * sin(2 pi f0 (t-delay)).
struct SourcePulse {
    double center_frequency = 4.2e9; // Hz
    double bandwidth = 2.2e9;        // Hz, full width at the -10 dB power level
    double delay = 0.0;              // s
    double amplitude = 1.0;

    /// For a Gaussian envelope the power spectrum falls by 10 dB at
    /// |f - f0| = sigma_f * sqrt(2 ln sqrt(10)), with sigma_f = 1 / (2 pi sigma).
    double sigma() const
    {
        const double half_band = 0.5 * bandwidth;
        const double sigma_f = half_band / std::sqrt(2.0 * std::log(std::sqrt(10.0)));
        return 1.0 / (2.0 * phys::pi * sigma_f);
    }

    double value(double t) const
    {
        const double s = sigma();
        const double tau = t - delay;
        return amplitude * std::exp(-tau * tau / (2.0 * s * s)) * std::sin(2.0 * phys::pi * center_frequency * tau);
    }

    /// Turn-on delay in units of sigma. At 6 sigma the envelope at t = 0 is
    /// exp(-18) ~ 1.5e-8 of the peak.
    static constexpr double delay_sigmas = 6.0;

    static SourcePulse uwb(double f0_hz, double band_hz, double amplitude = 1.0)
    {
        SourcePulse p;
        p.center_frequency = f0_hz;
        p.bandwidth = band_hz;
        p.amplitude = amplitude;
        p.delay = delay_sigmas * p.sigma();
        return p;
    }

    static SourcePulse from_config(const SimConfig& cfg)
    {
        return uwb(cfg.source_f0_ghz * 1e9, cfg.source_band_ghz * 1e9);
    }
};

} // namespace rgan
