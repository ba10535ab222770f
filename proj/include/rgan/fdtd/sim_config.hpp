#pragma once

#include <cmath>
#include <cstddef>
#include <set>
#include <string>

#include "rgan/config.hpp"
#include "rgan/error.hpp"

namespace rgan {

namespace phys {
inline constexpr double c0 = 299792458.0;
inline constexpr double pi = 3.14159265358979323846;
inline constexpr double mu0 = 4.0e-7 * pi;
inline constexpr double eps0 = 1.0 / (mu0 * c0 * c0);
inline const double eta0 = std::sqrt(mu0 / eps0);
} // namespace phys

enum class BoundaryMode { Mur, Pec };
enum class MaterialOverride { None, Vacuum };

/// Solver and recording settings. Physical quantities keep their unit in the
/// field name, matching the config-file keys.
struct SimConfig {
    double dx_mm = 1.0;
    double courant = 1.0 / std::sqrt(2.0);
    std::size_t record_len = 1024;
    /// Solver steps per recorded sample; total steps = record_len * record_stride.
    std::size_t record_stride = 4;
    double standoff_cm = 5.0;
    double source_f0_ghz = 4.2;
    double source_band_ghz = 2.2;

    double domain_width_cm = 50.0;
    double domain_height_cm = 20.0;
    double transceiver_x_cm = 1.0;
    double transceiver_y_cm = 10.0;

    BoundaryMode boundary = BoundaryMode::Mur;
    MaterialOverride material = MaterialOverride::None;

    double dx_m() const { return dx_mm * 1e-3; }
    double dt() const { return courant * dx_m() / phys::c0; }
    double dt_record() const { return dt() * static_cast<double>(record_stride); }
    std::size_t total_steps() const { return record_len * record_stride; }

    /// Reduced grid (1 mm, 1024 samples decimated 4x) covering the same
    /// ~9.65 ns window as the full-resolution setting.
    static SimConfig desk() { return SimConfig{}; }

    /// 0.5 mm cells, 8192 recorded steps, no decimation.
    static SimConfig paper()
    {
        SimConfig c;
        c.dx_mm = 0.5;
        c.record_len = 8192;
        c.record_stride = 1;
        return c;
    }

    void validate() const
    {
        if (!(dx_mm > 0)) fail(ErrorCategory::config, "dx_mm must be positive");
        if (!(courant > 0) || courant > 1.0 / std::sqrt(2.0) + 1e-15)
            fail(ErrorCategory::config, "courant must lie in (0, 1/sqrt(2)] for the 2D scheme");
        if (record_len == 0 || record_stride == 0) fail(ErrorCategory::config, "record_len and record_stride must be >= 1");
        if (!(standoff_cm >= 0)) fail(ErrorCategory::config, "standoff_cm must be non-negative");
        if (!(source_f0_ghz > 0) || !(source_band_ghz > 0)) fail(ErrorCategory::config, "source frequencies must be positive");
    }

    static const std::set<std::string>& keys()
    {
        static const std::set<std::string> k{"dx_mm",          "courant",         "record_len", "record_stride",
                                             "standoff_cm",    "source_f0_ghz",   "source_band_ghz"};
        return k;
    }

    static SimConfig from_config(const KeyValueConfig& kv, SimConfig base)
    {
        base.dx_mm = kv.get_double("dx_mm", base.dx_mm);
        base.courant = kv.get_double("courant", base.courant);
        base.record_len = kv.get_u64("record_len", base.record_len);
        base.record_stride = kv.get_u64("record_stride", base.record_stride);
        base.standoff_cm = kv.get_double("standoff_cm", base.standoff_cm);
        base.source_f0_ghz = kv.get_double("source_f0_ghz", base.source_f0_ghz);
        base.source_band_ghz = kv.get_double("source_band_ghz", base.source_band_ghz);
        base.validate();
        return base;
    }
};

} // namespace rgan
