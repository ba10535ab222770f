#pragma once

// One-row reduction of the Yee update (Ez nodes, Hy half nodes), used only as
// a validation oracle for interface reflections. Never used for datasets.

#include <cmath>
#include <cstddef>
#include <vector>

#include "rgan/error.hpp"
#include "rgan/fdtd/sim_config.hpp"
#include "rgan/fdtd/source.hpp"

namespace rgan {

/// Normal-incidence amplitude reflection coefficient for a wave going from
/// medium 1 into medium 2.
inline double analytic_fresnel(double eps1, double eps2)
{
    if (!(eps1 >= 1.0) || !(eps2 >= 1.0)) fail(ErrorCategory::validation, "permittivities must be >= 1");
    const double n1 = std::sqrt(eps1), n2 = std::sqrt(eps2);
    return (n1 - n2) / (n1 + n2);
}

class Line1D {
public:
    Line1D(std::size_t cells, double dx_m, double courant = 1.0)
        : dx_(dx_m), courant_(courant), eps_(cells, 1.0), ce_(cells), ez_(cells, 0.0), hy_(cells, 0.0)
    {
        if (cells < 3) fail(ErrorCategory::geometry, "1D line needs at least 3 cells");
        if (!(courant > 0) || courant > 1.0) fail(ErrorCategory::geometry, "1D courant factor must be in (0, 1]");
        dt_ = courant_ * dx_ / phys::c0;
        ch_ = dt_ / (phys::mu0 * dx_);
        for (std::size_t i = 0; i < cells; ++i) ce_[i] = dt_ / (phys::eps0 * eps_[i] * dx_);
    }

    std::size_t size() const { return ez_.size(); }
    double dt() const { return dt_; }
    double dx() const { return dx_; }

    void set_eps(std::size_t i, double eps_r)
    {
        if (!(eps_r >= 1.0)) fail(ErrorCategory::geometry, "eps_r must be >= 1");
        eps_[i] = eps_r;
        ce_[i] = dt_ / (phys::eps0 * eps_r * dx_);
    }

    /// Medium `eps_r` from node `first` to the end. The boundary node takes
    /// the mean permittivity of both sides.
    void set_halfspace(std::size_t first, double eps_r)
    {
        for (std::size_t i = first; i < size(); ++i) set_eps(i, eps_r);
        if (first > 0) set_eps(first, 0.5 * (eps_[first - 1] + eps_r));
    }

    void set_boundaries(BoundaryMode left, BoundaryMode right)
    {
        left_ = left;
        right_ = right;
    }

    std::vector<double>& ez() { return ez_; }
    std::vector<double>& hy() { return hy_; }
    const std::vector<double>& ez() const { return ez_; }
    const std::vector<double>& hy() const { return hy_; }

    void add_source(std::size_t i, double value) { ez_[i] += value; }

    /// H then interior E, then the two end nodes.
    void step()
    {
        const std::size_t n = size();
        const double left_prev0 = ez_[0], left_prev1 = ez_[1];
        const double right_prev0 = ez_[n - 1], right_prev1 = ez_[n - 2];
        for (std::size_t i = 0; i + 1 < n; ++i) hy_[i] += ch_ * (ez_[i + 1] - ez_[i]);
        for (std::size_t i = 1; i + 1 < n; ++i) ez_[i] += ce_[i] * (hy_[i] - hy_[i - 1]);
        ez_[0] = boundary_value(left_, left_prev0, left_prev1, ez_[1], eps_[0]);
        ez_[n - 1] = boundary_value(right_, right_prev0, right_prev1, ez_[n - 2], eps_[n - 1]);
    }

private:
    double boundary_value(BoundaryMode mode, double prev0, double prev1, double now1, double eps) const
    {
        if (mode == BoundaryMode::Pec) return 0.0;
        const double r = courant_ / std::sqrt(eps);
        return prev1 + (r - 1.0) / (r + 1.0) * (now1 - prev0);
    }

    double dx_, courant_;
    double dt_ = 0, ch_ = 0;
    std::vector<double> eps_, ce_, ez_, hy_;
    BoundaryMode left_ = BoundaryMode::Mur, right_ = BoundaryMode::Mur;
};

struct ReflectionMeasurement {
    double measured = 0.0;
    double analytic = 0.0;
    double relative_error() const { return std::abs(measured - analytic) / std::abs(analytic); }
};

struct ReflectionSetup {
    double dx_m = 0.25e-3;
    std::size_t source_node = 10;
    std::size_t observer_offset = 50;     // cells right of the source
    std::size_t interface_offset = 2400;  // cells right of the observer
    std::size_t medium_cells = 4000;      // length of the second medium
    double f0_hz = 4.2e9;
    double band_hz = 2.2e9;
    BoundaryMode far_end = BoundaryMode::Mur;
};

/// Launches the UWB pulse from vacuum at a half-space of `eps2` (or at a PEC
/// wall when setup.far_end == Pec and eps2 == 1) and returns the signed ratio
/// of the reflected to the incident peak at an observer between the two.
/// The incident wave comes from an all-vacuum reference run with the same
/// source, so the reflection is isolated by subtraction.
inline ReflectionMeasurement measure_reflection_1d(double eps2, const ReflectionSetup& setup = {})
{
    const std::size_t observer = setup.source_node + setup.observer_offset;
    const std::size_t interface = observer + setup.interface_offset;
    const std::size_t cells = interface + setup.medium_cells;
    const auto pulse = SourcePulse::uwb(setup.f0_hz, setup.band_hz);
    const double pulse_span = 2.0 * pulse.delay;
    const bool pec_wall = setup.far_end == BoundaryMode::Pec;

    auto run = [&](bool with_interface) {
        Line1D line(with_interface && pec_wall ? interface + 1 : cells, setup.dx_m, 1.0);
        if (with_interface && pec_wall) {
            line.set_boundaries(BoundaryMode::Mur, BoundaryMode::Pec);
        } else if (with_interface) {
            line.set_halfspace(interface, eps2);
        }
        const auto steps = static_cast<std::size_t>(pulse_span / line.dt()) + 2 * (setup.interface_offset + setup.observer_offset) + 200;
        std::vector<double> rec;
        rec.reserve(steps);
        for (std::size_t n = 0; n < steps; ++n) {
            line.step();
            line.add_source(setup.source_node, pulse.value(static_cast<double>(n) * line.dt()));
            rec.push_back(line.ez()[observer]);
        }
        return rec;
    };

    const auto incident = run(false);
    const auto total = run(true);
    std::size_t ki = 0, kr = 0;
    double best_i = 0, best_r = 0;
    for (std::size_t k = 0; k < incident.size(); ++k) {
        if (std::abs(incident[k]) > best_i) {
            best_i = std::abs(incident[k]);
            ki = k;
        }
        const double refl = std::abs(total[k] - incident[k]);
        if (refl > best_r) {
            best_r = refl;
            kr = k;
        }
    }
    ReflectionMeasurement m;
    m.measured = (total[kr] - incident[kr]) / incident[ki];
    m.analytic = pec_wall ? -1.0 : analytic_fresnel(1.0, eps2);
    return m;
}

} // namespace rgan
