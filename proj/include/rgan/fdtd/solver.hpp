#pragma once

// 2D TMz Yee solver (Ez on nodes, Hx at (i, j+1/2), Hy at (i+1/2, j)) with
// first-order Mur or PEC outer boundaries. Fields are in SI units.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rgan/error.hpp"
#include "rgan/fdtd/grid.hpp"
#include "rgan/fdtd/scenario.hpp"
#include "rgan/fdtd/sim_config.hpp"
#include "rgan/fdtd/source.hpp"

namespace rgan {

struct FieldState {
    std::size_t nx = 0, ny = 0;
    std::vector<double> ez, hx, hy;
    std::size_t step_index = 0;

    /// Ez one step back on each outer line (0) and its inward neighbour (1);
    /// the first-order Mur update needs both.
    struct MurMemory {
        std::vector<double> left0, left1, right0, right1; // length ny
        std::vector<double> bottom0, bottom1, top0, top1; // length nx
    } mur;

    static FieldState zeros(const SimGrid& grid)
    {
        FieldState s;
        s.nx = grid.nx();
        s.ny = grid.ny();
        s.ez.assign(grid.cells(), 0.0);
        s.hx.assign(grid.cells(), 0.0);
        s.hy.assign(grid.cells(), 0.0);
        s.mur.left0.assign(s.ny, 0.0);
        s.mur.left1.assign(s.ny, 0.0);
        s.mur.right0.assign(s.ny, 0.0);
        s.mur.right1.assign(s.ny, 0.0);
        s.mur.bottom0.assign(s.nx, 0.0);
        s.mur.bottom1.assign(s.nx, 0.0);
        s.mur.top0.assign(s.nx, 0.0);
        s.mur.top1.assign(s.nx, 0.0);
        return s;
    }

    double& ez_at(std::size_t i, std::size_t j) { return ez[j * nx + i]; }
    double ez_at(std::size_t i, std::size_t j) const { return ez[j * nx + i]; }

    /// Snapshot the current boundary lines into the Mur memory. Call after
    /// seeding fields by hand.
    void sync_boundary_memory()
    {
        for (std::size_t j = 0; j < ny; ++j) {
            mur.left0[j] = ez_at(0, j);
            mur.left1[j] = ez_at(1, j);
            mur.right0[j] = ez_at(nx - 1, j);
            mur.right1[j] = ez_at(nx - 2, j);
        }
        for (std::size_t i = 0; i < nx; ++i) {
            mur.bottom0[i] = ez_at(i, 0);
            mur.bottom1[i] = ez_at(i, 1);
            mur.top0[i] = ez_at(i, ny - 1);
            mur.top1[i] = ez_at(i, ny - 2);
        }
    }

    bool all_finite() const
    {
        auto finite = [](const std::vector<double>& v) {
            return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
        };
        return finite(ez) && finite(hx) && finite(hy);
    }
};

/// Steps between full NaN/Inf scans inside step_fields.
inline constexpr std::size_t divergence_check_interval = 64;

/// One leapfrog update: H to n+1/2 everywhere, then interior Ez to n+1.
/// Outer Ez lines are left for apply_boundary.
inline void step_fields(FieldState& s, const SimGrid& g)
{
    if (s.nx != g.nx() || s.ny != g.ny() || s.ez.size() != g.cells())
        fail(ErrorCategory::dimension, "field state does not match grid");

    const std::size_t nx = g.nx(), ny = g.ny();
    const double ch = g.h_coeff();
    double* __restrict ez = s.ez.data();
    double* __restrict hx = s.hx.data();
    double* __restrict hy = s.hy.data();
    const double* __restrict ce = g.ez_coeff().data();

    for (std::size_t j = 0; j + 1 < ny; ++j) {
        double* hxr = hx + j * nx;
        const double* e0 = ez + j * nx;
        const double* e1 = e0 + nx;
        for (std::size_t i = 0; i < nx; ++i) hxr[i] -= ch * (e1[i] - e0[i]);
    }
    for (std::size_t j = 0; j < ny; ++j) {
        double* hyr = hy + j * nx;
        const double* e = ez + j * nx;
        for (std::size_t i = 0; i + 1 < nx; ++i) hyr[i] += ch * (e[i + 1] - e[i]);
    }
    for (std::size_t j = 1; j + 1 < ny; ++j) {
        const std::size_t row = j * nx;
        double* er = ez + row;
        const double* cr = ce + row;
        const double* hyr = hy + row;
        const double* hxr = hx + row;
        const double* hxd = hx + row - nx;
        for (std::size_t i = 1; i + 1 < nx; ++i) er[i] += cr[i] * ((hyr[i] - hyr[i - 1]) - (hxr[i] - hxd[i]));
    }

    ++s.step_index;
    if (s.step_index % divergence_check_interval == 0 && !s.all_finite())
        fail(ErrorCategory::divergence, "non-finite field value at step " + std::to_string(s.step_index));
}

/// Outer-boundary update, run after step_fields (and any source injection).
/// Mur: first-order one-way wave equation along the edge normal, using the
/// local phase velocity. Pec: Ez = 0 on the outer lines.
inline void apply_boundary(FieldState& s, const SimGrid& g, BoundaryMode mode = BoundaryMode::Mur)
{
    const std::size_t nx = g.nx(), ny = g.ny();
    if (mode == BoundaryMode::Pec) {
        for (std::size_t j = 0; j < ny; ++j) s.ez_at(0, j) = s.ez_at(nx - 1, j) = 0.0;
        for (std::size_t i = 0; i < nx; ++i) s.ez_at(i, 0) = s.ez_at(i, ny - 1) = 0.0;
        return;
    }

    auto coeff = [&](std::size_t i, std::size_t j) {
        const double r = g.courant() / std::sqrt(g.eps(i, j));
        return (r - 1.0) / (r + 1.0);
    };
    auto& m = s.mur;
    for (std::size_t j = 1; j + 1 < ny; ++j) {
        s.ez_at(0, j) = m.left1[j] + coeff(0, j) * (s.ez_at(1, j) - m.left0[j]);
        s.ez_at(nx - 1, j) = m.right1[j] + coeff(nx - 1, j) * (s.ez_at(nx - 2, j) - m.right0[j]);
    }
    for (std::size_t i = 1; i + 1 < nx; ++i) {
        s.ez_at(i, 0) = m.bottom1[i] + coeff(i, 0) * (s.ez_at(i, 1) - m.bottom0[i]);
        s.ez_at(i, ny - 1) = m.top1[i] + coeff(i, ny - 1) * (s.ez_at(i, ny - 2) - m.top0[i]);
    }
    s.ez_at(0, 0) = 0.5 * (s.ez_at(1, 0) + s.ez_at(0, 1));
    s.ez_at(nx - 1, 0) = 0.5 * (s.ez_at(nx - 2, 0) + s.ez_at(nx - 1, 1));
    s.ez_at(0, ny - 1) = 0.5 * (s.ez_at(1, ny - 1) + s.ez_at(0, ny - 2));
    s.ez_at(nx - 1, ny - 1) = 0.5 * (s.ez_at(nx - 2, ny - 1) + s.ez_at(nx - 1, ny - 2));
    s.sync_boundary_memory();
}

/// Soft source: adds the pulse value at time t to Ez at `cell`. Returns the
/// injected value.
inline double inject_source(FieldState& s, const SourcePulse& pulse, double t, CellIndex cell)
{
    const double v = pulse.value(t);
    s.ez_at(cell.i, cell.j) += v;
    return v;
}

/// Instantaneous electromagnetic energy per unit length in z (J/m). E and H
/// are half a step apart, so this oscillates slightly even when lossless.
inline double field_energy(const FieldState& s, const SimGrid& g)
{
    const auto eps = g.eps_r();
    double we = 0.0, wh = 0.0;
    for (std::size_t k = 0; k < s.ez.size(); ++k) {
        we += eps[k] * s.ez[k] * s.ez[k];
        wh += s.hx[k] * s.hx[k] + s.hy[k] * s.hy[k];
    }
    const double area = g.dx() * g.dx();
    return 0.5 * area * (phys::eps0 * we + phys::mu0 * wh);
}

/// Exactly conserved leapfrog energy for a closed lossless grid:
/// 1/2 eps E^n . E^{n+1} + 1/2 mu |H^{n+1/2}|^2, where `after` is `before`
/// advanced by one step.
inline double discrete_energy(const FieldState& before, const FieldState& after, const SimGrid& g)
{
    const auto eps = g.eps_r();
    double we = 0.0, wh = 0.0;
    for (std::size_t k = 0; k < after.ez.size(); ++k) {
        we += eps[k] * before.ez[k] * after.ez[k];
        wh += after.hx[k] * after.hx[k] + after.hy[k] * after.hy[k];
    }
    const double area = g.dx() * g.dx();
    return 0.5 * area * (phys::eps0 * we + phys::mu0 * wh);
}

enum class TraceOrigin { Simulated, Generated };

/// Field amplitude recorded at the transceiver.
struct RadarTrace {
    std::vector<double> samples;
    double dt_record = 0.0;
    ClassLabel label = ClassLabel::NoObject;
    std::optional<ScenarioParams> scenario;
    TraceOrigin origin = TraceOrigin::Simulated;

    double max_abs() const
    {
        double m = 0.0;
        for (double v : samples) m = std::max(m, std::abs(v));
        return m;
    }
};

struct SimulationStats {
    double max_abs_field = 0.0;
    std::vector<double> injected; // source value per solver step
};

/// Runs the solver on a prepared grid. Records Ez at the transceiver every
/// `record_stride` steps for `record_len` samples.
inline std::vector<double> simulate_on_grid(const SimGrid& grid, const SimConfig& cfg, SimulationStats* stats = nullptr)
{
    const auto pulse = SourcePulse::from_config(cfg);
    auto state = FieldState::zeros(grid);
    std::vector<double> record;
    record.reserve(cfg.record_len);
    const auto rx = grid.transceiver;
    const std::size_t steps = cfg.total_steps();
    if (stats) stats->injected.reserve(steps);
    for (std::size_t n = 0; n < steps; ++n) {
        step_fields(state, grid);
        const double v = inject_source(state, pulse, static_cast<double>(n) * grid.dt(), rx);
        apply_boundary(state, grid, cfg.boundary);
        if ((n + 1) % cfg.record_stride == 0) record.push_back(state.ez_at(rx.i, rx.j));
        if (stats) {
            stats->injected.push_back(v);
            for (double e : state.ez) stats->max_abs_field = std::max(stats->max_abs_field, std::abs(e));
        }
    }
    if (!state.all_finite()) fail(ErrorCategory::divergence, "non-finite field value at step " + std::to_string(steps));
    return record;
}

/// Pure function of (params, cfg): consumes no randomness and touches no
/// shared state, so it is safe to call from many threads.
inline RadarTrace run_simulation(const ScenarioParams& params, const SimConfig& cfg, SimulationStats* stats = nullptr)
{
    const auto grid = build_material_grid(params, cfg);
    RadarTrace trace;
    trace.samples = simulate_on_grid(grid, cfg, stats);
    trace.dt_record = cfg.dt_record();
    trace.label = params.label;
    trace.scenario = params;
    trace.origin = TraceOrigin::Simulated;
    return trace;
}

} // namespace rgan
