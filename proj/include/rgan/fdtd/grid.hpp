#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "rgan/error.hpp"
#include "rgan/fdtd/scenario.hpp"
#include "rgan/fdtd/sim_config.hpp"

namespace rgan {

/// Column range [begin, end) occupied by one layer of the stack.
struct LayerExtent {
    std::string name;
    std::size_t begin_col = 0;
    std::size_t end_col = 0;
    double eps_r = 1.0;
};

struct CellIndex {
    std::size_t i = 0; // column (horizontal, x)
    std::size_t j = 0; // row (vertical, y)
};

/// Cell-centred relative permittivity on a uniform square mesh, row-major with
/// x fastest. Ez lives on cell nodes; Hx and Hy sit half a cell up/right.
class SimGrid {
public:
    SimGrid(double dx_m, std::size_t nx, std::size_t ny, double courant, double fill_eps = 1.0)
        : dx_(dx_m), nx_(nx), ny_(ny), courant_(courant), eps_(nx * ny, fill_eps), ez_coeff_(nx * ny)
    {
        if (!(dx_m > 0)) fail(ErrorCategory::geometry, "dx must be positive");
        if (nx < 3 || ny < 3) fail(ErrorCategory::geometry, "grid needs at least 3x3 cells");
        if (!(courant > 0) || courant > 1.0 / std::sqrt(2.0) + 1e-15)
            fail(ErrorCategory::geometry, "courant factor violates the 2D stability bound");
        if (!(fill_eps >= 1.0)) fail(ErrorCategory::geometry, "eps_r must be >= 1");
        dt_ = courant_ * dx_ / phys::c0;
        h_coeff_ = dt_ / (phys::mu0 * dx_);
        for (std::size_t k = 0; k < eps_.size(); ++k) ez_coeff_[k] = coeff_for(eps_[k]);
    }

    double dx() const { return dx_; }
    std::size_t nx() const { return nx_; }
    std::size_t ny() const { return ny_; }
    std::size_t cells() const { return nx_ * ny_; }
    double courant() const { return courant_; }
    double dt() const { return dt_; }

    std::size_t index(std::size_t i, std::size_t j) const { return j * nx_ + i; }
    double eps(std::size_t i, std::size_t j) const { return eps_[index(i, j)]; }
    std::span<const double> eps_r() const { return eps_; }

    void set_eps(std::size_t i, std::size_t j, double eps_r)
    {
        if (!(eps_r >= 1.0)) fail(ErrorCategory::geometry, "eps_r must be >= 1");
        eps_[index(i, j)] = eps_r;
        ez_coeff_[index(i, j)] = coeff_for(eps_r);
    }

    void fill_columns(std::size_t begin, std::size_t end, double eps_r)
    {
        for (std::size_t j = 0; j < ny_; ++j)
            for (std::size_t i = begin; i < end; ++i) set_eps(i, j, eps_r);
    }

    void fill_rect(std::size_t i0, std::size_t i1, std::size_t j0, std::size_t j1, double eps_r)
    {
        for (std::size_t j = j0; j < j1; ++j)
            for (std::size_t i = i0; i < i1; ++i) set_eps(i, j, eps_r);
    }

    /// dt / (eps0 eps_r dx) per cell.
    std::span<const double> ez_coeff() const { return ez_coeff_; }
    /// dt / (mu0 dx).
    double h_coeff() const { return h_coeff_; }

    std::vector<LayerExtent> layers;
    CellIndex transceiver;
    /// Object footprint, rows [begin, end) and columns [begin, end); empty for NoObject.
    std::size_t object_row_begin = 0, object_row_end = 0, object_col_begin = 0, object_col_end = 0;

private:
    double coeff_for(double eps_r) const { return dt_ / (phys::eps0 * eps_r * dx_); }

    double dx_;
    std::size_t nx_, ny_;
    double courant_;
    double dt_ = 0;
    double h_coeff_ = 0;
    std::vector<double> eps_;
    std::vector<double> ez_coeff_;
};

namespace detail {
inline std::size_t cm_to_cell(double cm, double dx_m)
{
    return static_cast<std::size_t>(std::lround(cm * 1e-2 / dx_m));
}
} // namespace detail

/// Stack, from the transceiver side along +x: free-space standoff, jacket,
/// air gap, shirt, [object slab], tissue; everything else is free space.
/// Layer boundaries are rounded to the nearest cell edge once, so adjacent
/// layers share their boundary column exactly.
inline SimGrid build_material_grid(const ScenarioParams& params, const SimConfig& cfg)
{
    validate_geometry(params);
    cfg.validate();

    const double dx = cfg.dx_m();
    const auto nx = detail::cm_to_cell(cfg.domain_width_cm, dx);
    const auto ny = detail::cm_to_cell(cfg.domain_height_cm, dx);
    SimGrid grid(dx, nx, ny, cfg.courant, 1.0);

    const bool vacuum = cfg.material == MaterialOverride::Vacuum;
    auto eps_of = [&](double e) { return vacuum ? 1.0 : e; };

    double x = cfg.transceiver_x_cm + cfg.standoff_cm;
    auto add_layer = [&](const std::string& name, double thickness_cm, double eps) {
        const auto b = detail::cm_to_cell(x, dx);
        x += thickness_cm;
        const auto e = detail::cm_to_cell(x, dx);
        grid.layers.push_back({name, b, e, eps_of(eps)});
    };

    add_layer("jacket", params.jacket_cm, params.eps.jacket);
    add_layer("air_gap", params.airgap_cm, params.eps.air_gap);
    add_layer("shirt", params.shirt_cm, params.eps.shirt);
    if (params.object) add_layer("object", params.object->thickness_cm, params.eps.object);
    add_layer("tissue", params.tissue_cm, params.eps.tissue);

    if (x > cfg.domain_width_cm || grid.layers.back().end_col > nx) {
        fail(ErrorCategory::geometry, "layer stack ends at " + std::to_string(x) + " cm, beyond the " +
                                          std::to_string(cfg.domain_width_cm) + " cm domain");
    }

    for (const auto& layer : grid.layers) {
        if (layer.name == "object") {
            const auto& o = *params.object;
            const auto j0 = detail::cm_to_cell(o.center_y_cm - 0.5 * o.height_cm, dx);
            const auto j1 = detail::cm_to_cell(o.center_y_cm + 0.5 * o.height_cm, dx);
            if (j1 > ny) fail(ErrorCategory::geometry, "object extends beyond the vertical domain");
            grid.fill_rect(layer.begin_col, layer.end_col, j0, j1, layer.eps_r);
            grid.object_row_begin = j0;
            grid.object_row_end = j1;
            grid.object_col_begin = layer.begin_col;
            grid.object_col_end = layer.end_col;
        } else {
            grid.fill_columns(layer.begin_col, layer.end_col, layer.eps_r);
        }
    }

    grid.transceiver = {detail::cm_to_cell(cfg.transceiver_x_cm, dx), detail::cm_to_cell(cfg.transceiver_y_cm, dx)};
    if (grid.transceiver.i < 1 || grid.transceiver.i + 1 >= nx || grid.transceiver.j < 1 || grid.transceiver.j + 1 >= ny)
        fail(ErrorCategory::geometry, "transceiver must sit strictly inside the domain");
    return grid;
}

/// Convenience overload with default solver settings at the given cell size.
inline SimGrid build_material_grid(const ScenarioParams& params, double dx_m)
{
    SimConfig cfg;
    cfg.dx_mm = dx_m * 1e3;
    return build_material_grid(params, cfg);
}

} // namespace rgan
