#pragma once

// Central-difference gradient checker. Runs in double precision only.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "rgan/nn/loss.hpp"
#include "rgan/nn/network.hpp"

namespace rgan::nn {

struct GradCheckOptions {
    double h = 1e-5;
    std::size_t coords_per_layer = 100;
    bool check_input = true;
};

struct GradCheckEntry {
    std::string label;
    std::size_t coordinates = 0;
    double max_rel_error = 0.0;
};

struct GradCheckReport {
    std::vector<GradCheckEntry> entries;

    double max_rel_error() const
    {
        double m = 0.0;
        for (const auto& e : entries) m = std::max(m, e.max_rel_error);
        return m;
    }
};

inline double relative_error(double analytic, double numeric, double floor = 1e-8)
{
    return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

namespace detail {

/// Up to `limit` distinct indices in [0, n), ascending; all of them if n <= limit.
inline std::vector<std::size_t> pick_coordinates(std::size_t n, std::size_t limit, Rng& rng)
{
    std::vector<std::size_t> all(n);
    std::iota(all.begin(), all.end(), std::size_t{0});
    if (n <= limit) return all;
    for (std::size_t k = 0; k < limit; ++k) {
        std::uniform_int_distribution<std::size_t> d(k, n - 1);
        std::swap(all[k], all[d(rng)]);
    }
    all.resize(limit);
    std::sort(all.begin(), all.end());
    return all;
}

} // namespace detail

/// `loss` maps the network output to a LossResult<double>. Parameter
/// gradients are checked per layer; the input gradient gets its own entry.
template <class LossFn>
GradCheckReport gradient_check(Network<double>& net, const Tensor<double>& input, LossFn loss, Rng& rng,
                               const GradCheckOptions& opt = {})
{
    auto eval = [&](const Tensor<double>& x) { return loss(net.forward(x)).value; };

    net.zero_grad();
    const auto out = net.forward(input);
    const auto lr = loss(out);
    const auto grad_in = net.backward(lr.grad, true);

    GradCheckReport report;
    for (std::size_t li = 0; li < net.layer_count(); ++li) {
        auto params = net.layer(li).parameters();
        if (params.empty()) continue;
        std::vector<std::pair<std::size_t, std::size_t>> flat;
        for (std::size_t p = 0; p < params.size(); ++p)
            for (std::size_t e = 0; e < params[p]->size(); ++e) flat.emplace_back(p, e);

        GradCheckEntry entry{std::to_string(li) + ":" + kind_name(net.layer(li).spec().kind), 0, 0.0};
        for (std::size_t c : detail::pick_coordinates(flat.size(), opt.coords_per_layer, rng)) {
            auto [p, e] = flat[c];
            double& w = (*params[p])[e];
            const double saved = w;
            w = saved + opt.h;
            const double lp = eval(input);
            w = saved - opt.h;
            const double lm = eval(input);
            w = saved;
            const double numeric = (lp - lm) / (2.0 * opt.h);
            entry.max_rel_error = std::max(entry.max_rel_error, relative_error(params[p]->grad()[e], numeric));
            ++entry.coordinates;
        }
        report.entries.push_back(entry);
    }

    if (opt.check_input) {
        Tensor<double> x = input;
        GradCheckEntry entry{"input", 0, 0.0};
        for (std::size_t c : detail::pick_coordinates(x.size(), opt.coords_per_layer, rng)) {
            const double saved = x[c];
            x[c] = saved + opt.h;
            const double lp = eval(x);
            x[c] = saved - opt.h;
            const double lm = eval(x);
            x[c] = saved;
            entry.max_rel_error = std::max(entry.max_rel_error, relative_error(grad_in[c], (lp - lm) / (2.0 * opt.h)));
            ++entry.coordinates;
        }
        report.entries.push_back(entry);
    }
    return report;
}

/// Checks a loss's own gradient with respect to its predictions.
inline GradCheckEntry loss_gradient_check(LossKind kind, const Tensor<double>& pred, const Tensor<double>& target,
                                          Rng& rng, const GradCheckOptions& opt = {})
{
    const auto lr = compute_loss(kind, pred, target);
    Tensor<double> p = pred;
    GradCheckEntry entry{loss_name(kind), 0, 0.0};
    for (std::size_t c : detail::pick_coordinates(p.size(), opt.coords_per_layer, rng)) {
        const double saved = p[c];
        p[c] = saved + opt.h;
        const double lp = compute_loss(kind, p, target).value;
        p[c] = saved - opt.h;
        const double lm = compute_loss(kind, p, target).value;
        p[c] = saved;
        entry.max_rel_error = std::max(entry.max_rel_error, relative_error(lr.grad[c], (lp - lm) / (2.0 * opt.h)));
        ++entry.coordinates;
    }
    return entry;
}

} // namespace rgan::nn
