#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "rgan/error.hpp"
#include "rgan/nn/tensor.hpp"

namespace rgan::nn {

enum class LossKind { MSE, BCE };

inline const char* loss_name(LossKind k) { return k == LossKind::MSE ? "mse" : "bce"; }

inline LossKind parse_loss(const std::string& s)
{
    if (s == "mse") return LossKind::MSE;
    if (s == "bce") return LossKind::BCE;
    fail(ErrorCategory::config, "unknown loss '" + s + "' (expected mse or bce)");
}

inline constexpr double bce_clamp = 1e-7;

/// Batch-mean loss value and dL/dpred.
template <class T>
struct LossResult {
    double value = 0.0;
    Tensor<T> grad;
};

template <class T>
void check_loss_shapes(const Tensor<T>& pred, const Tensor<T>& target)
{
    if (pred.size() != target.size() || pred.size() == 0)
        fail(ErrorCategory::dimension,
             "loss shapes differ: " + shape_string(pred.shape()) + " vs " + shape_string(target.shape()));
}

template <class T>
LossResult<T> mse_loss(const Tensor<T>& pred, const Tensor<T>& target)
{
    check_loss_shapes(pred, target);
    const double n = static_cast<double>(pred.size());
    LossResult<T> r{0.0, Tensor<T>(pred.shape())};
    for (std::size_t k = 0; k < pred.size(); ++k) {
        const double d = static_cast<double>(pred[k]) - static_cast<double>(target[k]);
        r.value += d * d;
        r.grad[k] = static_cast<T>(2.0 * d / n);
    }
    r.value /= n;
    return r;
}

/// Predictions are clamped to [eps, 1 - eps]; the clamp has zero slope.
template <class T>
LossResult<T> bce_loss(const Tensor<T>& pred, const Tensor<T>& target)
{
    check_loss_shapes(pred, target);
    const double n = static_cast<double>(pred.size());
    LossResult<T> r{0.0, Tensor<T>(pred.shape())};
    for (std::size_t k = 0; k < pred.size(); ++k) {
        const double p_raw = static_cast<double>(pred[k]);
        const double p = std::clamp(p_raw, bce_clamp, 1.0 - bce_clamp);
        const double t = static_cast<double>(target[k]);
        r.value -= t * std::log(p) + (1.0 - t) * std::log(1.0 - p);
        const bool clamped = p_raw < bce_clamp || p_raw > 1.0 - bce_clamp;
        r.grad[k] = clamped ? T{} : static_cast<T>((p - t) / (p * (1.0 - p)) / n);
    }
    r.value /= n;
    return r;
}

template <class T>
LossResult<T> compute_loss(LossKind kind, const Tensor<T>& pred, const Tensor<T>& target)
{
    return kind == LossKind::MSE ? mse_loss(pred, target) : bce_loss(pred, target);
}

/// Largest attainable loss for predictions in [0, 1]: 1 for MSE against a
/// 0/1 target, -ln(eps) for clamped BCE.
inline double loss_ceiling(LossKind kind) { return kind == LossKind::MSE ? 1.0 : -std::log(bce_clamp); }

} // namespace rgan::nn
