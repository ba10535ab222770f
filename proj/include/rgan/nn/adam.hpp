#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "rgan/error.hpp"
#include "rgan/nn/tensor.hpp"

namespace rgan::nn {

struct AdamHyper {
    double alpha = 1e-4;
    double beta1 = 0.5;
    double beta2 = 0.9;
    double epsilon = 1e-8;
    bool operator==(const AdamHyper&) const = default;
};

/// Moments are laid out parallel to the parameter list they were sized for.
template <class T>
struct AdamState {
    AdamHyper hyper;
    std::vector<std::vector<T>> m, v;
    std::uint64_t t = 0;

    void reset()
    {
        m.clear();
        v.clear();
        t = 0;
    }

    bool empty() const { return t == 0 && m.empty(); }
};

/// One bias-corrected Adam step using each parameter's accumulated grad.
template <class T>
void adam_step(const std::vector<Tensor<T>*>& params, AdamState<T>& st)
{
    if (st.m.empty()) {
        for (const auto* p : params) {
            st.m.emplace_back(p->size(), T{});
            st.v.emplace_back(p->size(), T{});
        }
    }
    if (st.m.size() != params.size()) fail(ErrorCategory::dimension, "adam state does not match parameter list");
    ++st.t;
    const auto& h = st.hyper;
    const double c1 = 1.0 - std::pow(h.beta1, static_cast<double>(st.t));
    const double c2 = 1.0 - std::pow(h.beta2, static_cast<double>(st.t));
    const T b1 = static_cast<T>(h.beta1), b2 = static_cast<T>(h.beta2);
    const T lr = static_cast<T>(h.alpha / c1);
    const T inv_c2 = static_cast<T>(1.0 / c2);
    const T eps = static_cast<T>(h.epsilon);
    for (std::size_t k = 0; k < params.size(); ++k) {
        auto* p = params[k];
        if (!p->has_grad() || st.m[k].size() != p->size())
            fail(ErrorCategory::dimension, "adam moment/parameter shape mismatch");
        auto w = p->data();
        auto g = p->grad();
        auto& m = st.m[k];
        auto& v = st.v[k];
        for (std::size_t i = 0; i < w.size(); ++i) {
            m[i] = b1 * m[i] + (T{1} - b1) * g[i];
            v[i] = b2 * v[i] + (T{1} - b2) * g[i] * g[i];
            w[i] -= lr * m[i] / (std::sqrt(v[i] * inv_c2) + eps);
        }
    }
}

} // namespace rgan::nn
