#pragma once

// Fixed layer set with hand-written backward passes. Activations are batched:
// Conv1D/Upsample take [N, C, L]; Dense takes [N, F]; elementwise layers take
// any shape. Every layer caches what its backward needs during forward.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "rgan/error.hpp"
#include "rgan/nn/tensor.hpp"
#include "rgan/rng.hpp"

namespace rgan::nn {

enum class LayerKind { Conv1D, Upsample, Dense, LeakyReLU, Tanh, Sigmoid, Reshape };
enum class Padding { Same, Valid };

inline const char* kind_name(LayerKind k)
{
    switch (k) {
    case LayerKind::Conv1D: return "conv1d";
    case LayerKind::Upsample: return "upsample";
    case LayerKind::Dense: return "dense";
    case LayerKind::LeakyReLU: return "leaky_relu";
    case LayerKind::Tanh: return "tanh";
    case LayerKind::Sigmoid: return "sigmoid";
    case LayerKind::Reshape: return "reshape";
    }
    return "?";
}

inline LayerKind parse_kind(const std::string& s)
{
    for (auto k : {LayerKind::Conv1D, LayerKind::Upsample, LayerKind::Dense, LayerKind::LeakyReLU, LayerKind::Tanh,
                   LayerKind::Sigmoid, LayerKind::Reshape})
        if (s == kind_name(k)) return k;
    fail(ErrorCategory::format, "unknown layer kind '" + s + "'");
}

struct LayerSpec {
    LayerKind kind = LayerKind::Dense;
    std::size_t in_channels = 0, out_channels = 0, kernel_size = 0, stride = 1;
    Padding padding = Padding::Same;
    std::size_t factor = 2;
    std::size_t in_features = 0, out_features = 0;
    double slope = 0.2;
    Shape shape; // Reshape: per-sample target extents

    static LayerSpec conv1d(std::size_t in, std::size_t out, std::size_t kernel, std::size_t stride,
                            Padding pad = Padding::Same)
    {
        LayerSpec s;
        s.kind = LayerKind::Conv1D;
        s.in_channels = in;
        s.out_channels = out;
        s.kernel_size = kernel;
        s.stride = stride;
        s.padding = pad;
        return s;
    }
    static LayerSpec upsample(std::size_t factor = 2)
    {
        LayerSpec s;
        s.kind = LayerKind::Upsample;
        s.factor = factor;
        return s;
    }
    static LayerSpec dense(std::size_t in, std::size_t out)
    {
        LayerSpec s;
        s.kind = LayerKind::Dense;
        s.in_features = in;
        s.out_features = out;
        return s;
    }
    static LayerSpec leaky_relu(double slope = 0.2)
    {
        LayerSpec s;
        s.kind = LayerKind::LeakyReLU;
        s.slope = slope;
        return s;
    }
    static LayerSpec tanh()
    {
        LayerSpec s;
        s.kind = LayerKind::Tanh;
        return s;
    }
    static LayerSpec sigmoid()
    {
        LayerSpec s;
        s.kind = LayerKind::Sigmoid;
        return s;
    }
    static LayerSpec reshape(Shape per_sample)
    {
        LayerSpec s;
        s.kind = LayerKind::Reshape;
        s.shape = std::move(per_sample);
        return s;
    }

    bool operator==(const LayerSpec&) const = default;
};

inline nlohmann::json to_json(const LayerSpec& s)
{
    nlohmann::json j{{"kind", kind_name(s.kind)}};
    switch (s.kind) {
    case LayerKind::Conv1D:
        j["in"] = s.in_channels;
        j["out"] = s.out_channels;
        j["kernel"] = s.kernel_size;
        j["stride"] = s.stride;
        j["padding"] = s.padding == Padding::Same ? "same" : "valid";
        break;
    case LayerKind::Upsample: j["factor"] = s.factor; break;
    case LayerKind::Dense:
        j["in"] = s.in_features;
        j["out"] = s.out_features;
        break;
    case LayerKind::LeakyReLU: j["slope"] = s.slope; break;
    case LayerKind::Reshape: j["shape"] = s.shape; break;
    case LayerKind::Tanh:
    case LayerKind::Sigmoid: break;
    }
    return j;
}

inline LayerSpec layer_spec_from_json(const nlohmann::json& j)
{
    try {
        LayerSpec s;
        s.kind = parse_kind(j.at("kind").get<std::string>());
        switch (s.kind) {
        case LayerKind::Conv1D:
            s.in_channels = j.at("in").get<std::size_t>();
            s.out_channels = j.at("out").get<std::size_t>();
            s.kernel_size = j.at("kernel").get<std::size_t>();
            s.stride = j.at("stride").get<std::size_t>();
            s.padding = j.at("padding").get<std::string>() == "same" ? Padding::Same : Padding::Valid;
            break;
        case LayerKind::Upsample: s.factor = j.at("factor").get<std::size_t>(); break;
        case LayerKind::Dense:
            s.in_features = j.at("in").get<std::size_t>();
            s.out_features = j.at("out").get<std::size_t>();
            break;
        case LayerKind::LeakyReLU: s.slope = j.at("slope").get<double>(); break;
        case LayerKind::Reshape: s.shape = j.at("shape").get<Shape>(); break;
        case LayerKind::Tanh:
        case LayerKind::Sigmoid: break;
        }
        return s;
    } catch (const nlohmann::json::exception& ex) {
        fail(ErrorCategory::format, std::string("bad layer spec: ") + ex.what());
    }
}

struct ConvGeometry {
    std::size_t out_len = 0, pad_left = 0, pad_right = 0;
    std::size_t padded_len(std::size_t in_len) const { return in_len + pad_left + pad_right; }
};

/// Same: L_out = ceil(L / stride), zero padding split with the extra cell on
/// the right. Valid: no padding. In both cases
/// L_out = floor((L_padded - kernel) / stride) + 1.
inline ConvGeometry conv_geometry(std::size_t len, std::size_t kernel, std::size_t stride, Padding pad)
{
    if (kernel == 0 || stride == 0) fail(ErrorCategory::dimension, "conv kernel and stride must be >= 1");
    if (len < kernel)
        fail(ErrorCategory::dimension,
             "conv input length " + std::to_string(len) + " shorter than kernel " + std::to_string(kernel));
    ConvGeometry g;
    if (pad == Padding::Valid) {
        g.out_len = (len - kernel) / stride + 1;
        return g;
    }
    g.out_len = (len + stride - 1) / stride;
    const std::size_t needed = (g.out_len - 1) * stride + kernel;
    const std::size_t total = needed > len ? needed - len : 0;
    g.pad_left = total / 2;
    g.pad_right = total - g.pad_left;
    return g;
}

/// Glorot-uniform bound sqrt(6 / (fan_in + fan_out)).
inline double glorot_bound(std::size_t fan_in, std::size_t fan_out)
{
    return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

template <class T>
void fill_glorot_uniform(Tensor<T>& t, std::size_t fan_in, std::size_t fan_out, Rng& rng)
{
    const double b = glorot_bound(fan_in, fan_out);
    std::uniform_real_distribution<double> dist(-b, b);
    for (auto& v : t.data()) v = static_cast<T>(dist(rng));
}

/// Fans follow this engine's layouts: rank 1 (n) -> (n, n); rank 2 dense
/// kernels (in, out); rank >= 3 conv kernels (out, in, k...) scale both fans
/// by the receptive field.
template <class T = double>
Tensor<T> glorot_uniform_init(const Shape& shape, Rng& rng)
{
    if (shape.empty()) fail(ErrorCategory::dimension, "glorot init needs a non-empty shape");
    std::size_t fan_in = shape[0], fan_out = shape[0];
    if (shape.size() == 2) {
        fan_in = shape[0];
        fan_out = shape[1];
    } else if (shape.size() >= 3) {
        std::size_t receptive = 1;
        for (std::size_t k = 2; k < shape.size(); ++k) receptive *= shape[k];
        fan_in = shape[1] * receptive;
        fan_out = shape[0] * receptive;
    }
    Tensor<T> t(shape);
    fill_glorot_uniform(t, fan_in, fan_out, rng);
    return t;
}

template <class T>
class Layer {
public:
    virtual ~Layer() = default;
    virtual LayerSpec spec() const = 0;
    /// Batched output shape for a batched input shape; throws on mismatch.
    virtual Shape output_shape(const Shape& in) const = 0;
    virtual Tensor<T> forward(const Tensor<T>& x) = 0;
    /// Returns dL/dx. Adds into parameter gradients only when asked.
    virtual Tensor<T> backward(const Tensor<T>& grad_out, bool accumulate_params) = 0;
    virtual std::vector<Tensor<T>*> parameters() { return {}; }
    virtual void initialize(Rng&) {}
    virtual std::unique_ptr<Layer> clone() const = 0;
};

template <class T>
class Conv1D final : public Layer<T> {
public:
    explicit Conv1D(const LayerSpec& s)
        : spec_(s), weight_({s.out_channels, s.in_channels, s.kernel_size}), bias_({s.out_channels})
    {
        if (s.in_channels == 0 || s.out_channels == 0 || s.kernel_size == 0 || s.stride == 0)
            fail(ErrorCategory::dimension, "conv1d needs positive channels, kernel and stride");
        weight_.enable_grad();
        bias_.enable_grad();
    }

    LayerSpec spec() const override { return spec_; }

    Shape output_shape(const Shape& in) const override
    {
        check_input(in);
        return {in[0], spec_.out_channels, geometry(in[2]).out_len};
    }

    Tensor<T> forward(const Tensor<T>& x) override
    {
        const auto out_shape = output_shape(x.shape());
        const std::size_t n_batch = x.dim(0), cin = spec_.in_channels, cout = spec_.out_channels;
        const std::size_t len = x.dim(2), k_size = spec_.kernel_size, s = spec_.stride;
        const auto g = geometry(len);
        const std::size_t lp = g.padded_len(len), lout = g.out_len;

        in_len_ = len;
        padded_ = Tensor<T>({n_batch, cin, lp});
        for (std::size_t n = 0; n < n_batch; ++n)
            for (std::size_t c = 0; c < cin; ++c)
                std::copy_n(x.ptr() + (n * cin + c) * len, len, padded_.ptr() + (n * cin + c) * lp + g.pad_left);

        Tensor<T> y(out_shape);
        const T* w = weight_.ptr();
        const T* b = bias_.ptr();
        for (std::size_t n = 0; n < n_batch; ++n) {
            for (std::size_t co = 0; co < cout; ++co) {
                T* yr = y.ptr() + (n * cout + co) * lout;
                std::fill_n(yr, lout, b[co]);
                for (std::size_t ci = 0; ci < cin; ++ci) {
                    const T* xr = padded_.ptr() + (n * cin + ci) * lp;
                    const T* wr = w + (co * cin + ci) * k_size;
                    for (std::size_t k = 0; k < k_size; ++k) {
                        const T wk = wr[k];
                        const T* xs = xr + k;
                        if (s == 1) {
                            for (std::size_t t = 0; t < lout; ++t) yr[t] += wk * xs[t];
                        } else {
                            for (std::size_t t = 0; t < lout; ++t) yr[t] += wk * xs[t * s];
                        }
                    }
                }
            }
        }
        return y;
    }

    Tensor<T> backward(const Tensor<T>& gy, bool accumulate_params) override
    {
        const std::size_t n_batch = padded_.dim(0), cin = spec_.in_channels, cout = spec_.out_channels;
        const std::size_t lp = padded_.dim(2), k_size = spec_.kernel_size, s = spec_.stride;
        const auto g = geometry(in_len_);
        const std::size_t lout = g.out_len;
        if (gy.shape() != Shape{n_batch, cout, lout}) fail(ErrorCategory::dimension, "conv1d backward: bad gradient shape");

        Tensor<T> gpad({n_batch, cin, lp});
        const T* w = weight_.ptr();
        T* gw = weight_.grad().data();
        T* gb = bias_.grad().data();
        for (std::size_t n = 0; n < n_batch; ++n) {
            for (std::size_t co = 0; co < cout; ++co) {
                const T* gr = gy.ptr() + (n * cout + co) * lout;
                if (accumulate_params) {
                    T acc{};
                    for (std::size_t t = 0; t < lout; ++t) acc += gr[t];
                    gb[co] += acc;
                }
                for (std::size_t ci = 0; ci < cin; ++ci) {
                    const T* xr = padded_.ptr() + (n * cin + ci) * lp;
                    T* gxr = gpad.ptr() + (n * cin + ci) * lp;
                    const std::size_t wbase = (co * cin + ci) * k_size;
                    for (std::size_t k = 0; k < k_size; ++k) {
                        const T wk = w[wbase + k];
                        const T* xs = xr + k;
                        T* gxs = gxr + k;
                        if (s == 1) {
                            if (accumulate_params) {
                                T acc{};
                                for (std::size_t t = 0; t < lout; ++t) acc += gr[t] * xs[t];
                                gw[wbase + k] += acc;
                            }
                            for (std::size_t t = 0; t < lout; ++t) gxs[t] += wk * gr[t];
                        } else {
                            if (accumulate_params) {
                                T acc{};
                                for (std::size_t t = 0; t < lout; ++t) acc += gr[t] * xs[t * s];
                                gw[wbase + k] += acc;
                            }
                            for (std::size_t t = 0; t < lout; ++t) gxs[t * s] += wk * gr[t];
                        }
                    }
                }
            }
        }

        Tensor<T> gx({n_batch, cin, in_len_});
        for (std::size_t n = 0; n < n_batch; ++n)
            for (std::size_t c = 0; c < cin; ++c)
                std::copy_n(gpad.ptr() + (n * cin + c) * lp + g.pad_left, in_len_, gx.ptr() + (n * cin + c) * in_len_);
        return gx;
    }

    std::vector<Tensor<T>*> parameters() override { return {&weight_, &bias_}; }

    void initialize(Rng& rng) override
    {
        const std::size_t k = spec_.kernel_size;
        fill_glorot_uniform(weight_, spec_.in_channels * k, spec_.out_channels * k, rng);
        std::fill(bias_.data().begin(), bias_.data().end(), T{});
    }

    std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<Conv1D>(*this); }

    Tensor<T>& weight() { return weight_; }
    Tensor<T>& bias() { return bias_; }

private:
    ConvGeometry geometry(std::size_t len) const
    {
        return conv_geometry(len, spec_.kernel_size, spec_.stride, spec_.padding);
    }

    void check_input(const Shape& in) const
    {
        if (in.size() != 3 || in[1] != spec_.in_channels)
            fail(ErrorCategory::dimension, "conv1d expects [N, " + std::to_string(spec_.in_channels) + ", L], got " +
                                               shape_string(in));
    }

    LayerSpec spec_;
    Tensor<T> weight_, bias_;
    Tensor<T> padded_;
    std::size_t in_len_ = 0;
};

/// Repeats each time step `factor` times: [a, b] -> [a, a, b, b].
template <class T>
class Upsample final : public Layer<T> {
public:
    explicit Upsample(const LayerSpec& s) : spec_(s)
    {
        if (s.factor == 0) fail(ErrorCategory::dimension, "upsample factor must be >= 1");
    }

    LayerSpec spec() const override { return spec_; }

    Shape output_shape(const Shape& in) const override
    {
        if (in.size() != 3) fail(ErrorCategory::dimension, "upsample expects [N, C, L], got " + shape_string(in));
        return {in[0], in[1], in[2] * spec_.factor};
    }

    Tensor<T> forward(const Tensor<T>& x) override
    {
        Tensor<T> y(output_shape(x.shape()));
        const std::size_t f = spec_.factor;
        const std::size_t rows = x.dim(0) * x.dim(1), len = x.dim(2);
        for (std::size_t r = 0; r < rows; ++r) {
            const T* xr = x.ptr() + r * len;
            T* yr = y.ptr() + r * len * f;
            for (std::size_t t = 0; t < len; ++t)
                for (std::size_t k = 0; k < f; ++k) yr[t * f + k] = xr[t];
        }
        in_shape_ = x.shape();
        return y;
    }

    Tensor<T> backward(const Tensor<T>& gy, bool) override
    {
        Tensor<T> gx(in_shape_);
        const std::size_t f = spec_.factor;
        const std::size_t rows = in_shape_[0] * in_shape_[1], len = in_shape_[2];
        if (gy.size() != rows * len * f) fail(ErrorCategory::dimension, "upsample backward: bad gradient shape");
        for (std::size_t r = 0; r < rows; ++r) {
            const T* gr = gy.ptr() + r * len * f;
            T* gxr = gx.ptr() + r * len;
            for (std::size_t t = 0; t < len; ++t) {
                T acc{};
                for (std::size_t k = 0; k < f; ++k) acc += gr[t * f + k];
                gxr[t] = acc;
            }
        }
        return gx;
    }

    std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<Upsample>(*this); }

private:
    LayerSpec spec_;
    Shape in_shape_;
};

/// y = x W + b with W stored (in, out).
template <class T>
class Dense final : public Layer<T> {
public:
    explicit Dense(const LayerSpec& s) : spec_(s), weight_({s.in_features, s.out_features}), bias_({s.out_features})
    {
        if (s.in_features == 0 || s.out_features == 0) fail(ErrorCategory::dimension, "dense needs positive feature counts");
        weight_.enable_grad();
        bias_.enable_grad();
    }

    LayerSpec spec() const override { return spec_; }

    Shape output_shape(const Shape& in) const override
    {
        if (in.size() != 2 || in[1] != spec_.in_features)
            fail(ErrorCategory::dimension, "dense expects [N, " + std::to_string(spec_.in_features) + "], got " +
                                               shape_string(in));
        return {in[0], spec_.out_features};
    }

    Tensor<T> forward(const Tensor<T>& x) override
    {
        Tensor<T> y(output_shape(x.shape()));
        const std::size_t n_batch = x.dim(0), nin = spec_.in_features, nout = spec_.out_features;
        for (std::size_t n = 0; n < n_batch; ++n) {
            T* yr = y.ptr() + n * nout;
            std::copy_n(bias_.ptr(), nout, yr);
            const T* xr = x.ptr() + n * nin;
            for (std::size_t i = 0; i < nin; ++i) {
                const T xi = xr[i];
                const T* wr = weight_.ptr() + i * nout;
                for (std::size_t o = 0; o < nout; ++o) yr[o] += xi * wr[o];
            }
        }
        input_ = x;
        return y;
    }

    Tensor<T> backward(const Tensor<T>& gy, bool accumulate_params) override
    {
        const std::size_t n_batch = input_.dim(0), nin = spec_.in_features, nout = spec_.out_features;
        if (gy.shape() != Shape{n_batch, nout}) fail(ErrorCategory::dimension, "dense backward: bad gradient shape");
        Tensor<T> gx(input_.shape());
        T* gw = weight_.grad().data();
        T* gb = bias_.grad().data();
        for (std::size_t n = 0; n < n_batch; ++n) {
            const T* gr = gy.ptr() + n * nout;
            const T* xr = input_.ptr() + n * nin;
            T* gxr = gx.ptr() + n * nin;
            if (accumulate_params)
                for (std::size_t o = 0; o < nout; ++o) gb[o] += gr[o];
            for (std::size_t i = 0; i < nin; ++i) {
                const T* wr = weight_.ptr() + i * nout;
                T acc{};
                for (std::size_t o = 0; o < nout; ++o) acc += wr[o] * gr[o];
                gxr[i] = acc;
                if (accumulate_params) {
                    const T xi = xr[i];
                    T* gwr = gw + i * nout;
                    for (std::size_t o = 0; o < nout; ++o) gwr[o] += xi * gr[o];
                }
            }
        }
        return gx;
    }

    std::vector<Tensor<T>*> parameters() override { return {&weight_, &bias_}; }

    void initialize(Rng& rng) override
    {
        fill_glorot_uniform(weight_, spec_.in_features, spec_.out_features, rng);
        std::fill(bias_.data().begin(), bias_.data().end(), T{});
    }

    std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<Dense>(*this); }

    Tensor<T>& weight() { return weight_; }
    Tensor<T>& bias() { return bias_; }

private:
    LayerSpec spec_;
    Tensor<T> weight_, bias_;
    Tensor<T> input_;
};

template <class T>
class LeakyReLU final : public Layer<T> {
public:
    explicit LeakyReLU(const LayerSpec& s) : spec_(s) {}
    LayerSpec spec() const override { return spec_; }
    Shape output_shape(const Shape& in) const override { return in; }

    Tensor<T> forward(const Tensor<T>& x) override
    {
        input_ = x;
        Tensor<T> y(x.shape());
        const T a = static_cast<T>(spec_.slope);
        for (std::size_t k = 0; k < x.size(); ++k) y[k] = x[k] > T{} ? x[k] : a * x[k];
        return y;
    }

    Tensor<T> backward(const Tensor<T>& gy, bool) override
    {
        if (gy.size() != input_.size()) fail(ErrorCategory::dimension, "leaky_relu backward: bad gradient shape");
        Tensor<T> gx(input_.shape());
        const T a = static_cast<T>(spec_.slope);
        for (std::size_t k = 0; k < gy.size(); ++k) gx[k] = input_[k] > T{} ? gy[k] : a * gy[k];
        return gx;
    }

    std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<LeakyReLU>(*this); }

private:
    LayerSpec spec_;
    Tensor<T> input_;
};

template <class T>
class Tanh final : public Layer<T> {
public:
    explicit Tanh(const LayerSpec& s) : spec_(s) {}
    LayerSpec spec() const override { return spec_; }
    Shape output_shape(const Shape& in) const override { return in; }

    Tensor<T> forward(const Tensor<T>& x) override
    {
        Tensor<T> y(x.shape());
        for (std::size_t k = 0; k < x.size(); ++k) y[k] = std::tanh(x[k]);
        output_ = y;
        return y;
    }

    Tensor<T> backward(const Tensor<T>& gy, bool) override
    {
        if (gy.size() != output_.size()) fail(ErrorCategory::dimension, "tanh backward: bad gradient shape");
        Tensor<T> gx(output_.shape());
        for (std::size_t k = 0; k < gy.size(); ++k) gx[k] = gy[k] * (T{1} - output_[k] * output_[k]);
        return gx;
    }

    std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<Tanh>(*this); }

private:
    LayerSpec spec_;
    Tensor<T> output_;
};

template <class T>
class Sigmoid final : public Layer<T> {
public:
    explicit Sigmoid(const LayerSpec& s) : spec_(s) {}
    LayerSpec spec() const override { return spec_; }
    Shape output_shape(const Shape& in) const override { return in; }

    static T apply(T x)
    {
        if (x >= T{}) return T{1} / (T{1} + std::exp(-x));
        const T e = std::exp(x);
        return e / (T{1} + e);
    }

    Tensor<T> forward(const Tensor<T>& x) override
    {
        Tensor<T> y(x.shape());
        for (std::size_t k = 0; k < x.size(); ++k) y[k] = apply(x[k]);
        output_ = y;
        return y;
    }

    Tensor<T> backward(const Tensor<T>& gy, bool) override
    {
        if (gy.size() != output_.size()) fail(ErrorCategory::dimension, "sigmoid backward: bad gradient shape");
        Tensor<T> gx(output_.shape());
        for (std::size_t k = 0; k < gy.size(); ++k) gx[k] = gy[k] * output_[k] * (T{1} - output_[k]);
        return gx;
    }

    std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<Sigmoid>(*this); }

private:
    LayerSpec spec_;
    Tensor<T> output_;
};

/// Keeps the batch extent and reinterprets the rest.
template <class T>
class Reshape final : public Layer<T> {
public:
    explicit Reshape(const LayerSpec& s) : spec_(s) {}
    LayerSpec spec() const override { return spec_; }

    Shape output_shape(const Shape& in) const override
    {
        if (in.empty()) fail(ErrorCategory::dimension, "reshape needs a batch dimension");
        Shape per(in.begin() + 1, in.end());
        if (shape_size(per) != shape_size(spec_.shape))
            fail(ErrorCategory::dimension, "cannot reshape " + shape_string(in) + " to per-sample " + shape_string(spec_.shape));
        Shape out{in[0]};
        out.insert(out.end(), spec_.shape.begin(), spec_.shape.end());
        return out;
    }

    Tensor<T> forward(const Tensor<T>& x) override
    {
        in_shape_ = x.shape();
        Tensor<T> y = x;
        y.reshape(output_shape(x.shape()));
        return y;
    }

    Tensor<T> backward(const Tensor<T>& gy, bool) override
    {
        Tensor<T> gx = gy;
        gx.reshape(in_shape_);
        return gx;
    }

    std::unique_ptr<Layer<T>> clone() const override { return std::make_unique<Reshape>(*this); }

private:
    LayerSpec spec_;
    Shape in_shape_;
};

template <class T>
std::unique_ptr<Layer<T>> make_layer(const LayerSpec& s)
{
    switch (s.kind) {
    case LayerKind::Conv1D: return std::make_unique<Conv1D<T>>(s);
    case LayerKind::Upsample: return std::make_unique<Upsample<T>>(s);
    case LayerKind::Dense: return std::make_unique<Dense<T>>(s);
    case LayerKind::LeakyReLU: return std::make_unique<LeakyReLU<T>>(s);
    case LayerKind::Tanh: return std::make_unique<Tanh<T>>(s);
    case LayerKind::Sigmoid: return std::make_unique<Sigmoid<T>>(s);
    case LayerKind::Reshape: return std::make_unique<Reshape<T>>(s);
    }
    fail(ErrorCategory::format, "unknown layer kind");
}

} // namespace rgan::nn
