#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "rgan/nn/layers.hpp"
#include "rgan/rng.hpp"

namespace rgan::nn {

/// Sequential stack of layers. Copies are deep.
template <class T>
class Network {
public:
    Network() = default;

    explicit Network(const std::vector<LayerSpec>& specs)
    {
        for (const auto& s : specs) add(make_layer<T>(s));
    }

    Network(const Network& o)
    {
        for (const auto& l : o.layers_) layers_.push_back(l->clone());
    }
    Network& operator=(const Network& o)
    {
        if (this != &o) {
            Network tmp(o);
            layers_ = std::move(tmp.layers_);
        }
        return *this;
    }
    Network(Network&&) noexcept = default;
    Network& operator=(Network&&) noexcept = default;

    void add(std::unique_ptr<Layer<T>> layer) { layers_.push_back(std::move(layer)); }

    std::size_t layer_count() const { return layers_.size(); }
    Layer<T>& layer(std::size_t k) { return *layers_.at(k); }
    const Layer<T>& layer(std::size_t k) const { return *layers_.at(k); }

    std::vector<LayerSpec> specs() const
    {
        std::vector<LayerSpec> out;
        for (const auto& l : layers_) out.push_back(l->spec());
        return out;
    }

    /// Batched output shape, validating every layer on the way.
    Shape output_shape(Shape in) const
    {
        for (const auto& l : layers_) in = l->output_shape(in);
        return in;
    }

    /// Shapes after each layer; element 0 is the input.
    std::vector<Shape> shape_chain(Shape in) const
    {
        std::vector<Shape> chain{in};
        for (const auto& l : layers_) chain.push_back(in = l->output_shape(in));
        return chain;
    }

    Tensor<T> forward(const Tensor<T>& x)
    {
        Tensor<T> h = x;
        for (auto& l : layers_) h = l->forward(h);
        return h;
    }

    /// Backpropagates dL/dy. With accumulate_params=false the network acts as
    /// locked: only the input gradient is produced.
    Tensor<T> backward(const Tensor<T>& grad_out, bool accumulate_params = true)
    {
        Tensor<T> g = grad_out;
        for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g, accumulate_params);
        return g;
    }

    std::vector<Tensor<T>*> parameters()
    {
        std::vector<Tensor<T>*> out;
        for (auto& l : layers_)
            for (auto* p : l->parameters()) out.push_back(p);
        return out;
    }

    std::vector<const Tensor<T>*> parameters() const
    {
        std::vector<const Tensor<T>*> out;
        for (auto& l : layers_)
            for (auto* p : l->parameters()) out.push_back(p);
        return out;
    }

    std::size_t parameter_count() const
    {
        std::size_t n = 0;
        for (const auto* p : parameters()) n += p->size();
        return n;
    }

    void zero_grad()
    {
        for (auto* p : parameters()) p->zero_grad();
    }

    /// Glorot weights and zero biases, layer by layer from one stream.
    void initialize(Rng& rng)
    {
        for (auto& l : layers_) l->initialize(rng);
    }

    /// FNV-1a over every parameter's bytes, in layer order.
    std::uint64_t checksum() const
    {
        Fnv1a h;
        for (const auto* p : parameters()) h.update(p->ptr(), p->size() * sizeof(T));
        return h.digest();
    }

    template <class U>
    Network<U> cast() const
    {
        Network<U> out(specs());
        auto src = parameters();
        auto dst = out.parameters();
        for (std::size_t k = 0; k < src.size(); ++k) {
            auto c = src[k]->template cast<U>();
            std::copy(c.data().begin(), c.data().end(), dst[k]->data().begin());
        }
        return out;
    }

private:
    std::vector<std::unique_ptr<Layer<T>>> layers_;
};

} // namespace rgan::nn
