#pragma once

#include <vector>

#include "rgan/gan/config.hpp"
#include "rgan/nn/network.hpp"

namespace rgan {

inline std::vector<nn::LayerSpec> generator_specs(const ArchConfig& a)
{
    a.validate();
    using nn::LayerSpec;
    std::vector<LayerSpec> s;
    s.push_back(LayerSpec::dense(a.latent_dim, a.gen_channels[0] * a.base_len));
    s.push_back(LayerSpec::reshape({a.gen_channels[0], a.base_len}));
    s.push_back(LayerSpec::leaky_relu(a.slope));
    for (std::size_t b = 0; b < a.blocks(); ++b) {
        const bool last = b + 1 == a.blocks();
        const std::size_t out = last ? 1 : a.gen_channels[b + 1];
        s.push_back(LayerSpec::upsample(2));
        s.push_back(LayerSpec::conv1d(a.gen_channels[b], out, a.kernel, 1, nn::Padding::Same));
        s.push_back(last ? LayerSpec::tanh() : LayerSpec::leaky_relu(a.slope));
    }
    return s;
}

/// Conv output lengths after each discriminator block, starting with the input.
inline std::vector<std::size_t> discriminator_length_chain(const ArchConfig& a)
{
    std::vector<std::size_t> chain{a.trace_len()};
    for (auto s : a.disc_strides)
        chain.push_back(nn::conv_geometry(chain.back(), a.kernel, s, nn::Padding::Same).out_len);
    return chain;
}

inline std::vector<nn::LayerSpec> discriminator_specs(const ArchConfig& a)
{
    a.validate();
    using nn::LayerSpec;
    const auto chain = discriminator_length_chain(a);
    std::vector<LayerSpec> s;
    std::size_t in = 1;
    for (std::size_t b = 0; b < a.disc_channels.size(); ++b) {
        s.push_back(LayerSpec::conv1d(in, a.disc_channels[b], a.kernel, a.disc_strides[b], nn::Padding::Same));
        s.push_back(LayerSpec::leaky_relu(a.slope));
        in = a.disc_channels[b];
    }
    const std::size_t flat = in * chain.back();
    s.push_back(LayerSpec::reshape({flat}));
    s.push_back(LayerSpec::dense(flat, 1));
    s.push_back(LayerSpec::sigmoid());
    return s;
}

template <class T = float>
nn::Network<T> build_generator(const ArchConfig& a)
{
    return nn::Network<T>(generator_specs(a));
}

template <class T = float>
nn::Network<T> build_discriminator(const ArchConfig& a)
{
    return nn::Network<T>(discriminator_specs(a));
}

} // namespace rgan
