#pragma once

// Network and optimizer-state encoding, used inside checkpoint files:
//   string  layer specs as JSON array
//   u8      scalar width (4 or 8)
//   u64     tensor count, then per tensor: u64 rank, u64 dims[rank], data

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "rgan/binary_io.hpp"
#include "rgan/nn/adam.hpp"
#include "rgan/nn/network.hpp"

namespace rgan::nn {

namespace detail {

template <class Stored, class T>
void read_values(BinaryReader& r, std::span<T> dst)
{
    if constexpr (std::is_same_v<Stored, T>) {
        r.array(dst);
    } else {
        std::vector<Stored> tmp(dst.size());
        r.array(std::span<Stored>(tmp));
        for (std::size_t k = 0; k < tmp.size(); ++k) dst[k] = static_cast<T>(tmp[k]);
    }
}

template <class T>
void read_scalars(BinaryReader& r, std::uint8_t width, std::span<T> dst)
{
    if (width == 4) {
        read_values<float>(r, dst);
    } else if (width == 8) {
        read_values<double>(r, dst);
    } else {
        fail(ErrorCategory::format, r.what() + ": unsupported scalar width " + std::to_string(width));
    }
}

} // namespace detail

template <class T>
void write_network(BinaryWriter& w, const Network<T>& net)
{
    nlohmann::json specs = nlohmann::json::array();
    for (const auto& s : net.specs()) specs.push_back(to_json(s));
    w.string(specs.dump());
    w.value<std::uint8_t>(sizeof(T));
    const auto params = net.parameters();
    w.value<std::uint64_t>(params.size());
    for (const auto* p : params) {
        w.value<std::uint64_t>(p->rank());
        for (auto d : p->shape()) w.value<std::uint64_t>(d);
        w.array(p->data());
    }
}

/// Scalars stored at another width are converted on load.
template <class T>
Network<T> read_network(BinaryReader& r)
{
    std::vector<LayerSpec> specs;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(r.string());
    } catch (const nlohmann::json::exception& ex) {
        fail(ErrorCategory::format, r.what() + ": bad layer list: " + ex.what());
    }
    if (!j.is_array()) fail(ErrorCategory::format, r.what() + ": layer list is not an array");
    for (const auto& e : j) specs.push_back(layer_spec_from_json(e));

    Network<T> net(specs);
    const auto width = r.value<std::uint8_t>();
    const auto count = r.value<std::uint64_t>();
    auto params = net.parameters();
    if (count != params.size()) fail(ErrorCategory::format, r.what() + ": parameter count mismatch");
    for (auto* p : params) {
        const auto rank = r.value<std::uint64_t>();
        if (rank != p->rank()) fail(ErrorCategory::format, r.what() + ": parameter rank mismatch");
        Shape shape;
        for (std::uint64_t k = 0; k < rank; ++k) shape.push_back(r.value<std::uint64_t>());
        if (shape != p->shape())
            fail(ErrorCategory::format, r.what() + ": parameter shape " + shape_string(shape) + " expected " +
                                            shape_string(p->shape()));
        detail::read_scalars(r, width, p->data());
    }
    return net;
}

template <class T>
void write_adam(BinaryWriter& w, const AdamState<T>& st)
{
    w.value(st.hyper.alpha);
    w.value(st.hyper.beta1);
    w.value(st.hyper.beta2);
    w.value(st.hyper.epsilon);
    w.value<std::uint64_t>(st.t);
    w.value<std::uint8_t>(sizeof(T));
    w.value<std::uint64_t>(st.m.size());
    for (std::size_t k = 0; k < st.m.size(); ++k) {
        w.value<std::uint64_t>(st.m[k].size());
        w.array(std::span<const T>(st.m[k]));
        w.array(std::span<const T>(st.v[k]));
    }
}

template <class T>
AdamState<T> read_adam(BinaryReader& r)
{
    AdamState<T> st;
    st.hyper.alpha = r.value<double>();
    st.hyper.beta1 = r.value<double>();
    st.hyper.beta2 = r.value<double>();
    st.hyper.epsilon = r.value<double>();
    st.t = r.value<std::uint64_t>();
    const auto width = r.value<std::uint8_t>();
    const auto count = r.value<std::uint64_t>();
    if (count > (1u << 20)) fail(ErrorCategory::format, r.what() + ": implausible moment count");
    for (std::uint64_t k = 0; k < count; ++k) {
        const auto n = r.value<std::uint64_t>();
        if (n > (std::uint64_t{1} << 32)) fail(ErrorCategory::format, r.what() + ": implausible moment size");
        st.m.emplace_back(n);
        st.v.emplace_back(n);
        detail::read_scalars(r, width, std::span<T>(st.m.back()));
        detail::read_scalars(r, width, std::span<T>(st.v.back()));
    }
    return st;
}

} // namespace rgan::nn
