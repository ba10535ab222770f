#pragma once

// One class's GAN: both networks, their optimizer state and training position.
//
// Checkpoint file:
//   "RGANCKPT" u32 version
//   string  header JSON (class, stage, epoch, config, normalization, ...)
//   G network, then D network and both Adam states when present
//   u64     FNV-1a of everything above

#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

#include "rgan/binary_io.hpp"
#include "rgan/gan/models.hpp"
#include "rgan/nn/serialize.hpp"

namespace rgan {

inline constexpr std::string_view checkpoint_magic = "RGANCKPT";
inline constexpr std::uint32_t checkpoint_version = 1;

/// Seed streams carved out of GanConfig::seed.
namespace seed_stream {
inline constexpr std::uint64_t generator_init = 1;
inline constexpr std::uint64_t discriminator_init = 2;
inline constexpr std::uint64_t batches = 3;
inline constexpr std::uint64_t latent = 4;
} // namespace seed_stream

struct GanBundle {
    ClassLabel label = ClassLabel::NoObject;
    GanConfig config;
    nn::Network<float> generator, discriminator;
    nn::AdamState<float> g_opt, d_opt;
    Stage stage = Stage::One;
    std::size_t epoch = 0; // epochs completed in the current stage
    std::size_t d_resets = 0;
    double normalization = 1.0; // dataset constant that maps traces to [-1, 1]
    double dt_record = 0.0;
    bool has_discriminator = true;

    std::size_t trace_len() const { return config.arch.trace_len(); }
};

/// Fresh Glorot-initialized bundle.
inline GanBundle make_bundle(const GanConfig& cfg, ClassLabel label)
{
    cfg.validate();
    GanBundle b;
    b.label = label;
    b.config = cfg;
    b.generator = build_generator<float>(cfg.arch);
    b.discriminator = build_discriminator<float>(cfg.arch);
    Rng g_rng(derive_seed(cfg.seed, seed_stream::generator_init, static_cast<std::uint64_t>(label)));
    Rng d_rng(derive_seed(cfg.seed, seed_stream::discriminator_init, static_cast<std::uint64_t>(label)));
    b.generator.initialize(g_rng);
    b.discriminator.initialize(d_rng);
    b.g_opt.hyper = b.d_opt.hyper = cfg.stage_one.adam;
    return b;
}

/// Redraws D from `rng` and clears its optimizer moments. G is untouched.
inline void reset_discriminator(GanBundle& b, Rng& rng)
{
    b.discriminator = build_discriminator<float>(b.config.arch);
    b.discriminator.initialize(rng);
    b.d_opt.reset();
    b.has_discriminator = true;
    ++b.d_resets;
}

inline nlohmann::json checkpoint_header(const GanBundle& b)
{
    return {{"class", std::string(to_string(b.label))},
            {"stage", static_cast<int>(b.stage)},
            {"epoch", b.epoch},
            {"d_resets", b.d_resets},
            {"normalization", b.normalization},
            {"dt_record", b.dt_record},
            {"trace_len", b.trace_len()},
            {"has_discriminator", b.has_discriminator},
            {"config", to_json(b.config)}};
}

/// Written to a sibling temp file and renamed into place.
inline void save_checkpoint(const GanBundle& b, const std::filesystem::path& path, bool include_discriminator = true)
{
    make_parent_directories(path);
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) fail(ErrorCategory::io, "cannot write checkpoint '" + tmp.string() + "'");
        BinaryWriter w(f);
        const bool with_d = include_discriminator && b.has_discriminator;
        auto header = checkpoint_header(b);
        header["has_discriminator"] = with_d;
        w.bytes(checkpoint_magic.data(), checkpoint_magic.size());
        w.value(checkpoint_version);
        w.string(header.dump());
        nn::write_network(w, b.generator);
        if (with_d) {
            nn::write_network(w, b.discriminator);
            nn::write_adam(w, b.g_opt);
            nn::write_adam(w, b.d_opt);
        }
        const auto sum = w.checksum();
        f.write(reinterpret_cast<const char*>(&sum), sizeof sum);
        if (!f) fail(ErrorCategory::io, "write failed for '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

inline GanBundle load_checkpoint(const std::filesystem::path& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) fail(ErrorCategory::not_found, "cannot open checkpoint '" + path.string() + "'");
    BinaryReader r(f, "checkpoint " + path.filename().string());
    r.expect_magic(checkpoint_magic);
    const auto version = r.value<std::uint32_t>();
    if (version != checkpoint_version)
        fail(ErrorCategory::format, r.what() + ": unsupported version " + std::to_string(version));

    GanBundle b;
    nlohmann::json h;
    try {
        h = nlohmann::json::parse(r.string());
        b.label = parse_class_label(h.at("class").get<std::string>());
        b.stage = h.at("stage").get<int>() == 2 ? Stage::Two : Stage::One;
        b.epoch = h.at("epoch").get<std::size_t>();
        b.d_resets = h.at("d_resets").get<std::size_t>();
        b.normalization = h.at("normalization").get<double>();
        b.dt_record = h.at("dt_record").get<double>();
        b.has_discriminator = h.at("has_discriminator").get<bool>();
        b.config = gan_config_from_json(h.at("config"));
    } catch (const nlohmann::json::exception& ex) {
        fail(ErrorCategory::format, r.what() + ": bad header: " + ex.what());
    }
    b.generator = nn::read_network<float>(r);
    if (b.generator.specs() != generator_specs(b.config.arch))
        fail(ErrorCategory::format, r.what() + ": generator layers disagree with the stored config");
    if (b.has_discriminator) {
        b.discriminator = nn::read_network<float>(r);
        b.g_opt = nn::read_adam<float>(r);
        b.d_opt = nn::read_adam<float>(r);
    } else {
        b.discriminator = build_discriminator<float>(b.config.arch);
        b.g_opt.hyper = b.d_opt.hyper = b.config.settings(b.stage).adam;
    }
    r.expect_checksum();
    if (!r.at_end()) fail(ErrorCategory::format, r.what() + ": trailing bytes");
    return b;
}

} // namespace rgan
