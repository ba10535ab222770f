#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "rgan/config.hpp"
#include "rgan/error.hpp"
#include "rgan/fdtd/scenario.hpp"
#include "rgan/nn/adam.hpp"
#include "rgan/nn/loss.hpp"

namespace rgan {

enum class Stage { One = 1, Two = 2 };

inline Stage parse_stage(const std::string& s)
{
    if (s == "1" || s == "one") return Stage::One;
    if (s == "2" || s == "two") return Stage::Two;
    fail(ErrorCategory::config, "stage must be 1 or 2, got '" + s + "'");
}

/// Generator: dense -> (gen_channels[0], base_len) -> one block per entry of
/// gen_channels of [upsample x2, conv stride 1, activation], the last block
/// emitting one channel through tanh. Discriminator: one strided conv block
/// per entry of disc_channels, then flatten -> dense -> sigmoid.
struct ArchConfig {
    std::size_t latent_dim = 100;
    std::size_t base_len = 64;
    std::size_t kernel = 25;
    double slope = 0.2;
    std::vector<std::size_t> gen_channels{32, 16, 8, 8};
    std::vector<std::size_t> disc_channels{8, 16, 32, 64};
    std::vector<std::size_t> disc_strides{4, 4, 2, 2};

    std::size_t blocks() const { return gen_channels.size(); }
    std::size_t trace_len() const { return base_len << blocks(); }

    static ArchConfig desk() { return {}; }
    static ArchConfig paper()
    {
        ArchConfig a;
        a.gen_channels = {512, 256, 128, 64, 32, 16, 8};
        a.disc_channels = {8, 16, 32, 64, 128};
        a.disc_strides = {4, 4, 4, 4, 2};
        return a;
    }

    void validate() const
    {
        if (latent_dim == 0) fail(ErrorCategory::config, "latent_dim must be >= 1");
        if (base_len == 0 || kernel == 0) fail(ErrorCategory::config, "base_len and kernel must be >= 1");
        if (gen_channels.empty() || disc_channels.empty())
            fail(ErrorCategory::config, "generator and discriminator need at least one block");
        if (disc_channels.size() != disc_strides.size())
            fail(ErrorCategory::config, "disc_channels and disc_strides differ in length");
        for (auto c : gen_channels)
            if (c == 0) fail(ErrorCategory::config, "gen_channels entries must be >= 1");
        for (auto c : disc_channels)
            if (c == 0) fail(ErrorCategory::config, "disc_channels entries must be >= 1");
        for (auto s : disc_strides)
            if (s != 1 && s != 2 && s != 4) fail(ErrorCategory::config, "disc_strides entries must be 1, 2 or 4");
    }

    bool operator==(const ArchConfig&) const = default;
};

struct StageSettings {
    nn::LossKind loss = nn::LossKind::MSE;
    nn::AdamHyper adam;
    std::size_t epochs = 100;
    bool operator==(const StageSettings&) const = default;
};

struct GanConfig {
    ArchConfig arch;
    std::size_t batch_size = 30;
    double real_label = 0.95;
    double fake_label = 0.0;
    double generator_target = 1.0;
    StageSettings stage_one{nn::LossKind::MSE, {1e-3, 0.5, 0.9, 1e-8}, 100};
    StageSettings stage_two{nn::LossKind::BCE, {1e-4, 0.5, 0.9, 1e-8}, 100};
    std::size_t checkpoint_interval = 5;
    std::uint64_t seed = 1;

    const StageSettings& settings(Stage s) const { return s == Stage::One ? stage_one : stage_two; }

    static std::size_t default_batch(ClassLabel c) { return c == ClassLabel::NoObject ? 60 : 30; }

    static GanConfig desk(ClassLabel c)
    {
        GanConfig g;
        g.batch_size = default_batch(c);
        return g;
    }

    static GanConfig paper(ClassLabel c)
    {
        GanConfig g = desk(c);
        g.arch = ArchConfig::paper();
        g.stage_one.epochs = 400;
        g.stage_two.epochs = 400;
        return g;
    }

    void validate() const
    {
        arch.validate();
        if (batch_size == 0) fail(ErrorCategory::config, "batch_size must be >= 1");
        if (!(real_label > 0.5 && real_label <= 1.0)) fail(ErrorCategory::config, "real_label must lie in (0.5, 1]");
        if (checkpoint_interval == 0) fail(ErrorCategory::config, "checkpoint_interval must be >= 1");
        for (const auto* s : {&stage_one, &stage_two})
            if (!(s->adam.alpha > 0) || !(s->adam.epsilon > 0) || s->adam.beta1 < 0 || s->adam.beta1 >= 1 ||
                s->adam.beta2 < 0 || s->adam.beta2 >= 1)
                fail(ErrorCategory::config, "adam hyperparameters out of range");
    }

    static const std::set<std::string>& keys()
    {
        static const std::set<std::string> k{
            "latent_dim",   "base_len",     "kernel",         "gen_channels",   "disc_channels",
            "disc_strides", "batch_size",   "real_label",     "epochs_stage1",  "epochs_stage2",
            "alpha_stage1", "alpha_stage2", "loss_stage1",    "loss_stage2",    "adam_beta1",
            "adam_beta2",   "adam_epsilon", "checkpoint_interval", "gan_seed"};
        return k;
    }

    static GanConfig from_config(const KeyValueConfig& kv, GanConfig base)
    {
        auto sizes = [&](const std::string& key, const std::vector<std::size_t>& fb) {
            std::vector<std::uint64_t> f(fb.begin(), fb.end());
            auto v = kv.get_u64_list(key, f);
            return std::vector<std::size_t>(v.begin(), v.end());
        };
        base.arch.latent_dim = kv.get_u64("latent_dim", base.arch.latent_dim);
        base.arch.base_len = kv.get_u64("base_len", base.arch.base_len);
        base.arch.kernel = kv.get_u64("kernel", base.arch.kernel);
        base.arch.gen_channels = sizes("gen_channels", base.arch.gen_channels);
        base.arch.disc_channels = sizes("disc_channels", base.arch.disc_channels);
        base.arch.disc_strides = sizes("disc_strides", base.arch.disc_strides);
        base.batch_size = kv.get_u64("batch_size", base.batch_size);
        base.real_label = kv.get_double("real_label", base.real_label);
        base.stage_one.epochs = kv.get_u64("epochs_stage1", base.stage_one.epochs);
        base.stage_two.epochs = kv.get_u64("epochs_stage2", base.stage_two.epochs);
        base.stage_one.adam.alpha = kv.get_double("alpha_stage1", base.stage_one.adam.alpha);
        base.stage_two.adam.alpha = kv.get_double("alpha_stage2", base.stage_two.adam.alpha);
        base.stage_one.loss = nn::parse_loss(kv.get_string("loss_stage1", nn::loss_name(base.stage_one.loss)));
        base.stage_two.loss = nn::parse_loss(kv.get_string("loss_stage2", nn::loss_name(base.stage_two.loss)));
        for (auto* s : {&base.stage_one, &base.stage_two}) {
            s->adam.beta1 = kv.get_double("adam_beta1", s->adam.beta1);
            s->adam.beta2 = kv.get_double("adam_beta2", s->adam.beta2);
            s->adam.epsilon = kv.get_double("adam_epsilon", s->adam.epsilon);
        }
        base.checkpoint_interval = kv.get_u64("checkpoint_interval", base.checkpoint_interval);
        base.seed = kv.get_u64("gan_seed", base.seed);
        base.validate();
        return base;
    }

    bool operator==(const GanConfig&) const = default;
};

inline nlohmann::json to_json(const StageSettings& s)
{
    return {{"loss", nn::loss_name(s.loss)},
            {"alpha", s.adam.alpha},
            {"beta1", s.adam.beta1},
            {"beta2", s.adam.beta2},
            {"epsilon", s.adam.epsilon},
            {"epochs", s.epochs}};
}

inline StageSettings stage_settings_from_json(const nlohmann::json& j)
{
    StageSettings s;
    s.loss = nn::parse_loss(j.at("loss").get<std::string>());
    s.adam.alpha = j.at("alpha").get<double>();
    s.adam.beta1 = j.at("beta1").get<double>();
    s.adam.beta2 = j.at("beta2").get<double>();
    s.adam.epsilon = j.at("epsilon").get<double>();
    s.epochs = j.at("epochs").get<std::size_t>();
    return s;
}

inline nlohmann::json to_json(const GanConfig& g)
{
    return {{"latent_dim", g.arch.latent_dim},
            {"base_len", g.arch.base_len},
            {"kernel", g.arch.kernel},
            {"slope", g.arch.slope},
            {"gen_channels", g.arch.gen_channels},
            {"disc_channels", g.arch.disc_channels},
            {"disc_strides", g.arch.disc_strides},
            {"batch_size", g.batch_size},
            {"real_label", g.real_label},
            {"fake_label", g.fake_label},
            {"generator_target", g.generator_target},
            {"stage_one", to_json(g.stage_one)},
            {"stage_two", to_json(g.stage_two)},
            {"checkpoint_interval", g.checkpoint_interval},
            {"seed", g.seed}};
}

inline GanConfig gan_config_from_json(const nlohmann::json& j)
{
    try {
        GanConfig g;
        g.arch.latent_dim = j.at("latent_dim").get<std::size_t>();
        g.arch.base_len = j.at("base_len").get<std::size_t>();
        g.arch.kernel = j.at("kernel").get<std::size_t>();
        g.arch.slope = j.at("slope").get<double>();
        g.arch.gen_channels = j.at("gen_channels").get<std::vector<std::size_t>>();
        g.arch.disc_channels = j.at("disc_channels").get<std::vector<std::size_t>>();
        g.arch.disc_strides = j.at("disc_strides").get<std::vector<std::size_t>>();
        g.batch_size = j.at("batch_size").get<std::size_t>();
        g.real_label = j.at("real_label").get<double>();
        g.fake_label = j.at("fake_label").get<double>();
        g.generator_target = j.at("generator_target").get<double>();
        g.stage_one = stage_settings_from_json(j.at("stage_one"));
        g.stage_two = stage_settings_from_json(j.at("stage_two"));
        g.checkpoint_interval = j.at("checkpoint_interval").get<std::size_t>();
        g.seed = j.at("seed").get<std::uint64_t>();
        return g;
    } catch (const nlohmann::json::exception& ex) {
        fail(ErrorCategory::format, std::string("bad gan config: ") + ex.what());
    }
}

} // namespace rgan
