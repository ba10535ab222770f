#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "rgan/fdtd/solver.hpp"
#include "rgan/gan/bundle.hpp"
#include "rgan/nn/loss.hpp"

namespace rgan {

/// Training traces as one [N, 1, L] float tensor, already in [-1, 1].
inline nn::Tensor<float> traces_to_tensor(const std::vector<std::vector<double>>& traces)
{
    if (traces.empty()) fail(ErrorCategory::validation, "no training traces");
    const std::size_t len = traces.front().size();
    nn::Tensor<float> t({traces.size(), 1, len});
    for (std::size_t n = 0; n < traces.size(); ++n) {
        if (traces[n].size() != len) fail(ErrorCategory::dimension, "training traces differ in length");
        std::transform(traces[n].begin(), traces[n].end(), t.ptr() + n * len, [](double v) { return static_cast<float>(v); });
    }
    return t;
}

/// z ~ N(0, 1), shape [n, latent_dim].
inline nn::Tensor<float> sample_latent(std::size_t n, std::size_t latent_dim, Rng& rng)
{
    nn::Tensor<float> z({n, latent_dim});
    std::normal_distribution<double> normal(0.0, 1.0);
    for (auto& v : z.data()) v = static_cast<float>(normal(rng));
    return z;
}

struct StepLosses {
    double d_real = 0, d_fake = 0, g = 0;
    double d() const { return d_real + d_fake; }
};

struct EpochRecord {
    Stage stage = Stage::One;
    std::size_t epoch = 0; // 1-based within the stage
    double d_loss = 0, g_loss = 0;
    double d_real_loss = 0, d_fake_loss = 0;
};

struct CheckpointRecord {
    Stage stage = Stage::One;
    std::size_t epoch = 0;
    std::filesystem::path path;
};

struct StageResult {
    std::vector<EpochRecord> history;
    std::vector<CheckpointRecord> checkpoints;
};

struct TrainOptions {
    std::optional<std::filesystem::path> checkpoint_dir;
    std::optional<std::size_t> epochs; // overrides the stage's configured count
    std::function<void(const EpochRecord&)> on_epoch;
    /// Also checkpoint the last epoch when it is off the interval.
    bool save_final = true;
};

namespace detail {

inline nn::Tensor<float> gather_batch(const nn::Tensor<float>& data, const std::vector<std::size_t>& order,
                                      std::size_t begin, std::size_t end)
{
    const std::size_t len = data.dim(2);
    nn::Tensor<float> b({end - begin, 1, len});
    for (std::size_t k = begin; k < end; ++k) std::copy_n(data.ptr() + order[k] * len, len, b.ptr() + (k - begin) * len);
    return b;
}

inline void check_finite(double v, const char* what, std::size_t epoch, std::size_t batch)
{
    if (!std::isfinite(v))
        fail(ErrorCategory::divergence, std::string(what) + " loss is not finite at epoch " + std::to_string(epoch) +
                                            ", batch " + std::to_string(batch));
}

} // namespace detail

/// D update on one real batch (target real_label) and one generated batch
/// (target fake_label). G's parameters are not touched.
inline StepLosses discriminator_step(GanBundle& b, const nn::Tensor<float>& real, const nn::Tensor<float>& z,
                                     nn::LossKind loss)
{
    StepLosses out;
    const auto fake = b.generator.forward(z);
    auto& d = b.discriminator;
    d.zero_grad();
    const auto pr = d.forward(real);
    const auto lr = nn::compute_loss(loss, pr, nn::Tensor<float>(pr.shape(), static_cast<float>(b.config.real_label)));
    d.backward(lr.grad, true);
    const auto pf = d.forward(fake);
    const auto lf = nn::compute_loss(loss, pf, nn::Tensor<float>(pf.shape(), static_cast<float>(b.config.fake_label)));
    d.backward(lf.grad, true);
    nn::adam_step(d.parameters(), b.d_opt);
    out.d_real = lr.value;
    out.d_fake = lf.value;
    return out;
}

/// G update through a locked D: generated samples labeled generator_target.
inline double generator_step(GanBundle& b, const nn::Tensor<float>& z, nn::LossKind loss)
{
    auto& g = b.generator;
    g.zero_grad();
    const auto fake = g.forward(z);
    const auto p = b.discriminator.forward(fake);
    const auto l = nn::compute_loss(loss, p, nn::Tensor<float>(p.shape(), static_cast<float>(b.config.generator_target)));
    const auto grad_fake = b.discriminator.backward(l.grad, false);
    g.backward(grad_fake, true);
    nn::adam_step(g.parameters(), b.g_opt);
    return l.value;
}

inline std::string checkpoint_name(ClassLabel c, Stage s, std::size_t epoch)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_s%d_e%04zu.rgan", std::string(to_string(c)).c_str(), static_cast<int>(s), epoch);
    return buf;
}

/// Runs the bundle's current stage from its current epoch. Alternates one D
/// batch and one G batch; saves a checkpoint every checkpoint_interval epochs.
inline StageResult train_stage(GanBundle& b, const nn::Tensor<float>& data, const TrainOptions& opt = {})
{
    if (data.rank() != 3 || data.dim(1) != 1 || data.dim(2) != b.trace_len())
        fail(ErrorCategory::dimension, "training data must be [N, 1, " + std::to_string(b.trace_len()) + "], got " +
                                           nn::shape_string(data.shape()));
    const auto& st = b.config.settings(b.stage);
    b.g_opt.hyper = st.adam;
    b.d_opt.hyper = st.adam;
    const std::size_t n = data.dim(0);
    const std::size_t bs = std::min(b.config.batch_size, n);
    const std::size_t target = opt.epochs.value_or(st.epochs);

    StageResult result;
    std::vector<std::size_t> order(n);
    while (b.epoch < target) {
        const std::size_t e = b.epoch + 1;
        const auto class_seed = derive_seed(b.config.seed, seed_stream::batches, static_cast<std::uint64_t>(b.label));
        Rng rng(derive_seed(class_seed, static_cast<std::uint64_t>(b.stage), e));
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::shuffle(order.begin(), order.end(), rng);

        EpochRecord rec{b.stage, e};
        std::size_t batches = 0;
        for (std::size_t begin = 0; begin < n; begin += bs) {
            const std::size_t end = std::min(n, begin + bs);
            const auto real = detail::gather_batch(data, order, begin, end);
            const auto zd = sample_latent(end - begin, b.config.arch.latent_dim, rng);
            const auto dl = discriminator_step(b, real, zd, st.loss);
            detail::check_finite(dl.d(), "discriminator", e, batches);
            const auto zg = sample_latent(end - begin, b.config.arch.latent_dim, rng);
            const double gl = generator_step(b, zg, st.loss);
            detail::check_finite(gl, "generator", e, batches);
            rec.d_real_loss += dl.d_real;
            rec.d_fake_loss += dl.d_fake;
            rec.g_loss += gl;
            ++batches;
        }
        rec.d_real_loss /= static_cast<double>(batches);
        rec.d_fake_loss /= static_cast<double>(batches);
        rec.d_loss = rec.d_real_loss + rec.d_fake_loss;
        rec.g_loss /= static_cast<double>(batches);
        b.epoch = e;
        result.history.push_back(rec);
        if (opt.on_epoch) opt.on_epoch(rec);

        if (opt.checkpoint_dir && e % b.config.checkpoint_interval == 0) {
            const auto path = *opt.checkpoint_dir / checkpoint_name(b.label, b.stage, e);
            save_checkpoint(b, path);
            result.checkpoints.push_back({b.stage, e, path});
        }
    }
    const bool on_interval = b.epoch % b.config.checkpoint_interval == 0;
    if (opt.checkpoint_dir && opt.save_final && !result.history.empty() && !on_interval) {
        const auto path = *opt.checkpoint_dir / checkpoint_name(b.label, b.stage, b.epoch);
        save_checkpoint(b, path);
        result.checkpoints.push_back({b.stage, b.epoch, path});
    }
    return result;
}

/// Stage hand-off: keeps G's weights, redraws D, and restarts both optimizers.
inline void begin_stage_two(GanBundle& b)
{
    Rng rng(derive_seed(b.config.seed, seed_stream::discriminator_init, 100 + static_cast<std::uint64_t>(b.label)));
    reset_discriminator(b, rng);
    b.g_opt.reset();
    b.stage = Stage::Two;
    b.epoch = 0;
    b.g_opt.hyper = b.d_opt.hyper = b.config.stage_two.adam;
}

/// Normalized generator output, [n][L].
inline std::vector<std::vector<double>> generate_normalized(GanBundle& b, std::size_t n, Rng& rng,
                                                            std::size_t chunk = 64)
{
    if (n == 0) fail(ErrorCategory::validation, "sample count must be >= 1");
    std::vector<std::vector<double>> out;
    out.reserve(n);
    const std::size_t len = b.trace_len();
    while (out.size() < n) {
        const std::size_t m = std::min(chunk, n - out.size());
        const auto z = sample_latent(m, b.config.arch.latent_dim, rng);
        const auto y = b.generator.forward(z);
        for (std::size_t k = 0; k < m; ++k) out.emplace_back(y.ptr() + k * len, y.ptr() + (k + 1) * len);
    }
    return out;
}

/// Generated traces; physical units restore the dataset amplitude scale.
inline std::vector<RadarTrace> generate_samples(GanBundle& b, std::size_t n, Rng& rng, bool physical_units = false)
{
    auto raw = generate_normalized(b, n, rng);
    std::vector<RadarTrace> out;
    out.reserve(n);
    for (auto& s : raw) {
        RadarTrace t;
        if (physical_units)
            for (double& v : s) v *= b.normalization;
        t.samples = std::move(s);
        t.dt_record = b.dt_record;
        t.label = b.label;
        t.origin = TraceOrigin::Generated;
        out.push_back(std::move(t));
    }
    return out;
}

/// Fraction of stage epochs whose G loss sits within 1% of the loss ceiling.
inline double pinned_fraction(const std::vector<EpochRecord>& h, nn::LossKind loss, double tolerance = 0.01)
{
    if (h.empty()) return 0.0;
    const double limit = (1.0 - tolerance) * nn::loss_ceiling(loss);
    const auto pinned = std::count_if(h.begin(), h.end(), [&](const EpochRecord& r) { return r.g_loss >= limit; });
    return static_cast<double>(pinned) / static_cast<double>(h.size());
}

} // namespace rgan
