#include <cmath>
#include <fstream>

#include <gtest/gtest.h>

#include "rgan/gan/trainer.hpp"
#include "unit/test_util.hpp"

using namespace rgan;
using rgan::testing::TempDir;
using rgan::testing::throws_category;

namespace {

GanConfig tiny_config(std::size_t batch = 4)
{
    GanConfig c;
    c.arch.latent_dim = 8;
    c.arch.base_len = 16;
    c.arch.kernel = 5;
    c.arch.gen_channels = {4, 2};
    c.arch.disc_channels = {2, 4};
    c.arch.disc_strides = {4, 2};
    c.batch_size = batch;
    c.seed = 77;
    return c;
}

/// Smooth class-like traces in [-1, 1].
std::vector<std::vector<double>> toy_traces(std::size_t n, std::size_t len, std::uint64_t seed)
{
    Rng rng(seed);
    std::uniform_real_distribution<double> u(0.5, 1.0);
    std::vector<std::vector<double>> out(n, std::vector<double>(len));
    for (auto& t : out) {
        const double a = u(rng);
        for (std::size_t k = 0; k < len; ++k) t[k] = a * std::sin(0.3 * static_cast<double>(k)) * std::exp(-0.02 * k);
    }
    return out;
}

nn::Tensor<float> toy_batch(std::size_t n, std::size_t len, std::uint64_t seed)
{
    return traces_to_tensor(toy_traces(n, len, seed));
}

std::uint64_t checksum(const nn::Network<float>& n) { return n.checksum(); }

} // namespace

// ---------------------------------------------------------------------------
// Configuration

TEST(GanConfig, Defaults)
{
    const auto c = GanConfig::desk(ClassLabel::NoObject);
    EXPECT_EQ(c.batch_size, 60u);
    EXPECT_EQ(GanConfig::desk(ClassLabel::LargeObject).batch_size, 30u);
    EXPECT_EQ(GanConfig::desk(ClassLabel::SmallObject).batch_size, 30u);
    EXPECT_EQ(c.real_label, 0.95);
    EXPECT_EQ(c.fake_label, 0.0);
    EXPECT_EQ(c.generator_target, 1.0);
    EXPECT_EQ(c.checkpoint_interval, 5u);
    EXPECT_EQ(c.stage_one.loss, nn::LossKind::MSE);
    EXPECT_EQ(c.stage_one.adam.alpha, 1e-3);
    EXPECT_EQ(c.stage_two.loss, nn::LossKind::BCE);
    EXPECT_EQ(c.stage_two.adam.alpha, 1e-4);
    for (const auto* s : {&c.stage_one, &c.stage_two}) {
        EXPECT_EQ(s->adam.beta1, 0.5);
        EXPECT_EQ(s->adam.beta2, 0.9);
        EXPECT_EQ(s->adam.epsilon, 1e-8);
    }
    EXPECT_EQ(c.arch.latent_dim, 100u);
    EXPECT_EQ(c.arch.kernel, 25u);
    EXPECT_EQ(c.arch.trace_len(), 1024u);
    const auto p = GanConfig::paper(ClassLabel::SmallObject);
    EXPECT_EQ(p.arch.trace_len(), 8192u);
    EXPECT_EQ(p.stage_one.epochs, 400u);
    EXPECT_EQ(p.stage_two.epochs, 400u);
}

TEST(GanConfig, ValidationAndParsing)
{
    auto c = tiny_config();
    c.real_label = 0.4;
    EXPECT_TRUE(throws_category([&] { c.validate(); }, ErrorCategory::config));
    c = tiny_config();
    c.arch.disc_strides = {4, 3};
    EXPECT_TRUE(throws_category([&] { c.validate(); }, ErrorCategory::config));

    const auto kv = KeyValueConfig::parse("batch_size = 12\nloss_stage1 = bce\ngen_channels = 8, 4, 2\nalpha_stage2 = 5e-5");
    const auto g = GanConfig::from_config(kv, GanConfig::desk(ClassLabel::NoObject));
    EXPECT_EQ(g.batch_size, 12u);
    EXPECT_EQ(g.stage_one.loss, nn::LossKind::BCE);
    EXPECT_EQ(g.arch.gen_channels, (std::vector<std::size_t>{8, 4, 2}));
    EXPECT_EQ(g.stage_two.adam.alpha, 5e-5);
    EXPECT_EQ(gan_config_from_json(to_json(g)), g);
    EXPECT_TRUE(throws_category([] { parse_stage("3"); }, ErrorCategory::config));
}

// ---------------------------------------------------------------------------
// Architecture

TEST(Generator, PaperArchitectureEmits8192Samples)
{
    const auto a = ArchConfig::paper();
    auto g = build_generator<float>(a);
    EXPECT_EQ(g.output_shape({1, 100}), (nn::Shape{1, 1, 8192}));
    const auto chain = g.shape_chain({1, 100});
    std::vector<std::size_t> conv_lengths;
    for (std::size_t k = 0; k < g.layer_count(); ++k)
        if (g.layer(k).spec().kind == nn::LayerKind::Conv1D) conv_lengths.push_back(chain[k + 1][2]);
    EXPECT_EQ(conv_lengths, (std::vector<std::size_t>{128, 256, 512, 1024, 2048, 4096, 8192}));
    Rng rng(1);
    g.initialize(rng);
    const auto y = g.forward(sample_latent(1, 100, rng));
    EXPECT_EQ(y.size(), 8192u);
    for (float v : y.data()) ASSERT_LE(std::abs(v), 1.0f);
}

TEST(Generator, BlockStructure)
{
    const auto specs = generator_specs(ArchConfig::desk());
    ASSERT_EQ(specs.size(), 3 + 3 * 4u);
    EXPECT_EQ(specs[0].kind, nn::LayerKind::Dense);
    EXPECT_EQ(specs[1].kind, nn::LayerKind::Reshape);
    EXPECT_EQ(specs[1].shape, (nn::Shape{32, 64}));
    for (std::size_t b = 0; b < 4; ++b) {
        EXPECT_EQ(specs[3 + 3 * b].kind, nn::LayerKind::Upsample);
        EXPECT_EQ(specs[3 + 3 * b].factor, 2u);
        EXPECT_EQ(specs[4 + 3 * b].kind, nn::LayerKind::Conv1D);
        EXPECT_EQ(specs[4 + 3 * b].kernel_size, 25u);
        EXPECT_EQ(specs[4 + 3 * b].stride, 1u);
    }
    EXPECT_EQ(specs.back().kind, nn::LayerKind::Tanh);
    EXPECT_EQ(build_generator<float>(ArchConfig::desk()).output_shape({3, 100}), (nn::Shape{3, 1, 1024}));
}

TEST(Generator, ZeroWeightsGiveZeroTrace)
{
    auto g = build_generator<float>(tiny_config().arch);
    Rng rng(2);
    const auto y = g.forward(sample_latent(2, 8, rng));
    for (float v : y.data()) ASSERT_EQ(v, 0.0f);
}

TEST(Generator, DistinctLatentsGiveDistinctTraces)
{
    auto b = make_bundle(GanConfig::desk(ClassLabel::LargeObject), ClassLabel::LargeObject);
    Rng rng(3);
    const auto y = b.generator.forward(sample_latent(2, 100, rng));
    double diff = 0;
    for (std::size_t k = 0; k < 1024; ++k) diff += std::abs(y[k] - y[1024 + k]);
    EXPECT_GT(diff, 1e-3);
}

TEST(Discriminator, StrideChainPaperAndDesk)
{
    EXPECT_EQ(discriminator_length_chain(ArchConfig::paper()), (std::vector<std::size_t>{8192, 2048, 512, 128, 32, 16}));
    EXPECT_EQ(discriminator_length_chain(ArchConfig::desk()), (std::vector<std::size_t>{1024, 256, 64, 32, 16}));
    const auto d = build_discriminator<float>(ArchConfig::paper());
    EXPECT_EQ(d.output_shape({2, 1, 8192}), (nn::Shape{2, 1}));
    const auto specs = discriminator_specs(ArchConfig::paper());
    std::vector<std::size_t> strides;
    for (const auto& s : specs)
        if (s.kind == nn::LayerKind::Conv1D) {
            strides.push_back(s.stride);
            EXPECT_EQ(s.kernel_size, 25u);
        }
    EXPECT_EQ(strides, (std::vector<std::size_t>{4, 4, 4, 4, 2}));
    EXPECT_EQ(specs.back().kind, nn::LayerKind::Sigmoid);
}

TEST(Discriminator, OutputIsFiniteProbability)
{
    auto b = make_bundle(GanConfig::desk(ClassLabel::NoObject), ClassLabel::NoObject);
    nn::Tensor<float> constant({2, 1, 1024}, 0.5f);
    auto random = toy_batch(3, 1024, 5);
    for (const auto* x : {&constant, &random}) {
        const auto p = b.discriminator.forward(*x);
        for (float v : p.data()) {
            ASSERT_TRUE(std::isfinite(v));
            ASSERT_GT(v, 0.0f);
            ASSERT_LT(v, 1.0f);
        }
    }
}

// ---------------------------------------------------------------------------
// Training steps

TEST(TrainingStep, LocksHoldDuringEachUpdate)
{
    auto b = make_bundle(tiny_config(), ClassLabel::LargeObject);
    Rng rng(6);
    const auto real = toy_batch(4, 64, 7);
    for (int it = 0; it < 3; ++it) {
        const auto g0 = checksum(b.generator), d0 = checksum(b.discriminator);
        discriminator_step(b, real, sample_latent(4, 8, rng), nn::LossKind::MSE);
        EXPECT_EQ(checksum(b.generator), g0);
        EXPECT_NE(checksum(b.discriminator), d0);
        const auto d1 = checksum(b.discriminator);
        generator_step(b, sample_latent(4, 8, rng), nn::LossKind::MSE);
        EXPECT_EQ(checksum(b.discriminator), d1);
        EXPECT_NE(checksum(b.generator), g0);
    }
}

TEST(TrainingStep, LabelTargetsAreExact)
{
    auto b = make_bundle(tiny_config(), ClassLabel::SmallObject);
    Rng rng(8);
    const auto real = toy_batch(4, 64, 9);
    const auto zd = sample_latent(4, 8, rng), zg = sample_latent(4, 8, rng);

    // Predictions of the untouched networks give the expected losses.
    auto probe = b;
    const auto pr = probe.discriminator.forward(real);
    const auto pf = probe.discriminator.forward(probe.generator.forward(zd));
    double want_real = 0, want_fake = 0;
    for (std::size_t k = 0; k < 4; ++k) {
        want_real += std::pow(pr[k] - 0.95, 2) / 4;
        want_fake += std::pow(pf[k] - 0.0, 2) / 4;
    }
    const auto dl = discriminator_step(b, real, zd, nn::LossKind::MSE);
    EXPECT_NEAR(dl.d_real, want_real, 1e-6);
    EXPECT_NEAR(dl.d_fake, want_fake, 1e-6);

    probe = b;
    const auto pg = probe.discriminator.forward(probe.generator.forward(zg));
    double want_g = 0;
    for (std::size_t k = 0; k < 4; ++k) want_g += std::pow(pg[k] - 1.0, 2) / 4;
    EXPECT_NEAR(generator_step(b, zg, nn::LossKind::MSE), want_g, 1e-6);
}

TEST(TrainingStep, BceLossMatchesValueFunctionTerms)
{
    auto cfg = tiny_config();
    cfg.real_label = 1.0;
    auto b = make_bundle(cfg, ClassLabel::NoObject);
    Rng rng(10);
    const auto real = toy_batch(4, 64, 11);
    const auto z = sample_latent(4, 8, rng);
    auto probe = b;
    const auto dx = probe.discriminator.forward(real);
    const auto dgz = probe.discriminator.forward(probe.generator.forward(z));
    double value = 0;
    for (std::size_t k = 0; k < 4; ++k) value += std::log(dx[k]) / 4 + std::log(1.0 - dgz[k]) / 4;
    const auto dl = discriminator_step(b, real, z, nn::LossKind::BCE);
    EXPECT_NEAR(dl.d(), -value, 1e-5);
}

// ---------------------------------------------------------------------------
// train_stage

TEST(TrainStage, OneEpochOnOneSampleChangesBothNetworks)
{
    auto b = make_bundle(tiny_config(), ClassLabel::LargeObject);
    const auto g0 = checksum(b.generator), d0 = checksum(b.discriminator);
    TrainOptions opt;
    opt.epochs = 1;
    const auto r = train_stage(b, toy_batch(1, 64, 12), opt);
    ASSERT_EQ(r.history.size(), 1u);
    EXPECT_NE(checksum(b.generator), g0);
    EXPECT_NE(checksum(b.discriminator), d0);
    EXPECT_EQ(b.epoch, 1u);
}

TEST(TrainStage, FixedSeedGivesIdenticalLossCurves)
{
    const auto data = toy_batch(10, 64, 13);
    TrainOptions opt;
    opt.epochs = 4;
    auto a = make_bundle(tiny_config(), ClassLabel::NoObject);
    auto b = make_bundle(tiny_config(), ClassLabel::NoObject);
    const auto ra = train_stage(a, data, opt), rb = train_stage(b, data, opt);
    ASSERT_EQ(ra.history.size(), rb.history.size());
    for (std::size_t k = 0; k < ra.history.size(); ++k) {
        EXPECT_EQ(ra.history[k].d_loss, rb.history[k].d_loss);
        EXPECT_EQ(ra.history[k].g_loss, rb.history[k].g_loss);
    }
    EXPECT_EQ(checksum(a.generator), checksum(b.generator));
    auto other = tiny_config();
    other.seed = 78;
    auto c = make_bundle(other, ClassLabel::NoObject);
    const auto rc = train_stage(c, data, opt);
    EXPECT_NE(rc.history.back().g_loss, ra.history.back().g_loss);
}

TEST(TrainStage, ResumingMatchesUninterruptedRun)
{
    const auto data = toy_batch(10, 64, 14);
    TrainOptions four, two;
    four.epochs = 4;
    two.epochs = 2;
    auto a = make_bundle(tiny_config(), ClassLabel::SmallObject);
    train_stage(a, data, four);
    TempDir dir("resume");
    auto b = make_bundle(tiny_config(), ClassLabel::SmallObject);
    train_stage(b, data, two);
    save_checkpoint(b, dir / "mid.rgan");
    auto c = load_checkpoint(dir / "mid.rgan");
    train_stage(c, data, four);
    EXPECT_EQ(checksum(c.generator), checksum(a.generator));
    EXPECT_EQ(checksum(c.discriminator), checksum(a.discriminator));
}

TEST(TrainStage, CheckpointCadence)
{
    TempDir dir("cadence");
    auto b = make_bundle(tiny_config(), ClassLabel::LargeObject);
    TrainOptions opt;
    opt.epochs = 12;
    opt.checkpoint_dir = dir.path();
    const auto r = train_stage(b, toy_batch(4, 64, 15), opt);
    std::vector<std::size_t> epochs;
    for (const auto& c : r.checkpoints) {
        epochs.push_back(c.epoch);
        EXPECT_TRUE(std::filesystem::exists(c.path));
    }
    EXPECT_EQ(epochs, (std::vector<std::size_t>{5, 10, 12}));
    EXPECT_EQ(r.checkpoints.front().path.filename(), "large_object_s1_e0005.rgan");
    const auto files = std::distance(std::filesystem::directory_iterator(dir.path()), std::filesystem::directory_iterator{});
    EXPECT_EQ(files, 3);
}

TEST(TrainStage, NonFiniteDataIsDivergenceError)
{
    auto b = make_bundle(tiny_config(), ClassLabel::NoObject);
    auto data = toy_batch(4, 64, 16);
    data[5] = std::nanf("");
    try {
        train_stage(b, data);
        FAIL() << "expected divergence";
    } catch (const Error& e) {
        EXPECT_EQ(e.category(), ErrorCategory::divergence);
        EXPECT_NE(std::string(e.what()).find("epoch 1, batch 0"), std::string::npos) << e.what();
    }
}

TEST(TrainStage, WrongTraceLengthIsDimensionError)
{
    auto b = make_bundle(tiny_config(), ClassLabel::NoObject);
    EXPECT_TRUE(throws_category([&] { train_stage(b, toy_batch(2, 32, 1)); }, ErrorCategory::dimension));
}

TEST(TrainStage, PinnedFraction)
{
    std::vector<EpochRecord> h(10);
    for (std::size_t k = 0; k < 10; ++k) h[k].g_loss = k < 3 ? 0.995 : 0.3;
    EXPECT_DOUBLE_EQ(pinned_fraction(h, nn::LossKind::MSE), 0.3);
    EXPECT_DOUBLE_EQ(pinned_fraction(h, nn::LossKind::BCE), 0.0);
}

// ---------------------------------------------------------------------------
// Discriminator reset and stage hand-off

TEST(ResetDiscriminator, GeneratorUntouchedDiscriminatorRedrawn)
{
    auto b = make_bundle(tiny_config(), ClassLabel::NoObject);
    TrainOptions opt;
    opt.epochs = 1;
    train_stage(b, toy_batch(4, 64, 17), opt);
    Rng zr(18);
    const auto z = sample_latent(3, 8, zr);
    const auto x = toy_batch(3, 64, 19);
    const auto g_before = b.generator.forward(z);
    const auto d_before = b.discriminator.forward(x);
    ASSERT_FALSE(b.d_opt.empty());

    auto twin = b;
    Rng r1(20), r2(20);
    reset_discriminator(b, r1);
    reset_discriminator(twin, r2);
    EXPECT_EQ(b.generator.forward(z), g_before);
    EXPECT_NE(b.discriminator.forward(x), d_before);
    EXPECT_TRUE(b.d_opt.empty());
    EXPECT_EQ(checksum(b.discriminator), checksum(twin.discriminator));
    EXPECT_EQ(b.d_resets, 1u);
}

TEST(BeginStageTwo, SwitchesSettingsAndKeepsGenerator)
{
    auto b = make_bundle(tiny_config(), ClassLabel::LargeObject);
    TrainOptions opt;
    opt.epochs = 2;
    train_stage(b, toy_batch(4, 64, 21), opt);
    const auto g = checksum(b.generator), d = checksum(b.discriminator);
    begin_stage_two(b);
    EXPECT_EQ(b.stage, Stage::Two);
    EXPECT_EQ(b.epoch, 0u);
    EXPECT_EQ(checksum(b.generator), g);
    EXPECT_NE(checksum(b.discriminator), d);
    EXPECT_TRUE(b.g_opt.empty());
    EXPECT_TRUE(b.d_opt.empty());
    EXPECT_EQ(b.g_opt.hyper.alpha, 1e-4);
    const auto r = train_stage(b, toy_batch(4, 64, 21), opt);
    EXPECT_EQ(r.history.front().stage, Stage::Two);
    EXPECT_EQ(b.d_opt.hyper.alpha, 1e-4);
}

// ---------------------------------------------------------------------------
// Checkpoints

TEST(Checkpoint, RoundTripGivesIdenticalSamples)
{
    TempDir dir("ckpt");
    auto b = make_bundle(tiny_config(), ClassLabel::SmallObject);
    b.normalization = 0.125;
    b.dt_record = 9.4e-12;
    TrainOptions opt;
    opt.epochs = 3;
    train_stage(b, toy_batch(6, 64, 22), opt);
    save_checkpoint(b, dir / "a.rgan");
    auto back = load_checkpoint(dir / "a.rgan");
    EXPECT_EQ(back.label, b.label);
    EXPECT_EQ(back.epoch, 3u);
    EXPECT_EQ(back.config, b.config);
    EXPECT_EQ(back.normalization, 0.125);
    EXPECT_EQ(back.g_opt.t, b.g_opt.t);
    Rng r1(23), r2(23);
    EXPECT_EQ(generate_normalized(back, 5, r1), generate_normalized(b, 5, r2));
    EXPECT_EQ(checksum(back.discriminator), checksum(b.discriminator));

    save_checkpoint(b, dir / "g_only.rgan", false);
    auto g_only = load_checkpoint(dir / "g_only.rgan");
    EXPECT_FALSE(g_only.has_discriminator);
    EXPECT_EQ(checksum(g_only.generator), checksum(b.generator));
    EXPECT_LT(std::filesystem::file_size(dir / "g_only.rgan"), std::filesystem::file_size(dir / "a.rgan"));
}

TEST(Checkpoint, DamageIsDetected)
{
    TempDir dir("ckpt_bad");
    auto b = make_bundle(tiny_config(), ClassLabel::NoObject);
    save_checkpoint(b, dir / "c.rgan");
    EXPECT_TRUE(throws_category([&] { load_checkpoint(dir / "missing.rgan"); }, ErrorCategory::not_found));

    const auto bytes = rgan::testing::read_file(dir / "c.rgan");
    auto write = [&](const std::string& s) { std::ofstream(dir / "d.rgan", std::ios::binary) << s; };
    auto flipped = bytes;
    flipped[bytes.size() / 2] ^= 0x10;
    write(flipped);
    EXPECT_TRUE(throws_category([&] { load_checkpoint(dir / "d.rgan"); }, ErrorCategory::format));
    write(bytes.substr(0, bytes.size() - 20));
    EXPECT_TRUE(throws_category([&] { load_checkpoint(dir / "d.rgan"); }, ErrorCategory::format));
    write(bytes + "x");
    EXPECT_TRUE(throws_category([&] { load_checkpoint(dir / "d.rgan"); }, ErrorCategory::format));
    write("NOTACKPT" + bytes.substr(8));
    EXPECT_TRUE(throws_category([&] { load_checkpoint(dir / "d.rgan"); }, ErrorCategory::format));
}

// ---------------------------------------------------------------------------
// Sampling

TEST(GenerateSamples, CountLengthAndDeterminism)
{
    auto b = make_bundle(tiny_config(), ClassLabel::LargeObject);
    b.normalization = 4.0;
    b.dt_record = 1e-12;
    Rng r1(24), r2(24);
    const auto a = generate_samples(b, 3000, r1);
    ASSERT_EQ(a.size(), 3000u);
    for (const auto& t : a) {
        ASSERT_EQ(t.samples.size(), 64u);
        ASSERT_EQ(t.origin, TraceOrigin::Generated);
        ASSERT_EQ(t.label, ClassLabel::LargeObject);
    }
    const auto phys = generate_samples(b, 3000, r2, true);
    for (std::size_t k = 0; k < 64; ++k) EXPECT_EQ(phys[7].samples[k], 4.0 * a[7].samples[k]);
    Rng r3(24);
    EXPECT_EQ(generate_samples(b, 3000, r3).back().samples, a.back().samples);
    Rng r4(1);
    EXPECT_TRUE(throws_category([&] { generate_samples(b, 0, r4); }, ErrorCategory::validation));
}

TEST(GenerateSamples, LatentIsStandardNormal)
{
    Rng rng(25);
    const auto z = sample_latent(2000, 50, rng);
    double s = 0, s2 = 0;
    for (float v : z.data()) {
        s += v;
        s2 += static_cast<double>(v) * v;
    }
    const double n = static_cast<double>(z.size());
    // Five standard errors of the sample mean and variance.
    EXPECT_NEAR(s / n, 0.0, 5.0 / std::sqrt(n));
    EXPECT_NEAR(s2 / n - (s / n) * (s / n), 1.0, 5.0 * std::sqrt(2.0 / n));
}
