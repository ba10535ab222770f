// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.
//
//   acceptance [--work-dir DIR] [--only NAME]...
//
// The desk-scale training run dominates the runtime (roughly half an hour on
// one core). With --work-dir, artifacts are kept and an existing dataset with
// the expected manifest is reused.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include <CLI11.hpp>

#include "rgan/dataset/dataset.hpp"
#include "rgan/eval/ranking.hpp"
#include "rgan/eval/spectrogram.hpp"
#include "rgan/fdtd/grid.hpp"
#include "rgan/fdtd/line1d.hpp"
#include "rgan/fdtd/solver.hpp"
#include "rgan/gan/trainer.hpp"
#include "rgan/nn/gradcheck.hpp"

using namespace rgan;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

struct Verdict {
    bool pass = false;
    std::string detail;
};

std::string read_bytes(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), {}};
}

// ---------------------------------------------------------------------------
// Physics

Verdict fresnel_oracle()
{
    const auto t0 = Clock::now();
    double worst = 0;
    std::string detail;
    for (double eps : {1.5, 3.0, 40.0, 60.0}) {
        const auto m = measure_reflection_1d(eps);
        worst = std::max(worst, m.relative_error());
        detail += fmt("eps %.1f: %.5f vs %.5f; ", eps, m.measured, m.analytic);
    }
    const double t = seconds_since(t0);
    return {worst < 0.02 && t < 10.0, detail + fmt("max rel err %.2e, %.2f s", worst, t)};
}

Verdict boundary_quality()
{
    const std::size_t nx = 200, ny = 120;
    SimGrid g(1e-3, nx, ny, 1.0 / std::sqrt(2.0));
    const auto pulse = SourcePulse::uwb(4.2e9, 2.2e9);
    const std::vector<std::pair<const char*, CellIndex>> edges{
        {"left", {20, ny / 2}}, {"right", {nx - 21, ny / 2}}, {"bottom", {nx / 2, 20}}, {"top", {nx / 2, ny - 21}}};
    const double diag = std::hypot(double(nx), double(ny)) * g.dx() / phys::c0;
    const auto steps = static_cast<std::size_t>((2 * pulse.delay + 2 * diag) / g.dt());
    bool ok = true;
    std::string detail;
    for (const auto& [name, src] : edges) {
        auto s = FieldState::zeros(g);
        double peak = 0.0;
        for (std::size_t n = 0; n < steps; ++n) {
            step_fields(s, g);
            inject_source(s, pulse, static_cast<double>(n) * g.dt(), src);
            apply_boundary(s, g, BoundaryMode::Mur);
            if (n % 8 == 0) peak = std::max(peak, field_energy(s, g));
        }
        const double r = field_energy(s, g) / peak;
        ok = ok && r <= 1e-3;
        detail += fmt("%s %.2e (%.1f dB); ", name, r, 10 * std::log10(r));
    }
    return {ok, detail + "residual/peak energy, limit 1e-3"};
}

Verdict energy_conservation()
{
    SimGrid g(1e-3, 80, 60, 1.0 / std::sqrt(2.0));
    auto s = FieldState::zeros(g);
    s.ez_at(30, 25) = 1.0;
    s.ez_at(41, 33) = -0.5;
    auto prev = s;
    step_fields(s, g);
    apply_boundary(s, g, BoundaryMode::Pec);
    const double e0 = discrete_energy(prev, s, g);
    double drift = 0;
    for (int n = 0; n < 1000; ++n) {
        prev = s;
        step_fields(s, g);
        apply_boundary(s, g, BoundaryMode::Pec);
        drift = std::max(drift, std::abs(discrete_energy(prev, s, g) - e0) / e0);
    }
    return {drift <= 1e-10, fmt("max relative drift %.2e within 1000 steps (limit 1e-10)", drift)};
}

// ---------------------------------------------------------------------------
// Networks

Verdict gradient_checks()
{
    using namespace nn;
    const auto t0 = Clock::now();
    Rng rng(2024);
    std::normal_distribution<double> g(0.0, 1.0);
    auto input = [&](Shape s) {
        Tensor<double> t(std::move(s));
        for (auto& v : t.data()) v = g(rng);
        return t;
    };
    struct Case {
        std::string name;
        std::vector<LayerSpec> specs;
        Shape in;
        LossKind loss;
    };
    // Each parameter-free layer is checked through its input gradient.
    std::vector<Case> cases{
        {"conv same s1", {LayerSpec::conv1d(3, 4, 25, 1)}, {2, 3, 64}, LossKind::MSE},
        {"conv same s4", {LayerSpec::conv1d(3, 4, 25, 4)}, {2, 3, 64}, LossKind::MSE},
        {"conv valid s2", {LayerSpec::conv1d(4, 5, 5, 2, Padding::Valid)}, {2, 4, 61}, LossKind::MSE},
        {"dense", {LayerSpec::dense(30, 8)}, {4, 30}, LossKind::MSE},
        {"upsample", {LayerSpec::upsample(2)}, {2, 3, 40}, LossKind::MSE},
        {"leaky_relu", {LayerSpec::leaky_relu(0.2)}, {4, 60}, LossKind::MSE},
        {"tanh", {LayerSpec::tanh()}, {4, 60}, LossKind::MSE},
        {"sigmoid", {LayerSpec::sigmoid()}, {4, 60}, LossKind::BCE},
        {"reshape", {LayerSpec::reshape({4, 30})}, {2, 120}, LossKind::MSE},
    };
    // Small generator- and discriminator-shaped stacks chain every layer type.
    cases.push_back({"generator stack",
                     {LayerSpec::dense(64, 64), LayerSpec::reshape({4, 16}), LayerSpec::leaky_relu(0.2),
                      LayerSpec::upsample(2), LayerSpec::conv1d(4, 5, 5, 1), LayerSpec::leaky_relu(0.2),
                      LayerSpec::upsample(2), LayerSpec::conv1d(5, 4, 5, 1), LayerSpec::tanh()},
                     {2, 64},
                     LossKind::MSE});
    cases.push_back({"discriminator stack",
                     {LayerSpec::conv1d(1, 20, 5, 4), LayerSpec::leaky_relu(0.2), LayerSpec::conv1d(20, 8, 5, 2),
                      LayerSpec::leaky_relu(0.2), LayerSpec::reshape({64}), LayerSpec::dense(64, 2), LayerSpec::sigmoid()},
                     {2, 1, 64},
                     LossKind::BCE});

    bool ok = true;
    std::size_t checked = 0, min_coords = static_cast<std::size_t>(-1);
    double worst = 0;
    std::string worst_label;
    std::set<std::string> kinds;
    for (auto& c : cases) {
        Network<double> net(c.specs);
        net.initialize(rng);
        const auto x = input(c.in);
        Tensor<double> target(net.output_shape(x.shape()));
        std::uniform_real_distribution<double> u(0.05, 0.95);
        for (auto& v : target.data()) v = u(rng);
        const auto report =
            gradient_check(net, x, [&](const Tensor<double>& y) { return compute_loss(c.loss, y, target); }, rng);
        for (const auto& e : report.entries) {
            ++checked;
            min_coords = std::min(min_coords, e.coordinates);
            if (e.max_rel_error > worst) {
                worst = e.max_rel_error;
                worst_label = c.name + "/" + e.label;
            }
            ok = ok && e.max_rel_error < 1e-4 && e.coordinates >= 100;
        }
        for (const auto& s : c.specs) kinds.insert(kind_name(s.kind));
    }
    for (auto kind : {LossKind::MSE, LossKind::BCE}) {
        Tensor<double> p({4, 50}), t({4, 50});
        std::uniform_real_distribution<double> u(0.05, 0.95);
        for (auto& v : p.data()) v = u(rng);
        for (auto& v : t.data()) v = u(rng);
        const auto e = loss_gradient_check(kind, p, t, rng);
        ++checked;
        min_coords = std::min(min_coords, e.coordinates);
        if (e.max_rel_error > worst) {
            worst = e.max_rel_error;
            worst_label = std::string("loss ") + loss_name(kind);
        }
        ok = ok && e.max_rel_error < 1e-4 && e.coordinates >= 100;
    }
    const double t = seconds_since(t0);
    ok = ok && kinds.size() == 7 && t < 60.0;
    return {ok, fmt("%zu checks over %zu layer kinds and 2 losses, >= %zu coords each, worst %.2e (%s), %.1f s", checked,
                    kinds.size(), min_coords, worst, worst_label.c_str(), t)};
}

Verdict architecture()
{
    const auto a = ArchConfig::paper();
    auto gnet = build_generator<float>(a);
    Rng rng(7);
    gnet.initialize(rng);
    const auto y = gnet.forward(sample_latent(1, a.latent_dim, rng));
    const bool g_ok = gnet.output_shape({1, a.latent_dim}) == nn::Shape{1, 1, 8192} && y.size() == 8192;

    const auto chain = discriminator_length_chain(a);
    const std::vector<std::size_t> want{8192, 2048, 512, 128, 32, 16};
    // Structural check: walk the built network's shapes through every conv layer.
    const auto d = build_discriminator<float>(a);
    const auto shapes = d.shape_chain({1, 1, 8192});
    std::vector<std::size_t> seen{8192};
    for (std::size_t k = 0; k < d.layer_count(); ++k)
        if (d.layer(k).spec().kind == nn::LayerKind::Conv1D) seen.push_back(shapes[k + 1][2]);
    const bool d_ok = chain == want && seen == want && d.output_shape({1, 1, 8192}) == nn::Shape{1, 1};
    std::string s;
    for (auto v : seen) s += (s.empty() ? "" : "->") + std::to_string(v);
    return {g_ok && d_ok, fmt("generator emits %zu samples; discriminator %s", y.size(), s.c_str())};
}

// ---------------------------------------------------------------------------
// Statistics and spectra

Verdict ensemble_statistics()
{
    Rng rng(3);
    std::normal_distribution<double> g(0.0, 0.7);
    std::vector<std::vector<double>> x(50, std::vector<double>(8192));
    for (auto& t : x)
        for (double& v : t) v = g(rng);
    const auto s = ensemble_stats(x);
    double err = 0;
    for (std::size_t t = 0; t < 8192; ++t) {
        double m = 0, v = 0;
        for (const auto& tr : x) m += tr[t];
        m /= 50.0;
        for (const auto& tr : x) v += (tr[t] - m) * (tr[t] - m);
        v /= 50.0;
        err = std::max({err, std::abs(m - s.mean[t]), std::abs(v - s.variance[t])});
    }
    const double self = variance_mse(s, s);
    std::vector<double> va(8192), vb(8192);
    for (std::size_t t = 0; t < 8192; ++t) {
        va[t] = 0.25 * static_cast<double>(1 + t % 3);
        vb[t] = va[t] + 0.5;
    }
    const double offset = variance_mse({va, va, 1}, {vb, vb, 1});
    return {err <= 1e-12 && self == 0.0 && offset == 0.25,
            fmt("two-pass max abs diff %.1e; self mse %g; offset 0.5 gives %.17g", err, self, offset)};
}

Verdict spectrogram_check()
{
    Rng rng(4);
    std::normal_distribution<double> g;
    std::vector<double> x(8192);
    for (double& v : x) v = g(rng);
    const auto s = spectrogram(x, 1.18e-12);
    const auto w = hamming_window(700);
    double worst = 0;
    for (std::size_t f = 0; f < s.frames; ++f) {
        double peak = 0, diff = 0;
        for (std::size_t b = 0; b < s.bins; ++b) {
            std::complex<double> acc{};
            for (std::size_t n = 0; n < 700; ++n)
                acc += x[f * 20 + n] * w[n] * std::polar(1.0, -2.0 * phys::pi * static_cast<double>((b * n) % 700) / 700.0);
            peak = std::max(peak, std::abs(acc));
            diff = std::max(diff, std::abs(std::abs(acc) - s.at(f, b)));
        }
        worst = std::max(worst, diff / peak);
    }
    return {s.frames == 375 && s.bins == 351 && worst < 1e-9,
            fmt("%zu x %zu; max per-frame deviation from direct DFT %.1e relative", s.frames, s.bins, worst)};
}

// ---------------------------------------------------------------------------
// Desk-scale training

struct ClassRun {
    ClassLabel label;
    double untrained = 0, selected = 0, seconds = 0, pinned = 0;
    std::string selected_id;
    bool trained_beats_untrained = false;
};

Dataset desk_dataset(const fs::path& dir)
{
    DatasetSpec spec; // desk defaults: 200/100/100 traces of 1024 samples
    if (fs::exists(dir / "manifest.json")) {
        try {
            auto ds = load_dataset(dir);
            if (ds.manifest.counts.no_object == spec.counts.no_object &&
                ds.manifest.counts.large_object == spec.counts.large_object &&
                ds.manifest.counts.small_object == spec.counts.small_object && ds.manifest.global_seed == spec.global_seed &&
                sim_to_json(ds.manifest.sim) == sim_to_json(spec.sim)) {
                std::cerr << "reusing dataset in " << dir << "\n";
                return ds;
            }
        } catch (const Error& e) {
            std::cerr << "regenerating dataset: " << e.what() << "\n";
        }
    }
    std::cerr << "simulating " << spec.counts.total() << " desk-scale traces\n";
    auto ds = generate_dataset(spec, [](std::size_t d, std::size_t t) {
        if (d % 50 == 0 || d == t) std::cerr << "  " << d << "/" << t << "\n";
    });
    save_dataset(ds, dir);
    return ds;
}

ClassRun train_class(const Dataset& ds, ClassLabel label, const fs::path& ckpt_dir)
{
    ClassRun run;
    run.label = label;
    const auto t0 = Clock::now();
    const auto real = ds.normalized(label);
    const auto ref = ensemble_stats(real);
    const auto data = traces_to_tensor(real);
    const auto cfg = GanConfig::desk(label);
    fs::remove_all(ckpt_dir);
    RankOptions ro;
    ro.n_gen = 300;
    ro.seed = cfg.seed;
    ro.warn = [](const std::string& m) { std::cerr << "warning: " << m << "\n"; };

    auto untrained = std::make_shared<GanBundle>(make_bundle(cfg, label));
    auto src = generator_sampler(untrained);
    run.untrained = score_source("untrained", src, ref, ro).mse;

    auto b = make_bundle(cfg, label);
    b.normalization = ds.manifest.normalization;
    b.dt_record = ds.manifest.dt_record;
    TrainOptions opt;
    opt.checkpoint_dir = ckpt_dir;
    opt.on_epoch = [&](const EpochRecord& r) {
        if (r.epoch % 20 == 0)
            std::cerr << fmt("  %s stage %d epoch %zu: D %.4f G %.4f (%.0f s)\n", to_string(label).data(),
                             static_cast<int>(r.stage), r.epoch, r.d_loss, r.g_loss, seconds_since(t0));
    };
    const auto s1 = train_stage(b, data, opt);
    run.pinned = pinned_fraction(s1.history, cfg.stage_one.loss);

    const std::string prefix(to_string(label));
    const auto r1 = rank_checkpoints(list_checkpoints(ckpt_dir, prefix + "_s1_"), ref, ro);
    auto b2 = load_checkpoint(ckpt_dir / r1.best().id);
    begin_stage_two(b2);
    train_stage(b2, data, opt);
    const auto r2 = rank_checkpoints(list_checkpoints(ckpt_dir, prefix + "_s2_"), ref, ro);
    run.selected = r2.best().mse;
    run.selected_id = r2.best().id;

    // The untrained generator enters the same ranking as one more candidate.
    std::vector<RankCandidate> cands{{"untrained", [untrained] { return generator_sampler(untrained); }},
                                     checkpoint_candidate(ckpt_dir / run.selected_id)};
    const auto both = rank_candidates(cands, ref, ro);
    run.trained_beats_untrained = both.best().id == run.selected_id;
    run.seconds = seconds_since(t0);
    std::cerr << fmt("  %s: untrained %.3e, selected %s %.3e (%.0fx), stage-1 pinned %.0f%%, %.0f s\n",
                     to_string(label).data(), run.untrained, run.selected_id.c_str(), run.selected,
                     run.untrained / run.selected, 100 * run.pinned, run.seconds);
    return run;
}

std::vector<ClassRun> g_runs;

Verdict desk_efficacy(const fs::path& work)
{
    const auto ds = desk_dataset(work / "desk_dataset");
    bool ok = ds.manifest.record_len == 1024;
    std::string detail;
    for (auto c : {ClassLabel::NoObject, ClassLabel::LargeObject, ClassLabel::SmallObject}) {
        const auto r = train_class(ds, c, work / "desk_ckpt" / std::string(to_string(c)));
        g_runs.push_back(r);
        const double ratio = r.untrained / r.selected;
        ok = ok && ratio >= 10.0 && r.pinned <= 0.10 && r.seconds < 1800.0 && r.trained_beats_untrained;
        detail += fmt("%s %.0fx better, pinned %.0f%%, %.1f min; ", to_string(c).data(), ratio, 100 * r.pinned,
                      r.seconds / 60.0);
    }
    return {ok, detail + "limits: >= 10x, pinned <= 10%, < 30 min"};
}

Verdict reference_magnitudes()
{
    if (g_runs.empty()) return {false, "needs the desk_efficacy run"};
    const double paper[] = {3.3e-5, 1.2e-5, 9.0e-7};
    std::string detail;
    bool finite = true;
    for (const auto& r : g_runs) {
        const auto k = static_cast<std::size_t>(r.label);
        finite = finite && std::isfinite(r.selected);
        detail += fmt("%s %.2e (reference %.1e, full-scale); ", to_string(r.label).data(), r.selected, paper[k]);
    }
    return {finite, detail + "context only, no tolerance"};
}

// ---------------------------------------------------------------------------
// Determinism

struct PipelineOutput {
    std::string traces, manifest, checkpoint;
    std::vector<std::pair<std::string, double>> ranking;
};

PipelineOutput small_pipeline(const fs::path& dir)
{
    fs::remove_all(dir);
    DatasetSpec spec;
    spec.counts = {3, 2, 2};
    spec.global_seed = 99;
    const auto ds = generate_dataset(spec);
    save_dataset(ds, dir / "ds");
    auto cfg = GanConfig::desk(ClassLabel::SmallObject);
    cfg.batch_size = 2;
    cfg.checkpoint_interval = 1;
    auto b = make_bundle(cfg, ClassLabel::SmallObject);
    TrainOptions opt;
    opt.epochs = 3;
    opt.checkpoint_dir = dir / "ckpt";
    const auto data = traces_to_tensor(ds.normalized(ClassLabel::SmallObject));
    train_stage(b, data, opt);
    RankOptions ro;
    ro.n_gen = 100;
    const auto r = rank_checkpoints(list_checkpoints(dir / "ckpt"), ensemble_stats(ds.normalized(ClassLabel::SmallObject)), ro);
    PipelineOutput out{read_bytes(dir / "ds" / "traces.bin"), read_bytes(dir / "ds" / "manifest.json"),
                       read_bytes(dir / "ckpt" / checkpoint_name(ClassLabel::SmallObject, Stage::One, 3)), {}};
    for (const auto& s : r.scores) out.ranking.emplace_back(s.id, s.mse);
    return out;
}

Verdict determinism(const fs::path& work)
{
    const auto a = small_pipeline(work / "det_a");
    const auto b = small_pipeline(work / "det_b");
    const bool ds = a.traces == b.traces && a.manifest == b.manifest && !a.traces.empty();
    const bool ck = a.checkpoint == b.checkpoint && !a.checkpoint.empty();
    const bool rk = a.ranking == b.ranking && a.ranking.size() == 3;
    return {ds && ck && rk, fmt("dataset %s, checkpoint %s, ranking %s (%zu + %zu bytes)", ds ? "identical" : "DIFFERS",
                                ck ? "identical" : "DIFFERS", rk ? "identical" : "DIFFERS", a.traces.size(),
                                a.checkpoint.size())};
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Acceptance criteria"};
    std::string work_dir;
    std::vector<std::string> only;
    app.add_option("--work-dir", work_dir, "Keep artifacts here (default: a temporary directory)");
    app.add_option("--only", only, "Run only the named criteria");
    CLI11_PARSE(app, argc, argv);

    const bool temporary = work_dir.empty();
    fs::path work = temporary ? fs::temp_directory_path() / fmt("rgan_acceptance_%d", static_cast<int>(::getpid()))
                              : fs::path(work_dir);
    make_directories(work);

    const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
        {"fdtd_fresnel", fresnel_oracle},
        {"boundary_quality", boundary_quality},
        {"energy_conservation", energy_conservation},
        {"gradient_checks", gradient_checks},
        {"architecture", architecture},
        {"ensemble_statistics", ensemble_statistics},
        {"spectrogram", spectrogram_check},
        {"desk_efficacy", [&] { return desk_efficacy(work); }},
        {"determinism", [&] { return determinism(work); }},
        {"reference_magnitudes", reference_magnitudes},
    };
    int failures = 0;
    for (const auto& [name, fn] : criteria) {
        if (!only.empty() && std::find(only.begin(), only.end(), name) == only.end()) continue;
        Verdict v;
        try {
            v = fn();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failures += v.pass ? 0 : 1;
        std::cout << (v.pass ? "PASS " : "FAIL ") << name << ": " << v.detail << std::endl;
    }
    if (temporary) {
        std::error_code ec;
        fs::remove_all(work, ec);
    }
    return failures == 0 ? 0 : 1;
}
