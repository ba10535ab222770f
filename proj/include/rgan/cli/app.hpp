#pragma once

// `radargan` command-line front end. Failures print one line to stderr,
//   error: <category>: <message>
// and exit with the category's code (config errors exit 2).

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "rgan/config.hpp"
#include "rgan/dataset/dataset.hpp"
#include "rgan/eval/plot.hpp"
#include "rgan/eval/ranking.hpp"
#include "rgan/eval/spectrogram.hpp"
#include "rgan/gan/trainer.hpp"
#include "rgan/serve/server.hpp"

namespace rgan::cli {

inline int exit_code(ErrorCategory c)
{
    switch (c) {
    case ErrorCategory::config: return 2;
    case ErrorCategory::validation: return 3;
    case ErrorCategory::geometry: return 4;
    case ErrorCategory::divergence: return 5;
    case ErrorCategory::format: return 6;
    case ErrorCategory::dimension: return 7;
    case ErrorCategory::conflict: return 8;
    case ErrorCategory::not_found: return 9;
    case ErrorCategory::io: return 10;
    }
    return 1;
}

inline constexpr std::size_t desk_rank_samples = 300;
inline constexpr std::size_t paper_rank_samples = 3000;

/// Every key any subcommand understands; one config file serves them all.
inline std::set<std::string> known_config_keys()
{
    std::set<std::string> k = SimConfig::keys();
    for (const auto& s : {DatasetSpec::keys(), GanConfig::keys()}) k.insert(s.begin(), s.end());
    k.insert({"rank_samples", "rank_seed", "serve_pairs", "serve_seed"});
    return k;
}

inline KeyValueConfig load_config(const std::string& path)
{
    if (path.empty()) return {};
    if (!std::filesystem::is_regular_file(path)) fail(ErrorCategory::config, "config file '" + path + "' not found");
    auto kv = KeyValueConfig::load(path);
    kv.reject_unknown(known_config_keys());
    return kv;
}

inline std::string hex64(std::uint64_t v)
{
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

/// Reproducibility stamp: effective settings, their hash and the seeds.
inline void write_stamp(const std::filesystem::path& path, const std::string& command, const nlohmann::json& settings,
                        const nlohmann::json& seeds)
{
    const auto text = settings.dump();
    nlohmann::json j{{"command", command},
                     {"config_hash", hex64(fnv1a64(text.data(), text.size()))},
                     {"settings", settings},
                     {"seeds", seeds}};
    auto f = open_output(path);
    f << j.dump(1) << "\n";
}

inline std::filesystem::path stamp_beside(const std::filesystem::path& file)
{
    auto p = file;
    p += ".stamp.json";
    return p;
}

class Logger {
public:
    Logger(std::ostream& err, bool quiet) : err_(err), quiet_(quiet) {}
    void info(const std::string& msg) const
    {
        if (!quiet_) err_ << msg << "\n";
    }
    void warn(const std::string& msg) const { err_ << "warning: " << msg << "\n"; }

private:
    std::ostream& err_;
    bool quiet_;
};

inline Dataset require_dataset(const std::string& dir)
{
    if (dir.empty()) fail(ErrorCategory::config, "a dataset directory is required");
    if (!std::filesystem::is_directory(dir)) fail(ErrorCategory::config, "dataset directory '" + dir + "' not found");
    return load_dataset(dir);
}

inline GanConfig gan_config_for(const KeyValueConfig& kv, ClassLabel c, bool paper_scale)
{
    auto base = paper_scale ? GanConfig::paper(c) : GanConfig::desk(c);
    return GanConfig::from_config(kv, base);
}

inline EnsembleStats class_stats(const Dataset& ds, ClassLabel c)
{
    const auto traces = ds.normalized(c);
    if (traces.empty()) fail(ErrorCategory::validation, "dataset holds no " + std::string(to_string(c)) + " traces");
    return ensemble_stats(traces);
}

inline void write_loss_csv(const std::filesystem::path& path, const std::vector<EpochRecord>& h)
{
    std::vector<double> e, d, g, dr, df;
    for (const auto& r : h) {
        e.push_back(static_cast<double>(r.epoch));
        d.push_back(r.d_loss);
        g.push_back(r.g_loss);
        dr.push_back(r.d_real_loss);
        df.push_back(r.d_fake_loss);
    }
    write_csv(path, {"epoch", "d_loss", "g_loss", "d_real_loss", "d_fake_loss"}, {e, d, g, dr, df});
}

inline void write_ranking_csv(const std::filesystem::path& path, const std::string& cls, const RankResult& r,
                              bool append)
{
    make_parent_directories(path);
    std::ofstream f(path, append ? std::ios::app : std::ios::trunc);
    if (!f) fail(ErrorCategory::io, "cannot write '" + path.string() + "'");
    if (!append) f << "class,rank,checkpoint,variance_mse\n";
    f.precision(17);
    for (std::size_t k = 0; k < r.scores.size(); ++k)
        f << cls << "," << k + 1 << "," << r.scores[k].id << "," << r.scores[k].mse << "\n";
}

struct Options {
    bool quiet = false;
    bool paper_scale = false;
    std::string config;

    std::string out, dataset, ckpt, ckpt_dir, from, cls, stage = "1", in, static_dir, log, host = "127.0.0.1";
    std::size_t workers = 0, n = 0, epochs = 0, index = 0;
    std::uint64_t seed = 0;
    bool seed_set = false, physical = false;
    double dt_s = 0;
    int port = 8080;
};

inline int cmd_dataset_generate(const Options& o, std::ostream& out, const Logger& log)
{
    if (o.out.empty()) fail(ErrorCategory::config, "--out is required");
    const auto kv = load_config(o.config);
    auto spec = DatasetSpec::from_config(kv, o.paper_scale);
    spec.workers = o.workers;
    log.info("simulating " + std::to_string(spec.counts.total()) + " scenarios (" +
             std::to_string(resolve_workers(spec.workers)) + " workers)");
    const auto ds = generate_dataset(spec, [&](std::size_t d, std::size_t t) {
        if (d % 25 == 0 || d == t) log.info("  " + std::to_string(d) + "/" + std::to_string(t));
    });
    save_dataset(ds, o.out);
    write_stamp(std::filesystem::path(o.out) / "stamp.json", "dataset generate",
                {{"counts", {spec.counts.no_object, spec.counts.large_object, spec.counts.small_object}},
                 {"sim", sim_to_json(spec.sim)}},
                {{"global_seed", spec.global_seed}});
    out << "wrote " << ds.size() << " traces to " << o.out << " (normalization " << ds.manifest.normalization << ")\n";
    return 0;
}

inline int cmd_gan_train(const Options& o, std::ostream& out, const Logger& log)
{
    if (o.cls.empty()) fail(ErrorCategory::config, "--class is required");
    if (o.out.empty()) fail(ErrorCategory::config, "--out is required");
    const auto label = parse_class_label(o.cls);
    const Stage stage = parse_stage(o.stage);
    const auto kv = load_config(o.config);
    const auto ds = require_dataset(o.dataset);
    auto cfg = gan_config_for(kv, label, o.paper_scale);
    if (ds.manifest.record_len != cfg.arch.trace_len())
        fail(ErrorCategory::config, "dataset traces have length " + std::to_string(ds.manifest.record_len) +
                                        " but the generator emits " + std::to_string(cfg.arch.trace_len()));
    const auto traces = ds.normalized(label);
    if (traces.empty()) fail(ErrorCategory::validation, "dataset holds no " + o.cls + " traces");
    const auto data = traces_to_tensor(traces);
    const std::filesystem::path out_dir = o.out;
    make_directories(out_dir);

    nlohmann::json selection;
    GanBundle bundle;
    if (stage == Stage::One) {
        bundle = make_bundle(cfg, label);
        bundle.normalization = ds.manifest.normalization;
        bundle.dt_record = ds.manifest.dt_record;
    } else {
        std::filesystem::path start = o.from;
        if (start.empty()) {
            const auto ckpts = list_checkpoints(out_dir, std::string(to_string(label)) + "_s1_");
            if (ckpts.empty())
                fail(ErrorCategory::config, "no stage-1 checkpoints in '" + o.out + "'; train stage 1 first or pass --from");
            RankOptions ro;
            ro.n_gen = kv.get_u64("rank_samples", o.paper_scale ? paper_rank_samples : desk_rank_samples);
            ro.seed = kv.get_u64("rank_seed", cfg.seed);
            ro.warn = [&](const std::string& m) { log.warn(m); };
            log.info("selecting the stage-1 checkpoint with the lowest variance MSE over " + std::to_string(ckpts.size()));
            const auto r = rank_checkpoints(ckpts, class_stats(ds, label), ro);
            start = out_dir / r.best().id;
            selection = {{"mode", "auto"}, {"checkpoint", r.best().id}, {"variance_mse", r.best().mse}, {"n_gen", ro.n_gen}};
        } else {
            selection = {{"mode", "manual"}, {"checkpoint", start.filename().string()}};
        }
        bundle = load_checkpoint(start);
        if (bundle.label != label) fail(ErrorCategory::config, "checkpoint '" + start.string() + "' was trained for another class");
        // Training settings come from this run; the architecture must match the checkpoint.
        if (!(bundle.config.arch == cfg.arch)) fail(ErrorCategory::config, "checkpoint architecture differs from the configuration");
        bundle.config = cfg;
        begin_stage_two(bundle);
        log.info("stage 2 starts from " + start.filename().string());
    }

    TrainOptions to;
    to.checkpoint_dir = out_dir;
    if (o.epochs) to.epochs = o.epochs;
    to.on_epoch = [&](const EpochRecord& r) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "epoch %zu d_loss=%.6f g_loss=%.6f", r.epoch, r.d_loss, r.g_loss);
        log.info(buf);
    };
    const auto res = train_stage(bundle, data, to);
    const auto s = std::to_string(static_cast<int>(stage));
    write_loss_csv(out_dir / ("losses_" + std::string(to_string(label)) + "_s" + s + ".csv"), res.history);
    nlohmann::json settings{{"class", to_string(label)}, {"stage", static_cast<int>(stage)}, {"gan", to_json(cfg)},
                            {"dataset_normalization", ds.manifest.normalization}};
    if (!selection.is_null()) settings["selection"] = selection;
    write_stamp(out_dir / ("stamp_" + std::string(to_string(label)) + "_s" + s + ".json"), "gan train", settings,
                {{"gan_seed", cfg.seed}, {"dataset_seed", ds.manifest.global_seed}});
    out << "trained " << res.history.size() << " epochs; " << res.checkpoints.size() << " checkpoints in " << o.out << "\n";
    return 0;
}

inline int cmd_gan_generate(const Options& o, std::ostream& out, const Logger&)
{
    if (o.ckpt.empty()) fail(ErrorCategory::config, "--ckpt is required");
    if (o.out.empty()) fail(ErrorCategory::config, "--out is required");
    if (o.n == 0) fail(ErrorCategory::config, "-n must be >= 1");
    if (!std::filesystem::is_regular_file(o.ckpt)) fail(ErrorCategory::config, "checkpoint '" + o.ckpt + "' not found");
    auto b = load_checkpoint(o.ckpt);
    const std::uint64_t seed = o.seed_set ? o.seed : b.config.seed;
    Rng rng(derive_seed(seed, seed_stream::latent, 0));
    const auto samples = generate_samples(b, o.n, rng, o.physical);
    std::vector<std::vector<double>> traces;
    for (const auto& t : samples) traces.push_back(t.samples);
    const std::filesystem::path path = o.out;
    if (path.extension() == ".csv") {
        auto f = open_output(path);
        for (const auto& t : traces) {
            for (std::size_t k = 0; k < t.size(); ++k) f << (k ? "," : "") << t[k];
            f << "\n";
        }
    } else {
        make_parent_directories(path);
        write_trace_file(path, traces);
    }
    write_stamp(stamp_beside(path), "gan generate",
                {{"checkpoint", std::filesystem::path(o.ckpt).filename().string()}, {"n", o.n}, {"physical_units", o.physical}},
                {{"latent_seed", seed}});
    out << "wrote " << traces.size() << " generated traces to " << o.out << "\n";
    return 0;
}

inline int cmd_eval_rank(const Options& o, std::ostream& out, const Logger& log)
{
    if (o.ckpt_dir.empty()) fail(ErrorCategory::config, "--ckpt-dir is required");
    const auto kv = load_config(o.config);
    const auto ds = require_dataset(o.dataset);
    RankOptions ro;
    ro.n_gen = o.n ? o.n : kv.get_u64("rank_samples", o.paper_scale ? paper_rank_samples : desk_rank_samples);
    ro.seed = o.seed_set ? o.seed : kv.get_u64("rank_seed", 1);
    ro.warn = [&](const std::string& m) { log.warn(m); };

    std::vector<ClassLabel> classes;
    if (!o.cls.empty()) {
        classes.push_back(parse_class_label(o.cls));
    } else {
        classes = {ClassLabel::NoObject, ClassLabel::LargeObject, ClassLabel::SmallObject};
    }
    const std::filesystem::path report = o.out.empty() ? std::filesystem::path(o.ckpt_dir) / "ranking.csv" : std::filesystem::path(o.out);
    nlohmann::json best = nlohmann::json::object();
    bool any = false;
    for (auto c : classes) {
        const auto ckpts = list_checkpoints(o.ckpt_dir, std::string(to_string(c)) + "_");
        if (ckpts.empty()) continue;
        const auto r = rank_checkpoints(ckpts, class_stats(ds, c), ro);
        write_ranking_csv(report, std::string(to_string(c)), r, any);
        any = true;
        out << to_string(c) << ":\n";
        for (std::size_t k = 0; k < r.scores.size(); ++k)
            out << "  " << k + 1 << ". " << r.scores[k].id << "  " << r.scores[k].mse << "\n";
        if (!r.scores.empty()) best[std::string(to_string(c))] = {{"checkpoint", r.best().id}, {"variance_mse", r.best().mse}};
    }
    if (!any) fail(ErrorCategory::config, "no checkpoints found in '" + o.ckpt_dir + "'");
    write_stamp(stamp_beside(report), "eval rank", {{"n_gen", ro.n_gen}, {"best", best}}, {{"rank_seed", ro.seed}});
    return 0;
}

inline int cmd_eval_spectrogram(const Options& o, std::ostream& out, const Logger&)
{
    if (o.in.empty() || o.out.empty()) fail(ErrorCategory::config, "--in and --out are required");
    std::vector<double> trace;
    double dt = o.dt_s;
    if (std::filesystem::is_directory(o.in)) {
        const auto ds = load_dataset(o.in);
        if (o.index >= ds.size()) fail(ErrorCategory::not_found, "trace index " + std::to_string(o.index) + " out of range");
        trace = ds.traces[o.index];
        if (dt == 0) dt = ds.manifest.dt_record;
    } else if (std::filesystem::is_regular_file(o.in)) {
        const auto all = read_trace_file(o.in);
        if (o.index >= all.size()) fail(ErrorCategory::not_found, "trace index " + std::to_string(o.index) + " out of range");
        trace = all[o.index];
        if (dt == 0) dt = SimConfig::desk().dt_record();
    } else {
        fail(ErrorCategory::config, "input '" + o.in + "' not found");
    }
    const auto s = spectrogram(trace, dt);
    const std::filesystem::path path = o.out;
    if (path.extension() == ".svg") {
        write_spectrogram_svg(path, s);
    } else {
        write_spectrogram_csv(path, s);
    }
    write_stamp(stamp_beside(path), "eval spectrogram",
                {{"input", std::filesystem::path(o.in).filename().string()},
                 {"index", o.index},
                 {"window", s.window},
                 {"window_len", s.params.window_len},
                 {"overlap", s.params.overlap},
                 {"dt_record", dt}},
                nlohmann::json::object());
    out << s.frames << " frames x " << s.bins << " bins -> " << o.out << "\n";
    return 0;
}

inline int cmd_serve(const Options& o, std::ostream& out, const Logger& log)
{
    if (o.ckpt.empty()) fail(ErrorCategory::config, "--ckpt is required");
    if (!std::filesystem::is_regular_file(o.ckpt)) fail(ErrorCategory::config, "checkpoint '" + o.ckpt + "' not found");
    const auto kv = load_config(o.config);
    const auto ds = require_dataset(o.dataset);
    auto bundle = std::make_shared<GanBundle>(load_checkpoint(o.ckpt));
    auto pool = make_pair_pool(std::filesystem::path(o.ckpt).filename().string(), bundle, ds.normalized(bundle->label));
    std::optional<std::filesystem::path> log_path;
    if (!o.log.empty()) log_path = o.log;
    SessionStore store(std::move(pool), log_path, kv.get_u64("serve_seed", 1));
    store.set_session_pairs(kv.get_u64("serve_pairs", SessionStore::default_pairs));
    std::optional<std::filesystem::path> static_dir;
    if (!o.static_dir.empty()) static_dir = o.static_dir;
    BlindTestServer server(store, static_dir);
    if (!server.bind(o.host, o.port)) fail(ErrorCategory::io, "cannot bind " + o.host + ":" + std::to_string(o.port));
    if (log_path)
        write_stamp(stamp_beside(*log_path), "serve",
                    {{"checkpoint", std::filesystem::path(o.ckpt).filename().string()}},
                    {{"serve_seed", kv.get_u64("serve_seed", 1)}});
    out << "serving blind test for " << to_string(bundle->label) << " on http://" << o.host << ":" << o.port << "\n";
    out.flush();
    log.info("press Ctrl-C to stop");
    server.run();
    return 0;
}

inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    Options o;
    CLI::App app{"Radar trace simulation, GAN training and evaluation"};
    app.name("radargan");
    app.require_subcommand(1);
    app.add_flag("-q,--quiet", o.quiet, "Suppress progress output");

    auto scale_flags = [&](CLI::App* c) {
        c->add_flag("--paper-scale,--full-scale", o.paper_scale, "Use full-size traces, counts and epochs");
        c->add_option("--config", o.config, "Key = value configuration file");
    };

    auto* dataset = app.add_subcommand("dataset", "Simulated trace datasets")->require_subcommand(1);
    auto* ds_gen = dataset->add_subcommand("generate", "Simulate a dataset");
    scale_flags(ds_gen);
    ds_gen->add_option("--out", o.out, "Output directory")->required();
    ds_gen->add_option("--workers", o.workers, "Worker threads (default: RGAN_WORKERS or 1)");

    auto* gan = app.add_subcommand("gan", "GAN training and sampling")->require_subcommand(1);
    auto* train = gan->add_subcommand("train", "Train one class's GAN for one stage");
    scale_flags(train);
    train->add_option("--class", o.cls, "no_object | large_object | small_object")->required();
    train->add_option("--dataset", o.dataset, "Dataset directory")->required();
    train->add_option("--stage", o.stage, "1 or 2")->required();
    train->add_option("--out", o.out, "Checkpoint directory")->required();
    train->add_option("--from", o.from, "Stage 2: start from this checkpoint instead of the best-ranked one");
    train->add_option("--epochs", o.epochs, "Override the stage's epoch count");

    auto* generate = gan->add_subcommand("generate", "Sample traces from a checkpoint");
    generate->add_option("--ckpt", o.ckpt, "Checkpoint file")->required();
    generate->add_option("-n", o.n, "Number of traces")->required();
    generate->add_option("--out", o.out, "Output (.csv or trace file)")->required();
    generate->add_option("--seed", o.seed, "Latent seed")->each([&](const std::string&) { o.seed_set = true; });
    generate->add_flag("--physical", o.physical, "Undo dataset normalization");

    auto* eval = app.add_subcommand("eval", "Model selection and analysis")->require_subcommand(1);
    auto* rank = eval->add_subcommand("rank", "Rank checkpoints by variance MSE");
    scale_flags(rank);
    rank->add_option("--ckpt-dir", o.ckpt_dir, "Checkpoint directory")->required();
    rank->add_option("--dataset", o.dataset, "Dataset directory")->required();
    rank->add_option("-n", o.n, "Generated samples per checkpoint");
    rank->add_option("--class", o.cls, "Only rank this class");
    rank->add_option("--seed", o.seed, "Sampling seed")->each([&](const std::string&) { o.seed_set = true; });
    rank->add_option("--out", o.out, "Ranking CSV (default <ckpt-dir>/ranking.csv)");

    auto* spec = eval->add_subcommand("spectrogram", "Spectrogram of one trace");
    spec->add_option("--in", o.in, "Dataset directory or trace file")->required();
    spec->add_option("--out", o.out, "Output (.csv or .svg)")->required();
    spec->add_option("--index", o.index, "Trace index");
    spec->add_option("--dt-s", o.dt_s, "Sample spacing in seconds");

    auto* serve = app.add_subcommand("serve", "Host the blind test");
    serve->add_option("--config", o.config, "Key = value configuration file");
    serve->add_option("--ckpt", o.ckpt, "Generator checkpoint")->required();
    serve->add_option("--dataset", o.dataset, "Dataset directory")->required();
    serve->add_option("--port", o.port, "TCP port");
    serve->add_option("--host", o.host, "Bind address");
    serve->add_option("--static", o.static_dir, "Directory with the built UI");
    serve->add_option("--log", o.log, "Append-only session log");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: config: " << e.what() << "\n";
        return exit_code(ErrorCategory::config);
    }

    const Logger log(err, o.quiet);
    try {
        if (ds_gen->parsed()) return cmd_dataset_generate(o, out, log);
        if (train->parsed()) return cmd_gan_train(o, out, log);
        if (generate->parsed()) return cmd_gan_generate(o, out, log);
        if (rank->parsed()) return cmd_eval_rank(o, out, log);
        if (spec->parsed()) return cmd_eval_spectrogram(o, out, log);
        if (serve->parsed()) return cmd_serve(o, out, log);
    } catch (const Error& e) {
        err << "error: " << category_name(e.category()) << ": " << e.what() << "\n";
        return exit_code(e.category());
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: io: " << e.what() << "\n";
        return exit_code(ErrorCategory::io);
    } catch (const std::exception& e) {
        err << "error: internal: " << e.what() << "\n";
        return 1;
    }
    out << app.help();
    return 2;
}

} // namespace rgan::cli
