#pragma once

// Labeled trace datasets: deterministic generation from per-sample seeds,
// and a two-file on-disk form (traces.bin + manifest.json).
//
// traces.bin, little-endian:
//   "RGTRACES" | u32 version | u32 reserved | u64 count | u64 length
//   count x { f64[length] samples | u64 fnv1a(samples) }

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "rgan/binary_io.hpp"
#include "rgan/config.hpp"
#include "rgan/dataset/sampling.hpp"
#include "rgan/error.hpp"
#include "rgan/fdtd/solver.hpp"
#include "rgan/rng.hpp"

namespace rgan {

inline constexpr std::uint32_t dataset_format_version = 1;
inline constexpr std::string_view trace_file_magic = "RGTRACES";

struct ClassCounts {
    std::size_t no_object = 200;
    std::size_t large_object = 100;
    std::size_t small_object = 100;

    std::size_t of(ClassLabel c) const
    {
        switch (c) {
        case ClassLabel::NoObject: return no_object;
        case ClassLabel::LargeObject: return large_object;
        case ClassLabel::SmallObject: return small_object;
        }
        return 0;
    }
    std::size_t total() const { return no_object + large_object + small_object; }

    static ClassCounts paper() { return {6000, 3000, 3000}; }
    bool operator==(const ClassCounts&) const = default;
};

struct SampleRecord {
    std::uint64_t index = 0;
    ClassLabel label = ClassLabel::NoObject;
    std::uint64_t seed = 0;
    ScenarioParams scenario;
    std::uint64_t checksum = 0;
};

struct DatasetManifest {
    std::uint32_t format_version = dataset_format_version;
    ClassCounts counts;
    std::uint64_t global_seed = 0;
    SimConfig sim;
    double dx_m = 0;
    double dt_record = 0;
    std::size_t record_len = 0;
    double normalization = 0; // max |sample| over the whole dataset
    std::vector<SampleRecord> samples;
};

struct DatasetSpec {
    ClassCounts counts;
    std::uint64_t global_seed = 1;
    SimConfig sim = SimConfig::desk();
    /// 0: take RGAN_WORKERS from the environment, else 1.
    std::size_t workers = 0;

    static const std::set<std::string>& keys()
    {
        static const std::set<std::string> k{"count_no_object", "count_large_object", "count_small_object", "global_seed"};
        return k;
    }

    static DatasetSpec from_config(const KeyValueConfig& kv, bool full_scale)
    {
        DatasetSpec s;
        if (full_scale) {
            s.counts = ClassCounts::paper();
            s.sim = SimConfig::paper();
        }
        s.counts.no_object = kv.get_u64("count_no_object", s.counts.no_object);
        s.counts.large_object = kv.get_u64("count_large_object", s.counts.large_object);
        s.counts.small_object = kv.get_u64("count_small_object", s.counts.small_object);
        s.global_seed = kv.get_u64("global_seed", s.global_seed);
        s.sim = SimConfig::from_config(kv, s.sim);
        return s;
    }
};

struct Dataset {
    DatasetManifest manifest;
    std::vector<std::vector<double>> traces;

    std::size_t size() const { return traces.size(); }

    std::vector<std::size_t> indices_of(ClassLabel c) const
    {
        std::vector<std::size_t> out;
        for (std::size_t k = 0; k < manifest.samples.size(); ++k)
            if (manifest.samples[k].label == c) out.push_back(k);
        return out;
    }

    /// Traces divided by the dataset-wide normalization constant, so the
    /// whole dataset spans [-1, 1]. Restricted to one class when given.
    std::vector<std::vector<double>> normalized(std::optional<ClassLabel> c = std::nullopt) const
    {
        std::vector<std::vector<double>> out;
        const double inv = 1.0 / manifest.normalization;
        for (std::size_t k = 0; k < traces.size(); ++k) {
            if (c && manifest.samples[k].label != *c) continue;
            auto t = traces[k];
            for (double& v : t) v *= inv;
            out.push_back(std::move(t));
        }
        return out;
    }
};

/// Seed of the k-th sample of a class. Depends only on (global seed, class,
/// k), so changing one class's count leaves every other sample untouched.
inline std::uint64_t sample_seed(std::uint64_t global_seed, ClassLabel c, std::uint64_t k)
{
    return derive_seed(global_seed, static_cast<std::uint64_t>(c), k);
}

inline std::uint64_t trace_checksum(const std::vector<double>& t)
{
    return fnv1a64(t.data(), t.size() * sizeof(double));
}

inline std::size_t resolve_workers(std::size_t requested)
{
    if (requested > 0) return requested;
    if (const char* env = std::getenv("RGAN_WORKERS")) {
        const long n = std::strtol(env, nullptr, 10);
        if (n > 0) return static_cast<std::size_t>(n);
    }
    return 1;
}

/// Simulates every sample. Work fans out over a thread pool; results land at
/// their own index, so output order never depends on completion order. The
/// first failure (lowest index) is rethrown with the sample's seed.
inline Dataset generate_dataset(const DatasetSpec& spec,
                                const std::function<void(std::size_t done, std::size_t total)>& progress = {})
{
    if (spec.counts.total() == 0) fail(ErrorCategory::config, "dataset needs at least one sample");
    spec.sim.validate();

    Dataset ds;
    auto& m = ds.manifest;
    m.counts = spec.counts;
    m.global_seed = spec.global_seed;
    m.sim = spec.sim;
    m.dx_m = spec.sim.dx_m();
    m.dt_record = spec.sim.dt_record();
    m.record_len = spec.sim.record_len;

    for (ClassLabel c : {ClassLabel::NoObject, ClassLabel::LargeObject, ClassLabel::SmallObject}) {
        for (std::uint64_t k = 0; k < spec.counts.of(c); ++k) {
            SampleRecord r;
            r.index = m.samples.size();
            r.label = c;
            r.seed = sample_seed(spec.global_seed, c, k);
            r.scenario = sample_scenario(c, r.seed);
            m.samples.push_back(r);
        }
    }
    ds.traces.resize(m.samples.size());

    const std::size_t total = m.samples.size();
    std::atomic<std::size_t> next{0}, done{0};
    std::mutex mu;
    std::optional<std::size_t> failed_index;
    std::string failure;

    auto worker = [&] {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= total) return;
            try {
                ds.traces[k] = run_simulation(m.samples[k].scenario, spec.sim).samples;
            } catch (const std::exception& ex) {
                std::lock_guard lock(mu);
                if (!failed_index || k < *failed_index) {
                    failed_index = k;
                    failure = ex.what();
                }
                continue;
            }
            const auto d = ++done;
            if (progress) {
                std::lock_guard lock(mu);
                progress(d, total);
            }
        }
    };
    const std::size_t workers = std::min(resolve_workers(spec.workers), total);
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (failed_index) {
        fail(ErrorCategory::divergence, "simulation of sample " + std::to_string(*failed_index) + " (seed " +
                                            std::to_string(m.samples[*failed_index].seed) + ") failed: " + failure);
    }

    double norm = 0.0;
    for (std::size_t k = 0; k < total; ++k) {
        m.samples[k].checksum = trace_checksum(ds.traces[k]);
        for (double v : ds.traces[k]) norm = std::max(norm, std::abs(v));
    }
    if (!(norm > 0)) fail(ErrorCategory::validation, "dataset is identically zero");
    m.normalization = norm;
    return ds;
}

/// Re-simulates one manifest entry; used to confirm reproducibility.
inline std::vector<double> regenerate_sample(const DatasetManifest& m, std::size_t k)
{
    return run_simulation(m.samples.at(k).scenario, m.sim).samples;
}

// ---------------------------------------------------------------------------
// Serialization

inline void write_trace_file(const std::filesystem::path& path, const std::vector<std::vector<double>>& traces)
{
    const std::size_t length = traces.empty() ? 0 : traces.front().size();
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) fail(ErrorCategory::io, "cannot write '" + path.string() + "'");
    BinaryWriter w(f);
    w.bytes(trace_file_magic.data(), trace_file_magic.size());
    w.value<std::uint32_t>(dataset_format_version);
    w.value<std::uint32_t>(0);
    w.value<std::uint64_t>(traces.size());
    w.value<std::uint64_t>(length);
    for (const auto& t : traces) {
        if (t.size() != length) fail(ErrorCategory::dimension, "traces of unequal length");
        w.array<double>(t);
        w.value<std::uint64_t>(trace_checksum(t));
    }
}

inline std::vector<std::vector<double>> read_trace_file(const std::filesystem::path& path)
{
    std::ifstream f(path, std::ios::binary);
    if (!f) fail(ErrorCategory::io, "cannot open '" + path.string() + "'");
    const auto file_size = std::filesystem::file_size(path);
    BinaryReader r(f, path.string());
    r.expect_magic(trace_file_magic);
    const auto version = r.value<std::uint32_t>();
    if (version != dataset_format_version)
        fail(ErrorCategory::format, path.string() + ": unsupported format version " + std::to_string(version));
    r.value<std::uint32_t>();
    const auto count = r.value<std::uint64_t>();
    const auto length = r.value<std::uint64_t>();
    const std::uint64_t header = trace_file_magic.size() + 4 + 4 + 8 + 8;
    if (length > (std::uint64_t{1} << 32) || count * (length * 8 + 8) + header != file_size)
        fail(ErrorCategory::format, path.string() + ": size does not match header (corrupt length)");
    std::vector<std::vector<double>> traces(count, std::vector<double>(length));
    for (std::uint64_t k = 0; k < count; ++k) {
        r.array<double>(traces[k]);
        const auto stored = r.value<std::uint64_t>();
        if (stored != trace_checksum(traces[k]))
            fail(ErrorCategory::format, path.string() + ": checksum failure on trace " + std::to_string(k));
    }
    return traces;
}

inline nlohmann::json sim_to_json(const SimConfig& s)
{
    return {{"dx_mm", s.dx_mm},
            {"courant", s.courant},
            {"record_len", s.record_len},
            {"record_stride", s.record_stride},
            {"standoff_cm", s.standoff_cm},
            {"source_f0_ghz", s.source_f0_ghz},
            {"source_band_ghz", s.source_band_ghz}};
}

inline SimConfig sim_from_json(const nlohmann::json& j)
{
    SimConfig s;
    s.dx_mm = j.at("dx_mm").get<double>();
    s.courant = j.at("courant").get<double>();
    s.record_len = j.at("record_len").get<std::size_t>();
    s.record_stride = j.at("record_stride").get<std::size_t>();
    s.standoff_cm = j.at("standoff_cm").get<double>();
    s.source_f0_ghz = j.at("source_f0_ghz").get<double>();
    s.source_band_ghz = j.at("source_band_ghz").get<double>();
    return s;
}

inline nlohmann::json manifest_to_json(const DatasetManifest& m)
{
    nlohmann::json j;
    j["format_version"] = m.format_version;
    j["counts"] = {{"no_object", m.counts.no_object},
                   {"large_object", m.counts.large_object},
                   {"small_object", m.counts.small_object}};
    j["global_seed"] = m.global_seed;
    j["sim"] = sim_to_json(m.sim);
    j["dx_m"] = m.dx_m;
    j["dt_record"] = m.dt_record;
    j["record_len"] = m.record_len;
    j["normalization"] = m.normalization;
    auto& arr = j["samples"] = nlohmann::json::array();
    for (const auto& s : m.samples) {
        arr.push_back({{"index", s.index},
                       {"class", std::string(to_string(s.label))},
                       {"seed", s.seed},
                       {"checksum", s.checksum},
                       {"scenario", to_json(s.scenario)}});
    }
    return j;
}

inline DatasetManifest manifest_from_json(const nlohmann::json& j)
{
    DatasetManifest m;
    try {
        m.format_version = j.at("format_version").get<std::uint32_t>();
        if (m.format_version != dataset_format_version)
            fail(ErrorCategory::format, "manifest format version " + std::to_string(m.format_version) + " not supported");
        const auto& c = j.at("counts");
        m.counts = {c.at("no_object").get<std::size_t>(), c.at("large_object").get<std::size_t>(),
                    c.at("small_object").get<std::size_t>()};
        m.global_seed = j.at("global_seed").get<std::uint64_t>();
        m.sim = sim_from_json(j.at("sim"));
        m.dx_m = j.at("dx_m").get<double>();
        m.dt_record = j.at("dt_record").get<double>();
        m.record_len = j.at("record_len").get<std::size_t>();
        m.normalization = j.at("normalization").get<double>();
        for (const auto& s : j.at("samples")) {
            SampleRecord r;
            r.index = s.at("index").get<std::uint64_t>();
            r.label = parse_class_label(s.at("class").get<std::string>());
            r.seed = s.at("seed").get<std::uint64_t>();
            r.checksum = s.at("checksum").get<std::uint64_t>();
            r.scenario = scenario_from_json(s.at("scenario"));
            m.samples.push_back(r);
        }
    } catch (const nlohmann::json::exception& ex) {
        fail(ErrorCategory::format, std::string("bad manifest: ") + ex.what());
    } catch (const Error& ex) {
        if (ex.category() == ErrorCategory::config) fail(ErrorCategory::format, ex.what());
        throw;
    }
    return m;
}

inline void save_dataset(const Dataset& ds, const std::filesystem::path& dir)
{
    make_directories(dir);
    write_trace_file(dir / "traces.bin", ds.traces);
    std::ofstream f(dir / "manifest.json", std::ios::trunc);
    if (!f) fail(ErrorCategory::io, "cannot write manifest in '" + dir.string() + "'");
    f << manifest_to_json(ds.manifest).dump(1) << '\n';
}

/// Loads and cross-checks both files. Structural damage is a format error;
/// a manifest that disagrees with the traces is a validation error.
inline Dataset load_dataset(const std::filesystem::path& dir)
{
    if (!std::filesystem::exists(dir / "manifest.json") || !std::filesystem::exists(dir / "traces.bin"))
        fail(ErrorCategory::config, "no dataset at '" + dir.string() + "'");
    std::ifstream f(dir / "manifest.json");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& ex) {
        fail(ErrorCategory::format, std::string("manifest is not valid JSON: ") + ex.what());
    }
    Dataset ds;
    ds.manifest = manifest_from_json(j);
    ds.traces = read_trace_file(dir / "traces.bin");

    const auto& m = ds.manifest;
    if (m.samples.size() != ds.traces.size() || m.counts.total() != ds.traces.size())
        fail(ErrorCategory::validation, "manifest sample count does not match traces.bin");
    for (ClassLabel c : {ClassLabel::NoObject, ClassLabel::LargeObject, ClassLabel::SmallObject}) {
        if (ds.indices_of(c).size() != m.counts.of(c))
            fail(ErrorCategory::validation, "manifest class counts disagree with sample labels");
    }
    double norm = 0.0;
    for (std::size_t k = 0; k < ds.traces.size(); ++k) {
        if (ds.traces[k].size() != m.record_len) fail(ErrorCategory::validation, "trace length differs from record_len");
        if (m.samples[k].index != k) fail(ErrorCategory::validation, "manifest sample indices out of order");
        if (m.samples[k].checksum != trace_checksum(ds.traces[k]))
            fail(ErrorCategory::validation, "manifest checksum mismatch for sample " + std::to_string(k));
        for (double v : ds.traces[k]) norm = std::max(norm, std::abs(v));
    }
    if (!(m.normalization > 0) || norm != m.normalization)
        fail(ErrorCategory::validation, "normalization constant does not match the traces");
    return ds;
}

} // namespace rgan
