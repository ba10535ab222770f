#pragma once

#include <algorithm>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "rgan/eval/ensemble.hpp"
#include "rgan/gan/trainer.hpp"

namespace rgan {

struct ModelScore {
    std::string id;
    double mse = 0.0;
    std::size_t n_gen = 0;
};

/// Produces the next `n` samples of a candidate model. May keep state.
using SampleSource = std::function<std::vector<std::vector<double>>(std::size_t n, Rng& rng)>;

struct RankCandidate {
    std::string id;
    /// Opens the model; a throw here means the candidate is skipped.
    std::function<SampleSource()> open;
};

struct RankOptions {
    std::size_t n_gen = 3000;
    std::uint64_t seed = 1;
    std::size_t chunk = 64;
    std::function<void(const std::string&)> warn;
};

struct RankResult {
    std::vector<ModelScore> scores; // ascending by mse, ties by id
    std::vector<std::pair<std::string, std::string>> skipped; // id, reason

    const ModelScore& best() const
    {
        if (scores.empty()) fail(ErrorCategory::validation, "no checkpoint could be scored");
        return scores.front();
    }
};

/// Test double that replays the given traces cyclically.
inline SampleSource identity_sampler(std::vector<std::vector<double>> traces)
{
    auto data = std::make_shared<std::vector<std::vector<double>>>(std::move(traces));
    auto next = std::make_shared<std::size_t>(0);
    return [data, next](std::size_t n, Rng&) {
        std::vector<std::vector<double>> out;
        for (std::size_t k = 0; k < n; ++k) out.push_back((*data)[(*next)++ % data->size()]);
        return out;
    };
}

inline SampleSource generator_sampler(std::shared_ptr<GanBundle> b)
{
    return [b](std::size_t n, Rng& rng) { return generate_normalized(*b, n, rng); };
}

/// Every candidate draws from an identically seeded stream, so its score does
/// not depend on its position in the list.
inline ModelScore score_source(const std::string& id, SampleSource& src, const EnsembleStats& reference,
                               const RankOptions& opt)
{
    if (opt.n_gen == 0) fail(ErrorCategory::validation, "n_gen must be >= 1");
    Rng rng(opt.seed);
    EnsembleAccumulator acc;
    while (acc.count() < opt.n_gen) {
        const auto batch = src(std::min(opt.chunk, opt.n_gen - acc.count()), rng);
        if (batch.empty()) fail(ErrorCategory::validation, "sample source for '" + id + "' returned nothing");
        for (const auto& t : batch) acc.add(t);
    }
    return {id, variance_mse(acc.stats(), reference), opt.n_gen};
}

inline RankResult rank_candidates(const std::vector<RankCandidate>& candidates, const EnsembleStats& reference,
                                  const RankOptions& opt = {})
{
    if (candidates.empty()) fail(ErrorCategory::validation, "ranking needs at least one checkpoint");
    RankResult r;
    for (const auto& c : candidates) {
        try {
            auto src = c.open();
            r.scores.push_back(score_source(c.id, src, reference, opt));
        } catch (const std::exception& ex) {
            r.skipped.emplace_back(c.id, ex.what());
            if (opt.warn) opt.warn("skipping '" + c.id + "': " + ex.what());
        }
    }
    std::sort(r.scores.begin(), r.scores.end(), [](const ModelScore& a, const ModelScore& b) {
        return a.mse != b.mse ? a.mse < b.mse : a.id < b.id;
    });
    return r;
}

inline RankCandidate checkpoint_candidate(const std::filesystem::path& path)
{
    return {path.filename().string(), [path] {
                auto b = std::make_shared<GanBundle>(load_checkpoint(path));
                return generator_sampler(b);
            }};
}

inline RankResult rank_checkpoints(const std::vector<std::filesystem::path>& ckpts, const EnsembleStats& reference,
                                   const RankOptions& opt = {})
{
    std::vector<RankCandidate> c;
    for (const auto& p : ckpts) c.push_back(checkpoint_candidate(p));
    return rank_candidates(c, reference, opt);
}

/// Checkpoint files in a directory, sorted by name; optionally one class/stage.
inline std::vector<std::filesystem::path> list_checkpoints(const std::filesystem::path& dir,
                                                           const std::string& prefix = "")
{
    if (!std::filesystem::is_directory(dir))
        fail(ErrorCategory::config, "checkpoint directory '" + dir.string() + "' does not exist");
    std::vector<std::filesystem::path> out;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        const auto name = e.path().filename().string();
        if (e.is_regular_file() && e.path().extension() == ".rgan" && name.rfind(prefix, 0) == 0) out.push_back(e.path());
    }
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace rgan
