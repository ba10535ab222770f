#pragma once

// Headless pieces of the real-vs-generated blind test: pair assembly, answer
// scoring and display decimation.

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <vector>

#include "rgan/error.hpp"
#include "rgan/rng.hpp"

namespace rgan {

struct BlindPair {
    std::array<std::vector<double>, 2> slots;
    int real_slot = 0; // which slot holds the simulated trace
    std::size_t real_index = 0, generated_index = 0;
};

/// Draws n pairs without replacement from both pools; slot order per pair is
/// a fair coin from `rng`.
inline std::vector<BlindPair> assemble_pairs(const std::vector<std::vector<double>>& real,
                                             const std::vector<std::vector<double>>& generated, std::size_t n_pairs,
                                             Rng& rng)
{
    if (n_pairs == 0) fail(ErrorCategory::validation, "n_pairs must be >= 1");
    if (real.size() < n_pairs || generated.size() < n_pairs)
        fail(ErrorCategory::validation, "insufficient samples for " + std::to_string(n_pairs) + " pairs (" +
                                            std::to_string(real.size()) + " real, " + std::to_string(generated.size()) +
                                            " generated)");
    auto draw = [&](std::size_t pool) {
        std::vector<std::size_t> idx(pool);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        for (std::size_t k = 0; k < n_pairs; ++k) {
            std::uniform_int_distribution<std::size_t> d(k, pool - 1);
            std::swap(idx[k], idx[d(rng)]);
        }
        idx.resize(n_pairs);
        return idx;
    };
    const auto ri = draw(real.size());
    const auto gi = draw(generated.size());
    std::bernoulli_distribution coin(0.5);
    std::vector<BlindPair> pairs(n_pairs);
    for (std::size_t k = 0; k < n_pairs; ++k) {
        auto& p = pairs[k];
        p.real_slot = coin(rng) ? 1 : 0;
        p.real_index = ri[k];
        p.generated_index = gi[k];
        p.slots[p.real_slot] = real[ri[k]];
        p.slots[1 - p.real_slot] = generated[gi[k]];
    }
    return pairs;
}

struct BlindScore {
    std::size_t answered = 0, correct = 0;
    double accuracy() const { return answered ? static_cast<double>(correct) / static_cast<double>(answered) : 0.0; }
};

/// answers: pair index -> slot the rater picked as the simulated one.
inline BlindScore score_answers(const std::vector<BlindPair>& pairs, const std::map<std::size_t, int>& answers)
{
    BlindScore s;
    for (const auto& [k, slot] : answers) {
        if (k >= pairs.size()) fail(ErrorCategory::not_found, "pair index " + std::to_string(k) + " out of range");
        ++s.answered;
        if (slot == pairs[k].real_slot) ++s.correct;
    }
    return s;
}

/// Block means down to at most max_points samples.
inline std::vector<double> downsample_for_display(const std::vector<double>& x, std::size_t max_points = 2048)
{
    if (max_points == 0) fail(ErrorCategory::validation, "max_points must be >= 1");
    if (x.size() <= max_points) return x;
    const std::size_t block = (x.size() + max_points - 1) / max_points;
    std::vector<double> out;
    for (std::size_t b = 0; b < x.size(); b += block) {
        const std::size_t e = std::min(x.size(), b + block);
        out.push_back(std::accumulate(x.begin() + b, x.begin() + e, 0.0) / static_cast<double>(e - b));
    }
    return out;
}

} // namespace rgan
