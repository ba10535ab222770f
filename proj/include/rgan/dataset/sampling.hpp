#pragma once

#include <cstdint>
#include <random>

#include "rgan/fdtd/scenario.hpp"
#include "rgan/rng.hpp"

namespace rgan {

/// Draws one scenario from the layer/object tables. Thickness draws come
/// first (jacket, shirt, air gap) so the three classes share a draw prefix.
inline ScenarioParams sample_scenario(ClassLabel label, Rng& rng)
{
    using namespace scenario_table;
    auto unif = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };

    ScenarioParams p;
    p.label = label;
    p.jacket_cm = unif(jacket_min, jacket_max);
    p.shirt_cm = unif(shirt_min, shirt_max);
    p.airgap_cm = unif(airgap_min, airgap_max);
    p.tissue_cm = tissue_thickness;
    p.eps = Permittivities{};
    switch (label) {
    case ClassLabel::NoObject:
        break;
    case ClassLabel::LargeObject:
        p.object = ConcealedObject{object_thickness, large_height, unif(large_center_min, large_center_max)};
        break;
    case ClassLabel::SmallObject:
        p.object = ConcealedObject{object_thickness, small_height, unif(small_center_min, small_center_max)};
        break;
    }
    return p;
}

/// Seeded form: the scenario records the seed it was drawn from.
inline ScenarioParams sample_scenario(ClassLabel label, std::uint64_t seed)
{
    Rng rng(seed);
    auto p = sample_scenario(label, rng);
    p.rng_seed = seed;
    return p;
}

} // namespace rgan
