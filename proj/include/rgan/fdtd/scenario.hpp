#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "rgan/error.hpp"

namespace rgan {

enum class ClassLabel : std::uint8_t {
    NoObject = 0,
    LargeObject = 1,
    SmallObject = 2,
};

inline constexpr std::string_view to_string(ClassLabel c) noexcept
{
    switch (c) {
    case ClassLabel::NoObject: return "no_object";
    case ClassLabel::LargeObject: return "large_object";
    case ClassLabel::SmallObject: return "small_object";
    }
    return "unknown";
}

inline ClassLabel parse_class_label(std::string_view s)
{
    if (s == "no_object" || s == "none" || s == "no" || s == "0") return ClassLabel::NoObject;
    if (s == "large_object" || s == "large" || s == "1") return ClassLabel::LargeObject;
    if (s == "small_object" || s == "small" || s == "2") return ClassLabel::SmallObject;
    fail(ErrorCategory::config, "unknown class label '" + std::string(s) + "'");
}

inline ClassLabel class_from_index(int index)
{
    if (index < 0 || index > 2) fail(ErrorCategory::format, "class label out of range: " + std::to_string(index));
    return static_cast<ClassLabel>(index);
}

/// Layer and object tables. All lengths in centimetres.
namespace scenario_table {
inline constexpr double jacket_min = 1.5, jacket_max = 2.5;
inline constexpr double shirt_min = 0.37, shirt_max = 0.63;
inline constexpr double airgap_min = 2.1, airgap_max = 3.1;
inline constexpr double tissue_thickness = 10.0;

inline constexpr double eps_jacket = 3.0;
inline constexpr double eps_shirt = 1.5;
inline constexpr double eps_airgap = 1.0;
inline constexpr double eps_tissue = 40.0;
inline constexpr double eps_object = 60.0;

inline constexpr double object_thickness = 1.0;
inline constexpr double large_height = 5.0;
inline constexpr double large_center_min = 4.5, large_center_max = 16.0;
inline constexpr double small_height = 2.5;
inline constexpr double small_center_min = 3.5, small_center_max = 16.5;
} // namespace scenario_table

struct Permittivities {
    double jacket = scenario_table::eps_jacket;
    double shirt = scenario_table::eps_shirt;
    double air_gap = scenario_table::eps_airgap;
    double tissue = scenario_table::eps_tissue;
    double object = scenario_table::eps_object;

    bool operator==(const Permittivities&) const = default;
};

struct ConcealedObject {
    double thickness_cm = scenario_table::object_thickness;
    double height_cm = 0.0;
    double center_y_cm = 0.0;

    bool operator==(const ConcealedObject&) const = default;
};

/// One sampled concealment scenario. `object` is empty for NoObject.
struct ScenarioParams {
    ClassLabel label = ClassLabel::NoObject;
    double jacket_cm = 2.0;
    double shirt_cm = 0.5;
    double airgap_cm = 2.6;
    double tissue_cm = scenario_table::tissue_thickness;
    std::optional<ConcealedObject> object;
    Permittivities eps;
    std::uint64_t rng_seed = 0;

    bool operator==(const ScenarioParams&) const = default;
};

namespace detail {
inline void require_range(double v, double lo, double hi, const char* what)
{
    if (!(v >= lo && v <= hi)) {
        fail(ErrorCategory::validation, std::string(what) + " = " + std::to_string(v) + " outside [" +
                                            std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
}
} // namespace detail

/// Geometry-level checks: table ranges and object presence per class.
/// Permittivities only need to be physical (>= 1), so test overrides pass.
inline void validate_geometry(const ScenarioParams& p)
{
    using namespace scenario_table;
    detail::require_range(p.jacket_cm, jacket_min, jacket_max, "jacket_thickness");
    detail::require_range(p.shirt_cm, shirt_min, shirt_max, "shirt_thickness");
    detail::require_range(p.airgap_cm, airgap_min, airgap_max, "airgap_thickness");
    if (p.tissue_cm != tissue_thickness) fail(ErrorCategory::validation, "tissue thickness must be 10 cm");

    for (double e : {p.eps.jacket, p.eps.shirt, p.eps.air_gap, p.eps.tissue, p.eps.object}) {
        if (!(e >= 1.0)) fail(ErrorCategory::validation, "relative permittivity below 1");
    }

    switch (p.label) {
    case ClassLabel::NoObject:
        if (p.object) fail(ErrorCategory::validation, "NoObject scenario carries object fields");
        break;
    case ClassLabel::LargeObject:
    case ClassLabel::SmallObject: {
        if (!p.object) fail(ErrorCategory::validation, "object scenario without object fields");
        const bool large = p.label == ClassLabel::LargeObject;
        const auto& o = *p.object;
        if (o.thickness_cm != object_thickness) fail(ErrorCategory::validation, "object thickness must be 1 cm");
        if (o.height_cm != (large ? large_height : small_height))
            fail(ErrorCategory::validation, "object height does not match class");
        detail::require_range(o.center_y_cm, large ? large_center_min : small_center_min,
                              large ? large_center_max : small_center_max, "object_center_y");
        break;
    }
    }
}

/// Full invariant check, including the fixed material constants.
inline void validate(const ScenarioParams& p)
{
    validate_geometry(p);
    if (p.eps != Permittivities{}) fail(ErrorCategory::validation, "permittivities differ from the fixed table");
}

inline nlohmann::json to_json(const ScenarioParams& p)
{
    nlohmann::json j;
    j["class"] = std::string(to_string(p.label));
    j["jacket_cm"] = p.jacket_cm;
    j["shirt_cm"] = p.shirt_cm;
    j["airgap_cm"] = p.airgap_cm;
    j["tissue_cm"] = p.tissue_cm;
    if (p.object) {
        j["object"] = {{"thickness_cm", p.object->thickness_cm},
                       {"height_cm", p.object->height_cm},
                       {"center_y_cm", p.object->center_y_cm}};
    }
    j["eps"] = {{"jacket", p.eps.jacket}, {"shirt", p.eps.shirt}, {"air_gap", p.eps.air_gap},
                {"tissue", p.eps.tissue}, {"object", p.eps.object}};
    j["seed"] = p.rng_seed;
    return j;
}

inline ScenarioParams scenario_from_json(const nlohmann::json& j)
{
    try {
        ScenarioParams p;
        p.label = parse_class_label(j.at("class").get<std::string>());
        p.jacket_cm = j.at("jacket_cm").get<double>();
        p.shirt_cm = j.at("shirt_cm").get<double>();
        p.airgap_cm = j.at("airgap_cm").get<double>();
        p.tissue_cm = j.at("tissue_cm").get<double>();
        if (j.contains("object")) {
            const auto& o = j.at("object");
            p.object = ConcealedObject{o.at("thickness_cm").get<double>(), o.at("height_cm").get<double>(),
                                       o.at("center_y_cm").get<double>()};
        }
        const auto& e = j.at("eps");
        p.eps = {e.at("jacket").get<double>(), e.at("shirt").get<double>(), e.at("air_gap").get<double>(),
                 e.at("tissue").get<double>(), e.at("object").get<double>()};
        p.rng_seed = j.at("seed").get<std::uint64_t>();
        return p;
    } catch (const nlohmann::json::exception& ex) {
        fail(ErrorCategory::format, std::string("bad scenario record: ") + ex.what());
    }
}

} // namespace rgan
