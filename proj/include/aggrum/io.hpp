#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "aggrum/axioms.hpp"
#include "aggrum/core.hpp"
#include "aggrum/geometry.hpp"
#include "aggrum/rationalizer.hpp"
#include "aggrum/simulation.hpp"

namespace aggrum {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kManifestFormat = "aggrum-manifest/1";
inline constexpr std::string_view kReportFormat = "aggrum-report/1";

// A space plus any combination of payloads. Preferences rank aggregates unless a correspondence is
// present and the ground set names underlying alternatives.
struct Manifest {
    AggregateSpace space;
    std::optional<AggregationCorrespondence> X;
    std::optional<StochasticChoice> choice;
    std::optional<PreferenceDistribution> preference;
    std::optional<CompositionDistribution> composition;
    std::optional<UtilityMap> utility;
    Json metadata = Json::object();

    bool operator==(const Manifest&) const = default;
};

Json to_json(const Manifest& m);
Manifest manifest_from_json(const Json& j);
std::string print_manifest(const Manifest& m);
// Throws Error(InvalidInput) on malformed text, schema problems or unresolved ids.
Manifest parse_manifest(std::string_view text);

Json menu_json(const AggregateSpace& space, Menu m);
Json order_json(const std::vector<std::string>& ground, const LinearOrder& order);
Json preference_json(const PreferenceDistribution& mu);

Json report_json(const AxiomReport& rep, const AggregateSpace& space);
Json distance_json(const DistanceResult& d, const AggregateSpace& space);
Json caratheodory_json(const SparseApproximation& s, const AggregateSpace& space);
Manifest rationalization_manifest(const Rationalization& r, const AggregateSpace& space);

// Wraps a payload object with the report format tag.
Json tagged_report(std::string_view kind, Json body);

}  // namespace aggrum
