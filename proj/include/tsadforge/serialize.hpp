#pragma once

// JSON forms of the configuration, blueprints and anomaly specs. Keys are
// snake_case; objects come out key-sorted.

#include "tsadforge/priors.hpp"

#include <json.hpp>

#include <string_view>

namespace tsadforge {

using Json = nlohmann::json;

inline constexpr std::string_view kSchemaVersion = "1";

/// Strict reader: schema_version required, absent fields take defaults,
/// unknown keys and wrong types throw InvalidConfig naming the key. The
/// result is not validated (see validate_config).
GeneratorConfig config_from_json(const Json& j);
Json config_to_json(const GeneratorConfig& config);
/// Reads and parses a file. Throws IoError, ParseError, InvalidConfig.
GeneratorConfig load_config(const std::string& path);

Json to_json(const TrendSpec& spec);
Json to_json(const SeasonSpec& spec);
Json to_json(const NoiseSpec& spec);
Json to_json(const AnomalySpec& spec);
Json to_json(const SampleBlueprint& bp);
Json to_json(const LabelPolicy& policy);

TrendSpec trend_from_json(const Json& j);
SeasonSpec season_from_json(const Json& j);
NoiseSpec noise_from_json(const Json& j);
AnomalySpec anomaly_from_json(const Json& j);
SampleBlueprint blueprint_from_json(const Json& j);
LabelPolicy label_policy_from_json(const Json& j);

}  // namespace tsadforge
