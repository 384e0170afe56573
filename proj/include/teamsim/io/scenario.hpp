#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <json.hpp>

#include "teamsim/io/tickets.hpp"
#include "teamsim/scenario.hpp"

namespace teamsim::io {

// Insertion-ordered so emitted documents keep field order.
using Json = nlohmann::ordered_json;

// Every scenario field, defaults included.
Json to_json(const Scenario& scenario);
Json to_json(const sd::SdParams& params);

// Missing keys keep the struct defaults; unknown keys and wrong types throw
// ConfigError naming the key path. The result is validated.
Scenario scenario_from_json(const Json& doc);

inline constexpr std::string_view kEnvPrefix = "TEAMSIM_";

// Applies overrides such as TEAMSIM_SD__G_M=0.3 or
// TEAMSIM_DES__ENGINEERS__0__SKILL_LEVEL=2: the name after the prefix is a
// key path with "__" separators, matched case-insensitively; array
// elements are addressed by index. Values are parsed as JSON, falling back
// to a plain string. Entries without the prefix are ignored. Unknown paths
// throw ConfigError.
void apply_env_overrides(Json& doc,
                         const std::vector<std::pair<std::string, std::string>>& env);

// Variables of the current process environment.
std::vector<std::pair<std::string, std::string>> process_environment();

// Reads, applies the overrides, validates. Throws IoError when the file
// cannot be read and ConfigError for malformed JSON or invalid content.
Scenario load_scenario(
    const std::filesystem::path& path,
    const std::vector<std::pair<std::string, std::string>>& env = {});

std::string dump_scenario(const Scenario& scenario);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

// Synthetic ticket spec files share the generator format.
Json to_json(const SynthSpec& spec);
SynthSpec synth_spec_from_json(const Json& doc);
SynthSpec load_synth_spec(const std::filesystem::path& path);

}  // namespace teamsim::io
