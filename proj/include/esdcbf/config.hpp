#pragma once

#include "esdcbf/scenario.hpp"

#include <filesystem>
#include <string>

namespace esdcbf {

// Plain-text scenario configuration: one `key = value` per line, `#` starts a
// comment. `scenario = N` selects the catalog entry the remaining keys
// override (default 1). Vectors are comma-separated; marking point lists
// separate points with ';'. See README for the full key list.
std::string to_config_text(const ScenarioSpec& spec);
ScenarioSpec parse_config_text(const std::string& text);

// Applies the keys in text on top of spec. `scenario` is ignored here.
void apply_config_text(ScenarioSpec& spec, const std::string& text);

ScenarioSpec load_config(const std::filesystem::path& path);
void save_config(const ScenarioSpec& spec, const std::filesystem::path& path);

}  // namespace esdcbf
