#pragma once

#include <string>

#include <nlohmann/json.hpp>

namespace rso2stat {

/// Parse a TOML subset into a JSON document: bare/quoted keys,
/// [table] / [dotted.table] / [[array-of-tables]] headers, and values that
/// are strings, integers, floats, booleans or flat arrays. This covers the
/// config and scenario files this project reads; it is not a full TOML
/// implementation. Errors mention the offending line and key.
nlohmann::json parse_toml(const std::string& text);

/// Dispatch on extension: .toml via parse_toml, anything else nlohmann JSON.
nlohmann::json load_config_file(const std::string& path);

}  // namespace rso2stat
