/*
 * Copyright 2026 The cope Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace cope::harness {

using Json = nlohmann::json;

/// Raised for malformed configs and overrides.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Every key the harness understands, with its default. Per-environment
/// presets are layered on top by resolve_config.
Json default_config();

/// Keys that differ from default_config for a given environment name.
Json env_preset(const std::string& env_name);

/// Recursive merge; objects merge key by key, everything else is replaced.
void merge_into(Json& base, const Json& patch);

/// Applies "a.b.c=value". The value is parsed as JSON when possible and kept
/// as a string otherwise. Unknown paths are an error.
void apply_override(Json& config, const std::string& assignment);

/// defaults <- env preset <- user <- overrides, then validated.
Json resolve_config(const Json& user, const std::vector<std::string>& overrides = {});

Json load_config(const std::filesystem::path& path);

/// FNV-1a 64 of the canonical dump, as 16 hex digits.
std::string config_digest(const Json& config);

/// Looks up a dot path; throws ConfigError when missing.
const Json& at_path(const Json& config, const std::string& path);

/// Throws ConfigError with the offending key.
void validate_config(const Json& config);

} // namespace cope::harness
