#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "matteforge/pipeline.hpp"

namespace matteforge {

using Setting = std::pair<std::string, std::string>;

/// Every configuration key, in canonical order. Keys double as CLI flag
/// names (`--<key> VALUE`).
const std::vector<std::string>& config_keys();

/// Parses a flat `key = value` document. Blank lines and lines starting with
/// '#' are ignored. Throws InvalidArgument on malformed lines.
std::vector<Setting> parse_config_text(std::string_view text);

/// Applies one setting. Throws InvalidArgument for unknown keys or values
/// that do not parse.
void apply_setting(PipelineConfig& cfg, const std::string& key, const std::string& value);

/// Canonical settings describing `cfg`; parse_config_text of the rendered
/// form and re-applying yields an identical configuration.
std::vector<Setting> describe(const PipelineConfig& cfg);
std::string render_config_text(const PipelineConfig& cfg);

}  // namespace matteforge
