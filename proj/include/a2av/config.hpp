#pragma once

#include <string>

#include "a2av/bench.hpp"

namespace a2av {

/// Parses a JSON run configuration (see docs/config.md). Every field is
/// optional; unknown keys are rejected. Throws ConfigError on malformed
/// input.
RunConfig parse_run_config(const std::string& json_text);

/// Like parse_run_config plus the optional "sweep" section with schedule
/// and stride lists.
SweepConfig parse_sweep_config(const std::string& json_text);

RunConfig load_run_config(const std::string& path);
SweepConfig load_sweep_config(const std::string& path);

}  // namespace a2av
