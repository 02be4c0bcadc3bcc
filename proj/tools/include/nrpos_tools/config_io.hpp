#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "nrpos/harness.hpp"

namespace nrpos::tools {

// Scenario files are JSON with one section per ScenarioConfig member. Keys
// left out keep the value of harness::default_scenario(); unknown keys are
// rejected. All quantities are SI (seconds, meters, Hz).
//
// Throws ParseError naming the line and field on malformed input.
harness::ScenarioConfig parse_scenario(std::string_view text, std::string_view source = "config");
harness::ScenarioConfig load_scenario(const std::filesystem::path& path);

std::string dump_scenario(const harness::ScenarioConfig& config);

// Reads a whole file; throws Io when it cannot be opened.
std::string read_file(const std::filesystem::path& path);

}  // namespace nrpos::tools
