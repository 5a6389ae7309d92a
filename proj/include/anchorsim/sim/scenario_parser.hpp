#pragma once

#include "anchorsim/sim/scenario.hpp"

#include <filesystem>
#include <istream>

namespace anchorsim::sim {

/// Parses the sectioned key=value scenario format (grammar in
/// scenarios/README.md). Starts from defaults; repeated [level] and
/// [client_type] sections append. Throws ParseError naming the line and field;
/// semantic violations found by Scenario::validate() report line 0.
Scenario parse_scenario(std::istream &in);
Scenario load_scenario(std::filesystem::path const &path);

}  // namespace anchorsim::sim
