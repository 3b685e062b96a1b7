#pragma once

#include <string>

#include "pvbsim/scenario.hpp"

namespace pvbsim {

// Strict scenario-file parser: sections [meta] [pv] [battery] [inverter]
// [ems] [events], "key = value" lines, '#'/';' comments. Unknown sections or
// keys are rejected with line/column diagnostics (ParseError); the assembled
// scenario is then validated (std::invalid_argument names the violated
// invariant). Keys left out fall back to the documented defaults.
Scenario parse_scenario(const std::string& text);

Scenario load_scenario_file(const std::string& path);

// Canonical text form; parse_scenario(serialize_scenario(s)) reproduces s
// exactly (the PV block is written as explicit diode parameters at full
// precision).
std::string serialize_scenario(const Scenario& scenario);

}  // namespace pvbsim
