#pragma once

#include "scenario.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace wpk::cli {

/// Spacetime export, mass.csv, norms.csv and evolve.json.
void cmd_evolve(const Scenario& s, const std::filesystem::path& input);

/// detect.json.
void cmd_detect(const Scenario& s, const std::filesystem::path& input);

/// decompose.json and ledger.csv.
void cmd_decompose(const Scenario& s, const std::filesystem::path& input);

/// hls.json. r = 0 picks the admissible partner 2q/(q-4).
void cmd_hls(const Scenario& s, const std::filesystem::path& input, double q, double r);

/// kernel.csv from a CSV of quadruples x1,xi1,x2,xi2,x3,xi3,x4,xi4.
void cmd_kernel(const Scenario& s, const std::filesystem::path& quads);

/// TAP report on stdout; returns true when every check passes.
bool cmd_verify(const Scenario& s, const std::string& suite, std::ostream& os);

} // namespace wpk::cli
