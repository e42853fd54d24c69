#pragma once

// JSON-configured scenario runner behind the command line tool.

#include <string>

#include <json.hpp>

#include "pathtrans/error.hpp"

namespace pathtrans {

struct RunOutcome {
    nlohmann::json report;  // result document, or {"error": {kind, message, location}}
    int exit_code = 0;
    std::string csv;  // sweep table for ab_sweep, empty otherwise
};

/// 0 success, 2 configuration, 3 gate failure, 4 numerical trouble.
int exit_code_for(ErrorKind kind);

/// Never throws: every failure becomes an error report with its exit code.
RunOutcome run_scenario(const nlohmann::json& config);

/// Deterministic serialization: sorted keys, doubles with 17 significant digits.
std::string dump_report(const nlohmann::json& report);

/// One line per preset: name, parameters, description.
std::string catalog_listing();

}  // namespace pathtrans
