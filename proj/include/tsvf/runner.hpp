#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "tsvf/scenario.hpp"

// Scenario execution.  A run turns a validated config into a ResultSet of
// named tables plus a flat summary; everything except benchmark timings is
// byte-reproducible for a fixed config.

namespace tsvf {

inline const std::string kVersion = "0.1.0";

using Cell = std::variant<int64_t, uint64_t, double, std::string>;

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

struct ResultSet {
    ScenarioConfig config;
    std::vector<Table> tables;
    std::vector<std::pair<std::string, Cell>> summary;
};

// A runtime cross-check failed (e.g. the two correlation-amplitude backends
// drifted apart).  Distinct from config validation; the CLI maps it to its
// own exit code.
struct NumericGuardFailure : std::runtime_error {
    double magnitude;
    explicit NumericGuardFailure(const std::string& what, double magnitude_in)
        : std::runtime_error(what), magnitude(magnitude_in) {}
};

// Any module error escaping a run, re-thrown with the scenario kind (and
// trial index where applicable) in the message.  `validation` distinguishes
// config-shaped problems (CLI exit 2) from numeric guards (exit 3).
struct ScenarioRunError : std::runtime_error {
    bool validation;
    ScenarioRunError(const std::string& what, bool validation_in)
        : std::runtime_error(what), validation(validation_in) {}
};

ResultSet run_scenario(const ScenarioConfig& cfg);

}  // namespace tsvf
