#pragma once

#include <string>
#include <vector>

#include "tsvf/runner.hpp"

// Result emission.  All numbers are written with 17 significant digits so
// binary64 values survive a round trip.  Output is deterministic for a fixed
// config; the only wall-clock item, the timestamp, is quarantined inside the
// provenance block (its own file in CSV mode) so data files byte-compare
// across reruns.

namespace tsvf {

enum class EmitFormat { csv, json };

struct Provenance {
    uint64_t seed = 0;
    std::string backend;
    std::string version;
    std::string timestamp;  // UTC, ISO-8601
};

Provenance make_provenance(const ScenarioConfig& cfg);

std::string format_double(double v);  // %.17g
std::string render_cell(const Cell& cell);

std::string render_csv(const Table& table);

// Single-document rendering: scenario echo (canonical, shorthand expanded),
// tables, summary, provenance.
std::string render_json(const ResultSet& rs, const Provenance& prov);

// CSV mode writes one <table>.csv per table plus summary.csv and
// provenance.json; JSON mode writes results.json.  Returns the paths written.
std::vector<std::string> emit(const ResultSet& rs, EmitFormat format, const std::string& out_dir);

}  // namespace tsvf
