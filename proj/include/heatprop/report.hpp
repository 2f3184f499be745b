// Machine-readable results document plus an aligned text rendering of the
// benchmark grid. Writing then parsing reproduces every value bit-exactly.
#pragma once

#include <string>

#include "heatprop/trials.hpp"

#include "json.hpp"

namespace heatprop {

using Json = nlohmann::ordered_json;

constexpr int kReportSchemaVersion = 1;

Json report_document(const BenchResult& result);

// Inverse of the config block written by report_document; absent fields
// keep their defaults. Used by the bench preset files.
ExperimentConfig config_from_json(const Json& j);

// Plain JSON file parse with path-tagged errors.
Json read_json_file(const std::string& path);

// Parses and validates the schema version.
Json read_report(const std::string& path);

void write_report(const Json& doc, const std::string& path);

// Grid rows keyed by (s, labels) with one mean +/- SE column per scheme.
std::string render_table(const BenchResult& result);

std::string render_stats(const BenchResult& result);

} // namespace heatprop
