#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "kramers/core.hpp"

namespace kramers {

using Json = nlohmann::ordered_json;

// Shortest exact decimal for CSV cells; round-trips to the same double.
std::string format_double(double v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    void add_row(const std::vector<double>& vals);
    void add_row(std::vector<std::string> vals);
};

void write_csv(const std::string& path, const CsvTable& table);

// Report envelope every command uses: version strings, command name, seed.
Json report_envelope(const std::string& command, uint64_t seed);

void write_report(const std::string& path, const Json& report);

Json load_json_file(const std::string& path);

// Checks `doc` against the subset of JSON Schema the shipped schema uses:
// type, properties, required, items, enum, additionalProperties. Returns
// human-readable violations, empty when the document conforms.
std::vector<std::string> validate_against_schema(const Json& doc,
                                                 const Json& schema);

}  // namespace kramers
