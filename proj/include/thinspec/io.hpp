#pragma once

// Output plumbing: round-trip-exact CSV tables and JSON files. All output is
// deterministic: fixed column orders, fixed key orders (insertion-ordered
// JSON), and value formatting that depends only on the double bit pattern.

#include <initializer_list>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace thinspec {

using ordered_json = nlohmann::ordered_json;

struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    explicit CsvTable(std::vector<std::string> cols) : columns(std::move(cols)) {}
    void add_row(std::initializer_list<double> values);
};

// Shortest representation that parses back to the same double ("%.17g"
// trimmed via round-trip checks is unnecessary: 17 significant digits always
// round-trip and are stable across runs).
std::string format_double(double v);

std::string to_csv(const CsvTable& table);

void write_text_file(const std::string& path, const std::string& content);
void write_json_file(const std::string& path, const ordered_json& j);

// Create the directory (and parents) if missing; throws on failure.
void ensure_directory(const std::string& path);

}  // namespace thinspec
