#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace granoise::io {

/// One table cell; monostate marks a missing value (empty CSV field, JSON null).
using Cell = std::variant<std::monostate, double, std::int64_t, std::string>;

enum class OutputFormat { csv, jsonl };

std::string_view to_string(OutputFormat f);
OutputFormat output_format_from_string(std::string_view s);
/// File extension including the dot.
std::string_view extension(OutputFormat f);

/// Column-named rows, written in insertion order.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    explicit Table(std::vector<std::string> cols = {}) : columns(std::move(cols)) {}

    /// Appends a row; throws Error when the width does not match the header.
    void add_row(std::vector<Cell> row);
    std::size_t column_index(std::string_view name) const;  // throws ConfigError if absent
    std::optional<double> number(std::size_t row, std::string_view column) const;
};

inline Cell optional_cell(const std::optional<double>& v) {
    return v ? Cell{*v} : Cell{};
}

/// 17 significant digits, shortest general form ("0.10000000000000001", "1e-06").
std::string format_double(double value);

void write_csv(std::ostream& out, const Table& table);
void write_jsonl(std::ostream& out, const Table& table);
void write_table(std::ostream& out, const Table& table, OutputFormat format);
std::string to_csv(const Table& table);

/// Parses CSV written by write_csv. Numeric fields become doubles, empty
/// fields missing, anything else strings. Throws Error on an empty input.
Table read_csv(std::string_view text);

}  // namespace granoise::io
