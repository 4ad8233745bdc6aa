#include "granoise/io/table.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "granoise/errors.hpp"

namespace granoise::io {

namespace {

void write_csv_field(std::ostream& out, std::string_view s) {
    if (s.find_first_of(",\"\n\r") == std::string_view::npos) {
        out << s;
        return;
    }
    out << '"';
    for (char c : s) {
        if (c == '"') out << '"';
        out << c;
    }
    out << '"';
}

struct CellWriter {
    std::ostream& out;
    void operator()(std::monostate) const {}
    void operator()(double v) const { out << format_double(v); }
    void operator()(std::int64_t v) const { out << v; }
    void operator()(const std::string& s) const { write_csv_field(out, s); }
};

std::vector<std::string> split_csv_line(std::string_view line, std::size_t line_no) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    if (quoted) throw Error("csv line " + std::to_string(line_no) + ": unterminated quote");
    fields.push_back(std::move(field));
    return fields;
}

Cell parse_cell(const std::string& s) {
    if (s.empty()) return {};
    double value = 0.0;
    const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec == std::errc{} && end == s.data() + s.size()) return value;
    return s;
}

}  // namespace

std::string_view to_string(OutputFormat f) {
    return f == OutputFormat::csv ? "csv" : "jsonl";
}

OutputFormat output_format_from_string(std::string_view s) {
    if (s == "csv") return OutputFormat::csv;
    if (s == "jsonl") return OutputFormat::jsonl;
    throw ConfigError("unknown output format '" + std::string(s) + "' (expected csv|jsonl)");
}

std::string_view extension(OutputFormat f) {
    return f == OutputFormat::csv ? ".csv" : ".jsonl";
}

void Table::add_row(std::vector<Cell> row) {
    if (row.size() != columns.size())
        throw Error("table row has " + std::to_string(row.size()) + " cells, header has " +
                    std::to_string(columns.size()));
    rows.push_back(std::move(row));
}

std::size_t Table::column_index(std::string_view name) const {
    for (std::size_t i = 0; i < columns.size(); ++i)
        if (columns[i] == name) return i;
    throw ConfigError("column '" + std::string(name) + "' not found");
}

std::optional<double> Table::number(std::size_t row, std::string_view column) const {
    const Cell& c = rows.at(row).at(column_index(column));
    if (const auto* d = std::get_if<double>(&c)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
    return std::nullopt;
}

std::string format_double(double value) {
    std::array<char, 64> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 17);
    if (ec != std::errc{}) throw Error("format_double: conversion failed");
    return std::string(buf.data(), end);
}

void write_csv(std::ostream& out, const Table& table) {
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out << ',';
        write_csv_field(out, table.columns[i]);
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            std::visit(CellWriter{out}, row[i]);
        }
        out << '\n';
    }
}

void write_jsonl(std::ostream& out, const Table& table) {
    for (const auto& row : table.rows) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, std::monostate>) {
                        obj[table.columns[i]] = nullptr;
                    } else if constexpr (std::is_same_v<T, double>) {
                        if (std::isfinite(v))
                            obj[table.columns[i]] = v;
                        else
                            obj[table.columns[i]] = format_double(v);
                    } else {
                        obj[table.columns[i]] = v;
                    }
                },
                row[i]);
        }
        out << obj.dump() << '\n';
    }
}

void write_table(std::ostream& out, const Table& table, OutputFormat format) {
    if (format == OutputFormat::csv)
        write_csv(out, table);
    else
        write_jsonl(out, table);
}

std::string to_csv(const Table& table) {
    std::ostringstream out;
    write_csv(out, table);
    return out.str();
}

Table read_csv(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start < text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (!line.empty()) lines.push_back(line);
        start = end + 1;
    }
    if (lines.empty()) throw Error("csv input is empty");
    Table table(split_csv_line(lines[0], 1));
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto fields = split_csv_line(lines[i], i + 1);
        if (fields.size() != table.columns.size())
            throw Error("csv line " + std::to_string(i + 1) + ": expected " + std::to_string(table.columns.size()) +
                        " fields, found " + std::to_string(fields.size()));
        std::vector<Cell> row;
        row.reserve(fields.size());
        for (const auto& f : fields) row.push_back(parse_cell(f));
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace granoise::io
