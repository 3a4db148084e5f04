#pragma once

#include <cstddef>
#include <fstream>
#include <initializer_list>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "radunc/error.hpp"

namespace radunc::csv {

using Row = std::vector<std::string>;

/// RFC 4180 reader: comma separated, double-quote escaping, quoted fields may
/// span lines. A trailing newline does not produce an empty row; a UTF-8 BOM
/// is skipped.
inline std::vector<Row> parse(std::string_view text) {
    if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
    std::vector<Row> rows;
    Row row;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    std::size_t line = 1;
    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
        case '"':
            if (!field.empty()) {
                throw Error(ErrorCode::ParseError, "stray quote inside unquoted field on line " + std::to_string(line));
            }
            in_quotes = true;
            field_started = true;
            break;
        case ',':
            row.push_back(std::move(field));
            field.clear();
            field_started = true;
            break;
        case '\r':
            break;
        case '\n':
            if (field_started || !field.empty() || !row.empty()) {
                row.push_back(std::move(field));
                rows.push_back(std::move(row));
            }
            field.clear();
            row.clear();
            field_started = false;
            ++line;
            break;
        default:
            field.push_back(c);
            field_started = true;
        }
    }
    if (in_quotes) throw Error(ErrorCode::ParseError, "unterminated quoted field");
    if (field_started || !field.empty() || !row.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::FileNotFound, "cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Header-indexed view of a parsed CSV file.
class Table {
public:
    Table() = default;

    explicit Table(std::vector<Row> rows, std::string origin = "<memory>") : m_origin(std::move(origin)) {
        if (rows.empty()) throw Error(ErrorCode::ParseError, m_origin + ": missing header row");
        m_header = std::move(rows.front());
        for (std::size_t i = 0; i < m_header.size(); ++i) m_index[m_header[i]] = i;
        for (std::size_t r = 1; r < rows.size(); ++r) {
            if (rows[r].size() != m_header.size()) {
                throw Error(ErrorCode::ParseError, m_origin + ": row " + std::to_string(r + 1) + " has " +
                                                       std::to_string(rows[r].size()) + " fields, expected " +
                                                       std::to_string(m_header.size()));
            }
            m_rows.push_back(std::move(rows[r]));
        }
    }

    static Table from_file(const std::string& path) { return Table(parse(read_file(path)), path); }

    const Row& header() const { return m_header; }
    std::size_t size() const { return m_rows.size(); }
    const Row& row(std::size_t i) const { return m_rows.at(i); }
    bool has_column(const std::string& name) const { return m_index.count(name) != 0; }

    void require_columns(std::initializer_list<std::string_view> names) const {
        for (auto name : names) {
            if (!has_column(std::string(name))) {
                throw Error(ErrorCode::ParseError, m_origin + ": missing column '" + std::string(name) + "'");
            }
        }
    }

    const std::string& at(std::size_t r, const std::string& column) const {
        auto it = m_index.find(column);
        if (it == m_index.end()) throw Error(ErrorCode::ParseError, m_origin + ": missing column '" + column + "'");
        return m_rows.at(r)[it->second];
    }

    const std::string& origin() const { return m_origin; }

private:
    std::string m_origin;
    Row m_header;
    std::map<std::string, std::size_t> m_index;
    std::vector<Row> m_rows;
};

inline std::string quote(std::string_view field) {
    bool needs = field.find_first_of(",\"\r\n") != std::string_view::npos || (!field.empty() &&
                 (field.front() == ' ' || field.back() == ' '));
    if (!needs) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

inline std::string format_row(const Row& row) {
    std::string out;
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out.push_back(',');
        out += quote(row[i]);
    }
    out.push_back('\n');
    return out;
}

inline std::string format(const Row& header, const std::vector<Row>& rows) {
    std::string out = format_row(header);
    for (const auto& r : rows) out += format_row(r);
    return out;
}

inline void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::FileNotFound, "cannot write '" + path + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

} // namespace radunc::csv
