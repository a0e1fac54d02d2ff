#pragma once

#include "errors.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <variant>
#include <vector>

namespace qes {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolName = "qes_spin";
inline constexpr const char* kToolVersion = "1.0.0";

enum class Format { csv, json };

/// Fixed 12-significant-digit rendering; negative zero prints as 0.
inline std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) v = 0.0;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    std::string s(buf);
    return s == "-0" ? "0" : s;
}

/// Value rounded to 12 significant digits, so JSON numbers match the CSV text.
inline Json json_number(double v) {
    if (!std::isfinite(v)) return format_number(v);
    return std::stod(format_number(v));
}

using Cell = std::variant<std::int64_t, double, std::string>;

/// One output document: metadata, column names, rows.
struct Table {
    Json metadata = Json::object();
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

/// Metadata skeleton shared by every command.
inline Json make_metadata(const std::string& command) {
    Json m;
    m["tool"] = kToolName;
    m["version"] = kToolVersion;
    m["command"] = command;
    return m;
}

inline std::string csv_cell(const Cell& c) {
    if (auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
    if (auto* d = std::get_if<double>(&c)) return format_number(*d);
    const std::string& s = std::get<std::string>(c);
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
}

inline Json json_cell(const Cell& c) {
    if (auto* i = std::get_if<std::int64_t>(&c)) return *i;
    if (auto* d = std::get_if<double>(&c)) return json_number(*d);
    return std::get<std::string>(c);
}

/// '#'-prefixed metadata line, header row, then one line per row.
inline void write_csv(std::ostream& os, const Table& t) {
    os << "# " << t.metadata.dump() << '\n';
    for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << t.columns[i];
    os << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_cell(row[i]);
        os << '\n';
    }
}

/// {"metadata": ..., "columns": [...], "rows": [{column: value, ...}, ...]}
inline Json to_json(const Table& t) {
    Json doc;
    doc["metadata"] = t.metadata;
    doc["columns"] = t.columns;
    Json rows = Json::array();
    for (const auto& row : t.rows) {
        Json r = Json::object();
        for (std::size_t i = 0; i < row.size() && i < t.columns.size(); ++i) r[t.columns[i]] = json_cell(row[i]);
        rows.push_back(std::move(r));
    }
    doc["rows"] = std::move(rows);
    return doc;
}

/// One JSON document laid out so the metadata occupies the first line and each row its own line.
inline void write_json(std::ostream& os, const Table& t) {
    const Json doc = to_json(t);
    os << "{\"metadata\":" << doc["metadata"].dump() << ",\n";
    os << "\"columns\":" << doc["columns"].dump() << ",\n";
    os << "\"rows\":[";
    const auto& rows = doc["rows"];
    for (std::size_t i = 0; i < rows.size(); ++i) os << (i ? ",\n" : "\n") << rows[i].dump();
    os << (rows.empty() ? "]}\n" : "\n]}\n");
}

inline void write_table(std::ostream& os, const Table& t, Format f) {
    if (f == Format::csv) write_csv(os, t);
    else write_json(os, t);
}

/// Writes to `path`, or stdout for "-". Throws IoError on any failure.
inline void write_table(const std::string& path, const Table& t, Format f) {
    if (path == "-") {
        write_table(std::cout, t, f);
        std::cout.flush();
        if (!std::cout) throw IoError("failed writing to stdout");
        return;
    }
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    write_table(os, t, f);
    os.close();
    if (!os) throw IoError("failed writing '" + path + "'");
}

/// Format implied by a path: .json selects JSON, anything else CSV.
inline Format format_for_path(const std::string& path) {
    const std::string ext = ".json";
    if (path.size() >= ext.size() && path.compare(path.size() - ext.size(), ext.size(), ext) == 0) return Format::json;
    return Format::csv;
}

/// Parses a CSV produced by write_csv back into metadata, columns and string cells.
inline Table read_csv(std::istream& is) {
    Table t;
    std::string line;
    if (!std::getline(is, line) || line.rfind("# ", 0) != 0) throw IoError("missing metadata line");
    t.metadata = Json::parse(line.substr(2));
    auto split = [](const std::string& s) {
        std::vector<std::string> out;
        std::string cur;
        bool quoted = false;
        for (std::size_t i = 0; i < s.size(); ++i) {
            const char ch = s[i];
            if (quoted) {
                if (ch == '"' && i + 1 < s.size() && s[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else if (ch == '"') {
                    quoted = false;
                } else {
                    cur += ch;
                }
            } else if (ch == '"') {
                quoted = true;
            } else if (ch == ',') {
                out.push_back(cur);
                cur.clear();
            } else {
                cur += ch;
            }
        }
        out.push_back(cur);
        return out;
    };
    if (!std::getline(is, line)) throw IoError("missing header row");
    t.columns = split(line);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<Cell> row;
        for (auto& c : split(line)) row.emplace_back(c);
        t.rows.push_back(std::move(row));
    }
    return t;
}

} // namespace qes
