#include "adaudit/csv.hpp"

#include <sstream>

#include "adaudit/errors.hpp"

namespace adaudit::csv {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

Table parse(std::istream& in) {
    Table t;
    std::string line;
    bool first = true;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_line(line);
        if (first) {
            t.header = std::move(fields);
            first = false;
        } else {
            if (fields.size() < t.header.size()) {
                throw ValidationError("csv line " + std::to_string(line_no) + ": expected " +
                                      std::to_string(t.header.size()) + " fields, got " +
                                      std::to_string(fields.size()));
            }
            t.rows.push_back(std::move(fields));
        }
    }
    return t;
}

}  // namespace

int Table::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
}

std::size_t Table::require_column(const std::string& name) const {
    const int idx = column(name);
    if (idx < 0) throw ConfigError("missing column: " + name);
    return static_cast<std::size_t>(idx);
}

Table read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    return parse(in);
}

Table read_string(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
}

std::string escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

Writer::Writer(const std::string& path) : out_(path, std::ios::binary), path_(path) {
    if (!out_) throw IoError("cannot open " + path + " for writing");
}

void Writer::row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ << ',';
        out_ << escape(fields[i]);
    }
    out_ << '\n';
}

void Writer::close() {
    out_.flush();
    if (!out_) throw IoError("write failed: " + path_);
    out_.close();
}

}  // namespace adaudit::csv
