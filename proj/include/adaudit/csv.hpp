#pragma once

#include <cstddef>
#include <fstream>
#include <string>
#include <vector>

namespace adaudit::csv {

// In-memory CSV with a header row. Handles quoted fields and CRLF; that is
// all the fixtures need.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    // Index of a header column, or -1.
    int column(const std::string& name) const;
    // Index of a header column; throws ConfigError naming the column if absent.
    std::size_t require_column(const std::string& name) const;
};

Table read_file(const std::string& path);
Table read_string(const std::string& text);

std::string escape(const std::string& field);

// Line-oriented writer; fields are escaped as needed.
class Writer {
public:
    explicit Writer(const std::string& path);
    void row(const std::vector<std::string>& fields);
    // Flushes and closes; throws IoError if the stream went bad.
    void close();

private:
    std::ofstream out_;
    std::string path_;
};

}  // namespace adaudit::csv
