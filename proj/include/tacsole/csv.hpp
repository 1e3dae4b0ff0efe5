#pragma once

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "tacsole/errors.hpp"

namespace tacsole {

// CSV output with a fixed column order and '.' decimal separator so runs
// with the same seed produce byte-identical files.
class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : out_(path)
    {
        if (!out_) throw io_error("csv: cannot open for writing: " + path);
    }

    void header(std::initializer_list<std::string> names) { row_of_strings(names.begin(), names.end()); }
    void header(const std::vector<std::string>& names) { row_of_strings(names.begin(), names.end()); }

    CsvWriter& field(const std::string& s)
    {
        sep();
        out_ << s;
        return *this;
    }
    CsvWriter& field(const char* s) { return field(std::string(s)); }
    CsvWriter& field(std::int64_t v)
    {
        sep();
        out_ << v;
        return *this;
    }
    CsvWriter& field(int v) { return field(static_cast<std::int64_t>(v)); }
    CsvWriter& field(std::size_t v) { return field(static_cast<std::int64_t>(v)); }
    // Fixed 'g'-style formatting with enough digits to round-trip.
    CsvWriter& field(double v)
    {
        char buf[40];
        std::snprintf(buf, sizeof(buf), "%.12g", v);
        sep();
        out_ << buf;
        return *this;
    }

    void end_row()
    {
        out_ << "\n";
        first_ = true;
    }

    void flush() { out_.flush(); }

private:
    template <class It>
    void row_of_strings(It begin, It end)
    {
        for (It it = begin; it != end; ++it) field(*it);
        end_row();
    }
    void sep()
    {
        if (!first_) out_ << ",";
        first_ = false;
    }

    std::ofstream out_;
    bool first_ = true;
};

// Minimal reader for the library's own CSV files: splits on commas, no
// quoting (none of our writers quote).
inline std::vector<std::vector<std::string>> read_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw io_error("csv: cannot open: " + path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) fields.push_back(cell);
        rows.push_back(std::move(fields));
    }
    return rows;
}

} // namespace tacsole
