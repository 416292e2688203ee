#pragma once

// Plot-ready CSV output: comma separation, LF line endings, header row per
// file, and 17 significant digits so doubles round-trip exactly.

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <vector>

namespace traceinv {

inline std::string csv_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string csv_num(std::size_t v) { return std::to_string(v); }

inline std::string csv_bool(bool v) { return v ? "true" : "false"; }

/// Quote a field only when it needs it (comma, quote, or newline inside).
inline std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw std::invalid_argument("cannot open output file: " + path);
    }

    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ',';
            out_ << csv_escape(cells[i]);
        }
        out_ << '\n';
    }

    void row(std::initializer_list<std::string> cells) { row(std::vector<std::string>(cells)); }

    void close() {
        out_.close();
        if (out_.fail()) throw std::runtime_error("failed to flush output file");
    }

  private:
    std::ofstream out_;
};

}  // namespace traceinv
