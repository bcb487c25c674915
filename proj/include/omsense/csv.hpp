#pragma once

#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "omsense/errors.hpp"

namespace omsense::csv {

// 17 significant digits round-trip a double exactly, which is what makes the
// byte-identical-output contract possible.
inline std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

// Accumulates a comment-metadata block followed by one rectangular table.
// Cells are optional: a missing value becomes an empty field, never NaN text.
class Table {
 public:
  void comment(const std::string& text) {
    buf_ += "# ";
    buf_ += text;
    buf_ += '\n';
  }

  void meta(const std::string& key, const std::string& value) {
    comment(key + " = " + value);
  }
  void meta(const std::string& key, const char* value) {
    meta(key, std::string(value));
  }
  void meta(const std::string& key, double value) {
    meta(key, format_number(value));
  }
  void meta_int(const std::string& key, long long value) {
    meta(key, std::to_string(value));
  }
  void meta_flag(const std::string& key, bool value) {
    meta(key, value ? std::string("true") : std::string("false"));
  }

  void header(const std::vector<std::string>& names) {
    join(names);
  }

  void row(const std::vector<std::optional<double>>& cells) {
    std::vector<std::string> fields;
    fields.reserve(cells.size());
    for (const auto& cell : cells)
      fields.push_back(cell ? format_number(*cell) : std::string());
    join(fields);
  }

  const std::string& text() const { return buf_; }

  void write_file(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open output file: " + path);
    out << buf_;
    if (!out) throw Error("failed writing output file: " + path);
  }

 private:
  void join(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) buf_ += ',';
      buf_ += fields[i];
    }
    buf_ += '\n';
  }

  std::string buf_;
};

}  // namespace omsense::csv
