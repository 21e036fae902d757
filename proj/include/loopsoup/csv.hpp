#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "loopsoup/common.hpp"

namespace loopsoup {

// Round-trip-exact double formatting (17 significant digits).
inline std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::string& header) : out_(path) {
    if (!out_) throw ConfigError("cannot open for writing: " + path);
    out_ << header << '\n';
  }

  template <typename... Ts>
  void row(const Ts&... fields) {
    bool first = true;
    ((out_ << (first ? "" : ","), first = false, write(fields)), ...);
    out_ << '\n';
  }

  void flush() { out_.flush(); }

 private:
  void write(double v) { out_ << fmt_double(v); }
  void write(int v) { out_ << v; }
  void write(std::uint32_t v) { out_ << v; }
  void write(std::int64_t v) { out_ << v; }
  void write(std::uint64_t v) { out_ << v; }
  void write(const std::string& v) { out_ << v; }
  void write(const char* v) { out_ << v; }

  std::ofstream out_;
};

inline std::vector<std::vector<std::string>> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open for reading: " + path);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    rows.push_back(std::move(fields));
  }
  return rows;
}

}  // namespace loopsoup
