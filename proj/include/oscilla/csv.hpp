#pragma once

// Deterministic CSV emission: fixed %.12g formatting, one header row, no
// locale involvement, so identical inputs produce byte-identical files.

#include "common.hpp"

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

namespace oscilla {

inline std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header) : out_(path) {
    if (!out_) throw error("cannot open output file " + path);
    for (size_t i = 0; i < header.size(); ++i) {
      if (i) out_ << ',';
      out_ << header[i];
    }
    out_ << '\n';
    columns_ = header.size();
  }

  void row(const std::vector<double>& values) {
    if (values.size() != columns_) throw error("csv row width does not match the header");
    for (size_t i = 0; i < values.size(); ++i) {
      if (i) out_ << ',';
      out_ << format_number(values[i]);
    }
    out_ << '\n';
  }

  void close() { out_.close(); }

 private:
  std::ofstream out_;
  size_t columns_ = 0;
};

}  // namespace oscilla
