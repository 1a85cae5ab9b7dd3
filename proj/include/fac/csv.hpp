#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace fac {

// Deterministic CSV: %.12g numeric formatting, no locale surprises.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns) : cols_(std::move(columns)) {
    for (size_t i = 0; i < cols_.size(); ++i) {
      if (i) body_ += ',';
      body_ += cols_[i];
    }
    body_ += '\n';
  }

  static std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
  }

  void row(const std::vector<double>& vals) {
    check(vals.size());
    for (size_t i = 0; i < vals.size(); ++i) {
      if (i) body_ += ',';
      body_ += num(vals[i]);
    }
    body_ += '\n';
  }

  void row_mixed(const std::vector<std::string>& vals) {
    check(vals.size());
    for (size_t i = 0; i < vals.size(); ++i) {
      if (i) body_ += ',';
      body_ += vals[i];
    }
    body_ += '\n';
  }

  const std::string& str() const { return body_; }

  void write(const std::filesystem::path& path) const {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << body_;
  }

 private:
  void check(size_t n) const {
    if (n != cols_.size()) throw std::logic_error("csv row width mismatch");
  }
  std::vector<std::string> cols_;
  std::string body_;
};

}  // namespace fac
