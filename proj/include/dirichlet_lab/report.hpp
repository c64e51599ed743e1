#pragma once

// Bit-stable text output: numbers with 12 significant digits, '\n' line
// endings, no locale dependence.

#include <cmath>
#include <cstdio>
#include <initializer_list>
#include <string>
#include <vector>

namespace dirichlet_lab {

inline std::string format_value(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

inline std::string format_value(long v) { return std::to_string(v); }
inline std::string format_value(int v) { return std::to_string(v); }
inline std::string format_value(std::size_t v) { return std::to_string(v); }
inline std::string format_value(bool v) { return v ? "true" : "false"; }
inline std::string format_value(const std::string& v) { return v; }
inline std::string format_value(const char* v) { return v; }

/// Accumulates CSV text in memory.
class CsvTable {
public:
  explicit CsvTable(std::initializer_list<const char*> header) {
    std::string line;
    for (const char* h : header) {
      if (!line.empty()) line += ',';
      line += h;
    }
    text_ = line + '\n';
    columns_ = header.size();
  }

  template <class... Ts>
  void row(const Ts&... values) {
    static_assert(sizeof...(Ts) > 0);
    std::string line;
    std::size_t i = 0;
    ((line += (i++ == 0 ? "" : ","), line += format_value(values)), ...);
    text_ += line + '\n';
    ++rows_;
  }

  const std::string& text() const noexcept { return text_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t columns() const noexcept { return columns_; }

private:
  std::string text_;
  std::size_t rows_ = 0;
  std::size_t columns_ = 0;
};

}  // namespace dirichlet_lab
