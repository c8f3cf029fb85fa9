#pragma once

#include <complex>
#include <string>
#include <vector>

namespace bhmf {

/// Shortest round-trip decimal representation (std::to_chars).
std::string format_double(double v);

/// Minimal CSV writer with a fixed column order; values are emitted with
/// shortest round-trip formatting so identical runs produce identical bytes.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns);

  void add_row(const std::vector<double>& values);
  std::string str() const;
  void write_file(const std::string& path) const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<double>> rows_;
};

}  // namespace bhmf
