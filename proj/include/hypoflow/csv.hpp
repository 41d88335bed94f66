#pragma once

#include "hypoflow/config.hpp"

#include <fstream>

namespace hypoflow {

// CSV with a fixed 12-significant-digit format; byte-identical across runs for
// the same seed and config.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns);
  void row(const std::vector<double>& values);
  int rows_written() const { return rows_; }

 private:
  std::ofstream out_;
  size_t ncols_;
  int rows_ = 0;
};

std::string format_number(double v);  // %.12g

// `<out>.manifest`: config echo (re-parseable) plus commented metadata.
void write_manifest(const std::string& out_path, const Config& cfg, const std::string& subcommand,
                    double wall_seconds);

}  // namespace hypoflow
