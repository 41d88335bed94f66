#include "hypoflow/csv.hpp"

#include <cstdio>

namespace hypoflow {

std::string format_number(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& columns)
    : out_(path), ncols_(columns.size()) {
  if (!out_) throw std::runtime_error("cannot open output file '" + path + "'");
  for (size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << "\n";
}

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != ncols_) throw std::logic_error("csv row width mismatch");
  for (size_t i = 0; i < values.size(); ++i) out_ << (i ? "," : "") << format_number(values[i]);
  out_ << "\n";
  ++rows_;
}

void write_manifest(const std::string& out_path, const Config& cfg, const std::string& subcommand,
                    double wall_seconds) {
  std::ofstream m(out_path + ".manifest");
  if (!m) throw std::runtime_error("cannot open manifest for '" + out_path + "'");
  m << "# hypoflow manifest\n";
  m << "# subcommand: " << subcommand << "\n";
  m << "# version: 0.1.0\n";
  m << "# wall_seconds: " << format_number(wall_seconds) << "\n";
  m << emit_config(cfg);
}

}  // namespace hypoflow
