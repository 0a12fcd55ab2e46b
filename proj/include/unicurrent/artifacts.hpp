#pragma once

// Deterministic artifact writers. Every file carries the config hash and
// tool version in its header; floating-point cells are printed with a fixed
// 17-significant-digit format so identical runs produce identical bytes.

#include <span>
#include <string>
#include <vector>

#include "json.hpp"

namespace unicurrent::artifacts {

std::string format_double(double v);

class CsvWriter {
 public:
  CsvWriter(std::string path, const std::string& config_hash,
            const std::string& experiment);
  void comment(const std::string& line);
  void columns(const std::vector<std::string>& names);
  void row(std::span<const double> values);
  // Writes the buffered content to disk; returns the path.
  std::string finish();

 private:
  std::string path_;
  std::string body_;
  bool finished_ = false;
};

std::string write_summary_json(const std::string& path, nlohmann::json summary,
                               const std::string& config_hash);

// Plain gnuplot companion script for a CSV; log-log axes for sweep data.
std::string write_gnuplot_script(const std::string& path, const std::string& csv_name,
                                 const std::string& title, bool loglog,
                                 int x_column, int y_column);

}  // namespace unicurrent::artifacts
