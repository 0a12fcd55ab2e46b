#include "unicurrent/artifacts.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "unicurrent/version.hpp"

namespace unicurrent::artifacts {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

CsvWriter::CsvWriter(std::string path, const std::string& config_hash,
                     const std::string& experiment)
    : path_(std::move(path)) {
  body_ += "# unicurrent " + std::string(kVersion) + "\n";
  body_ += "# config_hash=" + config_hash + "\n";
  body_ += "# experiment=" + experiment + "\n";
}

void CsvWriter::comment(const std::string& line) { body_ += "# " + line + "\n"; }

void CsvWriter::columns(const std::vector<std::string>& names) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) body_ += ",";
    body_ += names[i];
  }
  body_ += "\n";
}

void CsvWriter::row(std::span<const double> values) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) body_ += ",";
    body_ += format_double(values[i]);
  }
  body_ += "\n";
}

std::string CsvWriter::finish() {
  if (finished_) return path_;
  std::ofstream out(path_, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write artifact: " + path_);
  out << body_;
  out.close();
  if (!out) throw std::runtime_error("write failed: " + path_);
  finished_ = true;
  return path_;
}

std::string write_summary_json(const std::string& path, nlohmann::json summary,
                               const std::string& config_hash) {
  summary["config_hash"] = config_hash;
  summary["version"] = kVersion;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write artifact: " + path);
  out << summary.dump(2) << "\n";
  out.close();
  if (!out) throw std::runtime_error("write failed: " + path);
  return path;
}

std::string write_gnuplot_script(const std::string& path, const std::string& csv_name,
                                 const std::string& title, bool loglog,
                                 int x_column, int y_column) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write artifact: " + path);
  out << "set datafile separator ','\n";
  out << "set title '" << title << "'\n";
  if (loglog) out << "set logscale xy\n";
  out << "plot '" << csv_name << "' using " << x_column << ":" << y_column
      << " with linespoints notitle\n";
  out.close();
  if (!out) throw std::runtime_error("write failed: " + path);
  return path;
}

}  // namespace unicurrent::artifacts
