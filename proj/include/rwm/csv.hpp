#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rwm {

inline constexpr std::string_view kToolName = "rwm-sim";
inline constexpr std::string_view kToolVersion = "0.1.0";

/// Provenance written as '#'-prefixed key=value lines ahead of every CSV.
/// Only reproducibility-relevant parameters go into the file: thread count
/// and wall-clock duration never do, so equal manifests give equal bytes.
struct RunManifest {
  std::string subcommand;
  std::vector<std::pair<std::string, std::string>> params;
  double wall_seconds = 0;  // reported on stderr only

  RunManifest& set(std::string key, std::string value);
  RunManifest& set(std::string key, double value);
  RunManifest& set(std::string key, std::size_t value);
};

class CsvWriter {
 public:
  CsvWriter(std::ostream& out, const RunManifest& manifest, std::vector<std::string> columns);

  CsvWriter& operator<<(double x);
  CsvWriter& operator<<(std::size_t x);
  CsvWriter& operator<<(std::string_view s);
  /// Terminates the current row; throws if its width is wrong.
  void end_row();

 private:
  void separator();

  std::ostream& out_;
  std::size_t width_;
  std::size_t filled_ = 0;
};

struct CsvData {
  std::map<std::string, std::string> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const;
  double number(std::size_t row, std::size_t col) const;
  const std::string& meta_value(const std::string& key) const;
};

/// Throws std::runtime_error if the file cannot be opened or is malformed.
CsvData read_csv(const std::string& path);

}  // namespace rwm
