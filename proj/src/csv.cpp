#include "rwm/csv.hpp"

#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "rwm/format.hpp"

namespace rwm {

RunManifest& RunManifest::set(std::string key, std::string value) {
  params.emplace_back(std::move(key), std::move(value));
  return *this;
}

RunManifest& RunManifest::set(std::string key, double value) {
  return set(std::move(key), format_double(value));
}

RunManifest& RunManifest::set(std::string key, std::size_t value) {
  return set(std::move(key), std::to_string(value));
}

CsvWriter::CsvWriter(std::ostream& out, const RunManifest& manifest,
                     std::vector<std::string> columns)
    : out_(out), width_(columns.size()) {
  out_ << "# tool=" << kToolName << '\n';
  out_ << "# version=" << kToolVersion << '\n';
  out_ << "# subcommand=" << manifest.subcommand << '\n';
  for (const auto& [k, v] : manifest.params) out_ << "# " << k << '=' << v << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << '\n';
}

void CsvWriter::separator() {
  if (filled_ == width_) throw std::logic_error("CSV row has too many cells");
  if (filled_++ > 0) out_ << ',';
}

CsvWriter& CsvWriter::operator<<(double x) {
  separator();
  out_ << format_double(x);
  return *this;
}

CsvWriter& CsvWriter::operator<<(std::size_t x) {
  separator();
  out_ << x;
  return *this;
}

CsvWriter& CsvWriter::operator<<(std::string_view s) {
  separator();
  out_ << s;
  return *this;
}

void CsvWriter::end_row() {
  if (filled_ != width_) throw std::logic_error("CSV row has too few cells");
  out_ << '\n';
  filled_ = 0;
}

std::size_t CsvData::column(std::string_view name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw std::runtime_error("CSV has no column '" + std::string(name) + "'");
}

double CsvData::number(std::size_t row, std::size_t col) const {
  return parse_double(rows.at(row).at(col));
}

const std::string& CsvData::meta_value(const std::string& key) const {
  const auto it = meta.find(key);
  if (it == meta.end()) throw std::runtime_error("CSV header lacks '" + key + "'");
  return it->second;
}

CsvData read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  CsvData data;
  std::string line;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::stringstream ss(s);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    return cells;
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto eq = line.find('=');
      if (eq != std::string::npos) {
        std::size_t start = 1;
        while (start < eq && line[start] == ' ') ++start;
        data.meta[line.substr(start, eq - start)] = line.substr(eq + 1);
      }
      continue;
    }
    if (data.columns.empty()) {
      data.columns = split(line);
      continue;
    }
    auto cells = split(line);
    if (cells.size() != data.columns.size()) {
      throw std::runtime_error("ragged CSV row in '" + path + "'");
    }
    data.rows.push_back(std::move(cells));
  }
  if (data.columns.empty()) throw std::runtime_error("'" + path + "' has no CSV header");
  return data;
}

}  // namespace rwm
