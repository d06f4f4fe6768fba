#pragma once

#include <map>
#include <string>
#include <vector>

namespace lelm {

using KeyValues = std::map<std::string, std::string>;

/// Flat key=value files ('#' comments, blank lines ignored). Used for both
/// config snapshots and metrics.
void write_key_values(const std::string& path, const KeyValues& kv);
KeyValues read_key_values(const std::string& path);
void append_key_values(const std::string& path, const KeyValues& kv);

/// CSV with a mandatory header row; all cells numeric, full double precision.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  ~CsvWriter();
  void row(const std::vector<double>& values);

 private:
  struct Impl;
  Impl* impl_;
};

}  // namespace lelm
