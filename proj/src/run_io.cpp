#include "lelm/run_io.hpp"

#include <fstream>
#include <iomanip>
#include <stdexcept>

namespace lelm {
namespace {

void write_lines(std::ofstream& out, const KeyValues& kv, const std::string& path) {
  for (const auto& [key, value] : kv) out << key << "=" << value << "\n";
  if (!out) throw std::runtime_error("write failure on '" + path + "'");
}

}  // namespace

void write_key_values(const std::string& path, const KeyValues& kv) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write_lines(out, kv, path);
}

void append_key_values(const std::string& path, const KeyValues& kv) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot append to '" + path + "'");
  write_lines(out, kv, path);
}

KeyValues read_key_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  KeyValues kv;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("malformed line in '" + path + "': " + line);
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

struct CsvWriter::Impl {
  std::ofstream out;
  size_t columns = 0;
  std::string path;
};

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : impl_(new Impl{std::ofstream(path), header.size(), path}) {
  if (!impl_->out) throw std::runtime_error("cannot write '" + path + "'");
  for (size_t i = 0; i < header.size(); ++i)
    impl_->out << header[i] << (i + 1 < header.size() ? "," : "\n");
  impl_->out << std::setprecision(17);
}

CsvWriter::~CsvWriter() { delete impl_; }

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != impl_->columns)
    throw std::invalid_argument("CSV row width mismatch in '" + impl_->path + "'");
  for (size_t i = 0; i < values.size(); ++i)
    impl_->out << values[i] << (i + 1 < values.size() ? "," : "\n");
}

}  // namespace lelm
