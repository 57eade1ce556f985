#include "holotomo/io/csv.hpp"

#include "holotomo/errors.hpp"

#include <cstdio>
#include <fstream>

namespace holotomo::io {

void save_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
              const std::vector<std::vector<double>>& rows) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write file: " + path.string());
  for (size_t i = 0; i < header.size(); ++i) {
    if (i) out << ',';
    out << header[i];
  }
  out << "\r\n";
  char buf[64];
  for (const auto& row : rows) {
    if (row.size() != header.size()) throw DataError("csv: row width does not match header");
    for (size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      std::snprintf(buf, sizeof buf, "%.17g", row[i]);
      out << buf;
    }
    out << "\r\n";
  }
  if (!out) throw DataError("write failed: " + path.string());
}

}  // namespace holotomo::io
