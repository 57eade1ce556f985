#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace holotomo::io {

// RFC-4180 CSV with a header row and CRLF line endings. Numeric cells
// are written with enough digits to round-trip doubles.
void save_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
              const std::vector<std::vector<double>>& rows);

}  // namespace holotomo::io
