#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace nhsoc {

/// 17 significant digits, lowercase scientific notation, '.' separator;
/// NaN prints as "nan". Independent of the global locale.
std::string format_double(double v);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

std::string to_csv(const CsvTable& table);

/// Writes the table and returns the number of data rows.
std::size_t write_csv(const std::filesystem::path& file, const CsvTable& table);

}  // namespace nhsoc
