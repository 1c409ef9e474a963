#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "corrgeo/types.hpp"

namespace corrgeo {

/// A matrix with optional row labels, as stored in CSV files.
struct LabeledMatrix {
  std::vector<std::string> row_labels;  // empty when the file has no index column
  std::vector<std::string> col_labels;
  Matrix values;
};

/// Formats a double with 17 significant digits.
std::string format_double(double v);

/// Writes a header row (first cell "id" when row labels are given) followed
/// by one line per row. Throws IoError when the file cannot be written.
void write_matrix_csv(const std::filesystem::path& path, const LabeledMatrix& m);

/// Reads a CSV matrix with a header row. A first header cell that is empty
/// or "id" marks a label column. Throws IoError, EmptyFile or ParseError
/// (with 1-based line and column).
LabeledMatrix read_matrix_csv(const std::filesystem::path& path);

/// Splits one CSV line on commas and trims surrounding whitespace; quoted
/// cells may contain commas.
std::vector<std::string> split_csv_line(const std::string& line);

} // namespace corrgeo
