#include "corrgeo/matrix_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "corrgeo/errors.hpp"

namespace corrgeo {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::string location(std::size_t line, std::size_t col) {
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

} // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (char ch : line) {
    if (ch == '"') {
      quoted = !quoted;
    } else if (ch == ',' && !quoted) {
      cells.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  cells.push_back(trim(cur));
  return cells;
}

void write_matrix_csv(const std::filesystem::path& path, const LabeledMatrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
  const bool labeled = !m.row_labels.empty();
  if (labeled) out << "id";
  for (std::size_t j = 0; j < m.col_labels.size(); ++j)
    out << ((labeled || j > 0) ? "," : "") << m.col_labels[j];
  out << '\n';
  for (Eigen::Index i = 0; i < m.values.rows(); ++i) {
    if (labeled) out << m.row_labels[static_cast<std::size_t>(i)];
    for (Eigen::Index j = 0; j < m.values.cols(); ++j)
      out << ((labeled || j > 0) ? "," : "") << format_double(m.values(i, j));
    out << '\n';
  }
  if (!out) fail(ErrorKind::IoError, "write to " + path.string() + " failed");
}

LabeledMatrix read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IoError, "cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!trim(line).empty()) {
      header = split_csv_line(line);
      break;
    }
  }
  if (header.empty()) fail(ErrorKind::EmptyFile, path.string() + " has no header");

  LabeledMatrix out;
  const bool labeled = header.front().empty() || header.front() == "id";
  out.col_labels.assign(header.begin() + (labeled ? 1 : 0), header.end());
  const std::size_t width = out.col_labels.size();

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size())
      fail(ErrorKind::ParseError, path.string() + ": expected " + std::to_string(header.size()) +
                                      " cells at " + location(line_no, cells.size()));
    std::vector<double> row;
    row.reserve(width);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (labeled && c == 0) {
        out.row_labels.push_back(cells[c]);
        continue;
      }
      double v = 0.0;
      const auto& cell = cells[c];
      auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v))
        fail(ErrorKind::ParseError, path.string() + ": invalid number '" + cell + "' at " +
                                        location(line_no, c + 1));
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(ErrorKind::EmptyFile, path.string() + " has no data rows");
  out.values.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < width; ++j)
      out.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return out;
}

} // namespace corrgeo
