#include "pucl/matrix.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "pucl/error.hpp"

namespace pucl {

void require_finite(const Matrix& m, const std::string& context) {
  if (!m.allFinite())
    fail(ErrorKind::kNonFinite, context + ": matrix has NaN/Inf entries");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_matrix_csv(const Matrix& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::kIo, "cannot open " + path.string() + " for writing");
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    if (c) out << ',';
    out << 'c' << c;
  }
  out << '\n';
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ',';
      out << format_double(m(r, c));
    }
    out << '\n';
  }
  if (!out) fail(ErrorKind::kIo, "write failed: " + path.string());
}

Matrix read_matrix_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::kIo, "empty csv: " + path.string());
  Eigen::Index cols = 1;
  for (char ch : line)
    if (ch == ',') ++cols;
  std::vector<double> data;
  Eigen::Index rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    Eigen::Index c = 0;
    while (std::getline(ss, cell, ',')) {
      data.push_back(std::stod(cell));
      ++c;
    }
    if (c != cols)
      fail(ErrorKind::kIo, "ragged csv row in " + path.string());
    ++rows;
  }
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[r * cols + c];
  require_finite(m, "read_matrix_csv(" + path.string() + ")");
  return m;
}

}  // namespace pucl
