#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>

namespace pucl {

// Row-major semantics throughout: rows are samples, cols are features.
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Throws kNonFinite unless every entry of m is finite.
void require_finite(const Matrix& m, const std::string& context);

// CSV with header c0,...,c{cols-1} and one data row per matrix row,
// 17 significant digits (lossless double round trip).
void write_matrix_csv(const Matrix& m, const std::filesystem::path& path);
Matrix read_matrix_csv(const std::filesystem::path& path);

std::string format_double(double v);  // %.17g

}  // namespace pucl
