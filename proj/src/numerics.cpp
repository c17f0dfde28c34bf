#include "pucl/numerics.hpp"

#include <cmath>

#include "pucl/error.hpp"

namespace pucl {

Matrix normalize_rows(const Matrix& m) {
  Matrix out = m;
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    double norm = m.row(r).norm();
    if (norm <= 1e-12)
      fail(ErrorKind::kZeroRow, "normalize_rows: row " + std::to_string(r) +
                                    " has norm <= 1e-12");
    out.row(r) /= norm;
  }
  return out;
}

Vector finite_diff_grad(const std::function<double(const Vector&)>& f,
                        const Vector& x, double h) {
  if (h <= 0.0) fail(ErrorKind::kInvalidArgs, "finite_diff_grad: h must be > 0");
  Vector grad(x.size());
  Vector probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    probe(i) = x(i) + h;
    double up = f(probe);
    probe(i) = x(i) - h;
    double down = f(probe);
    probe(i) = x(i);
    if (!std::isfinite(up) || !std::isfinite(down))
      fail(ErrorKind::kNonFinite, "finite_diff_grad: non-finite evaluation");
    grad(i) = (up - down) / (2.0 * h);
  }
  return grad;
}

Matrix pairwise_sq_dist(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols())
    fail(ErrorKind::kDimMismatch, "pairwise_sq_dist: column counts differ");
  Matrix d(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.rows(); ++j)
      d(i, j) = (a.row(i) - b.row(j)).squaredNorm();
  return d;
}

}  // namespace pucl
