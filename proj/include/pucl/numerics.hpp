#pragma once

#include <functional>

#include "pucl/matrix.hpp"

namespace pucl {

// Scales every row to unit Euclidean norm. Throws kZeroRow if a row norm
// is <= 1e-12.
Matrix normalize_rows(const Matrix& m);

// Central-difference gradient (f(x+h e_i) - f(x-h e_i)) / 2h. Throws
// kNonFinite if any function value is not finite.
Vector finite_diff_grad(const std::function<double(const Vector&)>& f,
                        const Vector& x, double h = 1e-4);

// Entry (i,j) = ||a_i - b_j||^2. Throws kDimMismatch if a.cols != b.cols.
Matrix pairwise_sq_dist(const Matrix& a, const Matrix& b);

}  // namespace pucl
