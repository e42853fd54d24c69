#pragma once

#include <Eigen/Dense>

#include "pathtrans/expr.hpp"

namespace pathtrans {

using Mat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

/// Largest absolute entry.
double max_abs(const Mat& m);

/// Inverse via partial-pivot LU; Error(Singularity) when the matrix is
/// (numerically) degenerate.
Mat checked_inverse(const Mat& m, const char* what = "matrix");

/// Matrix exponential. Closed forms for 1x1 and 2x2, scaling and squaring
/// around a diagonal Pade(6) approximant otherwise.
Mat expm(const Mat& m);

}  // namespace pathtrans
