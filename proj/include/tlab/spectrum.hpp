#pragma once

#include <vector>

#include "tlab/newton.hpp"

namespace tlab {

struct SingularSpectrum {
  std::vector<double> values;  // descending
  int rank = 0;
  double tolerance = 0.0;      // relative: rank counts values > tolerance * max
};

// Singular values of a complex matrix. An empty dimension yields rank 0.
SingularSpectrum singular_values(const MatC& m, double rel_tol = 1e-9);

// Solves A x = b by column-pivoted QR; throws SingularSystem when A is
// numerically rank-deficient at the given relative threshold.
VecC solve_square(const MatC& a, const VecC& b, double rel_threshold = 1e-13);

}  // namespace tlab
