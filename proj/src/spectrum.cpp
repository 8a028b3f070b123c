#include "tlab/spectrum.hpp"

#include <algorithm>

#include "tlab/error.hpp"

namespace tlab {

SingularSpectrum singular_values(const MatC& m, double rel_tol) {
  require(rel_tol > 0.0, "singular_values tolerance must be positive");
  SingularSpectrum out;
  out.tolerance = rel_tol;
  if (m.rows() == 0 || m.cols() == 0) return out;
  Eigen::JacobiSVD<MatC> svd(m);
  const auto& s = svd.singularValues();
  out.values.assign(s.data(), s.data() + s.size());
  std::sort(out.values.begin(), out.values.end(), std::greater<>());
  const double top = out.values.empty() ? 0.0 : out.values.front();
  for (double v : out.values)
    if (top > 0.0 && v > rel_tol * top) ++out.rank;
  return out;
}

VecC solve_square(const MatC& a, const VecC& b, double rel_threshold) {
  require(a.rows() == a.cols() && a.rows() == b.size(), "solve_square: dimension mismatch");
  Eigen::ColPivHouseholderQR<MatC> qr(a);
  qr.setThreshold(rel_threshold);
  if (qr.rank() < a.cols()) fail(ErrorKind::SingularSystem, "linear system is numerically singular");
  return qr.solve(b);
}

}  // namespace tlab
