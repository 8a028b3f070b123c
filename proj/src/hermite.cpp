#include "tlab/hermite.hpp"

#include <cmath>

#include "tlab/error.hpp"
#include "tlab/spectrum.hpp"

namespace tlab {

double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  double r = 1.0;
  for (std::size_t i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return std::round(r);
}

ComplexPoly hermite_interpolate(std::span<const cd> nodes, std::span<const int> mult,
                                const std::vector<std::vector<cd>>& taylor_targets,
                                std::size_t num_coeffs) {
  require(nodes.size() == mult.size() && nodes.size() == taylor_targets.size(),
          "hermite_interpolate: inconsistent node data");
  std::size_t conditions = 0;
  for (int m : mult) conditions += static_cast<std::size_t>(m);
  require(conditions == num_coeffs, "hermite_interpolate: condition count must equal unknown count");

  const auto n = static_cast<Eigen::Index>(num_coeffs);
  MatC a = MatC::Zero(n, n);
  VecC rhs = VecC::Zero(n);
  Eigen::Index row = 0;
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    const cd c = nodes[j];
    require(taylor_targets[j].size() >= static_cast<std::size_t>(mult[j]),
            "hermite_interpolate: missing Taylor targets");
    for (int i = 0; i < mult[j]; ++i, ++row) {
      // Column e holds the unknown coefficient of z^e.
      for (std::size_t e = static_cast<std::size_t>(i); e < num_coeffs; ++e)
        a(row, static_cast<Eigen::Index>(e)) =
            binomial(e, static_cast<std::size_t>(i)) * ipow(c, e - static_cast<std::size_t>(i));
      rhs(row) = taylor_targets[j][static_cast<std::size_t>(i)];
    }
  }
  const VecC x = solve_square(a, rhs, 1e-12);
  std::vector<cd> high_first(num_coeffs);
  for (std::size_t e = 0; e < num_coeffs; ++e) high_first[num_coeffs - 1 - e] = x(static_cast<Eigen::Index>(e));
  return ComplexPoly(std::move(high_first));
}

}  // namespace tlab
