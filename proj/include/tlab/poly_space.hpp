#pragma once

#include <span>
#include <vector>

#include "tlab/complex_poly.hpp"
#include "tlab/newton.hpp"

namespace tlab {

inline constexpr int kMaxPolyDegree = 12;

// Distinct critical points with multiplicities and values. For rational maps
// some values may be infinite; `values[j]` is then unspecified (set to 0) and
// `value_infinite[j]` is true. Finite values come first.
struct CriticalProfile {
  std::vector<cd> points;
  std::vector<int> multiplicities;
  std::vector<cd> values;
  std::vector<bool> value_infinite;

  std::size_t size() const { return points.size(); }
  // Number p of critical points with a finite value.
  std::size_t finite_count() const;
  int total_multiplicity() const;
};

// Monic centered polynomial z^d + a_1 z^{d-2} + ... + a_{d-1}. The z^{d-1}
// slot does not exist in storage.
class PolyMap {
public:
  PolyMap(int degree, std::vector<cd> coeffs, bool real = false);

  int degree() const { return degree_; }
  const std::vector<cd>& coeffs() const { return coeffs_; }
  bool is_real() const { return real_; }

  const ComplexPoly& poly() const { return poly_; }
  cd operator()(cd z) const { return poly_(z); }
  cd derivative(cd z) const { return dpoly_(z); }

private:
  int degree_;
  std::vector<cd> coeffs_;
  bool real_;
  ComplexPoly poly_;
  ComplexPoly dpoly_;
};

struct PartialDerivativePoly {
  int index = 0;  // 0-based critical index k
  ComplexPoly poly;
};

// Critical points (roots of f'), sorted lexicographically, with values f(c).
CriticalProfile critical_profile(const PolyMap& f);

struct PolyChartSolution {
  PolyMap map;
  std::vector<cd> critical_points;  // tracked in the order of the base profile
  NewtonResult newton;
};

// Inverts the critical-value chart near (f0, profile0): finds g with the same
// multiplicity vector and V(g) = target. Throws NonConvergence or
// MultiplicityBroken.
PolyChartSolution solve_poly_chart(const PolyMap& f0, const CriticalProfile& profile0,
                                   std::span<const cd> target, double tol = 1e-12);

PolyMap coeffs_from_critical_values(const PolyMap& f0, std::span<const cd> target,
                                    double tol = 1e-12);

// The polynomial p_k = df/dv_k of degree <= d-2 with p_k - delta_{jk}
// vanishing to order m_j at every c_j. k is 0-based.
PartialDerivativePoly partial_derivative_poly(const PolyMap& f, const CriticalProfile& profile, int k);
PartialDerivativePoly partial_derivative_poly(const PolyMap& f, int k);

// Max over a probe grid of |FD(z) - p_k(z)| / (1 + |p_k(z)|), where FD is the
// central difference of g(z) through the chart at V(f) +- h e_k.
double fd_check_partial(const PolyMap& f, int k, double h = 1e-6);

}  // namespace tlab
