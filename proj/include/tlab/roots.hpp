#pragma once

#include <functional>
#include <vector>

#include "tlab/complex_poly.hpp"

namespace tlab {

struct RootCluster {
  cd center;
  int multiplicity = 1;
  double radius = 0.0;  // max distance from a member root to the center
};

struct RootOptions {
  double tol = 1e-10;            // backward-error acceptance |p(c)| <= tol * scale
  double cluster_rel = 1e-6;     // single-linkage threshold, times (1 + max|root|)
  int max_iterations = 600;
};

// Evaluates g(z) and g'(z); optionally reports the rounding scale of g at z.
struct Evaluator {
  std::function<void(cd, cd&, cd&)> value_and_derivative;
  std::function<double(cd)> scale;  // may be empty
};

// Simultaneous Aberth-Ehrlich iteration for all `degree` roots of g started
// on a perturbed circle of the given radius. Returns roots with repetition.
std::vector<cd> aberth_roots(const Evaluator& g, std::size_t degree, double radius,
                             const RootOptions& opts = {});

// Fujiwara upper bound on the moduli of the roots of p.
double fujiwara_bound(const ComplexPoly& p);

// Single-linkage clustering; centers are refined on p^(m-1) when p is given.
std::vector<RootCluster> cluster_roots(const std::vector<cd>& roots, double threshold,
                                       const ComplexPoly* p = nullptr);

// All roots of a nonconstant polynomial, grouped into multiplicity clusters,
// sorted lexicographically by (real, imaginary) part.
std::vector<RootCluster> find_roots(const ComplexPoly& p, const RootOptions& opts = {});
inline std::vector<RootCluster> find_roots(const ComplexPoly& p, double tol) {
  RootOptions o;
  o.tol = tol;
  return find_roots(p, o);
}

// Lexicographic (re, im) ordering with a small tie tolerance on the real part.
bool lex_less(cd a, cd b);

}  // namespace tlab
