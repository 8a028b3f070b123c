#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "tlab/map_model.hpp"
#include "tlab/orbit_engine.hpp"

namespace tlab {

// (T_f phi)(x) = sum over the d preimages w of x of phi(w) / f'(w)^2.
cd apply_T(const DynamicMap& f, const std::function<cd(cd)>& phi, cd x, double tol = 1e-10);

struct KernelIdentity {
  cd lhs;  // T_f applied to w -> 1/(z - w), at x
  cd rhs;  // 1/(f'(z)(f(z)-x)) + sum_k L_k(z)/(x - v_k) over finite v_k
  double residual = 0.0;
};

KernelIdentity kernel_identity(const DynamicMap& f, cd z, cd x);
inline double kernel_identity_residual(const DynamicMap& f, cd z, cd x) { return kernel_identity(f, z, x).residual; }

// Near c_j, f'(w) = (w - c_j)^{m_j} r_j(w); q are the Taylor coefficients
// of 1/r_j at c_j up to order m_j - 1.
struct LocalLCoefficients {
  int j = 0;
  std::vector<cd> q;
};

LocalLCoefficients local_L_coefficients(const DynamicMap& f, int j);

// L_j(z) = sum_{i=1}^{m_j} q_{m_j-i} / (z - c_j)^i.
cd eval_local_L(const DynamicMap& f, const LocalLCoefficients& coeffs, cd z);

// L_k(z) = (df/dv_k)(z) / f'(z); partial fractions within 1e-4 of a critical point.
cd L_function(const DynamicMap& f, int k, cd z);

// phi_{z,lambda}(x) = sum_n lambda^n / ((f^n)'(z) (f^n(z) - x)), truncated at
// the budget or exactly at l(z) when the orbit reaches infinity.
SeriesValue varphi_eval(const DynamicMap& f, cd z, cd lambda, cd x, int budget = 2000, double tol = 1e-12);

struct IdentityResidual {
  double residual = 0.0;    // |LHS - RHS| with every series truncated at `terms`
  double truncation = 0.0;  // size of the omitted tail contribution
  double corrected = 0.0;   // residual after adding the omitted boundary term back
  int terms = 0;
};

// phi - lambda T phi - 1/(z-x) - sum_k Phi_k/(v_k-x) with phi and Phi_k cut at
// a common length N. The exact remainder is the boundary term
// lambda^{N+1} / ((f^{N+1})'(z)(f^{N+1}(z)-x)), reported as `truncation`.
IdentityResidual resolvent_identity_residual(const DynamicMap& f, cd z, cd lambda, cd x, int budget = 200);

// H_j - T_f H_j - sum_k L(c_j, v_k)/(v_k - x) with H_j cut at the budget and
// the similarity factors summed to convergence.
IdentityResidual fixed_point_residual(const DynamicMap& f, int j, cd x, int budget = 200,
                                      const SeriesOptions& opts = {});

// H(x) = sum_k alpha_k / (b_k - x) with pairwise distinct poles.
struct KernelCombination {
  std::vector<cd> weights;
  std::vector<cd> poles;

  // Merges poles closer than 1e-12 (summing their weights).
  static KernelCombination make(std::span<const cd> weights, std::span<const cd> poles);
  cd operator()(cd x) const;
};

// H_j as a kernel combination: weights 1/(f^n)'(v_j), poles f^n(v_j).
KernelCombination h_combination(const DynamicMap& f, int j, int budget = 200);

struct RegularizedSeries {
  KernelCombination base;
  cd A = 0.0;  // sum alpha_k
  cd B = 0.0;  // sum alpha_k b_k
  // H(x) + A/x + B/x^2.
  cd operator()(cd x) const;
};

RegularizedSeries regularize(const KernelCombination& H);

// Compares T_f(1/w) at x = R e^{i theta} with 1/(sigma x) + b/(sigma x^2).
struct AsymptoticCheck {
  double radius = 0.0;
  cd operator_value;
  cd expansion;
  double error = 0.0;
};

std::vector<AsymptoticCheck> asymptotic_diagnostic(const DynamicMap& f, std::span<const double> radii = {});

// Seeded probes in the annulus r_min <= |x| <= r_max away from a list of
// points. Each probe index draws from its own stream so results do not depend
// on evaluation order.
struct ProbeOptions {
  double r_min = 0.5;
  double r_max = 3.0;
  double exclusion = 1e-3;
};

cd sample_probe(std::uint64_t seed, std::uint64_t index, std::uint64_t stream, std::span<const cd> avoid,
                const ProbeOptions& opts = {});

// Critical points, finite critical values, poles and the first `orbit_points`
// points of each finite critical orbit.
std::vector<cd> probe_exclusions(const DynamicMap& f, int orbit_points = 50);

struct ProbePair {
  cd z;
  cd x;
};

// z avoids the exclusion set; x also avoids f(z) and the first orbit points of z.
ProbePair sample_probe_pair(const DynamicMap& f, std::uint64_t seed, std::uint64_t index,
                            std::span<const cd> exclusions, const ProbeOptions& opts = {});

}  // namespace tlab
