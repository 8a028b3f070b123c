#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tlab/complex_poly.hpp"
#include "tlab/newton.hpp"
#include "tlab/poly_space.hpp"
#include "tlab/slot.hpp"

namespace tlab {

// A point of the Riemann sphere.
struct ExtPoint {
  cd z = 0.0;
  bool inf = false;

  static ExtPoint infinity() { return {0.0, true}; }
};

// Chordal distance on the sphere, in [0, 2].
double chordal_distance(ExtPoint a, ExtPoint b);

// f(z) = sigma z + b + P(z)/Q(z), deg P <= d-2, Q monic of degree d-1.
class RationalMap {
public:
  RationalMap(cd sigma, cd b, ComplexPoly P, ComplexPoly Q);

  int degree() const { return static_cast<int>(Q_.degree()) + 1; }
  cd sigma() const { return sigma_; }
  cd b() const { return b_; }
  const ComplexPoly& P() const { return P_; }
  const ComplexPoly& Q() const { return Q_; }
  // f = numerator / Q with numerator = (sigma z + b) Q + P.
  const ComplexPoly& numerator() const { return num_; }
  // f' = wronskian / Q^2 with wronskian = num' Q - num Q'.
  const ComplexPoly& wronskian() const { return wr_; }
  const std::vector<cd>& poles() const { return poles_; }

  // True when z lies on (numerically at) a pole.
  bool near_pole(cd z) const;
  cd operator()(cd z) const { return num_(z) / Q_(z); }
  cd derivative(cd z) const;
  ExtPoint apply(ExtPoint z) const;

private:
  cd sigma_, b_;
  ComplexPoly P_, Q_, num_, wr_;
  std::vector<cd> poles_;
};

// Builds the sigma z + b + P/Q form from num/den with deg num = deg den + 1.
RationalMap to_lambda_form(const ComplexPoly& num, const ComplexPoly& den);

class MobiusTransform {
public:
  MobiusTransform(cd a, cd b, cd c, cd d);
  static MobiusTransform identity() { return {1.0, 0.0, 0.0, 1.0}; }

  cd a() const { return a_; }
  cd b() const { return b_; }
  cd c() const { return c_; }
  cd d() const { return d_; }

  ExtPoint apply(ExtPoint z) const;
  ExtPoint operator()(ExtPoint z) const { return apply(z); }
  ExtPoint operator()(cd z) const { return apply(ExtPoint{z, false}); }
  // Derivative at a finite point that is not the pole -d/c.
  cd derivative(cd z) const;
  MobiusTransform inverse() const;
  // (this o other)(z) = this(other(z)).
  MobiusTransform compose(const MobiusTransform& other) const;

private:
  cd a_, b_, c_, d_;
};

// A general rational function num/den (no normal form).
struct RationalFunction {
  ComplexPoly num;
  ComplexPoly den;

  int degree() const;
  ExtPoint apply(ExtPoint z) const;
};

RationalFunction as_function(const RationalMap& f);

// M^{-1} o f o M, expanded homogeneously.
RationalFunction conjugate(const RationalFunction& f, const MobiusTransform& M);

// Critical points are the roots of the wronskian (2d-2 with multiplicity).
// Finite values come first; within each group points are sorted
// lexicographically.
CriticalProfile rational_critical_profile(const RationalMap& f);

enum class SpaceCase { H, NN, ND };
std::string to_string(SpaceCase c);
std::optional<SpaceCase> parse_space_case(const std::string& s);

struct FixedPoint {
  ExtPoint point;
  cd multiplier;
};

struct ClassifyOptions {
  double parabolic_tol = 1e-8;   // |rho - 1| below this triggers the (N) branch
  double exact_tol = 1e-13;      // |rho - 1| below this counts as exactly 1
  std::optional<SpaceCase> asserted_case;
  // Indices into rational_critical_profile(f) of the critical point that
  // should carry v_p (cases H, NN) or of the pair (v_{p-1}, v_p) for ND.
  std::optional<int> designated;
  std::optional<std::pair<int, int>> nd_petals;
};

struct SpaceClassification {
  SpaceCase space_case = SpaceCase::H;
  MobiusTransform normalizer = MobiusTransform::identity();  // normalized = N o f o N^{-1}
  RationalMap normalized;
  CriticalProfile profile;  // profile of the normalized map, in chart order
  std::vector<FixedPoint> fixed_points;
  int selected_fixed_point = 0;
  std::string note;
};

std::vector<FixedPoint> fixed_points(const RationalMap& f);

SpaceClassification classify(const RationalMap& f, const ClassifyOptions& opts = {});

// Checks the normal-form conditions of the case to 1e-10. Throws CaseMismatch.
void verify_case_conditions(const RationalMap& f, const CriticalProfile& profile, SpaceCase c);

// Reorders a profile so the listed finite critical points occupy the last
// finite positions, in the given order.
CriticalProfile move_to_end_of_finite(const CriticalProfile& profile, std::span<const int> indices);

// Chart slots of a rational map: sigma, b, v_1..v_p, 1/v_{p+1}..1/v_{p'}.
std::vector<Slot> rational_slots(const CriticalProfile& profile);

// Numerator N of df/dx = N / Q^2 for the given chart slot.
ComplexPoly rational_partial_derivative(const RationalMap& f, const CriticalProfile& profile, Slot which);

struct ConjugatedSpace {
  RationalFunction map;                // M^{-1} o f o M
  std::vector<ExtPoint> points;        // M^{-1}(c_j)
  std::vector<ExtPoint> values;        // M^{-1}(v_j)
  std::vector<cd> inverse_derivative;  // (M^{-1})'(v_j), zero for infinite v_j
  int orbit_budget = 0;
  double min_orbit_distance = 0.0;     // chordal distance from M(inf) over the budget
};

// Conversion factor (M^{-1})'(v_j) / (M^{-1})'(v_k) between L and L^M.
cd conversion_factor(const ConjugatedSpace& s, int j, int k);

ConjugatedSpace mobius_conjugated_space(const RationalMap& f, const CriticalProfile& profile,
                                        const MobiusTransform& M, int orbit_budget = 200,
                                        double collision_tol = 1e-6);

// M(z) = alpha z / (alpha - z) with alpha from a golden-angle spiral, the
// first whose M(inf) = -alpha stays at chordal distance >= min_distance from
// the critical orbits over the budget.
MobiusTransform choose_probe_mobius(const RationalMap& f, const CriticalProfile& profile,
                                    double min_distance = 0.1, int orbit_budget = 200);

struct RatChartSolution {
  RationalMap map;
  std::vector<cd> critical_points;  // in the order of the base profile
  NewtonResult newton;
};

// Inverts the chart (sigma, b, v_1..v_p, 1/v_{p+1}..1/v_{p'}) near (f0,
// profile0). `target` follows rational_slots order.
RatChartSolution solve_rational_chart(const RationalMap& f0, const CriticalProfile& profile0,
                                      std::span<const cd> target, double tol = 1e-11);

// Chart coordinates of the base map in rational_slots order.
std::vector<cd> rational_chart_coordinates(const RationalMap& f, const CriticalProfile& profile);

// Composition p(k z + e).
ComplexPoly compose_affine(const ComplexPoly& p, cd k, cd e);

}  // namespace tlab
