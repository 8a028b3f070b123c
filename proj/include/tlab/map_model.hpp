#pragma once

#include <optional>
#include <span>
#include <vector>

#include "tlab/complex_poly.hpp"
#include "tlab/poly_space.hpp"
#include "tlab/rat_space.hpp"
#include "tlab/slot.hpp"

namespace tlab {

// Common analysis view of a polynomial or a rational map: f = num/den with
// den monic (den = 1 for polynomials), f' = W/den^2 and, for every chart
// slot x, df/dx = N_x/den^2. The critical profile order is frozen at
// construction and defines the chart order.
class DynamicMap {
public:
  static DynamicMap polynomial(const PolyMap& f);
  static DynamicMap polynomial(const PolyMap& f, const CriticalProfile& profile);
  static DynamicMap rational(const RationalMap& f);
  static DynamicMap rational(const RationalMap& f, const CriticalProfile& profile);

  bool is_rational() const { return rational_.has_value(); }
  const PolyMap& poly_map() const;
  const RationalMap& rational_map() const;

  int degree() const { return degree_; }
  bool is_real() const;
  const ComplexPoly& num() const { return num_; }
  const ComplexPoly& den() const { return den_; }
  const ComplexPoly& wronskian() const { return wr_; }
  const CriticalProfile& profile() const { return profile_; }
  cd sigma() const;  // rational maps only
  cd b() const;      // rational maps only

  const std::vector<Slot>& slots() const { return slots_; }
  // Index of a slot in slots(); throws InvalidInput when absent.
  std::size_t slot_index(Slot s) const;
  const ComplexPoly& tangent_numerator(std::size_t slot) const { return tangents_[slot]; }

  bool near_pole(cd z) const;
  cd operator()(cd z) const { return num_(z) / den_(z); }
  cd derivative(cd z) const;
  cd second_derivative(cd z) const;
  ExtPoint apply(ExtPoint z) const;

  // df/dx at z.
  cd tangent(std::size_t slot, cd z) const;
  // (df/dx)/f' = N_x / W, finite at simple poles.
  cd tangent_ratio(std::size_t slot, cd z) const;
  // d/dz of df/dx.
  cd tangent_derivative(std::size_t slot, cd z) const;

  // |f'(z)| (1+|z|^2) / (1+|f(z)|^2), finite at poles.
  double spherical_derivative(cd z) const;
  // Spherical derivative at infinity: 1/|sigma| (rational), 0 (polynomial).
  double spherical_derivative_at_infinity() const;
  // Escape radius 1 + max(2, sum |a_i|) for polynomials.
  double escape_radius() const;

  // The d solutions of f(w) = x. Throws CriticalValueCollision when x lies
  // within tol of a finite critical value.
  std::vector<cd> preimages(cd x, double tol = 1e-10) const;

  // Chart coordinates in slots() order.
  std::vector<cd> chart_coordinates() const;

  struct ChartPoint {
    ComplexPoly num, den;
    std::vector<cd> critical_points;  // in profile order
    cd operator()(cd z) const { return num(z) / den(z); }
    cd derivative(cd z) const;
  };
  // The map with chart coordinates chart_coordinates() + delta.
  ChartPoint chart_point(std::span<const cd> delta) const;

private:
  DynamicMap() = default;
  void finish();

  std::optional<PolyMap> poly_;
  std::optional<RationalMap> rational_;
  int degree_ = 0;
  ComplexPoly num_, den_, wr_, dwr_, dden_;
  CriticalProfile profile_;
  std::vector<Slot> slots_;
  std::vector<ComplexPoly> tangents_;
  std::vector<ComplexPoly> dtangents_;
};

}  // namespace tlab
