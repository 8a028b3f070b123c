#include "tlab/map_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tlab/error.hpp"
#include "tlab/roots.hpp"

namespace tlab {

DynamicMap DynamicMap::polynomial(const PolyMap& f) { return polynomial(f, critical_profile(f)); }

DynamicMap DynamicMap::polynomial(const PolyMap& f, const CriticalProfile& profile) {
  DynamicMap m;
  m.poly_ = f;
  m.degree_ = f.degree();
  m.num_ = f.poly();
  m.den_ = ComplexPoly::constant(1.0);
  m.wr_ = f.poly().derivative();
  m.profile_ = profile;
  for (std::size_t k = 0; k < profile.size(); ++k) {
    m.slots_.push_back(Slot::value(static_cast<int>(k)));
    m.tangents_.push_back(partial_derivative_poly(f, profile, static_cast<int>(k)).poly);
  }
  m.finish();
  return m;
}

DynamicMap DynamicMap::rational(const RationalMap& f) { return rational(f, rational_critical_profile(f)); }

DynamicMap DynamicMap::rational(const RationalMap& f, const CriticalProfile& profile) {
  require(profile.total_multiplicity() == 2 * f.degree() - 2, "profile does not belong to this map");
  DynamicMap m;
  m.rational_ = f;
  m.degree_ = f.degree();
  m.num_ = f.numerator();
  m.den_ = f.Q();
  m.wr_ = f.wronskian();
  m.profile_ = profile;
  m.slots_ = rational_slots(profile);
  for (const Slot& s : m.slots_) m.tangents_.push_back(rational_partial_derivative(f, profile, s));
  m.finish();
  return m;
}

void DynamicMap::finish() {
  dwr_ = wr_.derivative();
  dden_ = den_.derivative();
  for (const auto& t : tangents_) dtangents_.push_back(t.derivative());
}

const PolyMap& DynamicMap::poly_map() const {
  require(poly_.has_value(), "not a polynomial map");
  return *poly_;
}

const RationalMap& DynamicMap::rational_map() const {
  require(rational_.has_value(), "not a rational map");
  return *rational_;
}

bool DynamicMap::is_real() const { return poly_ && poly_->is_real(); }

cd DynamicMap::sigma() const { return rational_map().sigma(); }
cd DynamicMap::b() const { return rational_map().b(); }

std::size_t DynamicMap::slot_index(Slot s) const {
  for (std::size_t i = 0; i < slots_.size(); ++i)
    if (slots_[i] == s) return i;
  fail(ErrorKind::InvalidInput, "coordinate slot " + s.label() + " does not exist for this map");
}

bool DynamicMap::near_pole(cd z) const { return rational_ && rational_->near_pole(z); }

cd DynamicMap::derivative(cd z) const {
  const cd q = den_(z);
  return wr_(z) / (q * q);
}

cd DynamicMap::second_derivative(cd z) const {
  const cd q = den_(z);
  return (dwr_(z) * q - 2.0 * wr_(z) * dden_(z)) / (q * q * q);
}

ExtPoint DynamicMap::apply(ExtPoint z) const {
  if (z.inf) return ExtPoint::infinity();
  if (near_pole(z.z)) return ExtPoint::infinity();
  return {(*this)(z.z), false};
}

cd DynamicMap::tangent(std::size_t slot, cd z) const {
  const cd q = den_(z);
  return tangents_.at(slot)(z) / (q * q);
}

cd DynamicMap::tangent_ratio(std::size_t slot, cd z) const { return tangents_.at(slot)(z) / wr_(z); }

cd DynamicMap::tangent_derivative(std::size_t slot, cd z) const {
  const cd q = den_(z);
  return (dtangents_.at(slot)(z) * q - 2.0 * tangents_[slot](z) * dden_(z)) / (q * q * q);
}

double DynamicMap::spherical_derivative(cd z) const {
  const cd q = den_(z);
  const cd n = num_(z);
  return std::abs(wr_(z)) * (1.0 + std::norm(z)) / (std::norm(q) + std::norm(n));
}

double DynamicMap::spherical_derivative_at_infinity() const {
  return rational_ ? 1.0 / std::abs(rational_->sigma()) : 0.0;
}

double DynamicMap::escape_radius() const {
  if (!poly_) return std::numeric_limits<double>::infinity();
  double s = 0.0;
  for (cd a : poly_->coeffs()) s += std::abs(a);
  return 1.0 + std::max(2.0, s);
}

std::vector<cd> DynamicMap::preimages(cd x, double tol) const {
  require(tol > 0.0, "preimage tolerance must be positive");
  for (std::size_t j = 0; j < profile_.size(); ++j)
    if (!profile_.value_infinite[j] && std::abs(profile_.values[j] - x) <= tol)
      fail(ErrorKind::CriticalValueCollision, "probe point coincides with a critical value");
  const ComplexPoly g = num_ - x * den_;
  std::vector<cd> out;
  for (const auto& r : find_roots(g, 1e-10)) {
    cd w = r.center;
    // Polish on f(w) - x, which is better conditioned than the cleared form
    // when |x| is large.
    for (int it = 0; it < 3; ++it) {
      cd v, dv;
      g.eval_with_derivative(w, v, dv);
      if (dv == cd{0.0}) break;
      const cd next = w - v / dv;
      if (!(std::abs(g(next)) < std::abs(v))) break;
      w = next;
    }
    for (int m = 0; m < r.multiplicity; ++m) out.push_back(w);
  }
  return out;
}

std::vector<cd> DynamicMap::chart_coordinates() const {
  if (rational_) return rational_chart_coordinates(*rational_, profile_);
  return profile_.values;
}

cd DynamicMap::ChartPoint::derivative(cd z) const {
  const cd q = den(z);
  return (num.derivative()(z) * q - num(z) * den.derivative()(z)) / (q * q);
}

DynamicMap::ChartPoint DynamicMap::chart_point(std::span<const cd> delta) const {
  std::vector<cd> target = chart_coordinates();
  require(delta.size() == target.size(), "chart displacement has the wrong length");
  for (std::size_t i = 0; i < target.size(); ++i) target[i] += delta[i];
  if (rational_) {
    auto sol = solve_rational_chart(*rational_, profile_, target);
    return {sol.map.numerator(), sol.map.Q(), sol.critical_points};
  }
  auto sol = solve_poly_chart(*poly_, profile_, target);
  return {sol.map.poly(), ComplexPoly::constant(1.0), sol.critical_points};
}

}  // namespace tlab
