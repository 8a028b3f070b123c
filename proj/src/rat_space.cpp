#include "tlab/rat_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "tlab/error.hpp"
#include "tlab/hermite.hpp"
#include "tlab/roots.hpp"

namespace tlab {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kPoleRel = 1e-9;
constexpr double kConditionTol = 1e-10;

bool finite(cd z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

ComplexPoly trim_relative(const ComplexPoly& p, double rel) {
  std::vector<cd> c = p.coeffs();
  const double norm = p.coeff_norm();
  std::size_t lead = 0;
  while (lead + 1 < c.size() && std::abs(c[lead]) <= rel * norm) ++lead;
  c.erase(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(lead));
  return ComplexPoly(std::move(c));
}

ComplexPoly from_taylor_high_first(const std::vector<cd>& t, std::size_t first, std::size_t last) {
  std::vector<cd> c;
  for (std::size_t i = first; i <= last; ++i) c.push_back(t[i]);
  return ComplexPoly(std::move(c));
}

std::size_t nearest_index(const std::vector<cd>& pts, cd z) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < pts.size(); ++i)
    if (std::abs(pts[i] - z) < std::abs(pts[best] - z)) best = i;
  return best;
}

cd second_derivative(const RationalMap& f, cd z) {
  const ComplexPoly& W = f.wronskian();
  const ComplexPoly& Q = f.Q();
  const cd q = Q(z);
  return (W.derivative()(z) * q - 2.0 * W(z) * Q.derivative()(z)) / (q * q * q);
}

// Conjugates f by z -> 1/(z - a), which moves the finite fixed point a to
// infinity. Works on Taylor coefficients at a so the degree drop is exact.
RationalMap move_fixed_point_to_infinity(const RationalMap& f, cd a) {
  const std::size_t d = static_cast<std::size_t>(f.degree());
  const ComplexPoly G = f.numerator() - a * f.Q();
  std::vector<cd> g = G.taylor(a, d);
  g[0] = 0.0;  // a is fixed
  std::vector<cd> h = f.Q().taylor(a, d);
  // f1(w) = D(w) / N(w) with N = sum_{i>=1} g_i w^{d-i}, D = sum_i h_i w^{d-i}.
  const ComplexPoly N = from_taylor_high_first(g, 1, d);
  const ComplexPoly D = from_taylor_high_first(h, 0, d);
  return to_lambda_form(D, N);
}

RationalMap affine_conjugate(const RationalMap& f, cd k, cd e) {
  // g(z) = (f(kz + e) - e) / k
  const int d = f.degree();
  const cd kd1 = ipow(k, static_cast<std::size_t>(d - 1));
  const ComplexPoly Q = (1.0 / kd1) * compose_affine(f.Q(), k, e);
  const ComplexPoly P = (1.0 / (kd1 * k)) * compose_affine(f.P(), k, e);
  const cd b = (f.sigma() * e + f.b() - e) / k;
  return RationalMap(f.sigma(), b, P, Q);
}

}  // namespace

double chordal_distance(ExtPoint a, ExtPoint b) {
  if (a.inf && b.inf) return 0.0;
  if (a.inf) std::swap(a, b);
  if (b.inf) return 2.0 / std::sqrt(1.0 + std::norm(a.z));
  return 2.0 * std::abs(a.z - b.z) / std::sqrt((1.0 + std::norm(a.z)) * (1.0 + std::norm(b.z)));
}

RationalMap::RationalMap(cd sigma, cd b, ComplexPoly P, ComplexPoly Q)
    : sigma_(sigma), b_(b), P_(std::move(P)), Q_(std::move(Q)) {
  require(finite(sigma_) && sigma_ != cd{0.0}, "sigma must be finite and nonzero");
  require(finite(b_), "b must be finite");
  require(!Q_.is_zero() && Q_.degree() >= 1, "Q must have degree d-1 >= 1");
  for (cd c : Q_.coeffs()) require(finite(c), "Q coefficients must be finite");
  for (cd c : P_.coeffs()) require(finite(c), "P coefficients must be finite");
  if (Q_.leading() != cd{1.0}) {
    const cd lead = Q_.leading();
    Q_ = (1.0 / lead) * Q_;
    P_ = (1.0 / lead) * P_;
  }
  require(!P_.is_zero(), "P must be nonzero (otherwise the degree drops)");
  require(P_.degree() + 1 <= Q_.degree(), "deg P must be at most d-2");
  num_ = ComplexPoly({sigma_, b_}) * Q_ + P_;
  wr_ = num_.derivative() * Q_ - num_ * Q_.derivative();
  for (const auto& r : find_roots(Q_, 1e-10)) {
    poles_.push_back(r.center);
    const double scale = P_.scale_at(r.center);
    require(std::abs(P_(r.center)) > 1e-10 * scale, "P and Q share a root");
  }
}

bool RationalMap::near_pole(cd z) const {
  for (cd r : poles_)
    if (std::abs(z - r) <= kPoleRel * (1.0 + std::abs(r))) return true;
  return Q_(z) == cd{0.0};
}

cd RationalMap::derivative(cd z) const {
  const cd q = Q_(z);
  return wr_(z) / (q * q);
}

ExtPoint RationalMap::apply(ExtPoint z) const {
  if (z.inf || near_pole(z.z)) return ExtPoint::infinity();
  return {(*this)(z.z), false};
}

RationalMap to_lambda_form(const ComplexPoly& num, const ComplexPoly& den) {
  require(!den.is_zero(), "zero denominator");
  require(num.degree() == den.degree() + 1, "numerator degree must exceed the denominator degree by one");
  const cd lead = den.leading();
  const ComplexPoly n = (1.0 / lead) * num;
  const ComplexPoly m = (1.0 / lead) * den;
  ComplexPoly rem;
  const ComplexPoly q = n.divide(m, rem);
  return RationalMap(q.coeff(1), q.coeff(0), rem, m);
}

MobiusTransform::MobiusTransform(cd a, cd b, cd c, cd d) : a_(a), b_(b), c_(c), d_(d) {
  require(finite(a) && finite(b) && finite(c) && finite(d), "Mobius entries must be finite");
  const cd det = a * d - b * c;
  require(std::abs(det) > 1e-14 * (std::abs(a * d) + std::abs(b * c)), "Mobius transform must satisfy ad - bc != 0");
}

ExtPoint MobiusTransform::apply(ExtPoint z) const {
  if (z.inf) {
    if (c_ == cd{0.0}) return ExtPoint::infinity();
    return {a_ / c_, false};
  }
  const cd den = c_ * z.z + d_;
  if (den == cd{0.0}) return ExtPoint::infinity();
  return {(a_ * z.z + b_) / den, false};
}

cd MobiusTransform::derivative(cd z) const {
  const cd den = c_ * z + d_;
  return (a_ * d_ - b_ * c_) / (den * den);
}

MobiusTransform MobiusTransform::inverse() const { return {d_, -b_, -c_, a_}; }

MobiusTransform MobiusTransform::compose(const MobiusTransform& o) const {
  return {a_ * o.a_ + b_ * o.c_, a_ * o.b_ + b_ * o.d_, c_ * o.a_ + d_ * o.c_, c_ * o.b_ + d_ * o.d_};
}

int RationalFunction::degree() const { return static_cast<int>(std::max(num.degree(), den.degree())); }

ExtPoint RationalFunction::apply(ExtPoint z) const {
  if (z.inf) {
    if (num.degree() > den.degree()) return ExtPoint::infinity();
    if (num.degree() == den.degree()) return {num.leading() / den.leading(), false};
    return {0.0, false};
  }
  const cd q = den(z.z);
  if (std::abs(q) <= 16.0 * kEps * den.scale_at(z.z)) return ExtPoint::infinity();
  return {num(z.z) / q, false};
}

RationalFunction as_function(const RationalMap& f) { return {f.numerator(), f.Q()}; }

RationalFunction conjugate(const RationalFunction& f, const MobiusTransform& M) {
  const std::size_t n = static_cast<std::size_t>(f.degree());
  const ComplexPoly X({M.a(), M.b()});
  const ComplexPoly Y({M.c(), M.d()});
  std::vector<ComplexPoly> xp{ComplexPoly::constant(1.0)}, yp{ComplexPoly::constant(1.0)};
  for (std::size_t i = 1; i <= n; ++i) {
    xp.push_back(xp.back() * X);
    yp.push_back(yp.back() * Y);
  }
  ComplexPoly N1, D1;
  for (std::size_t i = 0; i <= n; ++i) {
    const ComplexPoly mono = xp[i] * yp[n - i];
    N1 = N1 + f.num.coeff(i) * mono;
    D1 = D1 + f.den.coeff(i) * mono;
  }
  // M^{-1}(w) = (d w - b) / (-c w + a) applied to w = N1 / D1.
  const ComplexPoly num = M.d() * N1 - M.b() * D1;
  const ComplexPoly den = M.a() * D1 - M.c() * N1;
  return {trim_relative(num, 1e-14), trim_relative(den, 1e-14)};
}

CriticalProfile rational_critical_profile(const RationalMap& f) {
  const auto clusters = find_roots(f.wronskian(), 1e-10);
  CriticalProfile finite_part, infinite_part;
  for (const auto& c : clusters) {
    bool at_pole = false;
    cd point = c.center;
    for (cd r : f.poles()) {
      if (std::abs(c.center - r) <= 1e-6 * (1.0 + std::abs(r))) {
        at_pole = true;
        point = r;
      }
    }
    CriticalProfile& dst = at_pole ? infinite_part : finite_part;
    dst.points.push_back(point);
    dst.multiplicities.push_back(c.multiplicity);
    dst.values.push_back(at_pole ? cd{0.0} : f(point));
    dst.value_infinite.push_back(at_pole);
  }
  CriticalProfile out = finite_part;
  for (std::size_t i = 0; i < infinite_part.size(); ++i) {
    out.points.push_back(infinite_part.points[i]);
    out.multiplicities.push_back(infinite_part.multiplicities[i]);
    out.values.push_back(infinite_part.values[i]);
    out.value_infinite.push_back(true);
  }
  if (out.total_multiplicity() != 2 * f.degree() - 2)
    fail(ErrorKind::NonConvergence, "critical multiplicities do not sum to 2d-2");
  return out;
}

std::string to_string(SpaceCase c) {
  switch (c) {
    case SpaceCase::H: return "H";
    case SpaceCase::NN: return "NN";
    case SpaceCase::ND: return "ND";
  }
  return "?";
}

std::optional<SpaceCase> parse_space_case(const std::string& s) {
  if (s == "H") return SpaceCase::H;
  if (s == "NN") return SpaceCase::NN;
  if (s == "ND") return SpaceCase::ND;
  return std::nullopt;
}

std::vector<FixedPoint> fixed_points(const RationalMap& f) {
  std::vector<FixedPoint> out;
  ComplexPoly E = f.numerator() - ComplexPoly({1.0, 0.0}) * f.Q();
  if (std::abs(E.leading()) <= 1e-13 * (1.0 + std::abs(f.sigma())) && E.degree() > 0) {
    std::vector<cd> c = E.coeffs();
    c.front() = 0.0;
    E = ComplexPoly(std::move(c));
  }
  if (E.degree() >= 1 && !E.is_zero()) {
    for (const auto& r : find_roots(E, 1e-10)) out.push_back({{r.center, false}, f.derivative(r.center)});
  }
  out.push_back({ExtPoint::infinity(), 1.0 / f.sigma()});
  return out;
}

CriticalProfile move_to_end_of_finite(const CriticalProfile& profile, std::span<const int> indices) {
  const std::size_t p = profile.finite_count();
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < p; ++i)
    if (std::find(indices.begin(), indices.end(), static_cast<int>(i)) == indices.end()) order.push_back(i);
  for (int i : indices) {
    require(i >= 0 && static_cast<std::size_t>(i) < p, "designated critical point must have a finite value");
    order.push_back(static_cast<std::size_t>(i));
  }
  for (std::size_t i = p; i < profile.size(); ++i) order.push_back(i);
  CriticalProfile out;
  for (std::size_t i : order) {
    out.points.push_back(profile.points[i]);
    out.multiplicities.push_back(profile.multiplicities[i]);
    out.values.push_back(profile.values[i]);
    out.value_infinite.push_back(profile.value_infinite[i]);
  }
  return out;
}

void verify_case_conditions(const RationalMap& f, const CriticalProfile& profile, SpaceCase c) {
  const std::size_t p = profile.finite_count();
  auto near = [](cd a, cd b) { return std::abs(a - b) <= kConditionTol; };
  auto mismatch = [&](const std::string& what) {
    fail(ErrorKind::CaseMismatch, "map does not satisfy the case " + to_string(c) + " normal form: " + what);
  };
  switch (c) {
    case SpaceCase::H:
      if (std::abs(f.sigma() - 1.0) <= 1e-8) mismatch("sigma = 1");
      if (!near(f.b(), 0.0)) mismatch("b != 0");
      if (p < 1 || !near(profile.values[p - 1], 1.0)) mismatch("v_p != 1");
      break;
    case SpaceCase::NN:
      if (!near(f.sigma(), 1.0)) mismatch("sigma != 1");
      if (!near(f.b(), 1.0)) mismatch("b != 1");
      if (p < 1 || !near(profile.values[p - 1], 1.0)) mismatch("v_p != 1");
      break;
    case SpaceCase::ND:
      if (!near(f.sigma(), 1.0)) mismatch("sigma != 1");
      if (!near(f.b(), 0.0)) mismatch("b != 0");
      if (p < 2 || !near(profile.values[p - 2], 1.0) || !near(profile.values[p - 1], 0.0))
        mismatch("(v_{p-1}, v_p) != (1, 0)");
      break;
  }
}

SpaceClassification classify(const RationalMap& f, const ClassifyOptions& opts) {
  const auto fps = fixed_points(f);
  enum class Kind { Zero, One, Other };
  std::vector<Kind> kinds;
  bool ambiguous = false;
  for (const auto& fp : fps) {
    const double dist1 = std::abs(fp.multiplier - 1.0);
    if (dist1 <= opts.exact_tol) {
      kinds.push_back(Kind::One);
    } else if (dist1 <= opts.parabolic_tol) {
      ambiguous = true;
      const bool treat_as_one = opts.asserted_case && *opts.asserted_case != SpaceCase::H;
      kinds.push_back(treat_as_one ? Kind::One : Kind::Other);
    } else if (std::abs(fp.multiplier) <= opts.parabolic_tol) {
      kinds.push_back(Kind::Zero);
    } else {
      kinds.push_back(Kind::Other);
    }
  }
  if (ambiguous && !opts.asserted_case)
    fail(ErrorKind::AmbiguousClassification,
         "a fixed-point multiplier lies within the parabolic tolerance of 1 but is not resolvable; assert a case");

  const std::size_t inf_index = fps.size() - 1;
  std::optional<std::size_t> chosen;
  SpaceCase detected = SpaceCase::H;
  std::string note;
  // Case H: prefer infinity, else the largest multiplier modulus.
  if (kinds[inf_index] == Kind::Other) {
    chosen = inf_index;
    note = "case H at the fixed point infinity";
  } else {
    for (std::size_t i = 0; i < inf_index; ++i) {
      if (kinds[i] != Kind::Other) continue;
      if (!chosen || std::abs(fps[i].multiplier) > std::abs(fps[*chosen].multiplier) * (1.0 + 1e-12)) chosen = i;
    }
    if (chosen) note = "case H at the finite fixed point of largest multiplier modulus";
  }
  if (!chosen) {
    auto nondegenerate = [&](std::size_t i) {
      if (fps[i].point.inf) return std::abs(f.b()) > kConditionTol;
      return std::abs(second_derivative(f, fps[i].point.z)) > 1e-8;
    };
    if (kinds[inf_index] == Kind::One && nondegenerate(inf_index)) chosen = inf_index;
    for (std::size_t i = 0; i < inf_index && !chosen; ++i)
      if (kinds[i] == Kind::One && nondegenerate(i)) chosen = i;
    if (chosen) {
      detected = SpaceCase::NN;
      note = "nondegenerate parabolic fixed point";
    }
  }
  if (!chosen) {
    if (kinds[inf_index] == Kind::One) chosen = inf_index;
    for (std::size_t i = 0; i < inf_index && !chosen; ++i)
      if (kinds[i] == Kind::One) chosen = i;
    if (chosen) {
      detected = SpaceCase::ND;
      note = "degenerate parabolic fixed point";
    }
  }
  if (!chosen) fail(ErrorKind::AmbiguousClassification, "no fixed point qualifies for cases H, NN or ND");
  if (opts.asserted_case && *opts.asserted_case != detected)
    fail(ErrorKind::CaseMismatch, "asserted case " + to_string(*opts.asserted_case) + " but the map is in case " +
                                      to_string(detected));

  // Step 1: move the selected fixed point to infinity.
  const FixedPoint& fp = fps[*chosen];
  MobiusTransform P1 = MobiusTransform::identity();
  RationalMap g1 = f;
  if (!fp.point.inf) {
    P1 = MobiusTransform(0.0, 1.0, 1.0, -fp.point.z);
    g1 = move_fixed_point_to_infinity(f, fp.point.z);
  }
  const CriticalProfile prof_f = rational_critical_profile(f);
  const CriticalProfile prof1 = rational_critical_profile(g1);
  auto to_g1_index = [&](int i) {
    require(i >= 0 && static_cast<std::size_t>(i) < prof_f.size(), "designated critical index out of range");
    const ExtPoint c1 = P1({prof_f.points[static_cast<std::size_t>(i)], false});
    require(!c1.inf, "designated critical point is the selected fixed point");
    const std::size_t j = nearest_index(prof1.points, c1.z);
    require(!prof1.value_infinite[j], "designated critical point must have a finite value after normalization");
    return j;
  };
  const std::size_t p1 = prof1.finite_count();

  // Step 2: the affine normalization A(z) = k z + e.
  cd k = 1.0, e = 0.0;
  std::vector<std::size_t> designated;
  if (detected == SpaceCase::ND) {
    std::size_t one = 0, zero = 0;
    if (opts.nd_petals) {
      one = to_g1_index(opts.nd_petals->first);
      zero = to_g1_index(opts.nd_petals->second);
    } else {
      bool found = false;
      for (std::size_t b = p1; b-- > 1 && !found;)
        for (std::size_t a = b; a-- > 0 && !found;)
          if (std::abs(prof1.values[a] - prof1.values[b]) > 1e-8 * (1.0 + std::abs(prof1.values[b]))) {
            one = a;
            zero = b;
            found = true;
          }
      if (!found) fail(ErrorKind::CaseMismatch, "case ND needs two distinct finite critical values");
    }
    e = prof1.values[zero];
    k = prof1.values[one] - e;
    require(std::abs(k) > 1e-12, "the designated petal values coincide");
    designated = {one, zero};
  } else {
    if (detected == SpaceCase::H) e = -g1.b() / (g1.sigma() - 1.0);
    std::optional<std::size_t> vp;
    if (opts.designated) {
      vp = to_g1_index(*opts.designated);
    } else {
      for (std::size_t i = p1; i-- > 0 && !vp;) {
        const cd v = prof1.values[i];
        const bool ok = detected == SpaceCase::NN || std::abs(v - e) > 1e-8 * (1.0 + std::abs(v));
        if (ok) vp = i;
      }
    }
    if (!vp) fail(ErrorKind::CaseMismatch, "no finite critical value can be normalized to 1");
    if (detected == SpaceCase::NN) {
      k = g1.b();
      e = prof1.values[*vp] - k;
    } else {
      k = prof1.values[*vp] - e;
      require(std::abs(k) > 1e-12, "designated critical value sits at the normalization center");
    }
    designated = {*vp};
  }
  RationalMap g = affine_conjugate(g1, k, e);
  // The normal-form constants are exact; remove rounding residue.
  const cd sigma = detected == SpaceCase::H ? g.sigma() : cd{1.0};
  const cd b = detected == SpaceCase::NN ? cd{1.0} : cd{0.0};
  if (std::abs(g.sigma() - sigma) > 1e-8 || std::abs(g.b() - b) > 1e-8)
    fail(ErrorKind::NonConvergence, "normalization did not reach the normal form");
  g = RationalMap(sigma, b, g.P(), g.Q());

  const MobiusTransform Ainv(1.0, -e, 0.0, k);
  const MobiusTransform N = Ainv.compose(P1);
  const CriticalProfile prof_g = rational_critical_profile(g);
  std::vector<int> order;
  for (std::size_t i : designated) {
    const cd c = (prof1.points[i] - e) / k;
    order.push_back(static_cast<int>(nearest_index(prof_g.points, c)));
  }
  CriticalProfile profile = move_to_end_of_finite(prof_g, order);
  verify_case_conditions(g, profile, detected);
  return SpaceClassification{detected, N, g, profile, fps, static_cast<int>(*chosen), note};
}

std::vector<Slot> rational_slots(const CriticalProfile& profile) {
  std::vector<Slot> out{Slot::sigma(), Slot::b()};
  for (std::size_t i = 0; i < profile.size(); ++i)
    out.push_back(profile.value_infinite[i] ? Slot::reciprocal(static_cast<int>(i)) : Slot::value(static_cast<int>(i)));
  return out;
}

ComplexPoly rational_partial_derivative(const RationalMap& f, const CriticalProfile& profile, Slot which) {
  const cd inv_sigma = 1.0 / f.sigma();
  switch (which.kind) {
    case SlotKind::Sigma: return inv_sigma * (ComplexPoly({1.0, 0.0}) * f.wronskian());
    case SlotKind::B: return inv_sigma * f.wronskian();
    case SlotKind::Value:
    case SlotKind::Reciprocal: break;
  }
  const std::size_t k = static_cast<std::size_t>(which.index);
  require(k < profile.size(), "critical index out of range");
  const bool reciprocal = which.kind == SlotKind::Reciprocal;
  require(profile.value_infinite[k] == reciprocal,
          reciprocal ? "reciprocal slot needs an infinite critical value" : "value slot needs a finite critical value");
  std::vector<std::vector<cd>> targets(profile.size());
  for (std::size_t j = 0; j < profile.size(); ++j) {
    const std::size_t m = static_cast<std::size_t>(profile.multiplicities[j]);
    targets[j].assign(m, cd{0.0});
    if (j != k) continue;
    if (reciprocal) {
      // -P^x / num^2 equals 1 to order m_k at the pole c_k.
      const auto t = (f.numerator() * f.numerator()).taylor(profile.points[j], m);
      for (std::size_t i = 0; i < m; ++i) targets[j][i] = -t[i];
    } else {
      const auto t = (f.Q() * f.Q()).taylor(profile.points[j], m);
      for (std::size_t i = 0; i < m; ++i) targets[j][i] = t[i];
    }
  }
  return hermite_interpolate(profile.points, profile.multiplicities, targets,
                             static_cast<std::size_t>(2 * f.degree() - 2));
}

cd conversion_factor(const ConjugatedSpace& s, int j, int k) {
  return s.inverse_derivative[static_cast<std::size_t>(j)] / s.inverse_derivative[static_cast<std::size_t>(k)];
}

namespace {

// Minimal chordal distance from target to the critical orbits (values and
// their forward images) over the budget.
double orbit_distance(const RationalMap& f, const CriticalProfile& profile, ExtPoint target, int budget) {
  double best = 2.0;
  for (std::size_t j = 0; j < profile.size(); ++j) {
    ExtPoint x = profile.value_infinite[j] ? ExtPoint::infinity() : ExtPoint{profile.values[j], false};
    for (int n = 0; n <= budget; ++n) {
      best = std::min(best, chordal_distance(x, target));
      if (x.inf) break;  // infinity is fixed
      x = f.apply(x);
    }
  }
  return best;
}

}  // namespace

ConjugatedSpace mobius_conjugated_space(const RationalMap& f, const CriticalProfile& profile,
                                        const MobiusTransform& M, int orbit_budget, double collision_tol) {
  require(orbit_budget >= 0, "orbit budget must be nonnegative");
  ConjugatedSpace out;
  out.map = conjugate(as_function(f), M);
  out.orbit_budget = orbit_budget;
  const ExtPoint m_inf = M.apply(ExtPoint::infinity());
  if (m_inf.inf) {
    out.min_orbit_distance = 2.0;  // infinity is already the normalized fixed point
  } else {
    out.min_orbit_distance = orbit_distance(f, profile, m_inf, orbit_budget);
    if (out.min_orbit_distance <= collision_tol)
      fail(ErrorKind::OrbitCollision, "M(infinity) lies on a forward critical orbit");
  }
  const MobiusTransform Minv = M.inverse();
  for (std::size_t j = 0; j < profile.size(); ++j) {
    out.points.push_back(Minv({profile.points[j], false}));
    if (profile.value_infinite[j]) {
      out.values.push_back(Minv.apply(ExtPoint::infinity()));
      out.inverse_derivative.push_back(0.0);
    } else {
      out.values.push_back(Minv({profile.values[j], false}));
      out.inverse_derivative.push_back(Minv.derivative(profile.values[j]));
    }
  }
  return out;
}

MobiusTransform choose_probe_mobius(const RationalMap& f, const CriticalProfile& profile, double min_distance,
                                    int orbit_budget) {
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  std::optional<MobiusTransform> best;
  double best_distance = 0.0;
  for (int i = 1; i <= 64; ++i) {
    const double frac = std::fmod(static_cast<double>(i) * std::numbers::sqrt2, 1.0);
    const cd alpha = std::polar(0.5 + 2.5 * frac, golden * static_cast<double>(i));
    const MobiusTransform M(alpha, 0.0, -1.0, alpha);
    double dist = orbit_distance(f, profile, {-alpha, false}, orbit_budget);
    for (cd c : profile.points) dist = std::min(dist, chordal_distance({c, false}, {-alpha, false}));
    if (dist >= min_distance) return M;
    if (dist > best_distance) {
      best_distance = dist;
      best = M;
    }
  }
  if (!best || best_distance <= 1e-6)
    fail(ErrorKind::OrbitCollision, "no probe Mobius map avoids the critical orbits");
  return *best;
}

std::vector<cd> rational_chart_coordinates(const RationalMap& f, const CriticalProfile& profile) {
  std::vector<cd> out{f.sigma(), f.b()};
  for (std::size_t j = 0; j < profile.size(); ++j) out.push_back(profile.value_infinite[j] ? cd{0.0} : profile.values[j]);
  return out;
}

RatChartSolution solve_rational_chart(const RationalMap& f0, const CriticalProfile& profile0,
                                      std::span<const cd> target, double tol) {
  const std::size_t pp = profile0.size();
  require(target.size() == pp + 2, "target must follow the chart slot order");
  const std::size_t d = static_cast<std::size_t>(f0.degree());
  const std::size_t np = d - 1, nq = d - 1;
  const std::size_t n = 2 + np + nq + pp;

  VecC x0(static_cast<Eigen::Index>(n));
  x0(0) = f0.sigma();
  x0(1) = f0.b();
  for (std::size_t i = 0; i < np; ++i) x0(static_cast<Eigen::Index>(2 + i)) = f0.P().coeff(np - 1 - i);
  for (std::size_t i = 0; i < nq; ++i) x0(static_cast<Eigen::Index>(2 + np + i)) = f0.Q().coeff(nq - 1 - i);
  for (std::size_t j = 0; j < pp; ++j) x0(static_cast<Eigen::Index>(2 + np + nq + j)) = profile0.points[j];

  struct Parts {
    ComplexPoly num, Q, W;
  };
  auto unpack = [&](const VecC& x) {
    std::vector<cd> pc(np), qc(nq + 1);
    for (std::size_t i = 0; i < np; ++i) pc[i] = x(static_cast<Eigen::Index>(2 + i));
    qc[0] = 1.0;
    for (std::size_t i = 0; i < nq; ++i) qc[i + 1] = x(static_cast<Eigen::Index>(2 + np + i));
    const ComplexPoly P(pc), Q(qc);
    const ComplexPoly num = ComplexPoly({x(0), x(1)}) * Q + P;
    return Parts{num, Q, num.derivative() * Q - num * Q.derivative()};
  };

  ResidualFn F = [&](const VecC& x) {
    const Parts s = unpack(x);
    VecC r(static_cast<Eigen::Index>(n));
    r(0) = x(0) - target[0];
    r(1) = x(1) - target[1];
    Eigen::Index row = 2;
    for (std::size_t j = 0; j < pp; ++j) {
      const cd c = x(static_cast<Eigen::Index>(2 + np + nq + j));
      const std::size_t m = static_cast<std::size_t>(profile0.multiplicities[j]);
      const auto t = s.W.taylor(c, m - 1);
      for (std::size_t i = 0; i < m; ++i) r(row++) = t[i];
      if (profile0.value_infinite[j])
        r(row++) = s.Q(c) - target[2 + j] * s.num(c);
      else
        r(row++) = s.num(c) - target[2 + j] * s.Q(c);
    }
    return r;
  };

  double scale = 1.0;
  for (cd c : profile0.points) scale = std::max({scale, f0.numerator().scale_at(c), f0.wronskian().scale_at(c)});
  NewtonOptions opts;
  opts.tol = std::max(tol, 256.0 * kEps * scale);
  NewtonResult nr = newton_solve(F, nullptr, x0, opts);

  std::vector<cd> pc(np), qc(nq + 1), cps(pp);
  for (std::size_t i = 0; i < np; ++i) pc[i] = nr.x(static_cast<Eigen::Index>(2 + i));
  qc[0] = 1.0;
  for (std::size_t i = 0; i < nq; ++i) qc[i + 1] = nr.x(static_cast<Eigen::Index>(2 + np + i));
  for (std::size_t j = 0; j < pp; ++j) cps[j] = nr.x(static_cast<Eigen::Index>(2 + np + nq + j));
  for (std::size_t j = 0; j < pp; ++j)
    for (std::size_t k = j + 1; k < pp; ++k)
      if (std::abs(cps[j] - cps[k]) <= 1e-6 * (1.0 + std::abs(cps[j])))
        fail(ErrorKind::MultiplicityBroken, "critical points merged along the chart path");
  RationalMap g(nr.x(0), nr.x(1), ComplexPoly(pc), ComplexPoly(qc));
  return RatChartSolution{std::move(g), std::move(cps), std::move(nr)};
}

ComplexPoly compose_affine(const ComplexPoly& p, cd k, cd e) {
  const std::size_t n = p.degree();
  const auto t = p.taylor(e, n);
  std::vector<cd> c(n + 1);
  for (std::size_t i = 0; i <= n; ++i) c[n - i] = t[i] * ipow(k, i);
  return ComplexPoly(std::move(c));
}

}  // namespace tlab
