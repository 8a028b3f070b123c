#include "tlab/ruelle_operator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "tlab/error.hpp"

namespace tlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPolyCutoff = 1e12;  // polynomial orbit points beyond this only enter the boundary term

// Orbit of z cut at N, with the next point (f^{N+1}(z), (f^{N+1})'(z)) kept
// for the boundary term unless the orbit reached infinity exactly.
struct CutOrbit {
  std::vector<cd> points;
  std::vector<cd> derivatives;
  bool has_boundary = false;
  cd next_point, next_derivative;
  bool at_infinity = false;  // truncated at l(z)
  bool escaped = false;
};

CutOrbit cut_orbit(const DynamicMap& f, cd z, int budget) {
  OrbitOptions oo;
  if (!f.is_rational()) oo.escape_radius = kPolyCutoff;
  const OrbitTrace t = iterate_orbit(f, z, budget, oo);
  CutOrbit c;
  c.points = t.points;
  c.derivatives = t.derivatives;
  switch (t.termination) {
    case Termination::HitCritical:
      fail(ErrorKind::DivergenceDetected, "the orbit lands on a critical point, (f^n)' vanishes");
    case Termination::Escaped:
      c.escaped = true;
      c.has_boundary = true;
      c.next_point = c.points.back();
      c.next_derivative = c.derivatives.back();
      c.points.pop_back();
      c.derivatives.pop_back();
      return c;
    case Termination::HitInfinity: c.at_infinity = true; break;
    case Termination::Budget: break;
  }
  const cd last = c.points.back();
  if (!f.near_pole(last)) {
    c.has_boundary = true;
    c.next_point = f(last);
    c.next_derivative = c.derivatives.back() * f.derivative(last);
  }
  return c;
}

std::vector<int> finite_value_indices(const DynamicMap& f) {
  std::vector<int> out;
  for (std::size_t k = 0; k < f.profile().size(); ++k)
    if (!f.profile().value_infinite[k]) out.push_back(static_cast<int>(k));
  return out;
}

void check_off_orbit(const CutOrbit& c, cd x) {
  for (cd p : c.points)
    if (p == x) fail(ErrorKind::InvalidInput, "x lies on the forward orbit of z");
}

// lambda^n / ((f^n)'(z) (f^n(z) - w)) summed over the cut orbit.
cd orbit_kernel_sum(const CutOrbit& c, cd lambda, cd w) {
  cd sum = 0.0, lp = 1.0;
  for (std::size_t n = 0; n < c.points.size(); ++n) {
    if (lp == cd{0.0}) break;
    sum += lp / (c.derivatives[n] * (c.points[n] - w));
    lp *= lambda;
  }
  return sum;
}

cd boundary_term(const CutOrbit& c, cd lambda, cd x) {
  if (!c.has_boundary) return 0.0;
  const cd lp = ipow(lambda, c.points.size());
  if (lp == cd{0.0}) return 0.0;
  return lp / (c.next_derivative * (c.next_point - x));
}

// Phi_k = sum_n lambda^{n+1} (df/dv_k)(f^n z) / (f^{n+1})'(z) over the cut orbit.
cd phi_coefficient(const DynamicMap& f, const CutOrbit& c, std::size_t slot, cd lambda) {
  cd sum = 0.0, lp = lambda;
  for (std::size_t n = 0; n < c.points.size(); ++n) {
    if (lp == cd{0.0}) break;
    sum += lp * f.tangent_ratio(slot, c.points[n]) / c.derivatives[n];
    lp *= lambda;
  }
  return sum;
}

double uniform01(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

}  // namespace

cd apply_T(const DynamicMap& f, const std::function<cd(cd)>& phi, cd x, double tol) {
  cd sum = 0.0;
  for (cd w : f.preimages(x, tol)) {
    const cd q = f.den()(w);
    const cd wr = f.wronskian()(w);
    const cd q2 = q * q;
    sum += phi(w) * (q2 * q2) / (wr * wr);
  }
  return sum;
}

KernelIdentity kernel_identity(const DynamicMap& f, cd z, cd x) {
  KernelIdentity out;
  out.lhs = apply_T(f, [z](cd w) { return 1.0 / (z - w); }, x);
  // 1/(f'(z)(f(z)-x)) = den^3 / (W (num - x den)), finite at poles of f.
  const cd q = f.den()(z);
  const cd wr = f.wronskian()(z);
  const cd gap = f.num()(z) - x * q;
  require(wr != cd{0.0}, "z is a critical point");
  require(gap != cd{0.0}, "x equals f(z)");
  out.rhs = q * q * q / (wr * gap);
  for (int k : finite_value_indices(f))
    out.rhs += L_function(f, k, z) / (x - f.profile().values[static_cast<std::size_t>(k)]);
  out.residual = std::abs(out.lhs - out.rhs);
  return out;
}

LocalLCoefficients local_L_coefficients(const DynamicMap& f, int j) {
  const auto& p = f.profile();
  require(j >= 0 && static_cast<std::size_t>(j) < p.size(), "critical index out of range");
  const auto k = static_cast<std::size_t>(j);
  require(!p.value_infinite[k], "local L coefficients need a finite critical value");
  const cd c = p.points[k];
  const auto m = static_cast<std::size_t>(p.multiplicities[k]);
  const std::vector<cd> t = f.wronskian().taylor(c, 2 * m);
  const std::vector<cd> g = (f.den() * f.den()).taylor(c, m);
  // W = (w-c)^m * W~, so the Taylor coefficients of W~ are those of W shifted by m.
  std::vector<cd> wt(t.begin() + static_cast<long>(m), t.end());
  if (std::abs(wt[0]) <= 1e-13 * f.wronskian().scale_at(1.0 + std::abs(c)))
    fail(ErrorKind::SingularSystem, "deflated derivative vanishes at the critical point");
  LocalLCoefficients out;
  out.j = j;
  for (std::size_t i = 0; i < m; ++i) {
    cd s = g[i];
    for (std::size_t l = 1; l <= i; ++l) s -= wt[l] * out.q[i - l];
    out.q.push_back(s / wt[0]);
  }
  return out;
}

cd eval_local_L(const DynamicMap& f, const LocalLCoefficients& coeffs, cd z) {
  const cd h = z - f.profile().points[static_cast<std::size_t>(coeffs.j)];
  const std::size_t m = coeffs.q.size();
  cd sum = 0.0, hp = h;
  for (std::size_t i = 1; i <= m; ++i) {
    sum += coeffs.q[m - i] / hp;
    hp *= h;
  }
  return sum;
}

cd L_function(const DynamicMap& f, int k, cd z) {
  const auto& p = f.profile();
  require(k >= 0 && static_cast<std::size_t>(k) < p.size(), "critical index out of range");
  require(!p.value_infinite[static_cast<std::size_t>(k)], "L_k needs a finite critical value");
  const bool near_critical =
      std::any_of(p.points.begin(), p.points.end(), [z](cd c) { return std::abs(z - c) < 1e-4; });
  if (near_critical) return eval_local_L(f, local_L_coefficients(f, k), z);
  return f.tangent_ratio(f.slot_index(Slot::value(k)), z);
}

SeriesValue varphi_eval(const DynamicMap& f, cd z, cd lambda, cd x, int budget, double tol) {
  require(budget >= 10, "series budget must be at least 10 terms");
  const CutOrbit c = cut_orbit(f, z, budget);
  check_off_orbit(c, x);
  SeriesValue out;
  out.tol = tol;
  std::vector<double> mags;
  cd sum = 0.0, lp = 1.0;
  for (std::size_t n = 0; n < c.points.size(); ++n) {
    const cd term = lp / (c.derivatives[n] * (c.points[n] - x));
    sum += term;
    mags.push_back(std::abs(term));
    lp *= lambda;
  }
  out.value = sum;
  out.terms_used = static_cast<int>(mags.size());
  const double boundary = std::abs(boundary_term(c, lambda, x));
  if (c.at_infinity) {
    out.status = SeriesStatus::TruncatedAtInfinity;
    out.tail_bound = boundary;
    return out;
  }
  if (c.escaped) {
    // Past the cutoff the terms shrink superexponentially.
    out.status = SeriesStatus::Converged;
    out.tail_bound = 2.0 * boundary;
    return out;
  }
  const TailFit fit = fit_geometric_tail(mags);
  out.tail_bound = fit.tail;
  if (fit.geometric && fit.tail <= tol) {
    out.status = SeriesStatus::Converged;
    return out;
  }
  if (!fit.geometric && fit.ratio >= 1.0)
    fail(ErrorKind::DivergenceDetected, "|lambda| outgrows the derivative along the orbit");
  out.status = SeriesStatus::BudgetExhausted;
  return out;
}

IdentityResidual resolvent_identity_residual(const DynamicMap& f, cd z, cd lambda, cd x, int budget) {
  require(budget >= 1, "budget must be at least 1");
  const CutOrbit c = cut_orbit(f, z, budget);
  check_off_orbit(c, x);
  const cd phi_x = orbit_kernel_sum(c, lambda, x);
  const cd t_phi =
      lambda == cd{0.0} ? cd{0.0} : apply_T(f, [&](cd w) { return orbit_kernel_sum(c, lambda, w); }, x);
  cd rhs = 1.0 / (z - x);
  for (int k : finite_value_indices(f)) {
    const cd vk = f.profile().values[static_cast<std::size_t>(k)];
    rhs += phi_coefficient(f, c, f.slot_index(Slot::value(k)), lambda) / (vk - x);
  }
  const cd diff = phi_x - lambda * t_phi - rhs;
  const cd b = boundary_term(c, lambda, x);
  IdentityResidual out;
  out.residual = std::abs(diff);
  out.truncation = std::abs(b);
  out.corrected = std::abs(diff + b);
  out.terms = static_cast<int>(c.points.size());
  return out;
}

IdentityResidual fixed_point_residual(const DynamicMap& f, int j, cd x, int budget, const SeriesOptions& opts) {
  const auto& p = f.profile();
  require(j >= 0 && static_cast<std::size_t>(j) < p.size(), "critical index out of range");
  require(!p.value_infinite[static_cast<std::size_t>(j)], "fixed-point relation needs a finite critical value");
  require(budget >= 1, "budget must be at least 1");
  const CutOrbit c = cut_orbit(f, p.values[static_cast<std::size_t>(j)], budget);
  check_off_orbit(c, x);
  const cd h_x = orbit_kernel_sum(c, 1.0, x);
  const cd t_h = apply_T(f, [&](cd w) { return orbit_kernel_sum(c, 1.0, w); }, x);
  cd rhs = 0.0, tail = 0.0;
  for (int k : finite_value_indices(f)) {
    const cd vk = p.values[static_cast<std::size_t>(k)];
    const Slot s = Slot::value(k);
    const SeriesValue L = similarity_factor(f, j, s, opts);
    if (L.status == SeriesStatus::BudgetExhausted)
      fail(ErrorKind::NonConvergence, "similarity factor did not converge within the budget");
    rhs += L.value / (vk - x);
    const cd delta = k == j ? cd{1.0} : cd{0.0};
    tail += (L.value - delta - phi_coefficient(f, c, f.slot_index(s), 1.0)) / (vk - x);
  }
  const cd b = boundary_term(c, 1.0, x);
  const cd diff = h_x - t_h - rhs;
  IdentityResidual out;
  out.residual = std::abs(diff);
  out.truncation = std::abs(b + tail);
  out.corrected = std::abs(diff + b + tail);
  out.terms = static_cast<int>(c.points.size());
  return out;
}

KernelCombination KernelCombination::make(std::span<const cd> weights, std::span<const cd> poles) {
  require(weights.size() == poles.size(), "weights and poles must have the same length");
  KernelCombination h;
  for (std::size_t i = 0; i < poles.size(); ++i) {
    auto it = std::find_if(h.poles.begin(), h.poles.end(), [&](cd b) { return std::abs(b - poles[i]) <= 1e-12; });
    if (it == h.poles.end()) {
      h.poles.push_back(poles[i]);
      h.weights.push_back(weights[i]);
    } else {
      h.weights[static_cast<std::size_t>(it - h.poles.begin())] += weights[i];
    }
  }
  return h;
}

cd KernelCombination::operator()(cd x) const {
  cd sum = 0.0;
  for (std::size_t i = 0; i < poles.size(); ++i) sum += weights[i] / (poles[i] - x);
  return sum;
}

KernelCombination h_combination(const DynamicMap& f, int j, int budget) {
  const auto& p = f.profile();
  require(j >= 0 && static_cast<std::size_t>(j) < p.size(), "critical index out of range");
  require(!p.value_infinite[static_cast<std::size_t>(j)], "H_j needs a finite critical value");
  const CutOrbit c = cut_orbit(f, p.values[static_cast<std::size_t>(j)], budget);
  std::vector<cd> w;
  for (cd d : c.derivatives) w.push_back(1.0 / d);
  return KernelCombination::make(w, c.points);
}

cd RegularizedSeries::operator()(cd x) const { return base(x) + A / x + B / (x * x); }

RegularizedSeries regularize(const KernelCombination& H) {
  RegularizedSeries r;
  r.base = H;
  for (std::size_t i = 0; i < H.poles.size(); ++i) {
    r.A += H.weights[i];
    r.B += H.weights[i] * H.poles[i];
  }
  return r;
}

std::vector<AsymptoticCheck> asymptotic_diagnostic(const DynamicMap& f, std::span<const double> radii) {
  require(f.is_rational(), "the expansion at infinity applies to rational maps");
  static const double kDefault[] = {1e3, 1e4};
  if (radii.empty()) radii = kDefault;
  const cd sigma = f.sigma(), b = f.b();
  std::vector<AsymptoticCheck> out;
  for (double R : radii) {
    AsymptoticCheck a;
    a.radius = R;
    const cd x = std::polar(R, 0.7);
    a.operator_value = apply_T(f, [](cd w) { return 1.0 / w; }, x);
    a.expansion = 1.0 / (sigma * x) + b / (sigma * x * x);
    a.error = std::abs(a.operator_value - a.expansion);
    out.push_back(a);
  }
  return out;
}

cd sample_probe(std::uint64_t seed, std::uint64_t index, std::uint64_t stream, std::span<const cd> avoid,
                const ProbeOptions& opts) {
  require(opts.r_min > 0.0 && opts.r_max > opts.r_min, "probe annulus is empty");
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                    static_cast<std::uint32_t>(stream)};
  std::mt19937_64 gen(seq);
  const double a2 = opts.r_min * opts.r_min, b2 = opts.r_max * opts.r_max;
  for (int attempt = 0; attempt < 100000; ++attempt) {
    const double r = std::sqrt(a2 + (b2 - a2) * uniform01(gen));
    const double th = 2.0 * std::numbers::pi * uniform01(gen);
    const cd x = std::polar(r, th);
    const bool clear =
        std::none_of(avoid.begin(), avoid.end(), [&](cd y) { return std::abs(x - y) < opts.exclusion; });
    if (clear) return x;
  }
  fail(ErrorKind::InvalidInput, "could not place a probe away from the excluded points");
}

std::vector<cd> probe_exclusions(const DynamicMap& f, int orbit_points) {
  const auto& p = f.profile();
  std::vector<cd> out(p.points.begin(), p.points.end());
  if (f.is_rational())
    for (cd q : f.rational_map().poles()) out.push_back(q);
  for (std::size_t j = 0; j < p.size(); ++j) {
    if (p.value_infinite[j]) continue;
    out.push_back(p.values[j]);
    if (orbit_points > 0) {
      const OrbitTrace t = critical_orbit(f, static_cast<int>(j), orbit_points);
      out.insert(out.end(), t.points.begin(), t.points.end());
    }
  }
  return out;
}

ProbePair sample_probe_pair(const DynamicMap& f, std::uint64_t seed, std::uint64_t index,
                            std::span<const cd> exclusions, const ProbeOptions& opts) {
  ProbePair pr;
  pr.z = sample_probe(seed, index, 0, exclusions, opts);
  std::vector<cd> avoid(exclusions.begin(), exclusions.end());
  OrbitOptions oo;
  if (!f.is_rational()) oo.escape_radius = kPolyCutoff;
  const OrbitTrace t = iterate_orbit(f, pr.z, 50, oo);
  avoid.insert(avoid.end(), t.points.begin(), t.points.end());
  if (!f.near_pole(pr.z)) avoid.push_back(f(pr.z));
  pr.x = sample_probe(seed, index, 1, avoid, opts);
  return pr;
}

}  // namespace tlab
