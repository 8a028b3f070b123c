#include "tlab/orbit_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tlab/error.hpp"

namespace tlab {

namespace {

constexpr int kBlock = 50;
constexpr double kInf = std::numeric_limits<double>::infinity();

cd delta_for(int j, Slot which) {
  return which.kind == SlotKind::Value && which.index == j ? cd{1.0} : cd{0.0};
}

void check_critical_index(const DynamicMap& f, int j) {
  require(j >= 0 && static_cast<std::size_t>(j) < f.profile().size(), "critical index out of range");
}

// Block sums of magnitudes; true when the last complete block is not smaller
// than the one before it.
bool blocks_not_decreasing(std::span<const double> mags) {
  const std::size_t nb = mags.size() / kBlock;
  if (nb < 2) return false;
  double last = 0.0, prev = 0.0;
  for (std::size_t i = 0; i < kBlock; ++i) {
    prev += mags[(nb - 2) * kBlock + i];
    last += mags[(nb - 1) * kBlock + i];
  }
  return last > 0.0 && last >= prev;
}

// Newton on f^p(z) - z from z0; returns the cycle through the refined point
// when it is repelling and stays close to z0. `non_repelling` flags a
// cycle that was found but rejected for its multiplier.
std::vector<cd> refine_cycle(const DynamicMap& f, cd z0, int p, bool& non_repelling) {
  non_repelling = false;
  cd z = z0;
  for (int it = 0; it < 30; ++it) {
    cd w = z, dw = 1.0;
    for (int i = 0; i < p; ++i) {
      if (f.near_pole(w)) return {};
      dw *= f.derivative(w);
      w = f(w);
    }
    const cd step = (w - z) / (dw - 1.0);
    if (!std::isfinite(std::abs(step))) return {};
    z -= step;
    if (std::abs(step) <= 1e-15 * (1.0 + std::abs(z))) break;
  }
  if (std::abs(z - z0) > 1e-7 * (1.0 + std::abs(z0))) return {};
  std::vector<cd> cycle{z};
  cd mult = f.derivative(z);
  for (int i = 1; i < p; ++i) {
    cycle.push_back(f(cycle.back()));
    mult *= f.derivative(cycle.back());
  }
  if (!(std::abs(mult) > 1.0 + 1e-6)) {
    non_repelling = true;
    return {};
  }
  return cycle;
}

}  // namespace

std::string to_string(Termination t) {
  switch (t) {
    case Termination::Budget: return "budget";
    case Termination::HitInfinity: return "hit_infinity";
    case Termination::HitCritical: return "hit_critical";
    case Termination::Escaped: return "escaped";
  }
  return "?";
}

std::string to_string(SeriesStatus s) {
  switch (s) {
    case SeriesStatus::Converged: return "converged";
    case SeriesStatus::TruncatedAtInfinity: return "truncated_at_infinity";
    case SeriesStatus::Diverged: return "diverged";
    case SeriesStatus::BudgetExhausted: return "budget_exhausted";
  }
  return "?";
}

OrbitTrace iterate_orbit(const DynamicMap& f, ExtPoint v, int budget, const OrbitOptions& opts) {
  require(budget >= 1, "orbit budget must be at least 1");
  OrbitTrace t;
  t.start = v;
  t.escape_radius = opts.escape_radius > 0.0 ? opts.escape_radius : f.escape_radius();
  t.infinity_ratio = f.is_rational() ? std::abs(f.sigma()) : kInf;
  if (v.inf) {
    require(f.is_rational(), "a polynomial orbit cannot start at infinity");
    t.termination = Termination::HitInfinity;
    t.stop_index = 0;
    t.infinity_term = 1.0;
    return t;
  }
  const auto& crit = f.profile().points;
  cd x = v.z, D = 1.0;
  double S = 1.0;  // spherical derivative of f^n at v
  std::vector<cd> cycle;
  std::size_t cpos = 0;
  std::vector<bool> skip_period(65, false);  // periods already found non-repelling
  for (int n = 0;; ++n) {
    if (f.is_rational() && std::abs(x) > opts.infinity_threshold) {
      t.termination = Termination::HitInfinity;
      t.stop_index = n;
      t.infinity_term = 1.0 / S;
      return t;
    }
    if (!std::isfinite(std::abs(x))) {
      // Overflow past the escape radius; only reachable with stop_on_escape off.
      t.termination = Termination::Escaped;
      if (t.stop_index < 0) t.stop_index = n;
      return t;
    }
    t.points.push_back(x);
    t.derivatives.push_back(D);
    t.terms.push_back(1.0 / S);
    for (std::size_t i = 0; i < crit.size(); ++i) {
      if (std::abs(x - crit[i]) <= opts.critical_tol) {
        t.termination = Termination::HitCritical;
        t.stop_index = n;
        t.critical_index = static_cast<int>(i);
        return t;
      }
    }
    if (!f.is_rational() && std::abs(x) > t.escape_radius) {
      if (t.stop_index < 0) t.stop_index = n;
      if (opts.stop_on_escape) {
        t.termination = Termination::Escaped;
        return t;
      }
    }
    if (n == budget) {
      t.termination = (!f.is_rational() && t.stop_index >= 0) ? Termination::Escaped : Termination::Budget;
      if (t.termination == Termination::Budget) t.stop_index = n;
      return t;
    }
    S *= f.spherical_derivative(x);
    if (f.near_pole(x)) {
      t.termination = Termination::HitInfinity;
      t.stop_index = n + 1;
      t.infinity_term = 1.0 / S;
      return t;
    }
    D *= f.derivative(x);
    if (!cycle.empty()) {
      cpos = (cpos + 1) % cycle.size();
      x = cycle[cpos];
      continue;
    }
    x = f(x);
    if (!opts.snap_cycles) continue;
    for (int i = n; i >= 0 && i >= n - 63; --i) {
      const cd y = t.points[static_cast<std::size_t>(i)];
      const int period = n + 1 - i;
      if (skip_period[static_cast<std::size_t>(period)]) continue;
      if (std::abs(x - y) > opts.cycle_tol * (1.0 + std::abs(y))) continue;
      bool non_repelling = false;
      cycle = refine_cycle(f, y, period, non_repelling);
      if (non_repelling) skip_period[static_cast<std::size_t>(period)] = true;
      if (cycle.empty()) continue;
      t.cycle_start = i;
      t.cycle_period = n + 1 - i;
      cpos = 0;
      x = cycle[0];
      break;
    }
  }
}

OrbitTrace critical_orbit(const DynamicMap& f, int j, int budget, const OrbitOptions& opts) {
  check_critical_index(f, j);
  const auto& p = f.profile();
  const auto k = static_cast<std::size_t>(j);
  return iterate_orbit(f, p.value_infinite[k] ? ExtPoint::infinity() : ExtPoint{p.values[k], false}, budget,
                       opts);
}

TailFit fit_geometric_tail(std::span<const double> mags) {
  TailFit fit;
  if (mags.size() < 10) return fit;
  const std::size_t n = mags.size();
  const double last = *std::max_element(mags.begin() + static_cast<long>(n - 5), mags.end());
  const double prev =
      *std::max_element(mags.begin() + static_cast<long>(n - 10), mags.begin() + static_cast<long>(n - 5));
  if (prev == 0.0) {
    fit.ratio = last == 0.0 ? 0.0 : kInf;
  } else {
    fit.ratio = std::pow(last / prev, 0.2);
  }
  fit.geometric = fit.ratio < 0.95;
  fit.tail = fit.geometric ? last * fit.ratio / (1.0 - fit.ratio) : kInf;
  return fit;
}

SeriesValue summability_diagnostic(const OrbitTrace& trace, double tol) {
  require(!trace.terms.empty() || trace.termination == Termination::HitInfinity, "empty orbit trace");
  SeriesValue out;
  out.tol = tol;
  double sum = 0.0;
  for (double s : trace.terms) sum += s;
  out.terms_used = static_cast<int>(trace.terms.size());
  switch (trace.termination) {
    case Termination::HitCritical:
    case Termination::Escaped:
      out.value = sum;
      out.tail_bound = kInf;
      out.status = SeriesStatus::Diverged;
      return out;
    case Termination::HitInfinity:
      // Beyond l the terms are s_l |sigma|^{n-l}.
      if (trace.infinity_ratio < 1.0) {
        out.value = sum + trace.infinity_term / (1.0 - trace.infinity_ratio);
        out.tail_bound = 0.0;
        out.status = SeriesStatus::Converged;
      } else {
        out.value = sum + trace.infinity_term;
        out.tail_bound = kInf;
        out.status = SeriesStatus::Diverged;
      }
      return out;
    case Termination::Budget: break;
  }
  out.value = sum;
  const std::span<const double> mags(trace.terms);
  if (blocks_not_decreasing(mags)) {
    out.tail_bound = kInf;
    out.status = SeriesStatus::Diverged;
    return out;
  }
  const TailFit fit = fit_geometric_tail(mags);
  out.tail_bound = fit.tail;
  out.status = fit.geometric && fit.tail <= tol ? SeriesStatus::Converged : SeriesStatus::BudgetExhausted;
  return out;
}

SeriesValue similarity_factor(const DynamicMap& f, int j, Slot which, const SeriesOptions& opts) {
  check_critical_index(f, j);
  require(!f.profile().value_infinite[static_cast<std::size_t>(j)],
          "similarity factors are defined for finite critical values only");
  require(opts.max_terms >= 10, "series budget must be at least 10 terms");
  const OrbitTrace trace = critical_orbit(f, j, opts.max_terms);
  return similarity_factor(f, trace, j, which, opts);
}

SeriesValue similarity_factor(const DynamicMap& f, const OrbitTrace& trace, int j, Slot which,
                              const SeriesOptions& opts) {
  check_critical_index(f, j);
  require(!trace.start.inf, "similarity factors are defined for finite critical values only");
  const std::size_t k = f.slot_index(which);

  SeriesValue out;
  out.tol = opts.tol;
  cd value = delta_for(j, which);
  const std::size_t avail = trace.points.size();
  if (trace.termination == Termination::HitInfinity) {
    for (std::size_t n = 0; n < avail; ++n) value += f.tangent_ratio(k, trace.points[n]) / trace.derivatives[n];
    out.value = value;
    out.terms_used = static_cast<int>(avail);
    out.tail_bound = 0.0;
    out.status = SeriesStatus::TruncatedAtInfinity;
    return out;
  }

  std::size_t limit = std::min<std::size_t>(avail, static_cast<std::size_t>(opts.max_terms));
  // The term after a critical hit is infinite.
  if (trace.termination == Termination::HitCritical) limit = std::min<std::size_t>(limit, static_cast<std::size_t>(trace.stop_index));
  std::vector<double> mags;
  mags.reserve(limit);
  int negligible = 0;
  for (std::size_t n = 0; n < limit; ++n) {
    const cd term = f.tangent_ratio(k, trace.points[n]) / trace.derivatives[n];
    value += term;
    mags.push_back(std::abs(term));
    // Stop once terms sit below the rounding level of the sum.
    negligible = mags.back() <= 1e-17 * std::abs(value) ? negligible + 1 : 0;
    if (negligible >= 10) break;
  }
  out.value = value;
  out.terms_used = static_cast<int>(mags.size());
  const TailFit fit = fit_geometric_tail(mags);
  out.tail_bound = fit.tail;
  if (fit.geometric && fit.tail <= opts.tol) {
    out.status = SeriesStatus::Converged;
    return out;
  }
  if (trace.termination == Termination::HitCritical)
    fail(ErrorKind::DivergenceDetected, "the orbit of v" + std::to_string(j + 1) + " hits a critical point");
  if (trace.termination == Termination::Escaped)
    fail(ErrorKind::DivergenceDetected, "the orbit of v" + std::to_string(j + 1) + " escapes");
  if (blocks_not_decreasing(mags) || !std::isfinite(std::abs(value)))
    fail(ErrorKind::DivergenceDetected, "partial sums for L(c" + std::to_string(j + 1) + ", " + which.label() +
                                            ") fail the block test");
  out.status = SeriesStatus::BudgetExhausted;
  return out;
}

RatioSequence ratio_sequence(const DynamicMap& f, int j, Slot which, int m_max) {
  check_critical_index(f, j);
  require(m_max >= 1, "m_max must be at least 1");
  require(!f.profile().value_infinite[static_cast<std::size_t>(j)], "ratio sequences need a finite critical value");
  const std::size_t k = f.slot_index(which);
  OrbitOptions oo;
  oo.stop_on_escape = false;
  const OrbitTrace trace = critical_orbit(f, j, m_max, oo);
  RatioSequence out;
  const bool at_inf = trace.termination == Termination::HitInfinity;
  if (at_inf) out.hit_infinity_at = trace.stop_index;
  const std::size_t avail = trace.points.size();
  cd value = delta_for(j, which);
  for (int m = 1; m <= m_max; ++m) {
    const auto idx = static_cast<std::size_t>(m - 1);
    if (m >= 2) {
      const std::size_t n = idx - 1;  // term m-1 uses f^{m-2}(v) and (f^{m-2})'(v)
      if (n < avail) {
        if (trace.termination == Termination::HitCritical && static_cast<int>(n) >= trace.stop_index)
          fail(ErrorKind::DivergenceDetected, "the orbit hits a critical point before m_max");
        value += f.tangent_ratio(k, trace.points[n]) / trace.derivatives[n];
      } else if (!at_inf) {
        fail(ErrorKind::InvalidInput, "the orbit does not stay finite through m_max steps");
      }
    }
    out.ratios.push_back(value);
    out.derivatives.push_back(idx < avail ? trace.derivatives[idx] : cd{kInf});
  }
  return out;
}

cd direction_limit(const DynamicMap& f, std::span<const cd> tangent, int j, const SeriesOptions& opts) {
  require(tangent.size() == f.slots().size(), "tangent vector length must equal the number of chart slots");
  cd sum = 0.0;
  for (std::size_t k = 0; k < tangent.size(); ++k) {
    if (tangent[k] == cd{0.0}) continue;
    const SeriesValue s = similarity_factor(f, j, f.slots()[k], opts);
    if (s.status == SeriesStatus::BudgetExhausted)
      fail(ErrorKind::NonConvergence, "similarity factor did not converge within the budget");
    sum += tangent[k] * s.value;
  }
  return sum;
}

std::vector<cd> omega_estimate(const OrbitTrace& trace, int burn_in) {
  require(burn_in >= 0 && trace.points.size() > static_cast<std::size_t>(burn_in), "trace is not longer than burn-in");
  std::vector<cd> out;
  for (std::size_t n = static_cast<std::size_t>(burn_in); n < trace.points.size(); ++n) {
    const cd x = trace.points[n];
    const bool seen = std::any_of(out.begin(), out.end(), [&](cd y) { return std::abs(x - y) <= 1e-6; });
    if (!seen) out.push_back(x);
  }
  return out;
}

}  // namespace tlab
