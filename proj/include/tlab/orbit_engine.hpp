#pragma once

#include <span>
#include <string>
#include <vector>

#include "tlab/map_model.hpp"

namespace tlab {

enum class Termination { Budget, HitInfinity, HitCritical, Escaped };
std::string to_string(Termination t);

struct OrbitOptions {
  double escape_radius = 0.0;        // polynomials; 0 selects 1 + max(2, sum |a_i|)
  double infinity_threshold = 1e8;   // rational points beyond this are infinity
  double critical_tol = 1e-10;       // hit_critical distance
  bool stop_on_escape = true;        // false keeps iterating past R (marking the first escape)
  // A return within cycle_tol of one of the last 64 points is refined to a
  // repelling cycle, which the orbit then follows exactly. Without this,
  // rounding drifts the computed orbit off the cycles of Misiurewicz maps.
  bool snap_cycles = true;
  double cycle_tol = 1e-9;
};

// A forward orbit v, f(v), ..., with cumulative derivatives and spherical
// summability terms s_n = 1 / (spherical derivative of f^n at v).
struct OrbitTrace {
  ExtPoint start;
  std::vector<cd> points;       // finite f^n(v), n = 0..
  std::vector<cd> derivatives;  // (f^n)'(v)
  std::vector<double> terms;    // s_n for the stored points
  Termination termination = Termination::Budget;
  int stop_index = -1;          // l for HitInfinity, hit or escape index otherwise
  int critical_index = -1;      // which critical point was hit
  double infinity_term = 0.0;   // s_l when the orbit reaches infinity
  double infinity_ratio = 0.0;  // s_{n+1}/s_n at infinity (|sigma| for rational maps)
  double escape_radius = 0.0;
  int cycle_start = -1;         // index of the first point on a snapped cycle
  int cycle_period = 0;
};

enum class SeriesStatus { Converged, TruncatedAtInfinity, Diverged, BudgetExhausted };
std::string to_string(SeriesStatus s);

struct SeriesValue {
  cd value = 0.0;
  double tail_bound = 0.0;
  int terms_used = 0;
  SeriesStatus status = SeriesStatus::Converged;
  double tol = 0.0;
};

struct SeriesOptions {
  double tol = 1e-10;
  int max_terms = 2000;
};

OrbitTrace iterate_orbit(const DynamicMap& f, ExtPoint v, int budget, const OrbitOptions& opts = {});
inline OrbitTrace iterate_orbit(const DynamicMap& f, cd v, int budget, const OrbitOptions& opts = {}) {
  return iterate_orbit(f, ExtPoint{v, false}, budget, opts);
}
// Orbit of the j-th critical value.
OrbitTrace critical_orbit(const DynamicMap& f, int j, int budget, const OrbitOptions& opts = {});

// Sum of s_n with the 50-term block test; a heuristic verdict.
SeriesValue summability_diagnostic(const OrbitTrace& trace, double tol = 1e-10);

// Geometric tail estimate from the last 10 term magnitudes: ratio rho from
// the maxima of the last two windows of 5, tail = last * rho / (1 - rho).
struct TailFit {
  double ratio = 1.0;
  double tail = 0.0;
  bool geometric = false;  // ratio < 0.95
};
TailFit fit_geometric_tail(std::span<const double> magnitudes);

// L(c_j, slot) = delta + sum_{n>=1} (df/dx)(f^{n-1} v_j) / (f^n)'(v_j).
SeriesValue similarity_factor(const DynamicMap& f, int j, Slot which, const SeriesOptions& opts = {});
// The same series with terms from an existing trace.
SeriesValue similarity_factor(const DynamicMap& f, const OrbitTrace& trace, int j, Slot which,
                              const SeriesOptions& opts = {});

struct RatioSequence {
  std::vector<cd> ratios;       // entry m-1 holds the m-th ratio
  std::vector<cd> derivatives;  // (f^{m-1})'(v_j)
  int hit_infinity_at = -1;     // l, when the orbit reaches infinity
};

// Partial sums delta + sum_{n=1}^{m-1} terms, m = 1..m_max.
RatioSequence ratio_sequence(const DynamicMap& f, int j, Slot which, int m_max);

// sum_k a_k L(c_j, slot_k) over slots().
cd direction_limit(const DynamicMap& f, std::span<const cd> tangent, int j, const SeriesOptions& opts = {});

// Post-burn-in orbit points, deduplicated at resolution 1e-6.
std::vector<cd> omega_estimate(const OrbitTrace& trace, int burn_in);

}  // namespace tlab
