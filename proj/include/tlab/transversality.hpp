#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tlab/map_model.hpp"
#include "tlab/orbit_engine.hpp"
#include "tlab/spectrum.hpp"

namespace tlab {

enum class MatrixCase { Poly, H, NN, ND };
std::string to_string(MatrixCase c);
MatrixCase matrix_case_of(SpaceCase c);

struct MatrixOptions {
  SeriesOptions series;
  double rank_tol = 1e-10;
};

// Rows are critical indices, columns chart slots. For rational maps this is
// the reduced matrix L (finite-valued rows, case columns) and the fields
// r, nu, r0, r_prime carry the accounting r' = (r - nu) + r0.
struct TransversalityMatrix {
  MatrixCase matrix_case = MatrixCase::Poly;
  std::vector<int> rows;
  std::vector<std::string> row_labels;
  std::vector<Slot> columns;
  MatC entries;
  Eigen::MatrixXd tail_bounds;
  SingularSpectrum spectrum;
  int r = 0;
  int nu = 0;
  int r0 = 0;
  int r_prime = 0;
};

// Columns of the case: all v_k (Poly); sigma, v_1..v_{p-1} (H);
// v_1..v_{p-1} (NN); v_1..v_{p-2} (ND). With `with_infinite`, the
// infinite-valued v_{p+1}..v_{p'} follow.
std::vector<Slot> case_columns(const CriticalProfile& profile, MatrixCase c, bool with_infinite = false);

// Indices whose critical orbit passes the summability diagnostic.
std::vector<int> summable_indices(const DynamicMap& f, int budget = 2000, double tol = 1e-10);

// The matrix of similarity factors. A rational map must already be in the
// normal form of `c` (throws CaseMismatch otherwise).
TransversalityMatrix assemble_matrix(const DynamicMap& f, std::span<const int> S, MatrixCase c,
                                     const MatrixOptions& opts = {});

// Full L^M over all rows in S and the case columns followed by the
// infinite-valued columns. Finite rows are converted from L by the factors
// (M^{-1})'(v_j)/(M^{-1})'(v_k) (and (M^{-1})'(v_j) for sigma); rows with an
// infinite critical value are standard basis rows.
TransversalityMatrix assemble_mobius_matrix(const DynamicMap& f, std::span<const int> S, MatrixCase c,
                                            const MobiusTransform& M, const MatrixOptions& opts = {});

enum class RankStatus { Maximal, Deficient, Inconclusive };
std::string to_string(RankStatus s);

struct RankVerdict {
  RankStatus status = RankStatus::Maximal;
  bool maximal = false;
  double margin = 0.0;    // the rows-th singular value (infinite for an empty matrix)
  double tail_sum = 0.0;  // sum of entry tail bounds
  double tol = 0.0;
};

// maximal iff margin > tol + tail_sum; Inconclusive when the tails could flip it.
RankVerdict rank_verdict(const TransversalityMatrix& m, double tol);

struct PeriodicOrbitRecord {
  std::vector<cd> points;  // b_0 is the lexicographically smallest point
  int period = 0;
  cd multiplier;
};

// Cycles of exact period <= T_max (T_max <= 6), sorted by period then b_0.
// Parabolic cycles (|rho - 1| <= 1e-8) are left out; for rational maps the
// fixed point at infinity is not listed.
std::vector<PeriodicOrbitRecord> find_periodic_orbits(const DynamicMap& f, int T_max, double tol = 1e-10);

// d rho / d(slot) by implicit differentiation of the cycle equations.
cd multiplier_partials(const DynamicMap& f, const PeriodicOrbitRecord& orbit, Slot which);
// Central difference of the multiplier through the chart.
cd multiplier_partials_fd(const DynamicMap& f, const PeriodicOrbitRecord& orbit, Slot which, double h = 1e-6);

// assemble_matrix plus one d rho/d(columns) row per orbit.
TransversalityMatrix extended_matrix(const DynamicMap& f, std::span<const int> S,
                                     std::span<const PeriodicOrbitRecord> orbits, MatrixCase c,
                                     const MatrixOptions& opts = {});

}  // namespace tlab
