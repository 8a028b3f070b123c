#include "tlab/transversality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tlab/error.hpp"
#include "tlab/roots.hpp"

namespace tlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_case(const DynamicMap& f, MatrixCase c) {
  if (!f.is_rational()) {
    if (c != MatrixCase::Poly) fail(ErrorKind::CaseMismatch, "polynomial maps use the polynomial matrix");
    return;
  }
  switch (c) {
    case MatrixCase::Poly: fail(ErrorKind::CaseMismatch, "rational maps need one of the cases H, NN, ND");
    case MatrixCase::H: verify_case_conditions(f.rational_map(), f.profile(), SpaceCase::H); break;
    case MatrixCase::NN: verify_case_conditions(f.rational_map(), f.profile(), SpaceCase::NN); break;
    case MatrixCase::ND: verify_case_conditions(f.rational_map(), f.profile(), SpaceCase::ND); break;
  }
}

std::vector<int> normalize_rows(const DynamicMap& f, std::span<const int> S) {
  std::vector<int> rows(S.begin(), S.end());
  std::sort(rows.begin(), rows.end());
  require(std::adjacent_find(rows.begin(), rows.end()) == rows.end(), "row indices must be distinct");
  for (int j : rows)
    require(j >= 0 && static_cast<std::size_t>(j) < f.profile().size(), "row index out of range");
  return rows;
}

double tail_sum(const Eigen::MatrixXd& tails) {
  double t = 0.0;
  for (Eigen::Index i = 0; i < tails.size(); ++i) t += tails.data()[i];
  return t;
}

// Fills spectrum and the rank accounting; nu_rows is the number of rows
// that count towards nu.
void finish_matrix(TransversalityMatrix& m, int r, int nu, double tol) {
  m.spectrum = singular_values(m.entries);
  const double threshold = tol + tail_sum(m.tail_bounds);
  m.r = r;
  m.nu = nu;
  m.r0 = static_cast<int>(
      std::count_if(m.spectrum.values.begin(), m.spectrum.values.end(), [&](double s) { return s > threshold; }));
  m.r_prime = (r - nu) + m.r0;
}

std::string row_label(int j) { return "c" + std::to_string(j + 1); }

// f^T and (f^T)' at z; false when the orbit meets a pole.
bool iterate_n(const DynamicMap& f, cd z, int T, cd& w, cd& dw) {
  w = z;
  dw = 1.0;
  for (int i = 0; i < T; ++i) {
    if (f.near_pole(w)) return false;
    dw *= f.derivative(w);
    w = f(w);
  }
  return std::isfinite(std::abs(w)) && std::isfinite(std::abs(dw));
}

// Newton on f^T(z) - z; nullopt unless the steps settle.
std::optional<cd> refine_periodic(const DynamicMap& f, cd z, int T, int max_it = 60) {
  for (int it = 0; it < max_it; ++it) {
    cd w, dw;
    if (!iterate_n(f, z, T, w, dw)) return std::nullopt;
    const cd denom = dw - 1.0;
    if (denom == cd{0.0}) return std::nullopt;
    const cd step = (w - z) / denom;
    z -= step;
    if (!std::isfinite(std::abs(z))) return std::nullopt;
    if (std::abs(step) <= 1e-14 * (1.0 + std::abs(z))) return z;
  }
  cd w, dw;
  if (iterate_n(f, z, T, w, dw) && std::abs(w - z) <= 1e-9 * (1.0 + std::abs(z))) return z;
  return std::nullopt;
}

bool has_smaller_period(const DynamicMap& f, cd z, int T) {
  for (int p = 1; p < T; ++p) {
    if (T % p != 0) continue;
    cd w, dw;
    if (iterate_n(f, z, p, w, dw) && std::abs(w - z) <= 1e-7 * (1.0 + std::abs(z))) return true;
  }
  return false;
}

struct HomValue {
  cd v, dx, dy;
};

// p homogenized to degree d, with both partials, at (x, y).
HomValue hom_eval(const ComplexPoly& p, std::size_t d, cd x, cd y) {
  HomValue h{0.0, 0.0, 0.0};
  for (std::size_t i = 0; i <= p.degree(); ++i) {
    const cd c = p.coeff(i);
    if (c == cd{0.0}) continue;
    const cd yp = ipow(y, d - i);
    h.v += c * ipow(x, i) * yp;
    if (i > 0) h.dx += static_cast<double>(i) * c * ipow(x, i - 1) * yp;
    if (d > i) h.dy += static_cast<double>(d - i) * c * ipow(x, i) * ipow(y, d - i - 1);
  }
  return h;
}

// N_T(z) - z D_T(z) for f^T = N_T / D_T, up to a factor that is constant at
// each evaluation point (so Newton and Aberth corrections are unaffected).
void rational_period_eval(const RationalMap& g, int T, cd z, cd& v, cd& dv) {
  const std::size_t d = g.numerator().degree();
  cd x = z, y = 1.0, dx = 1.0, dy = 0.0;
  for (int i = 0; i < T; ++i) {
    const HomValue a = hom_eval(g.numerator(), d, x, y);
    const HomValue b = hom_eval(g.Q(), d, x, y);
    const cd ndx = a.dx * dx + a.dy * dy;
    const cd ndy = b.dx * dx + b.dy * dy;
    x = a.v;
    y = b.v;
    dx = ndx;
    dy = ndy;
    const double m = std::max({std::abs(x), std::abs(y), std::abs(dx), std::abs(dy)});
    if (m > 0.0 && std::isfinite(m)) {
      const int e = std::ilogb(m);
      x = std::ldexp(1.0, -e) * x;
      y = std::ldexp(1.0, -e) * y;
      dx = std::ldexp(1.0, -e) * dx;
      dy = std::ldexp(1.0, -e) * dy;
    }
  }
  v = x - z * y;
  dv = dx - y - z * dy;
}

// Candidate periodic points: the roots of f^T(z) - z, cleared of denominators
// for rational maps, found by Aberth iteration with the map evaluated by
// composition.
std::vector<cd> period_candidates(const DynamicMap& f, int T) {
  std::size_t degree = 1;
  for (int i = 0; i < T; ++i) degree *= static_cast<std::size_t>(f.degree());
  Evaluator g;
  double radius = 0.0;
  if (!f.is_rational()) {
    // Once |w| is huge the remaining k steps act like w^(d^k); only the
    // ratio v/dv matters to Aberth, so report (w, d^k dw) there.
    g.value_and_derivative = [&f, T](cd z, cd& v, cd& dv) {
      cd w = z, dw = 1.0;
      for (int i = 0; i < T; ++i) {
        if (std::abs(w) > 1e100) {
          v = w;
          dv = std::pow(static_cast<double>(f.degree()), T - i) * dw;
          return;
        }
        dw *= f.derivative(w);
        w = f(w);
      }
      v = w - z;
      dv = dw - 1.0;
    };
    radius = f.escape_radius();
  } else {
    const RationalMap& rm = f.rational_map();
    g.value_and_derivative = [&rm, T](cd z, cd& v, cd& dv) { rational_period_eval(rm, T, z, v, dv); };
    radius = 2.0;
    for (cd c : f.profile().points) radius = std::max(radius, 2.0 * std::abs(c));
    for (cd q : rm.poles()) radius = std::max(radius, 2.0 * std::abs(q));
  }
  RootOptions ro;
  ro.max_iterations = 2000;
  return aberth_roots(g, degree, radius, ro);
}

}  // namespace

std::string to_string(MatrixCase c) {
  switch (c) {
    case MatrixCase::Poly: return "poly";
    case MatrixCase::H: return "H";
    case MatrixCase::NN: return "NN";
    case MatrixCase::ND: return "ND";
  }
  return "?";
}

MatrixCase matrix_case_of(SpaceCase c) {
  switch (c) {
    case SpaceCase::H: return MatrixCase::H;
    case SpaceCase::NN: return MatrixCase::NN;
    case SpaceCase::ND: return MatrixCase::ND;
  }
  return MatrixCase::H;
}

std::string to_string(RankStatus s) {
  switch (s) {
    case RankStatus::Maximal: return "maximal";
    case RankStatus::Deficient: return "deficient";
    case RankStatus::Inconclusive: return "inconclusive";
  }
  return "?";
}

std::vector<Slot> case_columns(const CriticalProfile& profile, MatrixCase c, bool with_infinite) {
  const int p = static_cast<int>(profile.finite_count());
  const int pp = static_cast<int>(profile.size());
  std::vector<Slot> cols;
  int last = p;  // value columns 0..last-1
  switch (c) {
    case MatrixCase::Poly: break;
    case MatrixCase::H:
      cols.push_back(Slot::sigma());
      last = p - 1;
      break;
    case MatrixCase::NN: last = p - 1; break;
    case MatrixCase::ND: last = p - 2; break;
  }
  for (int k = 0; k < last; ++k) cols.push_back(Slot::value(k));
  if (with_infinite)
    for (int k = p; k < pp; ++k) cols.push_back(Slot::value(k));
  return cols;
}

std::vector<int> summable_indices(const DynamicMap& f, int budget, double tol) {
  std::vector<int> out;
  for (std::size_t j = 0; j < f.profile().size(); ++j) {
    const OrbitTrace t = critical_orbit(f, static_cast<int>(j), budget);
    if (summability_diagnostic(t, tol).status == SeriesStatus::Converged) out.push_back(static_cast<int>(j));
  }
  return out;
}

TransversalityMatrix assemble_matrix(const DynamicMap& f, std::span<const int> S, MatrixCase c,
                                     const MatrixOptions& opts) {
  check_case(f, c);
  const std::vector<int> all = normalize_rows(f, S);
  std::vector<int> rows;
  for (int j : all)
    if (!f.profile().value_infinite[static_cast<std::size_t>(j)]) rows.push_back(j);

  TransversalityMatrix m;
  m.matrix_case = c;
  m.rows = rows;
  m.columns = case_columns(f.profile(), c);
  const auto nr = static_cast<Eigen::Index>(rows.size());
  const auto nc = static_cast<Eigen::Index>(m.columns.size());
  m.entries = MatC::Zero(nr, nc);
  m.tail_bounds = Eigen::MatrixXd::Zero(nr, nc);
  for (Eigen::Index i = 0; i < nr; ++i) {
    const int j = rows[static_cast<std::size_t>(i)];
    m.row_labels.push_back(row_label(j));
    for (Eigen::Index k = 0; k < nc; ++k) {
      const SeriesValue s = similarity_factor(f, j, m.columns[static_cast<std::size_t>(k)], opts.series);
      m.entries(i, k) = s.value;
      m.tail_bounds(i, k) = s.tail_bound;
    }
  }
  finish_matrix(m, static_cast<int>(all.size()), static_cast<int>(rows.size()), opts.rank_tol);
  return m;
}

TransversalityMatrix assemble_mobius_matrix(const DynamicMap& f, std::span<const int> S, MatrixCase c,
                                            const MobiusTransform& M, const MatrixOptions& opts) {
  require(f.is_rational(), "the Mobius-conjugated matrix applies to rational maps");
  check_case(f, c);
  const auto& prof = f.profile();
  const std::vector<int> rows = normalize_rows(f, S);
  const ConjugatedSpace cs = mobius_conjugated_space(f.rational_map(), prof, M);

  TransversalityMatrix m;
  m.matrix_case = c;
  m.rows = rows;
  m.columns = case_columns(prof, c, true);
  const bool any_infinite = prof.finite_count() < prof.size();
  cd dx_dv = 0.0;  // derivative of 1/v_k = 1/M(v~) at v~ = M^{-1}(infinity)
  if (any_infinite) {
    require(M.c() != cd{0.0}, "M must move infinity when a critical value is infinite");
    const cd beta = -M.d() / M.c();
    const cd den = M.a() * beta + M.b();
    dx_dv = (M.b() * M.c() - M.a() * M.d()) / (den * den);
  }
  const auto nr = static_cast<Eigen::Index>(rows.size());
  const auto nc = static_cast<Eigen::Index>(m.columns.size());
  m.entries = MatC::Zero(nr, nc);
  m.tail_bounds = Eigen::MatrixXd::Zero(nr, nc);
  int nu = 0;
  for (Eigen::Index i = 0; i < nr; ++i) {
    const int j = rows[static_cast<std::size_t>(i)];
    const auto ju = static_cast<std::size_t>(j);
    m.row_labels.push_back(row_label(j));
    if (prof.value_infinite[ju]) {
      for (Eigen::Index k = 0; k < nc; ++k)
        if (m.columns[static_cast<std::size_t>(k)] == Slot::value(j)) m.entries(i, k) = 1.0;
      continue;
    }
    ++nu;
    for (Eigen::Index k = 0; k < nc; ++k) {
      const Slot col = m.columns[static_cast<std::size_t>(k)];
      Slot chart = col;
      cd factor = cs.inverse_derivative[ju];
      if (col.kind == SlotKind::Value) {
        const auto ku = static_cast<std::size_t>(col.index);
        if (prof.value_infinite[ku]) {
          chart = Slot::reciprocal(col.index);
          factor *= dx_dv;
        } else {
          factor = conversion_factor(cs, j, col.index);
        }
      }
      const SeriesValue s = similarity_factor(f, j, chart, opts.series);
      m.entries(i, k) = factor * s.value;
      m.tail_bounds(i, k) = std::abs(factor) * s.tail_bound;
    }
  }
  finish_matrix(m, static_cast<int>(rows.size()), nu, opts.rank_tol);
  return m;
}

RankVerdict rank_verdict(const TransversalityMatrix& m, double tol) {
  RankVerdict v;
  v.tol = tol;
  v.tail_sum = tail_sum(m.tail_bounds);
  const auto rows = static_cast<std::size_t>(m.entries.rows());
  if (rows == 0) {
    v.status = RankStatus::Maximal;
    v.maximal = true;
    v.margin = kInf;
    return v;
  }
  const auto& sv = m.spectrum.values;
  v.margin = rows <= sv.size() ? sv[rows - 1] : 0.0;
  if (v.margin > tol + v.tail_sum) {
    v.status = RankStatus::Maximal;
  } else if (v.margin + v.tail_sum > tol) {
    v.status = RankStatus::Inconclusive;
  } else {
    v.status = RankStatus::Deficient;
  }
  v.maximal = v.status == RankStatus::Maximal;
  return v;
}

std::vector<PeriodicOrbitRecord> find_periodic_orbits(const DynamicMap& f, int T_max, double tol) {
  require(T_max >= 1 && T_max <= 6, "period bound must be between 1 and 6");
  require(tol > 0.0, "tolerance must be positive");
  std::vector<PeriodicOrbitRecord> out;
  for (int T = 1; T <= T_max; ++T) {
    std::vector<cd> accepted;
    for (cd seed : period_candidates(f, T)) {
      const auto z = refine_periodic(f, seed, T);
      if (!z || has_smaller_period(f, *z, T)) continue;
      const bool seen = std::any_of(accepted.begin(), accepted.end(),
                                    [&](cd y) { return std::abs(y - *z) <= 1e-7 * (1.0 + std::abs(y)); });
      if (!seen) accepted.push_back(*z);
    }
    std::vector<bool> used(accepted.size(), false);
    std::vector<PeriodicOrbitRecord> found;
    for (std::size_t i = 0; i < accepted.size(); ++i) {
      if (used[i]) continue;
      PeriodicOrbitRecord rec;
      rec.period = T;
      cd z = accepted[i];
      for (int s = 0; s < T; ++s) {
        rec.points.push_back(z);
        for (std::size_t l = 0; l < accepted.size(); ++l)
          if (std::abs(accepted[l] - z) <= 1e-7 * (1.0 + std::abs(z))) used[l] = true;
        z = f(z);
      }
      const auto first = std::min_element(rec.points.begin(), rec.points.end(), lex_less);
      std::rotate(rec.points.begin(), first, rec.points.end());
      // Re-derive the remaining points from the refined b_0.
      for (int s = 1; s < T; ++s)
        rec.points[static_cast<std::size_t>(s)] = f(rec.points[static_cast<std::size_t>(s - 1)]);
      rec.multiplier = 1.0;
      for (cd b : rec.points) rec.multiplier *= f.derivative(b);
      cd w, dw;
      if (!iterate_n(f, rec.points[0], T, w, dw) ||
          std::abs(w - rec.points[0]) > std::max(tol, 1e-12 * std::abs(rec.multiplier)) * (1.0 + std::abs(w)))
        fail(ErrorKind::NonConvergence, "periodic point failed the cycle residual check");
      if (std::abs(rec.multiplier - 1.0) <= 1e-8) continue;
      found.push_back(rec);
    }
    std::sort(found.begin(), found.end(),
              [](const PeriodicOrbitRecord& a, const PeriodicOrbitRecord& b) { return lex_less(a.points[0], b.points[0]); });
    out.insert(out.end(), found.begin(), found.end());
  }
  return out;
}

cd multiplier_partials(const DynamicMap& f, const PeriodicOrbitRecord& orbit, Slot which) {
  const auto T = static_cast<Eigen::Index>(orbit.points.size());
  require(T >= 1 && orbit.period == static_cast<int>(T), "malformed periodic orbit");
  const std::size_t k = f.slot_index(which);
  std::vector<cd> d1;
  cd rho = 1.0;
  for (cd b : orbit.points) {
    d1.push_back(f.derivative(b));
    rho *= d1.back();
  }
  if (std::abs(rho - 1.0) <= 1e-10)
    fail(ErrorKind::SingularSystem, "multiplier is 1; the cycle does not move smoothly with the map");
  // b'_{i+1} - f'(b_i) b'_i = u(b_i)
  MatC A = MatC::Zero(T, T);
  VecC rhs(T);
  for (Eigen::Index i = 0; i < T; ++i) {
    const Eigen::Index r = (i + 1) % T;
    A(r, r) += 1.0;
    A(r, i) -= d1[static_cast<std::size_t>(i)];
    rhs(r) = f.tangent(k, orbit.points[static_cast<std::size_t>(i)]);
  }
  const VecC db = solve_square(A, rhs);
  cd drho = 0.0;
  for (Eigen::Index i = 0; i < T; ++i) {
    const auto iu = static_cast<std::size_t>(i);
    const cd b = orbit.points[iu];
    cd others = 1.0;
    for (std::size_t l = 0; l < d1.size(); ++l)
      if (l != iu) others *= d1[l];
    drho += (f.tangent_derivative(k, b) + f.second_derivative(b) * db(i)) * others;
  }
  return drho;
}

cd multiplier_partials_fd(const DynamicMap& f, const PeriodicOrbitRecord& orbit, Slot which, double h) {
  const std::size_t k = f.slot_index(which);
  const int T = orbit.period;
  auto multiplier_at = [&](double step) {
    std::vector<cd> delta(f.slots().size(), 0.0);
    delta[k] = step;
    const auto g = f.chart_point(delta);
    cd z = orbit.points[0];
    for (int it = 0; it < 60; ++it) {
      cd w = z, dw = 1.0;
      for (int i = 0; i < T; ++i) {
        dw *= g.derivative(w);
        w = g(w);
      }
      const cd s = (w - z) / (dw - 1.0);
      z -= s;
      if (std::abs(s) <= 1e-15 * (1.0 + std::abs(z))) break;
    }
    cd rho = 1.0;
    for (int i = 0; i < T; ++i) {
      rho *= g.derivative(z);
      z = g(z);
    }
    return rho;
  };
  return (multiplier_at(h) - multiplier_at(-h)) / (2.0 * h);
}

TransversalityMatrix extended_matrix(const DynamicMap& f, std::span<const int> S,
                                     std::span<const PeriodicOrbitRecord> orbits, MatrixCase c,
                                     const MatrixOptions& opts) {
  TransversalityMatrix base = assemble_matrix(f, S, c, opts);
  if (orbits.empty()) return base;
  const auto& prof = f.profile();
  for (const auto& o : orbits) {
    require(std::abs(o.multiplier - 1.0) > 1e-10, "orbit multiplier must differ from 1");
    if (std::abs(o.multiplier) <= 1e-12) {
      int hits = 0;
      bool simple = true;
      for (cd b : o.points)
        for (std::size_t j = 0; j < prof.size(); ++j)
          if (std::abs(b - prof.points[j]) <= 1e-8) {
            ++hits;
            simple = simple && prof.multiplicities[j] == 1;
          }
      require(hits == 1 && simple, "a superattracting orbit must contain a single simple critical point");
    }
  }
  const Eigen::Index old_rows = base.entries.rows();
  const auto extra = static_cast<Eigen::Index>(orbits.size());
  const Eigen::Index nc = base.entries.cols();
  MatC entries = MatC::Zero(old_rows + extra, nc);
  Eigen::MatrixXd tails = Eigen::MatrixXd::Zero(old_rows + extra, nc);
  entries.topRows(old_rows) = base.entries;
  tails.topRows(old_rows) = base.tail_bounds;
  for (Eigen::Index i = 0; i < extra; ++i) {
    const auto& o = orbits[static_cast<std::size_t>(i)];
    for (Eigen::Index k = 0; k < nc; ++k)
      entries(old_rows + i, k) = multiplier_partials(f, o, base.columns[static_cast<std::size_t>(k)]);
    base.row_labels.push_back("rho" + std::to_string(i + 1));
    base.rows.push_back(-1);
  }
  base.entries = entries;
  base.tail_bounds = tails;
  finish_matrix(base, base.r + static_cast<int>(extra), base.nu + static_cast<int>(extra), opts.rank_tol);
  return base;
}

}  // namespace tlab
