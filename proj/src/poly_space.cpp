#include "tlab/poly_space.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "tlab/error.hpp"
#include "tlab/hermite.hpp"
#include "tlab/roots.hpp"

namespace tlab {

namespace {

constexpr double kRealTol = 1e-12;
constexpr double kEps = std::numeric_limits<double>::epsilon();

ComplexPoly build_poly(int d, const std::vector<cd>& a) {
  std::vector<cd> c(static_cast<std::size_t>(d) + 1, cd{0.0});
  c[0] = 1.0;
  for (std::size_t i = 0; i < a.size(); ++i) c[i + 2] = a[i];
  return ComplexPoly(std::move(c));
}

bool nearly_real(cd z) { return std::abs(z.imag()) <= kRealTol; }

}  // namespace

std::size_t CriticalProfile::finite_count() const {
  std::size_t p = 0;
  for (bool inf : value_infinite)
    if (!inf) ++p;
  return p;
}

int CriticalProfile::total_multiplicity() const {
  int s = 0;
  for (int m : multiplicities) s += m;
  return s;
}

PolyMap::PolyMap(int degree, std::vector<cd> coeffs, bool real)
    : degree_(degree), coeffs_(std::move(coeffs)), real_(real) {
  require(degree_ >= 2, "polynomial degree must be at least 2");
  require(degree_ <= kMaxPolyDegree,
          "polynomial degree " + std::to_string(degree_) + " exceeds the supported maximum " +
              std::to_string(kMaxPolyDegree));
  require(coeffs_.size() == static_cast<std::size_t>(degree_ - 1),
          "a degree-" + std::to_string(degree_) + " map needs " + std::to_string(degree_ - 1) + " coefficients");
  for (cd a : coeffs_) {
    require(std::isfinite(a.real()) && std::isfinite(a.imag()), "coefficients must be finite");
    if (real_) require(nearly_real(a), "map flagged real has a non-real coefficient");
  }
  if (real_)
    for (cd& a : coeffs_) a = cd{a.real(), 0.0};
  poly_ = build_poly(degree_, coeffs_);
  dpoly_ = poly_.derivative();
}

CriticalProfile critical_profile(const PolyMap& f) {
  const ComplexPoly& df = f.poly().derivative();
  const auto clusters = find_roots(df, 1e-10);
  CriticalProfile out;
  for (const auto& c : clusters) {
    cd point = c.center;
    if (f.is_real()) {
      if (nearly_real(point)) point = cd{point.real(), 0.0};
    }
    out.points.push_back(point);
    out.multiplicities.push_back(c.multiplicity);
    out.values.push_back(f(point));
    out.value_infinite.push_back(false);
  }
  if (out.total_multiplicity() != f.degree() - 1)
    fail(ErrorKind::NonConvergence, "critical multiplicities do not sum to d-1");
  return out;
}

PolyChartSolution solve_poly_chart(const PolyMap& f0, const CriticalProfile& profile0,
                                   std::span<const cd> target, double tol) {
  require(tol > 0.0, "chart tolerance must be positive");
  const std::size_t p = profile0.size();
  require(target.size() == p, "target must have one value per critical point");
  const int d = f0.degree();
  const std::size_t na = static_cast<std::size_t>(d - 1);
  const std::size_t n = na + p;

  VecC x0(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < na; ++i) x0(static_cast<Eigen::Index>(i)) = f0.coeffs()[i];
  for (std::size_t j = 0; j < p; ++j) x0(static_cast<Eigen::Index>(na + j)) = profile0.points[j];

  auto unpack = [&](const VecC& x) {
    std::vector<cd> a(na);
    for (std::size_t i = 0; i < na; ++i) a[i] = x(static_cast<Eigen::Index>(i));
    return build_poly(d, a);
  };

  // Equations per critical point: Taylor coefficients 1..m_j of g at c_j
  // vanish, then g(c_j) = target_j.
  ResidualFn F = [&](const VecC& x) {
    const ComplexPoly g = unpack(x);
    VecC r(static_cast<Eigen::Index>(n));
    Eigen::Index row = 0;
    for (std::size_t j = 0; j < p; ++j) {
      const int m = profile0.multiplicities[j];
      const auto t = g.taylor(x(static_cast<Eigen::Index>(na + j)), static_cast<std::size_t>(m));
      for (int i = 1; i <= m; ++i) r(row++) = t[static_cast<std::size_t>(i)];
      r(row++) = t[0] - target[j];
    }
    return r;
  };
  JacobianFn J = [&](const VecC& x) {
    const ComplexPoly g = unpack(x);
    MatC jac = MatC::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    Eigen::Index row = 0;
    for (std::size_t j = 0; j < p; ++j) {
      const int m = profile0.multiplicities[j];
      const cd c = x(static_cast<Eigen::Index>(na + j));
      const auto t = g.taylor(c, static_cast<std::size_t>(m) + 1);
      auto fill = [&](int i) {
        for (std::size_t l = 0; l < na; ++l) {
          const std::size_t e = na - 1 - l;  // a_{l+1} multiplies z^{d-2-l}
          if (e >= static_cast<std::size_t>(i))
            jac(row, static_cast<Eigen::Index>(l)) =
                binomial(e, static_cast<std::size_t>(i)) * ipow(c, e - static_cast<std::size_t>(i));
        }
        jac(row, static_cast<Eigen::Index>(na + j)) = static_cast<double>(i + 1) * t[static_cast<std::size_t>(i) + 1];
        ++row;
      };
      for (int i = 1; i <= m; ++i) fill(i);
      fill(0);
    }
    return jac;
  };

  double scale = 1.0;
  for (std::size_t j = 0; j < p; ++j) scale = std::max(scale, f0.poly().scale_at(profile0.points[j]));
  NewtonOptions opts;
  opts.tol = std::max(tol, 64.0 * kEps * scale);
  NewtonResult nr = newton_solve(F, J, x0, opts);

  std::vector<cd> a(na);
  for (std::size_t i = 0; i < na; ++i) a[i] = nr.x(static_cast<Eigen::Index>(i));
  std::vector<cd> cps(p);
  for (std::size_t j = 0; j < p; ++j) cps[j] = nr.x(static_cast<Eigen::Index>(na + j));

  // The equations force order >= m_j at each c_j and the orders add up to
  // d-1, so the structure is preserved unless points merged or an order grew.
  const ComplexPoly g = unpack(nr.x);
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t k = j + 1; k < p; ++k)
      if (std::abs(cps[j] - cps[k]) <= 1e-6 * (1.0 + std::abs(cps[j])))
        fail(ErrorKind::MultiplicityBroken, "critical points merged along the chart path");
    const int m = profile0.multiplicities[j];
    const auto t = g.taylor(cps[j], static_cast<std::size_t>(m) + 1);
    if (std::abs(t[static_cast<std::size_t>(m) + 1]) <= 1e-8 * g.scale_at(cps[j]))
      fail(ErrorKind::MultiplicityBroken, "critical multiplicity increased along the chart path");
  }

  bool real = f0.is_real();
  if (real) {
    for (cd v : target) real = real && nearly_real(v);
    for (cd c : a) real = real && std::abs(c.imag()) <= 1e-10;
  }
  if (real)
    for (cd& c : a) c = cd{c.real(), 0.0};
  return PolyChartSolution{PolyMap(d, std::move(a), real), std::move(cps), std::move(nr)};
}

PolyMap coeffs_from_critical_values(const PolyMap& f0, std::span<const cd> target, double tol) {
  return solve_poly_chart(f0, critical_profile(f0), target, tol).map;
}

PartialDerivativePoly partial_derivative_poly(const PolyMap& f, const CriticalProfile& profile, int k) {
  require(k >= 0 && static_cast<std::size_t>(k) < profile.size(), "critical index out of range");
  std::vector<std::vector<cd>> targets(profile.size());
  for (std::size_t j = 0; j < profile.size(); ++j) {
    targets[j].assign(static_cast<std::size_t>(profile.multiplicities[j]), cd{0.0});
    if (j == static_cast<std::size_t>(k)) targets[j][0] = 1.0;
  }
  ComplexPoly pk = hermite_interpolate(profile.points, profile.multiplicities, targets,
                                       static_cast<std::size_t>(f.degree() - 1));
  return PartialDerivativePoly{k, std::move(pk)};
}

PartialDerivativePoly partial_derivative_poly(const PolyMap& f, int k) {
  return partial_derivative_poly(f, critical_profile(f), k);
}

double fd_check_partial(const PolyMap& f, int k, double h) {
  require(h > 0.0, "finite-difference step must be positive");
  const CriticalProfile prof = critical_profile(f);
  const PartialDerivativePoly pk = partial_derivative_poly(f, prof, k);
  std::vector<cd> plus = prof.values, minus = prof.values;
  plus[static_cast<std::size_t>(k)] += h;
  minus[static_cast<std::size_t>(k)] -= h;
  const PolyMap gp = solve_poly_chart(f, prof, plus).map;
  const PolyMap gm = solve_poly_chart(f, prof, minus).map;
  double worst = 0.0;
  for (int ix = -2; ix <= 2; ++ix) {
    for (int iy = -2; iy <= 2; ++iy) {
      const cd z{0.75 * ix, 0.75 * iy};
      const cd fd = (gp(z) - gm(z)) / (2.0 * h);
      const cd exact = pk.poly(z);
      worst = std::max(worst, std::abs(fd - exact) / (1.0 + std::abs(exact)));
    }
  }
  return worst;
}

}  // namespace tlab
