#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "tlab/error.hpp"
#include "tlab/orbit_engine.hpp"

using namespace tlab;

namespace {

ComplexPoly poly(std::initializer_list<cd> c) { return ComplexPoly(std::vector<cd>(c)); }

DynamicMap chebyshev() { return DynamicMap::polynomial(PolyMap(2, {-2.0}, true)); }
DynamicMap misiurewicz_i() { return DynamicMap::polynomial(PolyMap(2, {cd{0.0, 1.0}})); }
DynamicMap cubic_pm1() { return DynamicMap::polynomial(PolyMap(3, {-3.0, 0.0}, true)); }
DynamicMap rat_pole() { return DynamicMap::rational(RationalMap(0.25, -1.0, poly({1.0}), poly({1.0, 0.0}))); }
DynamicMap rat_inf() { return DynamicMap::rational(RationalMap(0.25, 0.0, poly({1.0}), poly({1.0, 0.0, 0.0}))); }
DynamicMap rat_h() { return DynamicMap::rational(RationalMap(2.0, 0.0, poly({1.0}), poly({1.0, 0.0}))); }
DynamicMap rat_nd() { return DynamicMap::rational(RationalMap(1.0, 0.0, poly({1.0}), poly({1.0, 0.0}))); }

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidInput;
}

// d/dt f_t^m(c_j(t)) along the chart direction of `slot`, by the
// tangent-linear recurrence y_{n+1} = f'(x_n) y_n + u(x_n), y_1 = u(c_j).
std::vector<cd> tangent_linear(const DynamicMap& f, int j, std::size_t slot, int m_max) {
  std::vector<cd> y;
  cd x = f.profile().points[static_cast<std::size_t>(j)];
  cd yn = f.tangent(slot, x);
  x = f(x);
  y.push_back(yn);
  for (int m = 2; m <= m_max; ++m) {
    yn = f.derivative(x) * yn + f.tangent(slot, x);
    x = f(x);
    y.push_back(yn);
  }
  return y;
}

}  // namespace

TEST_CASE("iterate_orbit: chebyshev") {
  const auto f = chebyshev();
  const auto t = iterate_orbit(f, -2.0, 5);
  REQUIRE(t.points.size() == 6);
  CHECK(t.termination == Termination::Budget);
  const cd pts[] = {-2.0, 2.0, 2.0, 2.0};
  const cd ders[] = {1.0, -4.0, -16.0, -64.0};
  for (std::size_t n = 0; n < 4; ++n) {
    CHECK(t.points[n] == pts[n]);
    CHECK(t.derivatives[n] == ders[n]);
  }
  for (std::size_t n = 0; n + 1 < t.points.size(); ++n)
    CHECK(t.derivatives[n + 1] == f.derivative(t.points[n]) * t.derivatives[n]);
}

TEST_CASE("iterate_orbit: period-2 tail and monotone rational orbit") {
  const auto t = iterate_orbit(misiurewicz_i(), cd{0.0, 1.0}, 6);
  const cd expect[] = {cd{0, 1}, cd{-1, 1}, cd{0, -1}, cd{-1, 1}, cd{0, -1}};
  for (std::size_t n = 0; n < 5; ++n) CHECK(std::abs(t.points[n] - expect[n]) < 1e-15);

  const auto r = iterate_orbit(rat_nd(), 2.0, 200);
  CHECK(r.termination == Termination::Budget);
  for (std::size_t n = 0; n + 1 < r.points.size(); ++n) CHECK(r.points[n + 1].real() > r.points[n].real());
}

TEST_CASE("iterate_orbit: terminations") {
  // z^2 - 1: 0 -> -1 -> 0 lands on the critical point.
  const auto sa = DynamicMap::polynomial(PolyMap(2, {-1.0}));
  const auto t = iterate_orbit(sa, -1.0, 20);
  CHECK(t.termination == Termination::HitCritical);
  CHECK(t.stop_index == 1);
  CHECK(summability_diagnostic(t).status == SeriesStatus::Diverged);

  const auto esc = iterate_orbit(DynamicMap::polynomial(PolyMap(2, {1.0})), 1.0, 50);
  CHECK(esc.termination == Termination::Escaped);

  // rat_pole: c = 2 has value 0, a pole, so l = 1.
  const auto f = rat_pole();
  const auto tp = critical_orbit(f, 1, 50);
  CHECK(tp.termination == Termination::HitInfinity);
  CHECK(tp.stop_index == 1);
  // s_0 = 1, s_1 = 1 and the tail is geometric with ratio 1/4.
  const auto sp = summability_diagnostic(tp);
  CHECK(sp.status == SeriesStatus::Converged);
  CHECK(std::abs(sp.value - 7.0 / 3.0) < 1e-14);

  const auto ti = iterate_orbit(rat_inf(), ExtPoint::infinity(), 10);
  CHECK(ti.stop_index == 0);
  CHECK(std::abs(summability_diagnostic(ti).value - 4.0 / 3.0) < 1e-15);

  const auto th = critical_orbit(rat_h(), 1, 200);
  CHECK(th.termination == Termination::HitInfinity);
  CHECK(summability_diagnostic(th).status == SeriesStatus::Diverged);
}

TEST_CASE("summability_diagnostic") {
  const auto s = summability_diagnostic(iterate_orbit(chebyshev(), -2.0, 200));
  CHECK(s.status == SeriesStatus::Converged);
  CHECK(std::abs(s.value - 4.0 / 3.0) < 1e-14);
  CHECK(s.tail_bound <= 1e-10);

  // z + z^2 is conjugate to z^2 + 1/4; the critical value lies on the
  // parabolic orbit.
  const auto par = DynamicMap::polynomial(PolyMap(2, {0.25}));
  CHECK(summability_diagnostic(iterate_orbit(par, 0.25, 500)).status == SeriesStatus::Diverged);
}

TEST_CASE("similarity_factor oracles") {
  SeriesOptions tight;
  tight.tol = 1e-13;
  const auto s = similarity_factor(chebyshev(), 0, Slot::value(0), tight);
  CHECK(s.status == SeriesStatus::Converged);
  CHECK(s.terms_used <= 60);
  CHECK(std::abs(s.value - 2.0 / 3.0) <= 1e-12);

  const auto m = similarity_factor(misiurewicz_i(), 0, Slot::value(0), tight);
  CHECK(std::abs(m.value - cd{0.8, -0.4}) <= 1e-12);

  const auto c = cubic_pm1();
  CHECK(std::abs(similarity_factor(c, 0, Slot::value(0)).value - 15.0 / 16.0) < 1e-12);
  CHECK(std::abs(similarity_factor(c, 0, Slot::value(1)).value - 3.0 / 16.0) < 1e-12);
  CHECK(std::abs(similarity_factor(c, 1, Slot::value(0)).value - 3.0 / 16.0) < 1e-12);
  CHECK(std::abs(similarity_factor(c, 1, Slot::value(1)).value - 15.0 / 16.0) < 1e-12);
}

TEST_CASE("similarity_factor errors and truncation") {
  const auto par = DynamicMap::polynomial(PolyMap(2, {0.25}));
  CHECK(kind_of([&] { similarity_factor(par, 0, Slot::value(0)); }) == ErrorKind::DivergenceDetected);
  CHECK(kind_of([&] { similarity_factor(rat_inf(), 3, Slot::sigma()); }) == ErrorKind::InvalidInput);
  CHECK(kind_of([&] { similarity_factor(chebyshev(), 0, Slot::sigma()); }) == ErrorKind::InvalidInput);

  const auto f = rat_pole();
  for (const Slot& s : f.slots()) {
    const auto v = similarity_factor(f, 1, s);
    CHECK(v.status == SeriesStatus::TruncatedAtInfinity);
    CHECK(v.terms_used == 1);
  }
}

TEST_CASE("ratio_sequence") {
  const auto r = ratio_sequence(chebyshev(), 0, Slot::value(0), 40);
  CHECK(r.ratios[0] == cd{1.0});
  CHECK(std::abs(r.ratios[1] - 0.75) < 1e-15);
  CHECK(std::abs(r.ratios[2] - 0.6875) < 1e-15);
  CHECK(std::abs(r.ratios.back() - 2.0 / 3.0) < 1e-15);

  const auto c = ratio_sequence(cubic_pm1(), 0, Slot::value(1), 20);
  CHECK(std::abs(c.ratios[0]) < 1e-15);
  CHECK(std::abs(c.ratios[1] - 1.0 / 6.0) < 1e-15);

  // Distance to the limit is nonincreasing and ends below the tail bound.
  const auto f = misiurewicz_i();
  const auto lim = similarity_factor(f, 0, Slot::value(0));
  const auto seq = ratio_sequence(f, 0, Slot::value(0), 60);
  for (std::size_t m = 2; m + 1 < seq.ratios.size(); ++m)
    CHECK(std::abs(seq.ratios[m + 1] - lim.value) <= std::abs(seq.ratios[m] - lim.value) + 1e-15);
  CHECK(std::abs(seq.ratios.back() - lim.value) <= lim.tail_bound + 1e-14);

  // Constant beyond the hitting time l = 1.
  const auto rp = rat_pole();
  const auto q = ratio_sequence(rp, 1, Slot::b(), 8);
  CHECK(q.hit_infinity_at == 1);
  for (std::size_t m = 2; m < q.ratios.size(); ++m) CHECK(q.ratios[m] == q.ratios[1]);
  CHECK(q.ratios[1] == similarity_factor(rp, 1, Slot::b()).value);
}

TEST_CASE("ratio_sequence matches parameter derivatives") {
  for (const auto& f : {chebyshev(), misiurewicz_i(), cubic_pm1()}) {
    for (std::size_t j = 0; j < f.profile().size(); ++j) {
      for (std::size_t k = 0; k < f.slots().size(); ++k) {
        const int m_max = 12;
        const auto seq = ratio_sequence(f, static_cast<int>(j), f.slots()[k], m_max);
        const auto y = tangent_linear(f, static_cast<int>(j), k, m_max);
        for (int m = 1; m <= m_max; ++m) {
          const auto i = static_cast<std::size_t>(m - 1);
          const cd lhs = seq.ratios[i] * seq.derivatives[i];
          CHECK(std::abs(lhs - y[i]) <= 1e-9 * (1.0 + std::abs(y[i])));
        }
      }
    }
  }

  // Central differences through the chart for the first few iterates.
  const auto f = misiurewicz_i();
  const double h = 1e-7;
  const std::vector<cd> dp{h}, dm{-h};
  const auto gp = f.chart_point(dp), gm = f.chart_point(dm);
  const auto seq = ratio_sequence(f, 0, Slot::value(0), 4);
  cd xp = gp.critical_points[0], xm = gm.critical_points[0];
  for (int m = 1; m <= 4; ++m) {
    xp = gp(xp);
    xm = gm(xm);
    const cd fd = (xp - xm) / (2.0 * h);
    const auto i = static_cast<std::size_t>(m - 1);
    const cd exact = seq.ratios[i] * seq.derivatives[i];
    CHECK(std::abs(fd - exact) <= 1e-5 * std::abs(exact));
  }
}

TEST_CASE("direction_limit") {
  const auto c = cubic_pm1();
  const std::vector<cd> ones{1.0, 1.0}, mixed{1.0, -5.0};
  CHECK(std::abs(direction_limit(c, ones, 0) - 9.0 / 8.0) < 1e-12);
  CHECK(std::abs(direction_limit(c, mixed, 0)) < 1e-12);
  CHECK(std::abs(direction_limit(c, mixed, 1) + 4.5) < 1e-12);
  const std::vector<cd> e2{0.0, 1.0};
  CHECK(direction_limit(c, e2, 1) == similarity_factor(c, 1, Slot::value(1)).value);
  const std::vector<cd> short_vec{1.0};
  CHECK(kind_of([&] { direction_limit(c, short_vec, 0); }) == ErrorKind::InvalidInput);
}

TEST_CASE("omega_estimate") {
  const auto w = omega_estimate(iterate_orbit(chebyshev(), -2.0, 100), 10);
  REQUIRE(w.size() == 1);
  CHECK(w[0] == cd{2.0});

  const auto p = omega_estimate(iterate_orbit(misiurewicz_i(), cd{0.0, 1.0}, 100), 10);
  REQUIRE(p.size() == 2);
  // Burn-in 10 starts on -i.
  CHECK(std::abs(p[0] - cd{0.0, -1.0}) + std::abs(p[1] - cd{-1.0, 1.0}) < 1e-14);

  // An orbit dense in [-2, 2] keeps adding points.
  const auto f = chebyshev();
  const cd v = 2.0 * std::cos(1.0);
  const auto a = omega_estimate(iterate_orbit(f, v, 100), 10);
  const auto b = omega_estimate(iterate_orbit(f, v, 200), 10);
  CHECK(b.size() > a.size());
  CHECK(kind_of([&] { omega_estimate(iterate_orbit(f, v, 5), 10); }) == ErrorKind::InvalidInput);
}
