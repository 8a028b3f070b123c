#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "doctest.h"
#include "tlab/error.hpp"
#include "tlab/ruelle_operator.hpp"

using namespace tlab;

namespace {

ComplexPoly poly(std::initializer_list<cd> c) { return ComplexPoly(std::vector<cd>(c)); }

DynamicMap square() { return DynamicMap::polynomial(PolyMap(2, {0.0})); }
DynamicMap chebyshev() { return DynamicMap::polynomial(PolyMap(2, {-2.0}, true)); }
DynamicMap misiurewicz_i() { return DynamicMap::polynomial(PolyMap(2, {cd{0.0, 1.0}})); }
DynamicMap cubic_pm1() { return DynamicMap::polynomial(PolyMap(3, {-3.0, 0.0}, true)); }
DynamicMap rat_h() { return DynamicMap::rational(RationalMap(2.0, 0.0, poly({1.0}), poly({1.0, 0.0}))); }
DynamicMap rat_nd() { return DynamicMap::rational(RationalMap(1.0, 0.0, poly({1.0}), poly({1.0, 0.0}))); }
DynamicMap rat_inf() { return DynamicMap::rational(RationalMap(0.25, 0.0, poly({1.0}), poly({1.0, 0.0, 0.0}))); }

bool contains(const std::vector<cd>& pts, cd x) {
  return std::any_of(pts.begin(), pts.end(), [x](cd p) { return std::abs(p - x) < 1e-12; });
}

}  // namespace

TEST_CASE("preimages") {
  const auto a = square().preimages(1.0);
  REQUIRE(a.size() == 2);
  CHECK((contains(a, 1.0) && contains(a, -1.0)));
  const auto b = chebyshev().preimages(2.0);
  CHECK((contains(b, 2.0) && contains(b, -2.0)));
  const auto c = rat_nd().preimages(2.5);
  REQUIRE(c.size() == 2);
  CHECK((contains(c, 2.0) && contains(c, 0.5)));
  CHECK(cubic_pm1().preimages(cd{0.3, 0.1}).size() == 3);
  CHECK_THROWS_AS(chebyshev().preimages(-2.0), Error);
}

TEST_CASE("apply_T") {
  const auto f = square();
  CHECK(apply_T(f, [](cd) { return cd{0.0}; }, 1.0) == cd{0.0});
  CHECK(std::abs(apply_T(f, [](cd w) { return 1.0 / (2.0 - w); }, 1.0) - 1.0 / 3.0) < 1e-15);
  CHECK(std::abs(apply_T(f, [](cd) { return cd{1.0}; }, 1.0) - 0.5) < 1e-15);

  const auto g = cubic_pm1();
  const cd x{0.7, -1.1}, al{2.0, 1.0}, be{-0.5, 0.3};
  auto phi = [](cd w) { return 1.0 / (w - cd{0.2, 0.9}); };
  auto psi = [](cd w) { return w * w; };
  const cd lhs = apply_T(g, [&](cd w) { return al * phi(w) + be * psi(w); }, x);
  const cd rhs = al * apply_T(g, phi, x) + be * apply_T(g, psi, x);
  CHECK(std::abs(lhs - rhs) < 1e-12);
}

TEST_CASE("kernel identity") {
  const auto k = kernel_identity(square(), 2.0, 1.0);
  CHECK(std::abs(k.lhs - 1.0 / 3.0) < 1e-12);
  CHECK(std::abs(k.rhs - 1.0 / 3.0) < 1e-12);
  CHECK(k.residual <= 1e-12);

  for (const auto& f : {cubic_pm1(), rat_h(), rat_inf()}) {
    const auto excl = probe_exclusions(f);
    double worst = 0.0;
    for (std::uint64_t i = 0; i < 50; ++i) {
      const auto pr = sample_probe_pair(f, 7, i, excl);
      worst = std::max(worst, kernel_identity_residual(f, pr.z, pr.x));
    }
    CHECK(worst <= 1e-9);
  }
}

TEST_CASE("local_L_coefficients") {
  const auto q = local_L_coefficients(square(), 0);
  REQUIRE(q.q.size() == 1);
  CHECK(std::abs(q.q[0] - 0.5) < 1e-15);

  const auto dbl = DynamicMap::polynomial(PolyMap(3, {0.0, cd{0.4, 0.2}}));
  const auto qd = local_L_coefficients(dbl, 0);
  REQUIRE(qd.q.size() == 2);
  CHECK(std::abs(qd.q[0] - 1.0 / 3.0) < 1e-15);
  CHECK(std::abs(qd.q[1]) < 1e-15);

  // f' L_j - delta_{jk} vanishes to order m_k at c_k.
  const auto f = cubic_pm1();
  for (int j = 0; j < 2; ++j) {
    const auto lj = local_L_coefficients(f, j);
    for (int kk = 0; kk < 2; ++kk) {
      const cd c = f.profile().points[static_cast<std::size_t>(kk)];
      const double delta = j == kk ? 1.0 : 0.0;
      auto g = [&](double h) { return std::abs(f.derivative(c + h) * eval_local_L(f, lj, c + h) - delta); };
      CHECK(g(1e-4) <= 1e-3);
      CHECK(g(1e-4) <= 0.2 * g(1e-3) + 1e-14);
    }
  }

  // Both forms of L_k agree away from the critical points, and the
  // partial-fraction form takes over near them.
  const auto h = rat_h();
  for (int kk = 0; kk < 2; ++kk) {
    const auto lk = local_L_coefficients(h, kk);
    for (cd z : {cd{0.3, 1.2}, cd{-2.0, 0.4}}) {
      const cd a = eval_local_L(h, lk, z);
      const cd b = h.tangent_ratio(h.slot_index(Slot::value(kk)), z);
      CHECK(std::abs(a - b) < 1e-12 * (1.0 + std::abs(a)));
    }
    const cd near = h.profile().points[static_cast<std::size_t>(kk)] + cd{3e-5, 1e-5};
    CHECK(L_function(h, kk, near) == eval_local_L(h, lk, near));
  }
  CHECK_THROWS_AS(local_L_coefficients(rat_inf(), 3), Error);
}

TEST_CASE("varphi_eval") {
  const auto f = chebyshev();
  const cd z{0.4, 0.3}, x{1.1, -0.2};
  CHECK(varphi_eval(f, z, 0.0, x).value == 1.0 / (z - x));

  const cd i{0.0, 1.0};
  const auto s = varphi_eval(f, -2.0, 1.0, i);
  CHECK(s.status == SeriesStatus::Converged);
  CHECK(std::abs(s.value - (1.0 / (-2.0 - i) - (1.0 / 3.0) / (2.0 - i))) < 1e-14);

  const auto r = varphi_eval(rat_nd(), i, 1.0, x);
  CHECK(r.status == SeriesStatus::TruncatedAtInfinity);
  CHECK(r.terms_used == 2);
  CHECK(std::abs(r.value - (1.0 / (i - x) + 1.0 / (0.0 - x) / (1.0 - 1.0 / (i * i)))) < 1e-14);

  CHECK_THROWS_AS(varphi_eval(f, -2.0, 8.0, i, 200), Error);
}

TEST_CASE("resolvent identity") {
  const cd x{0.9, 1.3};
  CHECK(resolvent_identity_residual(chebyshev(), cd{0.3, 0.2}, 0.0, x).residual == 0.0);

  const auto f = chebyshev();
  const auto excl = probe_exclusions(f);
  for (std::uint64_t i = 0; i < 10; ++i) {
    const cd xi = sample_probe(3, i, 1, excl);
    const auto r = resolvent_identity_residual(f, -2.0, 1.0, xi, 200);
    CHECK(r.residual <= r.truncation + 1e-9);
    CHECK(r.corrected <= 1e-10);
  }

  const auto g = cubic_pm1();
  const auto ex = probe_exclusions(g);
  for (std::uint64_t i = 0; i < 20; ++i) {
    const auto pr = sample_probe_pair(g, 11, i, ex);
    CHECK(resolvent_identity_residual(g, pr.z, 0.5, pr.x).residual <= 1e-8);
  }

  // Truncation at l(z) = 2 is exact for z + 1/z at z = i.
  const auto h = rat_nd();
  const auto t = resolvent_identity_residual(h, cd{0.0, 1.0}, 0.7, x);
  CHECK(t.truncation == 0.0);
  CHECK(t.residual <= 1e-13);
}

TEST_CASE("fixed-point relation") {
  const cd i{0.0, 1.0};
  CHECK(fixed_point_residual(chebyshev(), 0, i, 60).residual <= 1e-10);
  CHECK(fixed_point_residual(misiurewicz_i(), 0, cd{0.3, 0.2}).residual <= 1e-9);
  const auto g = cubic_pm1();
  const auto ex = probe_exclusions(g);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const cd x = sample_probe(5, s, 1, ex);
    for (int j = 0; j < 2; ++j) {
      const auto a = fixed_point_residual(g, j, x, 200);
      const auto b = fixed_point_residual(g, j, x, 400);
      CHECK(a.residual <= 1e-9);
      CHECK(b.residual <= std::max(a.residual, 1e-12));
    }
  }
  // A short budget leaves a visible tail that the truncation term accounts for.
  const auto s = fixed_point_residual(misiurewicz_i(), 0, cd{0.3, 0.2}, 5);
  CHECK(s.residual > 1e-6);
  CHECK(std::abs(s.residual - s.truncation) <= 1e-10);
  CHECK(s.corrected <= 1e-10);
}

TEST_CASE("regularize") {
  const std::vector<cd> one{1.0}, zero{0.0};
  const auto single = regularize(KernelCombination::make(one, zero));
  CHECK(single.A == cd{1.0});
  CHECK(single.B == cd{0.0});

  const auto reg = regularize(h_combination(chebyshev(), 0));
  CHECK(reg.base.poles.size() == 2);
  CHECK(std::abs(reg.A - 2.0 / 3.0) < 1e-14);
  CHECK(std::abs(reg.B + 8.0 / 3.0) < 1e-14);

  const std::vector<cd> w{cd{0.5, 0.5}, cd{0.5, 0.5}}, b{cd{1.0, 2.0}, cd{-1.0, -2.0}};
  const auto sym = regularize(KernelCombination::make(w, b));
  CHECK(sym.B == cd{0.0});
  // H + A/x + B/x^2 decays like 1/x^3.
  const cd far = std::polar(1e4, 0.3);
  CHECK(std::abs(reg(far)) < 1e-10);

  const auto diag = asymptotic_diagnostic(rat_h());
  REQUIRE(diag.size() == 2);
  CHECK(diag[0].error < 1e-8);
  CHECK(diag[1].error < 1e-2 * diag[0].error);
  CHECK_THROWS_AS(asymptotic_diagnostic(chebyshev()), Error);
}

TEST_CASE("probe sampling") {
  const auto f = chebyshev();
  const auto excl = probe_exclusions(f);
  const cd a = sample_probe(42, 3, 0, excl);
  CHECK(a == sample_probe(42, 3, 0, excl));
  CHECK(a != sample_probe(42, 4, 0, excl));
  CHECK(a != sample_probe(43, 3, 0, excl));
  for (std::uint64_t i = 0; i < 200; ++i) {
    const cd p = sample_probe(1, i, 0, excl);
    CHECK(std::abs(p) >= 0.5);
    CHECK(std::abs(p) <= 3.0);
    for (cd e : excl) CHECK(std::abs(p - e) >= 1e-3);
  }
}
