#include <cmath>
#include <complex>

#include "doctest.h"
#include "tlab/error.hpp"
#include "tlab/rat_space.hpp"

using namespace tlab;

namespace {

ComplexPoly poly(std::initializer_list<cd> c) { return ComplexPoly(std::vector<cd>(c)); }

RationalMap rat_h() { return RationalMap(2.0, 0.0, poly({1.0}), poly({1.0, 0.0})); }
RationalMap rat_nd() { return RationalMap(1.0, 0.0, poly({1.0}), poly({1.0, 0.0})); }
RationalMap rat_inf() { return RationalMap(0.25, 0.0, poly({1.0}), poly({1.0, 0.0, 0.0})); }
RationalMap rat_pole() { return RationalMap(0.25, -1.0, poly({1.0}), poly({1.0, 0.0})); }

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::InvalidInput;
}

}  // namespace

TEST_CASE("RationalMap validation") {
  CHECK(kind_of([] { RationalMap(0.0, 0.0, poly({1.0}), poly({1.0, 0.0})); }) == ErrorKind::InvalidInput);
  CHECK(kind_of([] { RationalMap(1.0, 0.0, poly({1.0, 0.0}), poly({1.0, 0.0})); }) == ErrorKind::InvalidInput);
  // P and Q share the root 0.
  CHECK(kind_of([] { RationalMap(1.0, 0.0, poly({1.0, 0.0}), poly({1.0, 0.0, 0.0})); }) == ErrorKind::InvalidInput);
  const RationalMap f(1.0, 0.0, poly({2.0}), poly({2.0, 0.0}));
  CHECK(f.Q().leading() == cd{1.0});
  CHECK(std::abs(f(2.0) - 2.5) < 1e-15);
}

TEST_CASE("rational_critical_profile") {
  auto nd = rational_critical_profile(rat_nd());
  REQUIRE(nd.size() == 2);
  CHECK(std::abs(nd.points[0] + 1.0) < 1e-14);
  CHECK(std::abs(nd.values[0] + 2.0) < 1e-13);
  CHECK(std::abs(nd.values[1] - 2.0) < 1e-13);

  auto h = rational_critical_profile(rat_h());
  REQUIRE(h.size() == 2);
  CHECK(std::abs(h.points[1] - 1.0 / std::sqrt(2.0)) < 1e-14);
  CHECK(std::abs(h.values[1] - 2.0 * std::sqrt(2.0)) < 1e-13);

  auto inf = rational_critical_profile(rat_inf());
  REQUIRE(inf.size() == 4);
  CHECK(inf.finite_count() == 3);
  CHECK(inf.value_infinite[3]);
  CHECK(std::abs(inf.points[3]) < 1e-12);
  CHECK(inf.total_multiplicity() == 4);
  CHECK(std::abs(inf.values[2] - 0.75) < 1e-12);
}

TEST_CASE("classify: case H at infinity is a scaling") {
  const auto cls = classify(rat_h());
  CHECK(cls.space_case == SpaceCase::H);
  CHECK(cls.fixed_points[static_cast<std::size_t>(cls.selected_fixed_point)].point.inf);
  CHECK(std::abs(cls.normalizer.b()) < 1e-15);
  CHECK(std::abs(cls.normalizer.c()) < 1e-15);
  const RationalMap& g = cls.normalized;
  CHECK(std::abs(g.sigma() - 2.0) < 1e-14);
  CHECK(std::abs(g.b()) == 0.0);
  CHECK(std::abs(g(1.0) - (2.0 + 1.0 / 8.0)) < 1e-13);
  const std::size_t p = cls.profile.finite_count();
  CHECK(std::abs(cls.profile.values[p - 1] - 1.0) < 1e-12);
}

TEST_CASE("classify: parabolic cases") {
  const auto nd = classify(rat_nd());
  CHECK(nd.space_case == SpaceCase::ND);
  const std::size_t p = nd.profile.finite_count();
  CHECK(std::abs(nd.profile.values[p - 2] - 1.0) < 1e-12);
  CHECK(std::abs(nd.profile.values[p - 1]) < 1e-12);

  const RationalMap nn_map(1.0, 1.0, poly({1.0}), poly({1.0, 0.0}));
  const auto nn = classify(nn_map);
  CHECK(nn.space_case == SpaceCase::NN);
  CHECK(nn.normalized.b() == cd{1.0});

  ClassifyOptions wrong;
  wrong.asserted_case = SpaceCase::H;
  CHECK(kind_of([&] { classify(nn_map, wrong); }) == ErrorKind::CaseMismatch);

  const RationalMap near_parabolic(1.0 + 1e-10, 0.0, poly({1.0}), poly({1.0, 0.0}));
  CHECK(kind_of([&] { classify(near_parabolic); }) == ErrorKind::AmbiguousClassification);
  ClassifyOptions assert_nd;
  assert_nd.asserted_case = SpaceCase::ND;
  CHECK(classify(near_parabolic, assert_nd).space_case == SpaceCase::ND);
}

TEST_CASE("classify: finite fixed point moved to infinity") {
  // z + 1 + 2/z: infinity is parabolic, -2 is attracting with multiplier 1/2.
  const RationalMap f(1.0, 1.0, poly({2.0}), poly({1.0, 0.0}));
  const auto cls = classify(f);
  CHECK(cls.space_case == SpaceCase::H);
  CHECK(std::abs(cls.normalized.sigma() - 2.0) < 1e-12);
  verify_case_conditions(cls.normalized, cls.profile, SpaceCase::H);
  for (cd z : {cd{0.3, 0.7}, cd{-1.1, 0.4}, cd{2.0, -0.5}}) {
    const ExtPoint lhs = cls.normalizer.apply(f.apply({z, false}));
    const ExtPoint rhs = cls.normalized.apply(cls.normalizer({z, false}));
    CHECK(chordal_distance(lhs, rhs) < 1e-10);
  }
}

TEST_CASE("classify: rat_pole and rat_inf") {
  const auto pole = classify(rat_pole());
  CHECK(pole.space_case == SpaceCase::H);
  verify_case_conditions(pole.normalized, pole.profile, SpaceCase::H);
  const auto inf = classify(rat_inf());
  CHECK(inf.space_case == SpaceCase::H);
  CHECK(inf.profile.finite_count() == 3);
  CHECK(inf.profile.value_infinite[3]);
}

TEST_CASE("rational_partial_derivative closed forms") {
  const RationalMap f = rat_h();
  const auto prof = rational_critical_profile(f);
  const ComplexPoly ns = rational_partial_derivative(f, prof, Slot::sigma());
  const cd z = 2.0;
  CHECK(std::abs(ns(z) / (f.Q()(z) * f.Q()(z)) - 1.75) < 1e-14);
  const ComplexPoly nb = rational_partial_derivative(f, prof, Slot::b());
  CHECK(std::abs(nb(z) / (f.Q()(z) * f.Q()(z)) - f.derivative(z) / 2.0) < 1e-14);

  const ComplexPoly d2 = f.wronskian().derivative();  // f'' = W'/Q^2 at a critical point
  for (int k = 0; k < 2; ++k) {
    const ComplexPoly nk = rational_partial_derivative(f, prof, Slot::value(k));
    const cd c = prof.points[static_cast<std::size_t>(k)];
    const cd qc = f.Q()(c);
    const cd fpp = d2(c) / (qc * qc);
    for (cd w : {cd{0.4, 1.1}, cd{-2.0, 0.3}}) {
      const cd q = f.Q()(w);
      const cd expected = f.derivative(w) / (fpp * (w - c));
      CHECK(std::abs(nk(w) / (q * q) - expected) < 1e-12);
    }
  }
}

TEST_CASE("rational partial derivatives match the chart by central differences") {
  for (const RationalMap& f : {rat_h(), rat_inf(), rat_pole()}) {
    const auto prof = rational_critical_profile(f);
    const auto slots = rational_slots(prof);
    const auto base = rational_chart_coordinates(f, prof);
    const double h = 1e-6;
    for (std::size_t s = 0; s < slots.size(); ++s) {
      auto plus = base, minus = base;
      plus[s] += h;
      minus[s] -= h;
      const RationalMap gp = solve_rational_chart(f, prof, plus).map;
      const RationalMap gm = solve_rational_chart(f, prof, minus).map;
      const ComplexPoly N = rational_partial_derivative(f, prof, slots[s]);
      for (cd z : {cd{0.5, 1.2}, cd{-1.3, 0.4}, cd{2.2, -0.7}}) {
        const cd q = f.Q()(z);
        const cd exact = N(z) / (q * q);
        const cd fd = (gp(z) - gm(z)) / (2.0 * h);
        CHECK(std::abs(fd - exact) <= 1e-6 * (1.0 + std::abs(exact)));
      }
    }
  }
}

TEST_CASE("Mobius conjugation") {
  const RationalMap f = rat_h();
  const auto prof = rational_critical_profile(f);
  const auto same = mobius_conjugated_space(f, prof, MobiusTransform::identity());
  for (cd z : {cd{0.3, 0.2}, cd{-1.0, 2.0}})
    CHECK(chordal_distance(same.map.apply({z, false}), f.apply({z, false})) < 1e-14);
  CHECK(std::abs(conversion_factor(same, 0, 1) - 1.0) < 1e-15);

  const MobiusTransform M = choose_probe_mobius(f, prof);
  const auto conj = mobius_conjugated_space(f, prof, M);
  CHECK(conj.min_orbit_distance >= 0.1);
  const MobiusTransform Minv = M.inverse();
  for (cd z : {cd{0.3, 0.2}, cd{-1.0, 2.0}, cd{2.5, -0.1}}) {
    const ExtPoint direct = Minv.apply(f.apply(M({z, false})));
    CHECK(chordal_distance(direct, conj.map.apply({z, false})) < 1e-10);
  }
  for (std::size_t j = 0; j < prof.size(); ++j) {
    const ExtPoint cj = conj.points[j];
    const ExtPoint image = conj.map.apply(cj);
    CHECK(chordal_distance(image, conj.values[j]) < 1e-10);
  }

  // M(inf) = -alpha placed on the critical value v_1 collides.
  const cd alpha = -prof.values[0];
  CHECK(kind_of([&] { mobius_conjugated_space(f, prof, MobiusTransform(alpha, 0.0, -1.0, alpha)); }) ==
        ErrorKind::OrbitCollision);
}

TEST_CASE("MobiusTransform algebra") {
  const MobiusTransform M(1.0, 2.0, cd{0.5, 1.0}, 3.0);
  const MobiusTransform I = M.compose(M.inverse());
  const ExtPoint z = I({cd{0.7, -0.2}, false});
  CHECK(std::abs(z.z - cd{0.7, -0.2}) < 1e-14);
  CHECK(M.apply(ExtPoint::infinity()).z == cd{1.0} / cd{0.5, 1.0});
  CHECK_THROWS_AS(MobiusTransform(1.0, 2.0, 2.0, 4.0), Error);
}
