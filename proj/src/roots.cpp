#include "tlab/roots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "tlab/error.hpp"

namespace tlab {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct DisjointSet {
  std::vector<std::size_t> parent;
  explicit DisjointSet(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

bool lex_less(cd a, cd b) {
  const double tie = 1e-9 * (1.0 + std::max(std::abs(a), std::abs(b)));
  if (std::abs(a.real() - b.real()) > tie) return a.real() < b.real();
  return a.imag() < b.imag();
}

double fujiwara_bound(const ComplexPoly& p) {
  const std::size_t n = p.degree();
  require(n >= 1, "fujiwara_bound needs a nonconstant polynomial");
  const double lead = std::abs(p.leading());
  double bound = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    double ratio = std::abs(p.coeffs()[k]) / lead;
    if (k == n) ratio *= 0.5;
    bound = std::max(bound, std::pow(ratio, 1.0 / static_cast<double>(k)));
  }
  return 2.0 * bound;
}

std::vector<cd> aberth_roots(const Evaluator& g, std::size_t degree, double radius,
                             const RootOptions& opts) {
  std::vector<cd> z(degree);
  if (degree == 0) return z;
  radius = std::max(radius, 1e-3);
  // Perturbed circle: irrational angular offset and a mild radial wobble so
  // that no start point sits on a symmetry axis of the polynomial.
  for (std::size_t k = 0; k < degree; ++k) {
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(degree) + 0.4;
    const double r = radius * (1.0 + 0.05 * std::sin(3.1 * static_cast<double>(k) + 0.7));
    z[k] = std::polar(r, angle);
  }
  std::vector<bool> done(degree, false);
  for (int iter = 0; iter < opts.max_iterations; ++iter) {
    bool all_done = true;
    for (std::size_t k = 0; k < degree; ++k) {
      if (done[k]) continue;
      cd v, dv;
      g.value_and_derivative(z[k], v, dv);
      const double scale = g.scale ? g.scale(z[k]) : 0.0;
      if (v == cd{0.0} || (scale > 0.0 && std::abs(v) <= 4.0 * kEps * scale)) {
        done[k] = true;
        continue;
      }
      const cd newton = v / dv;
      cd repulsion = 0.0;
      for (std::size_t j = 0; j < degree; ++j)
        if (j != k) repulsion += 1.0 / (z[k] - z[j]);
      cd step = newton / (1.0 - newton * repulsion);
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) step = newton;
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) step = cd{1e-8 * (1.0 + std::abs(z[k])), 0.0};
      z[k] -= step;
      if (std::abs(step) <= 2.0 * kEps * (1.0 + std::abs(z[k]))) done[k] = true;
      all_done = all_done && done[k];
    }
    if (all_done) break;
  }
  return z;
}

namespace {

std::vector<std::vector<std::size_t>> link_groups(const std::vector<cd>& roots, double threshold) {
  DisjointSet sets(roots.size());
  for (std::size_t i = 0; i < roots.size(); ++i)
    for (std::size_t j = i + 1; j < roots.size(); ++j)
      if (std::abs(roots[i] - roots[j]) <= threshold) sets.unite(i, j);
  std::vector<std::vector<std::size_t>> members(roots.size());
  for (std::size_t i = 0; i < roots.size(); ++i) members[sets.find(i)].push_back(i);
  std::vector<std::vector<std::size_t>> groups;
  for (auto& g : members)
    if (!g.empty()) groups.push_back(std::move(g));
  return groups;
}

RootCluster make_cluster(const std::vector<cd>& roots, const std::vector<std::size_t>& group,
                         double threshold, const ComplexPoly* p) {
  RootCluster c;
  c.multiplicity = static_cast<int>(group.size());
  cd sum = 0.0;
  for (std::size_t i : group) sum += roots[i];
  c.center = sum / static_cast<double>(group.size());
  if (p != nullptr && c.multiplicity > 1) {
    // The (m-1)-th derivative has a simple root at an m-fold root.
    const ComplexPoly dp = p->derivative(static_cast<std::size_t>(c.multiplicity - 1));
    cd x = c.center;
    double best = std::abs(dp(x));
    for (int it = 0; it < 8 && best > 0.0; ++it) {
      cd v, dv;
      dp.eval_with_derivative(x, v, dv);
      if (dv == cd{0.0}) break;
      const cd next = x - v / dv;
      const double r = std::abs(dp(next));
      if (!(r < best) || std::abs(next - c.center) > threshold) break;
      x = next;
      best = r;
    }
    c.center = x;
  }
  for (std::size_t i : group) c.radius = std::max(c.radius, std::abs(roots[i] - c.center));
  return c;
}

void sort_clusters(std::vector<RootCluster>& clusters) {
  std::sort(clusters.begin(), clusters.end(),
            [](const RootCluster& a, const RootCluster& b) { return lex_less(a.center, b.center); });
}

// A perturbed m-fold root splits into a ring of radius about
// (eps * scale / |t_m|)^(1/m), where t_m is the m-th Taylor coefficient.
bool consistent_multiple_root(const ComplexPoly& p, const RootCluster& c) {
  const auto t = p.taylor(c.center, static_cast<std::size_t>(c.multiplicity));
  const double tm = std::abs(t[static_cast<std::size_t>(c.multiplicity)]);
  if (tm == 0.0) return false;
  const double ring = std::pow(1e3 * kEps * p.scale_at(c.center) / tm, 1.0 / c.multiplicity);
  return c.radius <= 10.0 * ring;
}

}  // namespace

std::vector<RootCluster> cluster_roots(const std::vector<cd>& roots, double threshold,
                                       const ComplexPoly* p) {
  std::vector<RootCluster> clusters;
  for (const auto& group : link_groups(roots, threshold)) clusters.push_back(make_cluster(roots, group, threshold, p));
  sort_clusters(clusters);
  return clusters;
}

std::vector<RootCluster> find_roots(const ComplexPoly& p, const RootOptions& opts) {
  require(p.degree() >= 1, "find_roots needs a nonconstant polynomial");
  require(opts.tol > 0.0, "find_roots tolerance must be positive");
  Evaluator g{[&p](cd z, cd& v, cd& dv) { p.eval_with_derivative(z, v, dv); },
              [&p](cd z) { return p.scale_at(z); }};
  std::vector<cd> roots;
  if (p.degree() == 1) {
    roots.push_back(-p.coeffs()[1] / p.coeffs()[0]);
  } else {
    roots = aberth_roots(g, p.degree(), fujiwara_bound(p), opts);
  }
  double max_abs = 0.0;
  for (cd r : roots) max_abs = std::max(max_abs, std::abs(r));
  const double tight = opts.cluster_rel * (1.0 + max_abs);
  // Roots of multiplicity m >= 3 spread by about eps^(1/m), beyond the tight
  // threshold. Loose groups are kept whole only when their spread matches
  // that of a perturbed multiple root; otherwise they fall back to the
  // tight single-linkage clusters.
  std::vector<RootCluster> clusters;
  for (const auto& group : link_groups(roots, 1e-3 * (1.0 + max_abs))) {
    if (group.size() > 1) {
      const RootCluster merged = make_cluster(roots, group, 1e-3 * (1.0 + max_abs), &p);
      if (consistent_multiple_root(p, merged)) {
        clusters.push_back(merged);
        continue;
      }
    }
    std::vector<cd> sub;
    for (std::size_t i : group) sub.push_back(roots[i]);
    for (const auto& g : link_groups(sub, tight)) clusters.push_back(make_cluster(sub, g, tight, &p));
  }
  sort_clusters(clusters);
  for (const auto& c : clusters) {
    const double resid = std::abs(p(c.center));
    // Evaluate the rounding scale on a disc covering the cluster so a root at
    // the origin does not collapse the scale to zero.
    const double reach = std::abs(c.center) + c.radius + tight;
    if (!(resid <= opts.tol * p.scale_at(cd{reach, 0.0})))
      fail(ErrorKind::NonConvergence, "root iteration did not reach tolerance (residual " +
                                          std::to_string(resid) + ")");
  }
  return clusters;
}

}  // namespace tlab
