#include "tlab/complex_poly.hpp"

#include <algorithm>
#include <cmath>

#include "tlab/error.hpp"

namespace tlab {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::NonConvergence: return "NonConvergence";
    case ErrorKind::SingularJacobian: return "SingularJacobian";
    case ErrorKind::SingularSystem: return "SingularSystem";
    case ErrorKind::MultiplicityBroken: return "MultiplicityBroken";
    case ErrorKind::AmbiguousClassification: return "AmbiguousClassification";
    case ErrorKind::OrbitCollision: return "OrbitCollision";
    case ErrorKind::DivergenceDetected: return "DivergenceDetected";
    case ErrorKind::CriticalValueCollision: return "CriticalValueCollision";
    case ErrorKind::CaseMismatch: return "CaseMismatch";
    case ErrorKind::Inconclusive: return "Inconclusive";
  }
  return "Unknown";
}

cd ipow(cd z, std::size_t n) {
  cd acc = 1.0;
  while (n > 0) {
    if (n & 1U) acc *= z;
    z *= z;
    n >>= 1U;
  }
  return acc;
}

ComplexPoly::ComplexPoly(std::vector<cd> coeffs_high_first) : coeffs_(std::move(coeffs_high_first)) {
  if (coeffs_.empty()) coeffs_.push_back(0.0);
  trim();
}

void ComplexPoly::trim() {
  std::size_t lead = 0;
  while (lead + 1 < coeffs_.size() && coeffs_[lead] == cd{0.0}) ++lead;
  if (lead > 0) coeffs_.erase(coeffs_.begin(), coeffs_.begin() + static_cast<std::ptrdiff_t>(lead));
}

ComplexPoly ComplexPoly::monomial(std::size_t degree, cd c) {
  std::vector<cd> v(degree + 1, cd{0.0});
  v[0] = c;
  return ComplexPoly(std::move(v));
}

ComplexPoly ComplexPoly::from_roots(std::span<const cd> roots) {
  std::vector<cd> v{1.0};
  for (cd r : roots) {
    v.push_back(0.0);
    for (std::size_t i = v.size() - 1; i > 0; --i) v[i] -= r * v[i - 1];
  }
  return ComplexPoly(std::move(v));
}

cd ComplexPoly::coeff(std::size_t power) const {
  if (power > degree()) return 0.0;
  return coeffs_[degree() - power];
}

cd ComplexPoly::operator()(cd z) const {
  cd acc = 0.0;
  for (cd c : coeffs_) acc = acc * z + c;
  return acc;
}

void ComplexPoly::eval_with_derivative(cd z, cd& value, cd& deriv) const {
  value = 0.0;
  deriv = 0.0;
  for (cd c : coeffs_) {
    deriv = deriv * z + value;
    value = value * z + c;
  }
}

std::vector<cd> ComplexPoly::taylor(cd z0, std::size_t order) const {
  // Repeated synthetic division by (z - z0).
  std::vector<cd> work = coeffs_;
  std::vector<cd> out;
  out.reserve(order + 1);
  for (std::size_t k = 0; k <= order; ++k) {
    if (work.empty()) {
      out.push_back(0.0);
      continue;
    }
    for (std::size_t i = 1; i < work.size(); ++i) work[i] += work[i - 1] * z0;
    out.push_back(work.back());
    work.pop_back();
  }
  return out;
}

double ComplexPoly::scale_at(cd z) const {
  const double r = std::abs(z);
  double acc = 0.0;
  for (cd c : coeffs_) acc = acc * r + std::abs(c);
  return acc;
}

double ComplexPoly::coeff_norm() const {
  double acc = 0.0;
  for (cd c : coeffs_) acc += std::norm(c);
  return std::sqrt(acc);
}

ComplexPoly ComplexPoly::derivative(std::size_t times) const {
  std::vector<cd> v = coeffs_;
  for (std::size_t t = 0; t < times; ++t) {
    if (v.size() <= 1) return ComplexPoly();
    const std::size_t deg = v.size() - 1;
    std::vector<cd> d(deg);
    for (std::size_t i = 0; i < deg; ++i) d[i] = v[i] * static_cast<double>(deg - i);
    v = std::move(d);
  }
  return ComplexPoly(std::move(v));
}

ComplexPoly ComplexPoly::monic() const {
  require(!is_zero(), "cannot normalize the zero polynomial");
  std::vector<cd> v = coeffs_;
  const cd lead = v.front();
  for (cd& c : v) c /= lead;
  return ComplexPoly(std::move(v));
}

ComplexPoly operator+(const ComplexPoly& a, const ComplexPoly& b) {
  const std::size_t n = std::max(a.degree(), b.degree());
  std::vector<cd> v(n + 1, cd{0.0});
  for (std::size_t p = 0; p <= n; ++p) v[n - p] = a.coeff(p) + b.coeff(p);
  return ComplexPoly(std::move(v));
}

ComplexPoly operator-(const ComplexPoly& a, const ComplexPoly& b) { return a + (-1.0) * b; }

ComplexPoly operator*(const ComplexPoly& a, const ComplexPoly& b) {
  const auto& x = a.coeffs();
  const auto& y = b.coeffs();
  std::vector<cd> v(x.size() + y.size() - 1, cd{0.0});
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) v[i + j] += x[i] * y[j];
  return ComplexPoly(std::move(v));
}

ComplexPoly operator*(cd s, const ComplexPoly& a) {
  std::vector<cd> v = a.coeffs();
  for (cd& c : v) c *= s;
  return ComplexPoly(std::move(v));
}

ComplexPoly ComplexPoly::divide(const ComplexPoly& divisor, ComplexPoly& remainder) const {
  require(!divisor.is_zero(), "division by the zero polynomial");
  if (degree() < divisor.degree()) {
    remainder = *this;
    return ComplexPoly();
  }
  std::vector<cd> rem = coeffs_;
  const auto& dv = divisor.coeffs();
  const std::size_t qdeg = degree() - divisor.degree();
  std::vector<cd> q(qdeg + 1, cd{0.0});
  for (std::size_t i = 0; i <= qdeg; ++i) {
    const cd factor = rem[i] / dv[0];
    q[i] = factor;
    for (std::size_t j = 0; j < dv.size(); ++j) rem[i + j] -= factor * dv[j];
  }
  std::vector<cd> r(rem.begin() + static_cast<std::ptrdiff_t>(qdeg + 1), rem.end());
  remainder = ComplexPoly(std::move(r));
  return ComplexPoly(std::move(q));
}

}  // namespace tlab
