#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace tlab {

using cd = std::complex<double>;

// z^n by repeated squaring; ipow(0, 0) == 1.
cd ipow(cd z, std::size_t n);

// Dense univariate polynomial with complex coefficients, stored highest
// degree first. The zero polynomial is the single coefficient {0}.
class ComplexPoly {
public:
  ComplexPoly() : coeffs_{cd{0.0}} {}
  explicit ComplexPoly(std::vector<cd> coeffs_high_first);

  static ComplexPoly constant(cd c) { return ComplexPoly({c}); }
  static ComplexPoly monomial(std::size_t degree, cd c = 1.0);
  // Monic polynomial with the given roots (repeated roots allowed).
  static ComplexPoly from_roots(std::span<const cd> roots);

  std::size_t degree() const { return coeffs_.size() - 1; }
  bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == cd{0.0}; }
  const std::vector<cd>& coeffs() const { return coeffs_; }
  cd leading() const { return coeffs_.front(); }
  // Coefficient of z^power (zero beyond the degree).
  cd coeff(std::size_t power) const;

  cd operator()(cd z) const;
  // Value and first derivative in one Horner pass.
  void eval_with_derivative(cd z, cd& value, cd& deriv) const;
  // Taylor coefficients at z0 up to the given order: p(z0+h) = sum t_i h^i.
  std::vector<cd> taylor(cd z0, std::size_t order) const;
  // Sum of |a_i| |z|^i, the natural backward-error scale at z.
  double scale_at(cd z) const;
  double coeff_norm() const;

  ComplexPoly derivative(std::size_t times = 1) const;
  ComplexPoly monic() const;

  friend ComplexPoly operator+(const ComplexPoly& a, const ComplexPoly& b);
  friend ComplexPoly operator-(const ComplexPoly& a, const ComplexPoly& b);
  friend ComplexPoly operator*(const ComplexPoly& a, const ComplexPoly& b);
  friend ComplexPoly operator*(cd s, const ComplexPoly& a);

  // Polynomial long division; returns quotient, writes remainder.
  ComplexPoly divide(const ComplexPoly& divisor, ComplexPoly& remainder) const;

private:
  void trim();
  std::vector<cd> coeffs_;
};

}  // namespace tlab
