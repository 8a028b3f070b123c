#pragma once

#include <span>
#include <vector>

#include "tlab/complex_poly.hpp"

namespace tlab {

// Confluent Vandermonde (Hermite) interpolation in the monomial basis: finds
// the polynomial with `num_coeffs` coefficients whose Taylor coefficients at
// nodes[j] of orders 0..mult[j]-1 equal taylor_targets[j][*]. The number of
// conditions must equal num_coeffs. Solved by column-pivoted QR; throws
// SingularSystem for coincident nodes.
ComplexPoly hermite_interpolate(std::span<const cd> nodes, std::span<const int> mult,
                                const std::vector<std::vector<cd>>& taylor_targets,
                                std::size_t num_coeffs);

// Binomial coefficient as a double (exact for the small arguments used here).
double binomial(std::size_t n, std::size_t k);

}  // namespace tlab
