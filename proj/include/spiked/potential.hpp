#ifndef SPIKED_POTENTIAL_HPP
#define SPIKED_POTENTIAL_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "spiked/errors.hpp"

namespace spiked {

// Polynomial confining potential V(x) = sum_k coeffs[k] x^k with even degree
// and positive leading coefficient.
struct Potential {
  std::vector<double> coeffs; // low to high, trailing entry nonzero
  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

// Validates degree (even, >= 2), leading coefficient (> 0), and finiteness.
Potential make_potential(const std::vector<double>& coeffs);

// Value (order 0) or order-th derivative at x; orders past the degree give 0.
double eval(const Potential& V, double x, int order = 0);

// Derivative polynomial coefficients, low to high.
std::vector<double> derivative_coeffs(const Potential& V, int order);

// FNV-1a over the coefficient bytes; used to detect mismatched inputs when a
// potential and a precomputed measure are passed around separately.
std::uint64_t potential_hash(const Potential& V);

std::string potential_to_json(const Potential& V);
Potential potential_from_json(const std::string& text);

} // namespace spiked

#endif
