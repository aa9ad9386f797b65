#ifndef SPIKED_EQUILIBRIUM_HPP
#define SPIKED_EQUILIBRIUM_HPP

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "spiked/numerics.hpp"
#include "spiked/potential.hpp"

namespace spiked {

// One-band equilibrium data for a potential: support [b1,b2], the polynomial
// factor h of the density Psi(x) = (1/2pi) sqrt((b2-x)(x-b1)) h(x), and the
// Lagrange constant ell of the variational characterization.
struct EquilibriumMeasure {
  Potential V;
  double b1 = 0.0;
  double b2 = 0.0;
  std::vector<double> h_coeffs;
  double ell = 0.0;
  ChebGrid grid;

  double mid() const { return 0.5 * (b1 + b2); }
  double rad() const { return 0.5 * (b2 - b1); }
  double edge() const { return b2; }
};

// Endpoint equations: S0 = int V'(x(th)) dth = 0 and
// S1 = int x(th) V'(x(th)) dth = 2 pi over th in [0,pi], x(th) = mid + rad cos th.
// Returned pair is (S0, S1 - 2 pi).
std::pair<double, double> endpoint_residuals(const Potential& V, double b1, double b2);

std::pair<double, double> solve_support(
    const Potential& V,
    std::optional<std::pair<double, double>> init = std::nullopt);

std::vector<double> compute_h(const Potential& V, double b1, double b2);

double lagrange_constant(const Potential& V, double b1, double b2,
                         const std::vector<double>& h_coeffs);

EquilibriumMeasure solve_equilibrium(
    const Potential& V, int grid_m = 512,
    std::optional<std::pair<double, double>> init = std::nullopt);

double density(const EquilibriumMeasure& eqm, double x);

// int log|x - s| dmu(s) for x strictly inside (b1, b2), via the closed
// Chebyshev log-kernel moments (finite sum, no quadrature of the singularity).
double log_integral_interior(const EquilibriumMeasure& eqm, double x);

// int log(z - s) dmu(s), principal branch, for z off (-inf, b2].
cplx log_integral(const EquilibriumMeasure& eqm, cplx z);

// Same integral for real x outside [b1, b2] (real part on the left side).
double log_integral_exterior(const EquilibriumMeasure& eqm, double x);

struct VariationalReport {
  double max_interior_residual = 0.0;
  double min_exterior_margin = 0.0;
  bool equality_ok = false;
  bool inequality_ok = false;
};

VariationalReport verify_variational(const EquilibriumMeasure& eqm, int n_interior,
                                     int n_exterior);

// Flags for the four admissibility conditions: valid even polynomial growth,
// one-band support with nonnegative density, h strictly positive on the real
// line (no real zeros), and strict variational inequality off the support.
struct ConditionReport {
  bool cond1 = false;
  bool cond2 = false;
  bool cond3 = false;
  bool cond4 = false;
  double min_h_on_support = 0.0;
  double normalization = 0.0;
  double min_exterior_margin = 0.0;
  bool all() const { return cond1 && cond2 && cond3 && cond4; }
};

ConditionReport check_conditions(const EquilibriumMeasure& eqm);

std::string eqm_to_json(const EquilibriumMeasure& eqm);
EquilibriumMeasure eqm_from_json(const std::string& text, int grid_m = 512);

} // namespace spiked

#endif
