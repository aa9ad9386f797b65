#ifndef SPIKED_PHASE_HPP
#define SPIKED_PHASE_HPP

#include <utility>
#include <vector>

#include "spiked/equilibrium.hpp"

namespace spiked {

enum class Regime { Subcritical, SupercriticalUnique, SecondaryCritical, AtCritical };

const char* regime_name(Regime r);

struct CriticalPoint {
  double x = 0.0;
  double G = 0.0;
  int order = 2;      // first derivative order with magnitude above threshold
  double deriv = 0.0; // value of that derivative (negative at a maximum)
};

struct PhaseReport {
  double a = 0.0;
  Regime regime = Regime::Subcritical;
  // False only at a = a_c when a_c < V'(e)/2, where the classification is
  // deliberately left open.
  bool resolved = true;
  double a_c = 0.0;
  double c_of_a = 0.0;
  double e = 0.0;
  std::vector<CriticalPoint> maximizers;
  double g_max = 0.0;
  double h_at_c = 0.0;
  double predicted_location = 0.0; // e below a_c, x0(a) above with one maximizer
};

cplx g_value(const EquilibriumMeasure& eqm, cplx z);

// g evaluated on [e, inf); the closed series is continuous up to the edge.
double g_real_at_or_above_edge(const EquilibriumMeasure& eqm, double x);

// d^order/dx^order of g at real x > e; order 1 and 2 use the closed form
// g'(x) = (V'(x) - h(x) sqrt((x-b1)(x-b2))) / 2, higher orders come from a
// Cauchy circle around x.
double g_deriv(const EquilibriumMeasure& eqm, double x, int order);

double c_of_a(const EquilibriumMeasure& eqm, double a);

// G(x;a) = g(x) - V(x) + a x and H(x;a) = -g(x) + a x + ell, x >= e.
std::pair<double, double> G_H(const EquilibriumMeasure& eqm, double a, double x);
double G_of(const EquilibriumMeasure& eqm, double a, double x);

double critical_value(const EquilibriumMeasure& eqm);

std::vector<CriticalPoint> maximizers(const EquilibriumMeasure& eqm, double a,
                                      double tie_tol = 1e-8);

PhaseReport classify(const EquilibriumMeasure& eqm, double a);

double asymptotic_log_density(const EquilibriumMeasure& eqm, double a, double u);

// Spike value a0 in (a_lo, a_hi) where the global maximizer of G(.;a) jumps
// between two branches, i.e. both attain the maximum simultaneously.
struct TiePoint {
  double a0 = 0.0;
  double x1 = 0.0;
  double x2 = 0.0;
};
TiePoint secondary_critical_point(const EquilibriumMeasure& eqm, double a_lo, double a_hi);

} // namespace spiked

#endif
