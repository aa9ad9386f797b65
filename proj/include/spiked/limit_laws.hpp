#ifndef SPIKED_LIMIT_LAWS_HPP
#define SPIKED_LIMIT_LAWS_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "spiked/equilibrium.hpp"
#include "spiked/phase.hpp"

namespace spiked {

// Linear functional f -> int f dnu for the beta != 2 correction measure,
// supplied by the caller since no closed form is implemented here.
struct NuMeasure {
  std::function<double(const std::function<double(double)>&)> integrate;
};

// Quadratic functional A(f) = (1/2) int_J f(x) delta_f(x) dx with
//   delta_f(x) = -(1/2 pi^2) (1/sqrt((x-b1)(b2-x)))
//                * PV int_J f'(s) sqrt((s-b1)(b2-s)) / (s-x) ds.
// fprime may be empty, in which case f is differentiated through its
// Chebyshev expansion on J.
double quadratic_A(const EquilibriumMeasure& eqm,
                   const std::function<double(double)>& f,
                   std::function<double(double)> fprime = {}, int modes = 256);

// Polarization (1/2)(A(f+g) - A(f) - A(g)); symmetric bilinear form.
double inner_A(const EquilibriumMeasure& eqm,
               const std::function<double(double)>& f,
               const std::function<double(double)>& g, int modes = 256);

enum class LawKind { Gaussian, Flat2k };

struct LawComponent {
  double location = 0.0;
  // n-free part of the fluctuation scale; the scale at sample size n is
  // scale_rule * n^(-1/(2k)).
  double scale_rule = 0.0;
  int k = 1;
  LawKind kind = LawKind::Gaussian;
  double weight = 1.0;
};

// Shift of the spike for the mixed-order two-point case: predictions hold at
// a = a0 - q log(n)/n + alpha/n.
struct NShift {
  double q = 0.0;
  double alpha = 0.0;
};

struct LimitLaw {
  std::vector<LawComponent> components; // ascending location
  double beta = 2.0;
  std::optional<NShift> n_shift;
  // Set when beta != 2 weights were computed without a nu plug-in, so the
  // exp((2/beta - 1) int p dnu) factor is missing from each component weight.
  bool partial = false;
};

double component_scale(const LawComponent& comp, int n);

// M_beta(u) = R_beta(u) [ (beta/2)(a - int dmu/(u-x)) ]^(beta/2 - 1) Gamma(beta/2)
// with R_beta(u) = exp{ (beta/2) [ (2/beta - 1) int p dnu - int p dmu + A(p) ] }
// and p(x) = -V(x) + log(u - x).  For beta = 2 the nu term drops out and the
// bracket power is 0, so M_2 = R_2.
double M_beta_prefactor(const EquilibriumMeasure& eqm, double a, double u,
                        double beta, const NuMeasure* nu = nullptr);

LimitLaw predict_limit(const EquilibriumMeasure& eqm, double a, double beta,
                       std::optional<double> alpha = std::nullopt,
                       const NuMeasure* nu = nullptr);

// Sum of the weights before component i plus weight_i * F_i(T), where F_i is
// the standard normal CDF for k = 1 and the normalized integral of
// exp(-xi^(2k)) for k > 1.  T is in the standardized units of component i.
double law_cdf(const LimitLaw& law, int i, double T);

double q_beta(double beta, int k, double x1, double x2);

// int over the real line of exp(-xi^(2k)) = Gamma(1/(2k))/k.
double flat2k_normalizer(int k);

std::string law_to_json(const LimitLaw& law);

} // namespace spiked

#endif
