#ifndef SPIKED_SPECIAL_HPP
#define SPIKED_SPECIAL_HPP

namespace spiked {

double norm_cdf(double x);

// Regularized lower/upper incomplete gamma, P(a,x) + Q(a,x) = 1, a > 0, x >= 0.
double gamma_p(double a, double x);
double gamma_q(double a, double x);

double log_gamma(double a);

} // namespace spiked

#endif
