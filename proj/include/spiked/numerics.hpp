#ifndef SPIKED_NUMERICS_HPP
#define SPIKED_NUMERICS_HPP

#include <array>
#include <complex>
#include <functional>
#include <vector>

#include "spiked/errors.hpp"

namespace spiked {

using cplx = std::complex<double>;

// Quadrature grid on [b1,b2] for integrals against the one-band density
// (1/2pi) sqrt((b2-x)(x-b1)) h(x) dx.  Nodes are the interior Chebyshev
// points that form the Gauss rule for the sqrt weight (roots of U_m mapped to
// the interval), so polynomials of degree <= 2m-1 times the weight are
// integrated exactly.  The (1/2pi) sqrt factor is folded into the weights.
struct ChebGrid {
  int m = 0;
  double b1 = 0.0, b2 = 0.0;
  std::vector<double> nodes;
  std::vector<double> weights;
};

ChebGrid make_cheb_grid(double b1, double b2, int m);

// sum_i weights[i] * f(nodes[i]) * h(nodes[i]) with h a polynomial given by
// coefficients (low to high); approximates the d(mu) integral of f.
double integrate_mu(const ChebGrid& grid, const std::function<double(double)>& f,
                    const std::vector<double>& h_coeffs);
cplx integrate_mu_c(const ChebGrid& grid, const std::function<cplx(double)>& f,
                    const std::vector<double>& h_coeffs);

// Chebyshev-T interpolation coefficients of f on [-1,1] (M first-kind points).
std::vector<double> cheb_analyze(const std::function<double(double)>& f, int M);
double cheb_eval_T(const std::vector<double>& a, double x);

enum class PvWeight { InvSqrt, Sqrt };

// Principal value of the weighted Cauchy integral over (-1,1),
//   PV int f(s) w(s) / (s - x) ds,  w = 1/sqrt(1-s^2) or sqrt(1-s^2),
// for |x| < 1, evaluated through the Chebyshev expansion of f and the finite
// Hilbert-transform identities
//   PV int T_k(s)/((s-x) sqrt(1-s^2)) ds = pi U_{k-1}(x),
//   PV int U_k(s) sqrt(1-s^2)/(s-x) ds  = -pi T_{k+1}(x).
double pv_cauchy(const std::function<double(double)>& f, double x, int modes, PvWeight w);

// Same with precomputed T-coefficients of f, for many evaluation points.
double pv_cauchy_series(const std::vector<double>& t_coeffs, double x, PvWeight w);

// Open integration contours in the upper half plane, closed by reflection;
// w(-t) = conj(w(t)).  Sigma: leave the anchor at 135 degrees for length s1,
// rise vertically to height s2, then run left horizontally.  Pi: rise
// vertically to height s1, then run left.  Gamma: wedge w = anchor +
// (it - |t|)/sqrt2, t in [-s1, s1].  I: vertical segment through the anchor,
// half-height s1.  Circle: center anchor, radius s1 (closed).
enum class ContourKind { Sigma, Pi, Gamma, I, Circle };

struct ContourSpec {
  ContourKind kind = ContourKind::Sigma;
  double anchor = 0.0;
  double s1 = 1.0;
  double s2 = 10.0;
  // Arc-length cutoff for the infinite rays (Sigma, Pi, unbounded Gamma),
  // measured from the start of the ray; |g| must have decayed below 1e-12 of
  // its maximum along the path by the cutoff.
  double truncation = 1.0e4;
};

// (1/2 pi i) times the contour integral of g.  The integrand must satisfy the
// reflection property g(conj w) = conj g(w); only the upper half is sampled,
// the mirror half is supplied by conjugation, and the result is exactly real
// by construction.
cplx contour_integral(const std::function<cplx(cplx)>& g, const ContourSpec& spec, int panels);

const std::array<double, 32>& gl32_nodes();
const std::array<double, 32>& gl32_weights();

} // namespace spiked

#endif
