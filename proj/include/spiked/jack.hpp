#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "spiked/numerics.hpp"

namespace spiked {

// Coefficients of the formal expansion prod_j (1 - a lambda_j)^{-beta/2} in a.
struct SpikeSeries {
  std::vector<double> coeffs;  // c_0..c_K, c_0 == 1
  int K = 0;
  std::uint64_t lambda_hash = 0;
  double beta = 2.0;
  // Magnitude of the first dropped series term relative to the partial sum,
  // filled by the weight evaluation; 0 for a bare coefficient build.
  double tail_bound = 0.0;
};

SpikeSeries series_coeffs(const std::vector<double>& lambda, double beta, int K);

// Single-row Jack polynomial in the C normalization.
double jack_row_value(const std::vector<double>& lambda, double beta, int k);

double pochhammer(double c, int i);
double log_pochhammer(double c, int i);

// Kummer's M(1, xi, z) for xi in (0, 1]; series, reflected series, or the
// large-|z| asymptotic branch depending on z.
cplx kummer_M1(double xi, cplx z);

struct SpikeWeight {
  double value = 1.0;     // sign * e^{logvalue}; +inf when out of double range
  double logvalue = 0.0;  // log |Xi|
  int sign = 1;
  int terms = 0;          // number of series terms accumulated
  double tail_bound = 0.0;
  bool contour_checked = false;
  double contour_logvalue = 0.0;
};

// Spiked ensemble weight Xi(lambda; a) for general beta > 0, with an
// independent Kummer-contour evaluation cross-checked against the series
// whenever the contour stays inside double range.
SpikeWeight spike_weight(const std::vector<double>& lambda, double a, int n, double beta,
                         double tol = 1e-12);

// Series-route core shared with the MCMC sampler: power sums of the scaled
// configuration lambda/s, and the weight parameters. Returns log Xi with sign.
struct XiEval {
  double log_abs = 0.0;
  int sign = 1;
  int terms = 0;
  double tail_rel = 0.0;
  bool converged = true;
};

XiEval xi_from_power_sums(const std::vector<double>& scaled_power_sums, double scale,
                          double a, int n, double beta, double tol);

struct JackCheck {
  std::string name;
  double got = 0.0;
  double want = 0.0;
  double err = 0.0;
  bool passed = false;
};

struct JackReport {
  int n = 0;
  double beta = 2.0;
  int K = 0;
  std::uint64_t seed = 0;
  std::vector<double> lambda;
  std::vector<JackCheck> checks;
  bool all_passed = false;
};

// Identity battery: series vs product, special values, residue extraction,
// homogeneity and symmetry. lambda empty -> seeded uniform draw in [-2, 2].
JackReport verify_jack_identities(int n, double beta, int K,
                                  std::vector<double> lambda = {},
                                  std::uint64_t seed = 1);

std::uint64_t hash_doubles(const std::vector<double>& xs);

}  // namespace spiked
