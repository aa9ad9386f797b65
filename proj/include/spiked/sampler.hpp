#ifndef SPIKED_SAMPLER_HPP
#define SPIKED_SAMPLER_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "spiked/limit_laws.hpp"
#include "spiked/potential.hpp"

namespace spiked {

enum class SampleMethod { DirectGaussian, MCMC };

struct SampleDiagnostics {
  double acceptance_rate = 0.0; // MCMC only
  double iact = 1.0;            // integrated autocorrelation of the xi_max series
  double final_step = 0.0;      // frozen proposal step after adaptation
  bool adapted = true;          // false carries the NonConvergedAdaptation warning
};

struct EmpiricalSample {
  std::vector<double> values; // ascending
  int n = 0;
  double beta = 0.0;
  double a = 0.0;
  std::uint64_t potential_hash = 0;
  std::uint64_t seed = 0;
  SampleMethod method = SampleMethod::DirectGaussian;
  SampleDiagnostics diagnostics;
};

// Largest eigenvalues of W + diag(a/2, 0, ..., 0) with W the Gaussian
// invariant ensemble whose eigenvalue density is the V(x) = x^2 external
// source model; beta = 4 is realized as 2n x 2n self-dual blocks.
EmpiricalSample sample_gaussian_spiked(int n, double beta, double a, int trials,
                                       std::uint64_t seed);

// Single-coordinate Metropolis random walk on lambda in R^n targeting
// |Delta(lambda)|^beta prod exp(-(beta/2) n V(lambda_j)) * Xi(lambda; a).
// The proposal step adapts toward 0.35 acceptance during burn-in, then
// freezes; xi_max is recorded every `thin` steps after burn-in.
EmpiricalSample mcmc_spectrum(const Potential& V, int n, double beta, double a,
                              long steps, long burn_in, int thin,
                              std::uint64_t seed);

struct KsResult {
  double D = 0.0;
  double at = 0.0; // draw achieving the supremum
  std::string summary;
};

// Kolmogorov-Smirnov distance between the sample and the mixture CDF of the
// law instantiated at size n, evaluated exactly at the empirical jumps.
KsResult ks_compare(const EmpiricalSample& sample, const LimitLaw& law, int n);

// Two-sample KS distance between sorted samples.
double ks_two_sample(const EmpiricalSample& x, const EmpiricalSample& y);

std::string sample_to_csv(const EmpiricalSample& s);
std::string sample_meta_json(const EmpiricalSample& s);
EmpiricalSample sample_from_csv(const std::string& text);

} // namespace spiked

#endif
