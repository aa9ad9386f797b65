#include "spiked/jack.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <optional>

#include "spiked/errors.hpp"
#include "spiked/kernels.hpp"
#include "spiked/rng.hpp"
#include "spiked/special.hpp"

namespace spiked {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Signed accumulator in log magnitude; terms span hundreds of orders.
struct SignedLogAcc {
  double log_abs = kNegInf;
  int sign = 0;

  void add(double l, int s) {
    if (s == 0 || l == kNegInf) return;
    if (sign == 0) {
      log_abs = l;
      sign = s;
      return;
    }
    const double big = std::max(log_abs, l);
    const double v = sign * std::exp(log_abs - big) + s * std::exp(l - big);
    if (v == 0.0) {
      sign = 0;
      log_abs = kNegInf;
      return;
    }
    log_abs = big + std::log(std::fabs(v));
    sign = v > 0.0 ? 1 : -1;
  }
};

std::vector<double> power_sums(const std::vector<double>& lambda, int K) {
  std::vector<double> p(static_cast<size_t>(K) + 1, 0.0);
  for (double x : lambda) {
    double pw = x;
    for (int m = 1; m <= K; ++m) {
      p[m] += pw;
      pw *= x;
    }
  }
  return p;
}

// c_k = (1/k) sum_{m=1..k} (beta/2) p_m c_{k-m}, the exp-of-log-series
// convolution; the inner product is the dispatched kernel.
std::vector<double> coeffs_from_power_sums(const std::vector<double>& p, double beta,
                                           int K) {
  std::vector<double> q(static_cast<size_t>(K) + 1, 0.0);
  for (int m = 1; m <= K; ++m) q[m] = 0.5 * beta * p[m];
  std::vector<double> c(static_cast<size_t>(K) + 1, 0.0);
  c[0] = 1.0;
  for (int k = 1; k <= K; ++k) {
    c[k] = kernels::dot_rev(q.data() + 1, c.data(), static_cast<size_t>(k)) / k;
  }
  return c;
}

double max_abs(const std::vector<double>& xs) {
  double m = 0.0;
  for (double x : xs) m = std::max(m, std::fabs(x));
  return m;
}

}  // namespace

std::uint64_t hash_doubles(const std::vector<double>& xs) {
  std::uint64_t h = 14695981039346656037ULL;
  for (double x : xs) {
    std::uint64_t bits;
    std::memcpy(&bits, &x, sizeof bits);
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xFFu;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

SpikeSeries series_coeffs(const std::vector<double>& lambda, double beta, int K) {
  if (K < 0) throw Error(ErrorCode::InvalidArgument, "series_coeffs: K must be >= 0");
  if (!(beta > 0.0)) {
    throw Error(ErrorCode::UnsupportedBeta, "series_coeffs: beta must be positive");
  }
  SpikeSeries s;
  s.K = K;
  s.beta = beta;
  s.lambda_hash = hash_doubles(lambda);
  s.coeffs = coeffs_from_power_sums(power_sums(lambda, K), beta, K);
  return s;
}

double pochhammer(double c, int i) {
  double v = 1.0;
  for (int t = 0; t < i; ++t) v *= c + t;
  return v;
}

double log_pochhammer(double c, int i) {
  if (!(c > 0.0)) throw Error(ErrorCode::InvalidArgument, "log_pochhammer: c > 0");
  return log_gamma(c + i) - log_gamma(c);
}

double jack_row_value(const std::vector<double>& lambda, double beta, int k) {
  if (k < 0) throw Error(ErrorCode::InvalidArgument, "jack_row_value: k >= 0");
  if (k > 170) {
    throw Error(ErrorCode::InvalidArgument,
                "jack_row_value: k too large for double factorials");
  }
  const SpikeSeries s = series_coeffs(lambda, beta, k);
  const double r = 2.0 / beta;
  double factor = 1.0;  // (2/beta)^k k! / prod_{j<k} (1 + (2/beta) j)
  for (int j = 0; j < k; ++j) factor *= r * (j + 1) / (1.0 + r * j);
  return s.coeffs[static_cast<size_t>(k)] * factor;
}

cplx kummer_M1(double xi, cplx z) {
  if (!(xi > 0.0) || xi > 1.0) {
    throw Error(ErrorCode::InvalidArgument, "kummer_M1: xi must lie in (0, 1]");
  }
  if (z == cplx(0.0)) return 1.0;
  const double az = std::abs(z);
  if (az <= 30.0) {
    if (z.real() >= 0.0) {
      cplx term = 1.0, sum = 1.0;
      for (int i = 1; i <= 500; ++i) {
        term *= z / (xi + (i - 1));
        sum += term;
        if (std::abs(term) <= 1e-18 * std::abs(sum)) break;
      }
      return sum;
    }
    // Left half plane: M(1,xi,z) = e^z M(xi-1,xi,-z) avoids the cancellation
    // of the direct series.
    const cplx w = -z;
    cplx pw = 1.0;  // w^i / i!
    cplx sum = 1.0;
    for (int i = 1; i <= 500; ++i) {
      pw *= w / static_cast<double>(i);
      const cplx term = pw * ((xi - 1.0) / (xi - 1.0 + i));
      sum += term;
      if (std::abs(pw) <= 1e-18 * std::abs(sum) && i > 4) break;
    }
    return std::exp(z) * sum;
  }
  // |z| > 30: dominant term Gamma(xi) e^z z^{1-xi} is exact for a=1; the
  // recessive branch is the algebraic series (xi-1)/(-z) sum_s (2-xi)_s (-z)^{-s}.
  const cplx dominant = std::exp(log_gamma(xi) + z + (1.0 - xi) * std::log(z));
  const cplx mz = -z;
  cplx term = 1.0, sum = 1.0;
  double last = 1.0;
  for (int s = 1; s <= 40; ++s) {
    term *= (2.0 - xi + (s - 1)) / mz;
    const double mag = std::abs(term);
    if (mag > last) break;  // asymptotic series: stop at the smallest term
    sum += term;
    last = mag;
    if (mag <= 1e-18 * std::abs(sum)) break;
  }
  const cplx recessive = (xi - 1.0) / mz * sum;
  return dominant + recessive;
}

XiEval xi_from_power_sums(const std::vector<double>& scaled_power_sums, double scale,
                          double a, int n, double beta, double tol) {
  XiEval ev;
  if (a == 0.0) return ev;
  const int K = static_cast<int>(scaled_power_sums.size()) - 1;
  const double bn = 0.5 * beta * n;
  const double log_cs = std::log(0.5 * beta * std::fabs(a) * n) + std::log(scale);
  const int csign = a > 0.0 ? 1 : -1;

  std::vector<double> q(static_cast<size_t>(K) + 1, 0.0);
  for (int m = 1; m <= K; ++m) q[m] = 0.5 * beta * scaled_power_sums[m];
  std::vector<double> c(static_cast<size_t>(K) + 1, 0.0);
  c[0] = 1.0;

  SignedLogAcc acc;
  acc.add(0.0, 1);
  double lpoch = 0.0;
  int consec = 0;
  const double log_tol = std::log(tol);
  ev.converged = false;
  for (int k = 1; k <= K; ++k) {
    c[k] = kernels::dot_rev(q.data() + 1, c.data(), static_cast<size_t>(k)) / k;
    lpoch += std::log(bn + (k - 1));
    double l = kNegInf;
    if (c[k] != 0.0) {
      l = std::log(std::fabs(c[k])) + k * log_cs - lpoch;
      int sgn = c[k] > 0.0 ? 1 : -1;
      if (csign < 0 && (k & 1)) sgn = -sgn;
      acc.add(l, sgn);
    }
    ev.terms = k;
    if (l < acc.log_abs + log_tol) {
      if (++consec >= 3) {
        ev.converged = true;
        ev.tail_rel = l == kNegInf ? 0.0 : std::exp(l - acc.log_abs);
        break;
      }
    } else {
      consec = 0;
    }
  }
  ev.log_abs = acc.log_abs;
  ev.sign = acc.sign;
  return ev;
}

namespace {

// Kummer-contour cross-check on the wedge-plus-ray contour enclosing the
// lambda_j.  The reflection Xi(lambda, a) = Xi(-lambda, -a), exact term by
// term in the series, maps a < 0 onto the a > 0 contour, where the integrand
// decays leftward.  The integrand peaks near the anchor at roughly exp(amp)
// times the integral, amp = cfac * (anchor - max lambda), so quadrature
// roundoff is amplified by exp(amp); the anchor hugs the largest lambda to
// keep amp small, and the check is skipped (nullopt) when amp would still
// swamp the comparison tolerance.
std::optional<double> contour_log_xi(std::vector<double> lambda, double a, int n,
                                     double beta) {
  const double bn = 0.5 * beta * n;
  const int m = static_cast<int>(std::ceil(bn)) - 1;
  const double xi = bn - m;  // in (0, 1]
  if (a < 0.0) {
    a = -a;
    for (double& lj : lambda) lj = -lj;
  }
  const double cfac = bn * a;
  const double lmax = *std::max_element(lambda.begin(), lambda.end());
  const double delta = std::max(0.15, std::min(1.0, 5.0 / std::max(1.0, cfac)));
  const double anchor = std::max(lmax, 0.0) + delta;
  if (cfac * (anchor - lmax) > 12.0) return std::nullopt;

  ContourSpec spec;
  spec.kind = ContourKind::Sigma;
  spec.anchor = anchor;
  spec.s1 = 1.0;
  spec.s2 = 10.0;
  spec.truncation = 1e7;
  auto g = [&](cplx w) {
    cplx lw = 0.0;
    for (double lj : lambda) lw += std::log(w - lj);
    const cplx base = std::exp(-0.5 * beta * lw + (xi - 1.0) * std::log(w));
    return base * kummer_M1(xi, cfac * w);
  };
  const double integral = contour_integral(g, spec, 16).real();
  if (!(integral > 0.0)) {
    throw Error(ErrorCode::ContourDisagreement,
                "spike_weight: contour route returned a nonpositive value");
  }
  return log_pochhammer(xi, m) - m * std::log(cfac) + std::log(integral);
}

}  // namespace

SpikeWeight spike_weight(const std::vector<double>& lambda, double a, int n, double beta,
                         double tol) {
  if (static_cast<int>(lambda.size()) != n) {
    throw Error(ErrorCode::InconsistentInputs,
                "spike_weight: lambda size does not match n");
  }
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "spike_weight: n >= 1");
  if (!(beta > 0.0)) {
    throw Error(ErrorCode::UnsupportedBeta, "spike_weight: beta must be positive");
  }
  SpikeWeight out;
  if (a == 0.0) return out;

  const double mabs = max_abs(lambda);
  const double scale = 2.0 * std::max(1.0, mabs);
  std::vector<double> scaled(lambda);
  for (double& x : scaled) x /= scale;

  XiEval ev;
  for (int K = 256; K <= 8192; K *= 2) {
    ev = xi_from_power_sums(power_sums(scaled, K), scale, a, n, beta, tol);
    if (ev.converged) break;
  }
  if (!ev.converged) {
    throw Error(ErrorCode::SeriesTruncationInsufficient,
                "spike_weight: series did not reach the stopping rule by K=8192");
  }
  out.logvalue = ev.log_abs;
  out.sign = ev.sign;
  out.value = ev.sign * std::exp(ev.log_abs);
  out.terms = ev.terms;
  out.tail_bound = ev.tail_rel;

  // Cross-check against the contour route when its roundoff stays in range.
  if (const auto lc = contour_log_xi(lambda, a, n, beta)) {
    out.contour_checked = true;
    out.contour_logvalue = *lc;
    const double scale_l = std::max(1.0, std::fabs(out.logvalue));
    if (out.sign <= 0 || std::fabs(*lc - out.logvalue) > 1e-6 * scale_l) {
      throw Error(ErrorCode::ContourDisagreement,
                  "spike_weight: series log " + std::to_string(out.logvalue) +
                      " vs contour log " + std::to_string(*lc));
    }
  }
  return out;
}

namespace {

JackCheck make_check(const std::string& name, double got, double want, double tol_scale) {
  JackCheck c;
  c.name = name;
  c.got = got;
  c.want = want;
  c.err = std::fabs(got - want);
  c.passed = c.err <= tol_scale;
  return c;
}

}  // namespace

JackReport verify_jack_identities(int n, double beta, int K, std::vector<double> lambda,
                                  std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "verify_jack_identities: n >= 1");
  if (K < 1) throw Error(ErrorCode::InvalidArgument, "verify_jack_identities: K >= 1");
  JackReport rep;
  rep.n = n;
  rep.beta = beta;
  rep.K = K;
  rep.seed = seed;
  if (lambda.empty()) {
    Rng rng(derive_seed(seed, 0x6A));
    for (int i = 0; i < n; ++i) lambda.push_back(-2.0 + 4.0 * rng.uniform());
  }
  if (static_cast<int>(lambda.size()) != n) {
    throw Error(ErrorCode::InconsistentInputs, "verify_jack_identities: lambda size");
  }
  rep.lambda = lambda;
  const double r = 2.0 / beta;

  // (i) the generating identity, summed to machine convergence
  for (double a : {0.01, 0.05}) {
    double direct = 1.0;
    for (double lj : lambda) direct *= std::pow(1.0 - a * lj, -0.5 * beta);
    double sum = 0.0, bk = 1.0;  // bk = prod_{j<k}(1+rj) / (r^k k!)
    double apow = 1.0;
    for (int k = 0; k <= 80; ++k) {
      if (k > 0) {
        bk *= (1.0 + r * (k - 1)) / (r * k);
        apow *= a;
      }
      const double term = bk * apow * jack_row_value(lambda, beta, k);
      sum += term;
      if (k > 4 && std::fabs(term) <= 1e-18 * std::fabs(sum)) break;
    }
    char name[64];
    std::snprintf(name, sizeof name, "series_identity_a=%g", a);
    rep.checks.push_back(make_check(name, sum, direct, 1e-10));
  }

  // (ii) special values
  {
    double s1 = 0.0;
    for (double lj : lambda) s1 += lj;
    rep.checks.push_back(make_check("row_k1_power_sum", jack_row_value(lambda, beta, 1),
                                    s1, 1e-9 * std::max(1.0, std::fabs(s1))));
    std::vector<double> single(static_cast<size_t>(n), 0.0);
    single[0] = lambda[0];
    const double want_single = std::pow(lambda[0], K);
    rep.checks.push_back(make_check("row_single_entry",
                                    jack_row_value(single, beta, K), want_single,
                                    1e-9 * std::max(1.0, std::fabs(want_single))));
    std::vector<double> ones(static_cast<size_t>(n), 1.0);
    double want_ones = 1.0;
    for (int j = 0; j < K; ++j) want_ones *= (n + r * j) / (1.0 + r * j);
    rep.checks.push_back(make_check("row_all_ones", jack_row_value(ones, beta, K),
                                    want_ones, 1e-9 * std::max(1.0, want_ones)));
  }

  // (iii) residue extraction of the series coefficients
  {
    const SpikeSeries s = series_coeffs(lambda, beta, K);
    const double rad = 0.4 / std::max(0.2, max_abs(lambda));
    for (int k = 0; k <= std::min(K, 6); ++k) {
      ContourSpec spec;
      spec.kind = ContourKind::Circle;
      spec.anchor = 0.0;
      spec.s1 = rad;
      auto g = [&](cplx z) {
        cplx lw = 0.0;
        for (double lj : lambda) lw += std::log(1.0 - z * lj);
        return std::exp(-0.5 * beta * lw) * std::pow(z, -(k + 1));
      };
      const double got = contour_integral(g, spec, 24).real();
      char name[32];
      std::snprintf(name, sizeof name, "residue_c%d", k);
      const double want = s.coeffs[static_cast<size_t>(k)];
      rep.checks.push_back(
          make_check(name, got, want, 1e-9 * std::max(1.0, std::fabs(want))));
    }
  }

  // (iv) homogeneity and (v) permutation symmetry
  {
    std::vector<double> doubled(lambda);
    for (double& x : doubled) x *= 2.0;
    const double base = jack_row_value(lambda, beta, K);
    const double want = std::ldexp(base, K);
    rep.checks.push_back(make_check("homogeneity_t2", jack_row_value(doubled, beta, K),
                                    want, 1e-9 * std::max(1.0, std::fabs(want))));
    std::vector<double> shuffled(lambda);
    std::reverse(shuffled.begin(), shuffled.end());
    rep.checks.push_back(make_check("permutation_symmetry",
                                    jack_row_value(shuffled, beta, K), base,
                                    1e-12 * std::max(1.0, std::fabs(base))));
  }

  rep.all_passed = true;
  for (const auto& c : rep.checks) rep.all_passed = rep.all_passed && c.passed;
  return rep;
}

}  // namespace spiked
