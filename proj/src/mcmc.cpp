#include <algorithm>
#include <cmath>
#include <vector>

#include "spiked/equilibrium.hpp"
#include "spiked/errors.hpp"
#include "spiked/jack.hpp"
#include "spiked/kernels.hpp"
#include "spiked/phase.hpp"
#include "spiked/rng.hpp"
#include "spiked/sampler.hpp"

namespace spiked {

namespace {

struct Chain {
  std::vector<double> lambda;
  std::vector<double> q; // q[m] = sum_j (lambda_j / s)^m, m = 0..K
  double s = 1.0;
  int K = 512;
};

void recompute_power_sums(Chain& ch) {
  std::fill(ch.q.begin(), ch.q.end(), 0.0);
  ch.q[0] = static_cast<double>(ch.lambda.size());
  for (double lj : ch.lambda) {
    const double t = lj / ch.s;
    double p = 1.0;
    for (int m = 1; m <= ch.K; ++m) {
      p *= t;
      ch.q[m] += p;
    }
  }
}

// Integrated autocorrelation time of the recorded series, Sokal-style window.
double iact_estimate(const std::vector<double>& x) {
  const int m = static_cast<int>(x.size());
  if (m < 8) return 1.0;
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= m;
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= m;
  if (var <= 0.0) return 1.0;
  double tau = 1.0;
  for (int k = 1; k < m / 4; ++k) {
    double c = 0.0;
    for (int t = 0; t + k < m; ++t) c += (x[t] - mean) * (x[t + k] - mean);
    c /= (m - k) * var;
    if (k > 5 && c < 0.05) break;
    tau += 2.0 * c;
    if (k > 10.0 * tau) break;
  }
  return std::max(1.0, tau);
}

} // namespace

EmpiricalSample mcmc_spectrum(const Potential& V, int n, double beta, double a,
                              long steps, long burn_in, int thin,
                              std::uint64_t seed) {
  if (n < 1 || thin < 1 || burn_in < 0) {
    throw Error(ErrorCode::InvalidArgument, "mcmc_spectrum: bad n/thin/burn_in");
  }
  if (steps <= burn_in) {
    throw Error(ErrorCode::InvalidArgument, "mcmc_spectrum: steps must exceed burn_in");
  }
  if (!(beta > 0.0)) {
    throw Error(ErrorCode::UnsupportedBeta, "mcmc_spectrum: beta must be positive");
  }

  // Hard box [-L, L]: wide enough for the support, any predicted outlier
  // location, and the single-particle spread 1/sqrt(beta n) that dominates at
  // small n. Target mass outside the box is negligible.
  const EquilibriumMeasure eqm = solve_equilibrium(V);
  double far = std::max(std::fabs(eqm.b1), std::fabs(eqm.b2));
  if (a != 0.0) {
    try {
      const PhaseReport rep = classify(eqm, std::fabs(a));
      far = std::max(far, std::fabs(rep.predicted_location));
      for (const auto& cp : rep.maximizers) far = std::max(far, std::fabs(cp.x));
    } catch (const Error&) {
      far = std::max(far, std::fabs(a)) + 1.0;
    }
  }
  const double box = 1.45 * far + 1.0 + 6.0 / std::sqrt(beta * n);

  Chain ch;
  ch.s = box;
  ch.K = 512;
  ch.q.assign(ch.K + 1, 0.0);
  ch.lambda.resize(n);
  for (int j = 0; j < n; ++j) {
    ch.lambda[j] = eqm.b1 + (j + 0.5) * (eqm.b2 - eqm.b1) / n;
  }
  recompute_power_sums(ch);

  const bool spiked_run = a != 0.0;
  auto eval_xi = [&](const std::vector<double>& q) {
    return xi_from_power_sums(q, ch.s, a, n, beta, 1e-12);
  };
  auto grow_K = [&]() {
    if (ch.K >= 8192) {
      throw Error(ErrorCode::SeriesTruncationInsufficient,
                  "mcmc_spectrum: spike series did not converge by K=8192");
    }
    ch.K *= 2;
    ch.q.assign(ch.K + 1, 0.0);
    recompute_power_sums(ch);
  };

  double log_xi_cur = 0.0;
  if (spiked_run) {
    for (;;) {
      const XiEval ev = eval_xi(ch.q);
      if (ev.converged) {
        log_xi_cur = ev.log_abs;
        break;
      }
      grow_K();
    }
  }

  Rng rng(derive_seed(seed, 0x4D43));
  double step = 0.5 * eqm.rad();
  const double halfbn = 0.5 * beta * n;

  long attempted_post = 0, accepted_post = 0;
  long accepted_total = 0;
  long win_attempt = 0, win_accept = 0;
  int win_index = 0;
  double last_win_rate = 0.35;
  std::vector<double> series;
  std::vector<double> q_prop(ch.q.size());

  for (long st = 0; st < steps; ++st) {
    const bool in_burn = st < burn_in;
    const int j = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n));
    const double old = ch.lambda[j];
    const double prop = old + step * rng.normal();
    bool accept = false;
    if (std::fabs(prop) <= box) {
      double dlog =
          beta * (kernels::log_abs_diff_sum(prop, ch.lambda.data(), n, j) -
                  kernels::log_abs_diff_sum(old, ch.lambda.data(), n, j)) -
          halfbn * (eval(V, prop) - eval(V, old));
      double log_xi_prop = 0.0;
      if (spiked_run) {
        if (q_prop.size() != ch.q.size()) q_prop.resize(ch.q.size());
        const double to = old / ch.s;
        const double tn = prop / ch.s;
        double po = 1.0, pn = 1.0;
        q_prop[0] = ch.q[0];
        for (int m = 1; m <= ch.K; ++m) {
          po *= to;
          pn *= tn;
          q_prop[m] = ch.q[m] - po + pn;
        }
        XiEval evp = eval_xi(q_prop);
        while (!evp.converged) {
          grow_K();
          const XiEval evc = eval_xi(ch.q);
          if (evc.converged) log_xi_cur = evc.log_abs;
          q_prop = ch.q;
          const double t2o = old / ch.s, t2n = prop / ch.s;
          double p2o = 1.0, p2n = 1.0;
          for (int m = 1; m <= ch.K; ++m) {
            p2o *= t2o;
            p2n *= t2n;
            q_prop[m] += p2n - p2o;
          }
          evp = eval_xi(q_prop);
        }
        log_xi_prop = evp.log_abs;
        dlog += log_xi_prop - log_xi_cur;
      }
      if (dlog >= 0.0 || rng.uniform() < std::exp(dlog)) {
        accept = true;
        ch.lambda[j] = prop;
        if (spiked_run) {
          std::swap(ch.q, q_prop);
          log_xi_cur = log_xi_prop;
        }
        ++accepted_total;
        // Periodic scratch rebuild bounds the drift of the incremental sums.
        if (spiked_run && accepted_total % 4096 == 0) {
          recompute_power_sums(ch);
          const XiEval ev = eval_xi(ch.q);
          if (ev.converged) log_xi_cur = ev.log_abs;
        }
      }
    }

    if (in_burn) {
      ++win_attempt;
      if (accept) ++win_accept;
      if (win_attempt == 200) {
        last_win_rate = static_cast<double>(win_accept) / win_attempt;
        const double gain = 1.0 / std::sqrt(1.0 + win_index);
        step *= std::exp(gain * (last_win_rate - 0.35));
        step = std::min(std::max(step, 1e-5 * box), box);
        win_attempt = win_accept = 0;
        ++win_index;
      }
    } else {
      ++attempted_post;
      if (accept) ++accepted_post;
      if ((st - burn_in) % thin == 0) {
        series.push_back(*std::max_element(ch.lambda.begin(), ch.lambda.end()));
      }
    }
  }

  if (series.empty()) {
    throw Error(ErrorCode::EmptySample, "mcmc_spectrum: no retained states");
  }

  EmpiricalSample out;
  out.n = n;
  out.beta = beta;
  out.a = a;
  out.potential_hash = potential_hash(V);
  out.seed = seed;
  out.method = SampleMethod::MCMC;
  out.diagnostics.acceptance_rate =
      attempted_post > 0 ? static_cast<double>(accepted_post) / attempted_post : 0.0;
  out.diagnostics.iact = iact_estimate(series);
  out.diagnostics.final_step = step;
  out.diagnostics.adapted = last_win_rate > 0.15 && last_win_rate < 0.6;
  out.values = std::move(series);
  std::sort(out.values.begin(), out.values.end());
  return out;
}

} // namespace spiked
