#include "spiked/appendix_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <functional>
#include <numeric>

#include "spiked/io.hpp"
#include "spiked/kernels.hpp"
#include "spiked/phase.hpp"
#include "spiked/rng.hpp"

namespace spiked {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double gl_composite(const std::function<double(double)>& f, double a, double b,
                    int panels) {
  const auto& xs = gl32_nodes();
  const auto& ws = gl32_weights();
  double total = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + (b - a) * p / panels;
    const double hi = a + (b - a) * (p + 1) / panels;
    const double c = 0.5 * (lo + hi);
    const double r = 0.5 * (hi - lo);
    double acc = 0.0;
    for (int i = 0; i < 32; ++i) acc += ws[i] * f(c + r * xs[i]);
    total += acc * r;
  }
  return total;
}

double clamp1(double v) { return std::max(-1.0, std::min(1.0, v)); }

void require_fg_domain(const char* who, double u, double s) {
  if (!(u > 1.0) || !(std::fabs(s) < 1.0)) {
    throw Error(ErrorCode::DomainViolation,
                std::string(who) + ": needs u > 1 and |s| < 1");
  }
}

} // namespace

OracleReport make_report(const std::string& name, double closed, double numeric,
                         double tol) {
  OracleReport r;
  r.name = name;
  r.closed_form = closed;
  r.numeric = numeric;
  r.abs_err = std::fabs(closed - numeric);
  const double scale = std::fabs(closed);
  r.rel_err = scale > 1e-10 ? r.abs_err / scale : r.abs_err;
  r.passed = r.rel_err <= tol;
  return r;
}

double F_closed(double u, double s) {
  require_fg_domain("F_closed", u, s);
  return kPi / std::sqrt(1.0 - s * s) *
         (std::asin(s) - std::asin(clamp1((u * s - 1.0) / (u - s))));
}

double G_closed(double u, double s) {
  require_fg_domain("G_closed", u, s);
  const double rad = std::sqrt(u * u - 1.0);
  const double sq = std::sqrt(1.0 - s * s);
  return kPi * (rad - u + s * std::log(0.5 * (u + rad)) -
                sq * std::atan((s * u - 1.0) / (sq * rad)) +
                sq * std::atan(s / sq));
}

double dG_du_closed(double u, double s) {
  require_fg_domain("dG_du_closed", u, s);
  return kPi * (std::sqrt(u * u - 1.0) - (u - s)) / (u - s);
}

FGValue F_us(double u, double s, int modes) {
  require_fg_domain("F_us", u, s);
  FGValue out;
  out.closed = F_closed(u, s);
  auto f = [u](double x) { return std::log(u - x); };
  // pv_cauchy integrates against (x - s); the target kernel is (s - x).
  out.numeric = -pv_cauchy(f, s, modes, PvWeight::InvSqrt);
  return out;
}

FGValue G_us(double u, double s, int modes) {
  require_fg_domain("G_us", u, s);
  FGValue out;
  out.closed = G_closed(u, s);
  auto f = [u](double x) { return std::log(u - x); };
  out.numeric = -pv_cauchy(f, s, modes, PvWeight::Sqrt);
  return out;
}

std::array<OracleReport, 2> arcsin_integrals(double u, double tol) {
  if (!(u > 1.0)) {
    throw Error(ErrorCode::DomainViolation, "arcsin_integrals: needs u > 1");
  }
  // By parts: int asin(s)/(u-s) ds = [-asin(s) log(u-s)] + int log(u-s)/sqrt(1-s^2) ds
  //         = -(pi/2) log(u^2-1) + pi log((u+sqrt(u^2-1))/2).
  const double rad = std::sqrt(u * u - 1.0);
  const double closed = -0.5 * kPi * std::log(u * u - 1.0) +
                        kPi * std::log(0.5 * (u + rad));
  // x = sin(theta) removes the endpoint square-root kinks; both integrands are
  // then one-sidedly analytic and panelled Gauss-Legendre converges fast.  The
  // panel count tracks the near-edge peak width sqrt(2(u-1)).
  const int panels = u > 1.1 ? 16 : 64;
  const double easier = gl_composite(
      [u](double th) { return th * std::cos(th) / (u - std::sin(th)); },
      -0.5 * kPi, 0.5 * kPi, panels);
  const double harder = gl_composite(
      [u](double th) {
        const double s = std::sin(th);
        return std::asin(clamp1((u * s - 1.0) / (u - s))) * std::cos(th) /
               (u - s);
      },
      -0.5 * kPi, 0.5 * kPi, panels);
  return {make_report("arcsin_easier@u=" + io::g17(u), closed, easier, tol),
          make_report("arcsin_harder@u=" + io::g17(u), -closed, harder, tol)};
}

double gamma_ratio(const EquilibriumMeasure& eqm, double u) {
  if (!(u > eqm.b2)) {
    throw Error(ErrorCode::DomainViolation, "gamma_ratio: needs u right of the support");
  }
  return std::pow((u - eqm.b1) / (u - eqm.b2), 0.25);
}

M2Decomposition m2_decomposition_check(const EquilibriumMeasure& eqm, double u,
                                       double tol, int modes) {
  if (std::fabs(eqm.b1 + 1.0) > 1e-8 || std::fabs(eqm.b2 - 1.0) > 1e-8) {
    throw Error(ErrorCode::SupportNotNormalized,
                "m2_decomposition_check: support must be [-1,1]; apply "
                "map_support_to_unit first");
  }
  if (!(u > 1.0)) {
    throw Error(ErrorCode::DomainViolation, "m2_decomposition_check: needs u > 1");
  }

  const auto t_log = cheb_analyze([u](double x) { return std::log(u - x); }, modes);
  const auto t_inv = cheb_analyze([u](double s) { return 1.0 / (u - s); }, modes);
  const auto t_vp = cheb_analyze([&](double s) { return eval(eqm.V, s, 1); }, modes);
  auto f_num = [&](double s) {
    return -pv_cauchy_series(t_log, s, PvWeight::InvSqrt);
  };

  // Third factor: (1/4pi^2) int sqrt(1-s^2)/(u-s) F(u,s) ds in the exponent.
  const double expo3 =
      gl_composite(
          [&](double th) {
            const double c = std::cos(th);
            return c * c / (u - std::sin(th)) * f_num(std::sin(th));
          },
          -0.5 * kPi, 0.5 * kPi, 16) /
      (4.0 * kPi * kPi);
  const double gamma = gamma_ratio(eqm, u);
  const double factor3_closed = 0.5 * (gamma + 1.0 / gamma);

  // Middle factor: exponent A - B - C with
  //   A = (1/4pi^2) int V'(s) sqrt(1-s^2) F(u,s) ds
  //   B = (1/4pi^2) int V(x)/sqrt(1-x^2) PV int sqrt(1-s^2)/((u-s)(s-x)) ds dx
  //   C = int log(u-x) dmu(x).
  const double term_a =
      gl_composite(
          [&](double th) {
            const double s = std::sin(th);
            const double c = std::cos(th);
            return eval(eqm.V, s, 1) * c * c * f_num(s);
          },
          -0.5 * kPi, 0.5 * kPi, 16) /
      (4.0 * kPi * kPi);
  const double term_b =
      gl_composite(
          [&](double th) {
            const double x = std::sin(th);
            return eval(eqm.V, x) * pv_cauchy_series(t_inv, x, PvWeight::Sqrt);
          },
          -0.5 * kPi, 0.5 * kPi, 16) /
      (4.0 * kPi * kPi);
  const double term_c =
      integrate_mu(eqm.grid, [u](double x) { return std::log(u - x); }, eqm.h_coeffs);
  const double expo2 = term_a - term_b - term_c;
  const double factor2_closed = 2.0 * (u - std::sqrt(u * u - 1.0));

  // Constant factor: int V dmu - (1/4pi^2) int V(x)/sqrt(1-x^2)
  //                   PV int V'(s) sqrt(1-s^2)/(s-x) ds dx.
  const double v_mu =
      integrate_mu(eqm.grid, [&](double x) { return eval(eqm.V, x); }, eqm.h_coeffs);
  const double term_d =
      gl_composite(
          [&](double th) {
            const double x = std::sin(th);
            return eval(eqm.V, x) * pv_cauchy_series(t_vp, x, PvWeight::Sqrt);
          },
          -0.5 * kPi, 0.5 * kPi, 16) /
      (4.0 * kPi * kPi);
  const double factor1 = std::exp(v_mu - term_d);

  M2Decomposition out;
  out.factor2 = make_report("m2_factor2@u=" + io::g17(u), factor2_closed,
                            std::exp(expo2), tol);
  out.factor3 = make_report("m2_factor3@u=" + io::g17(u), factor3_closed,
                            std::exp(expo3), tol);

  // Supercritical spike puts c(a) at the edge, so the beta=2 prefactor is
  // defined for every u > 1; its value does not depend on a at beta = 2.
  const double a_super = 0.5 * eval(eqm.V, eqm.b2, 1) + 1.0;
  const double m2 = M_beta_prefactor(eqm, a_super, u, 2.0);
  out.product = make_report("m2_product@u=" + io::g17(u), m2,
                            factor1 * std::exp(expo2) * std::exp(expo3), tol);
  out.constant_factor = factor1;
  out.constant_estimate = m2 / (gamma - 1.0 / gamma);
  return out;
}

EquilibriumMeasure map_support_to_unit(const EquilibriumMeasure& eqm) {
  const double c = eqm.mid();
  const double r = eqm.rad();
  // Coefficients of prefactor * p(c + r y) for a polynomial p.
  auto compose = [&](const std::vector<double>& in, double prefactor) {
    std::vector<double> out(in.size(), 0.0);
    std::vector<double> pw{1.0};
    for (size_t k = 0; k < in.size(); ++k) {
      for (size_t j = 0; j < pw.size(); ++j) out[j] += in[k] * pw[j];
      if (k + 1 < in.size()) {
        std::vector<double> nx(pw.size() + 1, 0.0);
        for (size_t j = 0; j < pw.size(); ++j) {
          nx[j] += c * pw[j];
          nx[j + 1] += r * pw[j];
        }
        pw.swap(nx);
      }
    }
    for (double& v : out) v *= prefactor;
    return out;
  };
  EquilibriumMeasure out;
  out.V = make_potential(compose(eqm.V.coeffs, 1.0));
  out.b1 = -1.0;
  out.b2 = 1.0;
  out.h_coeffs = compose(eqm.h_coeffs, r * r);
  out.ell = eqm.ell - 2.0 * std::log(r);
  out.grid = make_cheb_grid(-1.0, 1.0, eqm.grid.m);
  return out;
}

ZSpotCheck z_asymptotics_spotcheck(const Potential& V, double u, ZMode mode,
                                   int n, long mc_samples, std::uint64_t seed,
                                   double tol, double z_or_t, double w0_offset) {
  if (n < 2 || n > 32) {
    throw Error(ErrorCode::InvalidArgument,
                "z_asymptotics_spotcheck: n must be in [2, 32]");
  }
  if (mc_samples < 100) {
    throw Error(ErrorCode::InvalidArgument,
                "z_asymptotics_spotcheck: needs at least 100 samples");
  }
  const EquilibriumMeasure eqm = solve_equilibrium(V);
  if (!(u > eqm.b2)) {
    throw Error(ErrorCode::DomainViolation,
                "z_asymptotics_spotcheck: u must lie right of the support");
  }

  const int m = n - 1;
  const double w0 = u + w0_offset;
  const double t = z_or_t;

  // Predicted value.  At beta = 2 the nu term of R_beta drops out.
  cplx predicted;
  if (mode == ZMode::ZScaling) {
    auto p = [&](double x) { return -eval(V, x) + std::log(u - x); };
    auto pp = [&](double x) { return -eval(V, x, 1) - 1.0 / (u - x); };
    const double p_mu = integrate_mu(eqm.grid, p, eqm.h_coeffs);
    const double r2 = std::exp(quadratic_A(eqm, p, pp, 512) - p_mu);
    predicted = std::exp(-z_or_t * g_deriv(eqm, u, 1)) * r2 *
                std::exp(static_cast<double>(n) * p_mu);
  } else {
    auto p = [&](double x) {
      return -eval(V, x) + 2.0 * std::log(u - x) - std::log(w0 - x);
    };
    auto pp = [&](double x) {
      return -eval(V, x, 1) - 2.0 / (u - x) + 1.0 / (w0 - x);
    };
    const double p_mu = integrate_mu(eqm.grid, p, eqm.h_coeffs);
    const double r2 = std::exp(quadratic_A(eqm, p, pp, 512) - p_mu);
    const double m1 =
        integrate_mu(eqm.grid, [&](double x) { return 1.0 / (w0 - x); }, eqm.h_coeffs);
    const double m2 = integrate_mu(
        eqm.grid, [&](double x) { return 1.0 / ((w0 - x) * (w0 - x)); }, eqm.h_coeffs);
    predicted = std::exp(cplx(-0.5 * t * t * m2, -t * std::sqrt(double(n)) * m1)) *
                r2 * std::exp(static_cast<double>(n) * p_mu);
  }

  // Metropolis over the unspiked m-point gas with weight e^{-m V} and squared
  // Vandermonde; same adaptation scheme as the spiked chain.
  const double box = 1.45 * std::max({std::fabs(eqm.b1), std::fabs(eqm.b2), u}) +
                     1.0 + 6.0 / std::sqrt(2.0 * m);
  std::vector<double> x(m);
  for (int j = 0; j < m; ++j) {
    x[j] = eqm.b1 + (eqm.b2 - eqm.b1) * (j + 0.5) / m;
  }
  Rng rng(derive_seed(seed, 0));
  const long thin = m;
  const long burn = std::max(20000L, thin * mc_samples / 4);
  const long total = burn + thin * mc_samples;
  double step = 0.5 * (eqm.b2 - eqm.b1) / std::sqrt(double(m));
  long win_acc = 0, win_tot = 0, win_index = 0;

  std::vector<double> logp;
  std::vector<double> phase;
  logp.reserve(mc_samples);
  if (mode == ZMode::W0Scaling) phase.reserve(mc_samples);
  long retained = 0, passing = 0;
  const double ts = t / std::sqrt(double(n));

  for (long it = 0; it < total; ++it) {
    const int j = static_cast<int>(rng.next_u64() % m);
    const double old = x[j];
    const double prop = old + step * rng.normal();
    bool accept = false;
    if (std::fabs(prop) <= box) {
      const double dlog =
          2.0 * (kernels::log_abs_diff_sum(prop, x.data(), m, j) -
                 kernels::log_abs_diff_sum(old, x.data(), m, j)) -
          m * (eval(V, prop) - eval(V, old));
      accept = dlog >= 0.0 || rng.uniform() < std::exp(dlog);
    }
    if (accept) x[j] = prop;

    if (it < burn) {
      win_acc += accept;
      if (++win_tot == 200) {
        const double rate = static_cast<double>(win_acc) / win_tot;
        const double gain = 1.0 / std::sqrt(1.0 + double(++win_index));
        step = std::min(std::max(step * std::exp(gain * (rate - 0.35)), 1e-5 * box), box);
        win_acc = 0;
        win_tot = 0;
      }
      continue;
    }
    if ((it - burn + 1) % thin != 0 || retained >= mc_samples) continue;
    ++retained;
    double mx = x[0];
    for (int q = 1; q < m; ++q) mx = std::max(mx, x[q]);
    if (!(mx < u)) continue;
    ++passing;
    double lp = 0.0, ph = 0.0;
    for (int q = 0; q < m; ++q) {
      lp += -eval(V, x[q]) + 2.0 * std::log(u - x[q]);
      if (mode == ZMode::ZScaling) {
        lp -= std::log(u + z_or_t / n - x[q]);
      } else {
        const double d = w0 - x[q];
        lp -= 0.5 * std::log(d * d + ts * ts);
        ph -= std::atan2(ts, d);
      }
    }
    logp.push_back(lp);
    if (mode == ZMode::W0Scaling) phase.push_back(ph);
  }

  const double frac = static_cast<double>(passing) / std::max(1L, retained);
  if (frac < 1e-3) {
    throw Error(ErrorCode::IndicatorStarvation,
                "z_asymptotics_spotcheck: indicator pass rate " + io::g17(frac));
  }

  auto combine = [&](size_t lo, size_t hi, long denom) -> cplx {
    if (lo >= hi) return 0.0;
    double peak = logp[lo];
    for (size_t i = lo; i < hi; ++i) peak = std::max(peak, logp[i]);
    cplx acc = 0.0;
    for (size_t i = lo; i < hi; ++i) {
      const double w = std::exp(logp[i] - peak);
      if (mode == ZMode::W0Scaling) {
        acc += w * std::exp(cplx(0.0, phase[i]));
      } else {
        acc += w;
      }
    }
    return acc * std::exp(peak) / static_cast<double>(denom);
  };

  const cplx z_mc = combine(0, logp.size(), retained);

  // Batch error bars over contiguous (still correlated) blocks.
  const int nb = 20;
  double bsum = 0.0, bsq = 0.0;
  int used = 0;
  for (int b = 0; b < nb; ++b) {
    const size_t lo = logp.size() * b / nb;
    const size_t hi = logp.size() * (b + 1) / nb;
    if (hi <= lo) continue;
    const long denom = static_cast<long>(std::llround(double(retained) / nb));
    const double v = std::abs(combine(lo, hi, std::max(1L, denom)));
    bsum += v;
    bsq += v * v;
    ++used;
  }
  double rel_se = 0.0;
  if (used > 1) {
    const double mean = bsum / used;
    const double var = std::max(0.0, bsq / used - mean * mean);
    rel_se = std::sqrt(var / used) / std::abs(predicted);
  }

  ZSpotCheck out;
  out.z_mc = z_mc;
  out.z_predicted = predicted;
  out.rel_se = rel_se;
  out.pass_fraction = frac;
  const char* tag = mode == ZMode::ZScaling ? "z_scaling" : "w0_scaling";
  out.report = make_report(std::string("z_asymptotics_") + tag + "@n=" +
                               std::to_string(n), std::abs(predicted),
                           std::abs(z_mc), tol);
  out.report.abs_err = std::abs(z_mc - predicted);
  out.report.rel_err = out.report.abs_err / std::abs(predicted);
  out.report.passed = out.report.rel_err <= tol;
  return out;
}

std::vector<OracleReport> run_appendix_checks() {
  std::vector<OracleReport> out;
  auto push_fg = [&](const char* what, double u, double s, const FGValue& v,
                     double tol) {
    char name[64];
    std::snprintf(name, sizeof(name), "%s@(%g,%g)", what, u, s);
    out.push_back(make_report(name, v.closed, v.numeric, tol));
  };

  for (auto [u, s] : {std::pair{1.5, 0.3}, {2.0, 0.5}, {1.2, -0.6}}) {
    push_fg("F", u, s, F_us(u, s), 1e-8);
    push_fg("G", u, s, G_us(u, s), 1e-8);
  }
  out.push_back(make_report("F_s0_reduction@u=2", F_closed(2.0, 0.0),
                            kPi * std::asin(0.5), 1e-10));
  {
    OracleReport r = make_report("F_decay@u=1e6", F_closed(1e6, 0.3), 0.0, 1.0);
    r.passed = std::fabs(r.closed_form) < 1e-5;
    out.push_back(r);
  }
  {
    const double u = 2.0, rad = std::sqrt(3.0);
    out.push_back(make_report("G_s0_reduction@u=2", G_closed(u, 0.0),
                              kPi * (rad - u - std::atan(-1.0 / rad)), 1e-12));
  }
  {
    const double h = 1e-4;
    const double fd = (G_us(2.0 + h, 0.5).numeric - G_us(2.0 - h, 0.5).numeric) /
                      (2.0 * h);
    out.push_back(make_report("dG_du@(2,0.5)", dG_du_closed(2.0, 0.5), fd, 1e-6));
  }
  for (const auto& r : arcsin_integrals(2.0, 1e-9)) out.push_back(r);
  for (const auto& r : arcsin_integrals(1.01, 1e-7)) out.push_back(r);
  {
    const double rad = std::sqrt(3.0);
    const double closed = -0.5 * kPi * std::log(3.0) + kPi * std::log(0.5 * (2.0 + rad));
    OracleReport r = make_report("arcsin_pair_sum@u=2", closed + -closed, 0.0, 1.0);
    r.passed = r.abs_err <= 1e-12;
    out.push_back(r);
  }

  auto decomposition_block = [&](const EquilibriumMeasure& eqm, const char* tag) {
    const std::array<double, 4> us{1.2, 1.5, 2.0, 3.0};
    std::vector<double> consts;
    for (double u : us) {
      M2Decomposition d = m2_decomposition_check(eqm, u);
      d.factor2.name += tag;
      d.factor3.name += tag;
      d.product.name += tag;
      out.push_back(d.factor2);
      out.push_back(d.factor3);
      out.push_back(d.product);
      consts.push_back(d.constant_estimate);
    }
    double cmin = consts[0], cmax = consts[0];
    for (double c : consts) {
      cmin = std::min(cmin, c);
      cmax = std::max(cmax, c);
    }
    OracleReport spread = make_report(std::string("m2_constant_spread") + tag,
                                      cmin, cmax, 1e-5);
    out.push_back(spread);
  };

  decomposition_block(solve_equilibrium(make_potential({0.0, 0.0, 2.0})), "[2x^2]");

  // Second pass: a quartic measure pushed through the affine map onto [-1,1].
  {
    const Potential q =
        make_potential({0.0, 0.11418, 0.37448, -0.16736, 0.02093});
    const EquilibriumMeasure mapped = map_support_to_unit(solve_equilibrium(q));
    decomposition_block(mapped, "[quartic]");
  }

  // Third pass: a quartic whose density vanishes to higher order at the right
  // edge. The endpoint system is nearly singular there, which is exactly the
  // case the pushforward mapping has to survive.
  {
    const Potential q = make_potential({0.0, 8.0 / 5.0, 1.0 / 5.0, -4.0 / 15.0,
                                        1.0 / 20.0});
    const EquilibriumMeasure mapped = map_support_to_unit(solve_equilibrium(q));
    decomposition_block(mapped, "[quartic-critical]");
  }
  return out;
}

std::string reports_to_json(const std::vector<OracleReport>& reports) {
  std::string s = "[\n";
  for (size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    s += "  {\"name\": \"" + r.name + "\", \"closed_form\": " + io::g17(r.closed_form) +
         ", \"numeric\": " + io::g17(r.numeric) + ", \"abs_err\": " + io::g17(r.abs_err) +
         ", \"rel_err\": " + io::g17(r.rel_err) +
         (r.passed ? ", \"passed\": true}" : ", \"passed\": false}");
    if (i + 1 < reports.size()) s += ",";
    s += "\n";
  }
  s += "]\n";
  return s;
}

} // namespace spiked
