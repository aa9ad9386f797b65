#include "spiked/phase.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spiked/io.hpp"

namespace spiked {

namespace {

constexpr double kPi = 3.14159265358979323846;

double half_vprime_edge(const EquilibriumMeasure& eqm) {
  return 0.5 * eval(eqm.V, eqm.b2, 1);
}

cplx sqrt_product(const EquilibriumMeasure& eqm, cplx z) {
  // Branch with cut exactly on [b1, b2], positive for real z > b2.
  return std::sqrt(z - eqm.b1) * std::sqrt(z - eqm.b2);
}

cplx h_eval(const EquilibriumMeasure& eqm, cplx z) {
  cplx v = 0.0;
  for (size_t k = eqm.h_coeffs.size(); k-- > 0;) v = v * z + eqm.h_coeffs[k];
  return v;
}

cplx vprime_eval(const EquilibriumMeasure& eqm, cplx z) {
  cplx v = 0.0;
  const auto& c = eqm.V.coeffs;
  for (size_t k = c.size(); k-- > 1;) v = v * z + static_cast<double>(k) * c[k];
  return v;
}

// Closed resolvent form, analytic off the support cut.
cplx g_prime_c(const EquilibriumMeasure& eqm, cplx z) {
  return 0.5 * (vprime_eval(eqm, z) - h_eval(eqm, z) * sqrt_product(eqm, z));
}

std::vector<double> poly_mul(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(a.size() + b.size() - 1, 0.0);
  for (size_t i = 0; i < a.size(); ++i) {
    for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

double poly_eval(const std::vector<double>& p, double x) {
  double v = 0.0;
  for (size_t k = p.size(); k-- > 0;) v = v * x + p[k];
  return v;
}

// V'^2 - h^2 (x-b1)(x-b2).  The top coefficients cancel exactly, leaving the
// numerator of the rationalized g' = P / (2 (V' + h R)); this form has no
// large-x cancellation, unlike (V' - h R) / 2.
std::vector<double> rationalized_numerator(const EquilibriumMeasure& eqm) {
  const std::vector<double> vp = derivative_coeffs(eqm.V, 1);
  const std::vector<double> quad{eqm.b1 * eqm.b2, -(eqm.b1 + eqm.b2), 1.0};
  std::vector<double> P = poly_mul(vp, vp);
  const std::vector<double> h2q = poly_mul(poly_mul(eqm.h_coeffs, eqm.h_coeffs), quad);
  if (h2q.size() > P.size()) P.resize(h2q.size(), 0.0);
  for (size_t i = 0; i < h2q.size(); ++i) P[i] -= h2q[i];
  while (P.size() > 1 && std::fabs(P.back()) < 1e-12) P.pop_back();
  return P;
}

} // namespace

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::Subcritical: return "Subcritical";
    case Regime::SupercriticalUnique: return "SupercriticalUnique";
    case Regime::SecondaryCritical: return "SecondaryCritical";
    case Regime::AtCritical: return "AtCritical";
  }
  return "Unknown";
}

cplx g_value(const EquilibriumMeasure& eqm, cplx z) { return log_integral(eqm, z); }

double g_real_at_or_above_edge(const EquilibriumMeasure& eqm, double x) {
  if (x < eqm.b2) {
    throw Error(ErrorCode::BranchCut, "g is requested on [e, inf) only");
  }
  if (x == eqm.b2) {
    // Edge limit of the log-moment series (T_k(1) = 1 term by term).
    return log_integral_interior(eqm, x);
  }
  return log_integral(eqm, cplx(x, 0.0)).real();
}

double g_deriv(const EquilibriumMeasure& eqm, double x, int order) {
  if (!(x > eqm.b2)) {
    throw Error(ErrorCode::BranchCut, "g_deriv: x must be strictly right of the edge");
  }
  if (order < 1) throw Error(ErrorCode::InvalidArgument, "g_deriv: order >= 1");
  if (order <= 2) {
    const std::vector<double> P = rationalized_numerator(eqm);
    const double R = std::sqrt((x - eqm.b1) * (x - eqm.b2));
    double h = 0.0;
    for (size_t k = eqm.h_coeffs.size(); k-- > 0;) h = h * x + eqm.h_coeffs[k];
    const double D = eval(eqm.V, x, 1) + h * R;
    const double Pv = poly_eval(P, x);
    if (order == 1) return Pv / (2.0 * D);
    double Pp = 0.0;
    for (size_t k = P.size(); k-- > 1;) Pp = Pp * x + static_cast<double>(k) * P[k];
    const double Rp = (x - eqm.mid()) / R;
    double hp = 0.0;
    for (size_t k = eqm.h_coeffs.size(); k-- > 1;) {
      hp = hp * x + static_cast<double>(k) * eqm.h_coeffs[k];
    }
    const double Dp = eval(eqm.V, x, 2) + hp * R + h * Rp;
    return (Pp * D - Pv * Dp) / (2.0 * D * D);
  }
  // Taylor coefficients of the analytic g' on a circle that stays clear of
  // the cut: g^(order) = (order-1)! * c_{order-1}, c_q from uniform samples.
  const double r = 0.5 * std::min(x - eqm.b2, std::max(1.0, eqm.rad()));
  const int Q = 64;
  const int q = order - 1;
  cplx acc = 0.0;
  for (int j = 0; j < Q; ++j) {
    const double th = 2.0 * kPi * j / Q;
    const cplx w(std::cos(th), std::sin(th));
    acc += g_prime_c(eqm, x + r * w) * std::pow(std::conj(w), q);
  }
  double fact = 1.0;
  for (int i = 2; i <= q; ++i) fact *= i;
  return (acc.real() / Q) * fact / std::pow(r, q);
}

double c_of_a(const EquilibriumMeasure& eqm, double a) {
  if (!(a > 0.0)) throw Error(ErrorCode::NonpositiveSpike, "c_of_a: requires a > 0");
  const double e = eqm.b2;
  if (a >= half_vprime_edge(eqm)) return e;
  // g' decreases from V'(e)/2 at the edge to 0 at infinity, so the root of
  // g'(c) = a brackets by doubling.
  double lo = e;
  double hi = e + std::max(1.0, eqm.rad());
  int guard = 0;
  while (g_deriv(eqm, hi, 1) > a) {
    lo = hi;
    hi = e + 2.0 * (hi - e);
    if (++guard > 200) {
      throw Error(ErrorCode::NoConvergence, "c_of_a: bracketing failed");
    }
  }
  const double eps = std::numeric_limits<double>::epsilon();
  for (int it = 0; it < 200 && hi - lo > 2.0 * eps * std::max(1.0, std::fabs(hi)); ++it) {
    const double midp = 0.5 * (lo + hi);
    if (g_deriv(eqm, midp, 1) > a) {
      lo = midp;
    } else {
      hi = midp;
    }
  }
  double c = 0.5 * (lo + hi);
  for (int it = 0; it < 50; ++it) {
    const double f = g_deriv(eqm, c, 1) - a;
    if (std::fabs(f) < 1e-13 * std::max(1.0, a)) break;
    const double cn = c - f / g_deriv(eqm, c, 2);
    if (!(cn > lo && cn < hi)) break;
    c = cn;
  }
  // Just right of a_c the root sits closer to the edge than one ulp of e, and
  // the square-root vanishing of g' - a caps the attainable residual; a
  // bracket collapsed to machine width identifies c as exactly as possible.
  const bool collapsed = hi - lo <= 8.0 * eps * std::max(1.0, std::fabs(hi));
  if (!collapsed && std::fabs(g_deriv(eqm, c, 1) - a) > 1e-11 * std::max(1.0, a)) {
    throw Error(ErrorCode::NoConvergence, "c_of_a: residual too large");
  }
  return c;
}

std::pair<double, double> G_H(const EquilibriumMeasure& eqm, double a, double x) {
  const double g = g_real_at_or_above_edge(eqm, x);
  const double G = g - eval(eqm.V, x, 0) + a * x;
  const double H = -g + a * x + eqm.ell;
  return {G, H};
}

double G_of(const EquilibriumMeasure& eqm, double a, double x) {
  return G_H(eqm, a, x).first;
}

namespace {

double G_prime(const EquilibriumMeasure& eqm, double a, double x) {
  return g_deriv(eqm, x, 1) - eval(eqm.V, x, 1) + a;
}

// Right horizon: G' stays below -1 from here on (G' is eventually dominated
// by -V').
double search_horizon(const EquilibriumMeasure& eqm, double a, double from) {
  const double e = eqm.b2;
  double x = std::max(from, e + std::max(1.0, eqm.rad()));
  for (int it = 0; it < 200; ++it) {
    // g' < g'(x) for points right of x, so -V' + a + g'(x) < -1 on [x, inf)
    // once V' has grown enough; V' is increasing far right.
    if (eval(eqm.V, x, 1) - a - g_deriv(eqm, x, 1) > 1.0) return x;
    x = e + 2.0 * (x - e);
    if (x - e > 1e6) break;
  }
  throw Error(ErrorCode::SearchHorizonExceeded, "G' does not turn persistently negative");
}

struct SupResult {
  double value = -1e300;
  double arg = 0.0;
  bool found = false;
};

// Grid sup of G over (lo, hi], log-spaced offsets from lo.
SupResult grid_sup(const EquilibriumMeasure& eqm, double a, double lo, double hi, int npts) {
  SupResult res;
  if (!(hi > lo)) return res;
  const double d0 = std::max(1e-9 * std::max(1.0, eqm.rad()), 1e-12);
  const double span = hi - lo;
  for (int i = 0; i <= npts; ++i) {
    const double frac = static_cast<double>(i) / npts;
    const double off = d0 * std::pow(span / d0, frac);
    const double x = lo + off;
    const double G = G_of(eqm, a, x);
    if (G > res.value) {
      res.value = G;
      res.arg = x;
      res.found = true;
    }
  }
  return res;
}

double polish_stationary(const EquilibriumMeasure& eqm, double a, double x, double lo, double hi) {
  for (int it = 0; it < 80; ++it) {
    const double f = G_prime(eqm, a, x);
    if (std::fabs(f) < 1e-12) break;
    const double fp = g_deriv(eqm, x, 2) - eval(eqm.V, x, 2);
    double xn = (fp != 0.0) ? x - f / fp : x;
    if (!(xn > lo) || !(xn < hi)) {
      // Fall back to a bisection-style pull toward the admissible interval.
      xn = 0.5 * (x + std::clamp(xn, lo, hi));
    }
    if (std::fabs(xn - x) < 1e-15 * std::max(1.0, std::fabs(x))) {
      x = xn;
      break;
    }
    x = xn;
  }
  return x;
}

} // namespace

double critical_value(const EquilibriumMeasure& eqm) {
  const double a_hi = half_vprime_edge(eqm);
  auto predicate = [&](double a) {
    const double c = c_of_a(eqm, a);
    const double H_c = G_H(eqm, a, c).second;
    const double hi = search_horizon(eqm, a, c + 1.0);
    SupResult sup = grid_sup(eqm, a, c, hi, 400);
    if (!sup.found) return false;
    const double x = polish_stationary(eqm, a, sup.arg, c, hi);
    const double val = std::max(sup.value, (x > c && x < hi) ? G_of(eqm, a, x) : sup.value);
    return val > H_c + 1e-13 * std::max(1.0, std::fabs(H_c));
  };
  const double scale = std::max(1.0, a_hi);
  if (!predicate(a_hi * (1.0 - 1e-10))) {
    // Supremum never beats H below the threshold spike: the critical value
    // sits exactly at the edge-matching point V'(e)/2.
    return a_hi;
  }
  double lo = a_hi * 0.5;
  int guard = 0;
  while (predicate(lo)) {
    lo *= 0.5;
    if (++guard > 60) {
      throw Error(ErrorCode::SearchHorizonExceeded,
                  "critical value search reached a = " + io::g17(lo));
    }
  }
  double hi = (guard == 0) ? a_hi : lo * 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-9 * scale * 0.5; ++it) {
    const double a = 0.5 * (lo + hi);
    if (predicate(a)) {
      hi = a;
    } else {
      lo = a;
    }
  }
  return 0.5 * (lo + hi);
}

std::vector<CriticalPoint> maximizers(const EquilibriumMeasure& eqm, double a, double tie_tol) {
  if (!(a > 0.0)) throw Error(ErrorCode::NonpositiveSpike, "maximizers: requires a > 0");
  const double c = c_of_a(eqm, a);
  const double hi = search_horizon(eqm, a, c + 1.0);
  const double d0 = 1e-8 * std::max(1.0, eqm.rad());
  const double span = hi - c;
  const int npts = 800;
  std::vector<double> xs(npts + 1), Gp(npts + 1);
  for (int i = 0; i <= npts; ++i) {
    const double frac = static_cast<double>(i) / npts;
    xs[i] = c + d0 * std::pow(span / d0, frac);
    Gp[i] = G_prime(eqm, a, xs[i]);
  }
  std::vector<double> roots;
  for (int i = 0; i < npts; ++i) {
    if (Gp[i] > 0.0 && Gp[i + 1] <= 0.0) {
      // Sign change bracketing a local maximum of G.
      double xlo = xs[i], xhi = xs[i + 1];
      for (int it = 0; it < 90; ++it) {
        const double xm = 0.5 * (xlo + xhi);
        if (G_prime(eqm, a, xm) > 0.0) {
          xlo = xm;
        } else {
          xhi = xm;
        }
      }
      double x = polish_stationary(eqm, a, 0.5 * (xlo + xhi), xs[i], xs[i + 1]);
      if (std::fabs(G_prime(eqm, a, x)) > std::fabs(G_prime(eqm, a, 0.5 * (xlo + xhi)))) {
        x = 0.5 * (xlo + xhi);
      }
      roots.push_back(x);
    }
  }
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [&](double l, double r) {
                            return std::fabs(l - r) < 1e-9 * std::max(1.0, eqm.rad());
                          }),
              roots.end());
  std::vector<CriticalPoint> pts;
  for (double x : roots) {
    if (std::fabs(G_prime(eqm, a, x)) > 1e-9) continue;
    CriticalPoint p;
    p.x = x;
    p.G = G_of(eqm, a, x);
    int order = 2;
    double dval = 0.0;
    for (; order <= 8; ++order) {
      dval = g_deriv(eqm, x, order) - eval(eqm.V, x, order);
      if (std::fabs(dval) > 1e-7) break;
    }
    if (order > 8 || order % 2 != 0 || dval > 0.0) continue;
    p.order = order;
    p.deriv = dval;
    pts.push_back(p);
  }
  if (pts.empty()) {
    throw Error(ErrorCode::NoInteriorMaximum,
                "no interior maximum of G right of c(a); a <= a_c?");
  }
  double gmax = -1e300;
  for (const auto& p : pts) gmax = std::max(gmax, p.G);
  std::vector<CriticalPoint> out;
  for (const auto& p : pts) {
    if (p.G >= gmax - tie_tol) out.push_back(p);
  }
  std::sort(out.begin(), out.end(), [](const CriticalPoint& l, const CriticalPoint& r) {
    return l.x < r.x;
  });
  return out;
}

PhaseReport classify(const EquilibriumMeasure& eqm, double a) {
  if (!(a > 0.0)) throw Error(ErrorCode::NonpositiveSpike, "classify: requires a > 0");
  PhaseReport rep;
  rep.a = a;
  rep.e = eqm.b2;
  rep.a_c = critical_value(eqm);
  rep.c_of_a = c_of_a(eqm, a);
  rep.h_at_c = G_H(eqm, a, rep.c_of_a).second;
  const double scale = std::max(1.0, std::fabs(rep.a_c));
  if (std::fabs(a - rep.a_c) <= 1e-10 * scale) {
    rep.regime = Regime::AtCritical;
    const double edge_match = half_vprime_edge(eqm);
    rep.resolved = std::fabs(rep.a_c - edge_match) <= 1e-8 * scale;
    rep.predicted_location = rep.e;
    rep.g_max = rep.h_at_c;
    return rep;
  }
  if (a < rep.a_c) {
    rep.regime = Regime::Subcritical;
    rep.predicted_location = rep.e;
    const double hi = search_horizon(eqm, a, rep.c_of_a + 1.0);
    rep.g_max = grid_sup(eqm, a, rep.c_of_a, hi, 400).value;
    return rep;
  }
  rep.maximizers = maximizers(eqm, a, 1e-8);
  rep.g_max = -1e300;
  for (const auto& p : rep.maximizers) rep.g_max = std::max(rep.g_max, p.G);
  if (rep.maximizers.size() >= 2) {
    rep.regime = Regime::SecondaryCritical;
    rep.predicted_location = rep.maximizers.back().x;
  } else {
    rep.regime = Regime::SupercriticalUnique;
    rep.predicted_location = rep.maximizers.front().x;
  }
  return rep;
}

double asymptotic_log_density(const EquilibriumMeasure& eqm, double a, double u) {
  if (!(u > eqm.b2)) throw Error(ErrorCode::AtEdge, "asymptotic_log_density: requires u > e");
  const double c = c_of_a(eqm, a);
  if (u >= c) return G_of(eqm, a, u);
  const double H_c = G_H(eqm, a, c).second;
  const double g_u = g_real_at_or_above_edge(eqm, u);
  return H_c - eval(eqm.V, u, 0) + 2.0 * g_u - eqm.ell;
}

TiePoint secondary_critical_point(const EquilibriumMeasure& eqm, double a_lo, double a_hi) {
  auto top = [&](double a) {
    const auto pts = maximizers(eqm, a, 1e300);  // keep all local maxima
    CriticalPoint best = pts.front();
    for (const auto& p : pts) {
      if (p.G > best.G) best = p;
    }
    return std::pair<double, std::vector<CriticalPoint>>(best.x, pts);
  };
  const double gap_scale = std::max(1.0, eqm.rad());
  double lo = a_lo, hi = a_hi;
  const double x_lo = top(lo).first;
  const double x_hi = top(hi).first;
  if (std::fabs(x_hi - x_lo) < 1e-3 * gap_scale) {
    throw Error(ErrorCode::NoConvergence,
                "no maximizer jump between the given spike values");
  }
  for (int it = 0; it < 60; ++it) {
    const double a = 0.5 * (lo + hi);
    const double x = top(a).first;
    if (std::fabs(x - x_lo) < std::fabs(x - x_hi)) {
      lo = a;
    } else {
      hi = a;
    }
  }
  // Newton on the G-value difference of the two branches; its a-derivative is
  // the gap x2 - x1 (the branch positions are stationary points of G).
  double a0 = 0.5 * (lo + hi);
  TiePoint tie;
  for (int it = 0; it < 60; ++it) {
    const auto pts = maximizers(eqm, a0, 1e300);
    if (pts.size() < 2) break;
    CriticalPoint first = pts.front(), last = pts.back();
    double bestG = -1e300, secondG = -1e300;
    CriticalPoint b1 = pts.front(), b2 = pts.front();
    for (const auto& p : pts) {
      if (p.G > bestG) {
        secondG = bestG;
        b2 = b1;
        bestG = p.G;
        b1 = p;
      } else if (p.G > secondG) {
        secondG = p.G;
        b2 = p;
      }
    }
    first = b1.x < b2.x ? b1 : b2;
    last = b1.x < b2.x ? b2 : b1;
    tie.a0 = a0;
    tie.x1 = first.x;
    tie.x2 = last.x;
    const double delta = G_of(eqm, a0, last.x) - G_of(eqm, a0, first.x);
    if (std::fabs(delta) < 1e-14 * std::max(1.0, std::fabs(bestG))) break;
    const double step = delta / (last.x - first.x);
    a0 -= step;
    if (!(a0 > a_lo) || !(a0 < a_hi)) {
      a0 = 0.5 * (lo + hi);
      break;
    }
  }
  // A bracket that stays on one branch still drives the bisection somewhere;
  // only accept the result if the two branch values actually tie there.
  if (!(tie.x2 > tie.x1)) {
    throw Error(ErrorCode::NoConvergence, "no maximizer tie in the given spike bracket");
  }
  const double resid = G_of(eqm, tie.a0, tie.x2) - G_of(eqm, tie.a0, tie.x1);
  const double val_scale = std::max(1.0, std::fabs(G_of(eqm, tie.a0, tie.x2)));
  if (!(std::fabs(resid) <= 1e-9 * val_scale)) {
    throw Error(ErrorCode::NoConvergence, "no maximizer tie in the given spike bracket");
  }
  return tie;
}

} // namespace spiked
