#include "spiked/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "spiked/kernels.hpp"

namespace spiked {

namespace {

constexpr double kPi = 3.14159265358979323846;

double legendre_p(int n, double x, double* dp) {
  double p0 = 1.0, p1 = x;
  for (int k = 2; k <= n; ++k) {
    const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
    p0 = p1;
    p1 = p2;
  }
  *dp = n * (x * p1 - p0) / (x * x - 1.0);
  return p1;
}

struct Gl32 {
  std::array<double, 32> x{};
  std::array<double, 32> w{};
  Gl32() {
    const int n = 32;
    for (int i = 0; i < n / 2; ++i) {
      double t = std::cos(kPi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int it = 0; it < 100; ++it) {
        const double p = legendre_p(n, t, &dp);
        const double dt = -p / dp;
        t += dt;
        if (std::fabs(dt) < 1e-16) break;
      }
      legendre_p(n, t, &dp);
      const double wt = 2.0 / ((1.0 - t * t) * dp * dp);
      x[i] = -t;
      x[n - 1 - i] = t;
      w[i] = wt;
      w[n - 1 - i] = wt;
    }
  }
};

const Gl32& gl32() {
  static const Gl32 g;
  return g;
}

} // namespace

const std::array<double, 32>& gl32_nodes() { return gl32().x; }
const std::array<double, 32>& gl32_weights() { return gl32().w; }

ChebGrid make_cheb_grid(double b1, double b2, int m) {
  if (!(b2 > b1) || !std::isfinite(b1) || !std::isfinite(b2)) {
    throw Error(ErrorCode::InvalidArgument, "make_cheb_grid: requires finite b2 > b1");
  }
  if (m < 1) throw Error(ErrorCode::InvalidArgument, "make_cheb_grid: requires m >= 1");
  ChebGrid grid;
  grid.m = m;
  grid.b1 = b1;
  grid.b2 = b2;
  grid.nodes.resize(m);
  grid.weights.resize(m);
  const double mid = 0.5 * (b1 + b2);
  const double rad = 0.5 * (b2 - b1);
  // Gauss nodes for the sqrt(1-t^2) weight: zeros of U_m.  The factor
  // rad^2/(2 pi) carries the density normalization and the change of
  // variables, so sum w_i f(x_i) h(x_i) targets the d(mu) integral directly.
  const double scale = rad * rad / (2.0 * kPi) * (kPi / (m + 1));
  for (int i = 1; i <= m; ++i) {
    const double th = kPi * i / (m + 1);
    const double s = std::sin(th);
    grid.nodes[i - 1] = mid + rad * std::cos(th);
    grid.weights[i - 1] = scale * s * s;
  }
  return grid;
}

double integrate_mu(const ChebGrid& grid, const std::function<double(double)>& f,
                    const std::vector<double>& h_coeffs) {
  const size_t m = grid.nodes.size();
  std::vector<double> hx(m);
  kernels::horner_many(h_coeffs.data(), h_coeffs.size(), grid.nodes.data(), hx.data(), m);
  double acc = 0.0;
  for (size_t i = 0; i < m; ++i) {
    const double v = f(grid.nodes[i]) * hx[i] * grid.weights[i];
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::NonFiniteIntegrand, "integrate_mu: non-finite sample");
    }
    acc += v;
  }
  return acc;
}

cplx integrate_mu_c(const ChebGrid& grid, const std::function<cplx(double)>& f,
                    const std::vector<double>& h_coeffs) {
  const size_t m = grid.nodes.size();
  std::vector<double> hx(m);
  kernels::horner_many(h_coeffs.data(), h_coeffs.size(), grid.nodes.data(), hx.data(), m);
  cplx acc = 0.0;
  for (size_t i = 0; i < m; ++i) {
    const cplx v = f(grid.nodes[i]) * (hx[i] * grid.weights[i]);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw Error(ErrorCode::NonFiniteIntegrand, "integrate_mu_c: non-finite sample");
    }
    acc += v;
  }
  return acc;
}

std::vector<double> cheb_analyze(const std::function<double(double)>& f, int M) {
  if (M < 2) throw Error(ErrorCode::InvalidArgument, "cheb_analyze: requires M >= 2");
  std::vector<double> fx(M), th(M);
  for (int j = 0; j < M; ++j) {
    th[j] = kPi * (j + 0.5) / M;
    fx[j] = f(std::cos(th[j]));
    if (!std::isfinite(fx[j])) {
      throw Error(ErrorCode::NonFiniteIntegrand, "cheb_analyze: non-finite sample");
    }
  }
  std::vector<double> a(M, 0.0);
  for (int k = 0; k < M; ++k) {
    double s = 0.0;
    for (int j = 0; j < M; ++j) s += fx[j] * std::cos(k * th[j]);
    a[k] = 2.0 * s / M;
  }
  a[0] *= 0.5;
  return a;
}

double cheb_eval_T(const std::vector<double>& a, double x) {
  // Clenshaw recurrence.
  double b1 = 0.0, b2 = 0.0;
  for (size_t k = a.size(); k-- > 1;) {
    const double b0 = 2.0 * x * b1 - b2 + a[k];
    b2 = b1;
    b1 = b0;
  }
  return x * b1 - b2 + (a.empty() ? 0.0 : a[0]);
}

double pv_cauchy_series(const std::vector<double>& a, double x, PvWeight w) {
  if (!(std::fabs(x) < 1.0 - 1e-12)) {
    throw Error(ErrorCode::EvaluationPointOutsideOpenInterval,
                "pv_cauchy: evaluation point must lie inside (-1,1)");
  }
  const size_t M = a.size();
  if (w == PvWeight::InvSqrt) {
    // PV int T_k(s) / ((s-x) sqrt(1-s^2)) ds = pi U_{k-1}(x), k >= 1.
    double um2 = 0.0, um1 = 1.0;
    double acc = 0.0;
    for (size_t k = 1; k < M; ++k) {
      acc += a[k] * um1;
      const double u = 2.0 * x * um1 - um2;
      um2 = um1;
      um1 = u;
    }
    return kPi * acc;
  }
  // Convert the T expansion of f to the U basis, then apply
  // PV int U_j(s) sqrt(1-s^2) / (s-x) ds = -pi T_{j+1}(x).
  std::vector<double> b(M, 0.0);
  if (M > 0) b[0] = a[0] - (M > 2 ? 0.5 * a[2] : 0.0);
  for (size_t j = 1; j < M; ++j) {
    b[j] = 0.5 * (a[j] - (j + 2 < M ? a[j + 2] : 0.0));
  }
  double t_prev = 1.0, t_cur = x;
  double acc = 0.0;
  for (size_t j = 0; j < M; ++j) {
    // t_cur holds T_{j+1}(x).
    acc += b[j] * t_cur;
    const double t_next = 2.0 * x * t_cur - t_prev;
    t_prev = t_cur;
    t_cur = t_next;
  }
  return -kPi * acc;
}

double pv_cauchy(const std::function<double(double)>& f, double x, int modes, PvWeight w) {
  const std::vector<double> a = cheb_analyze(f, modes);
  // A non-decaying coefficient tail means f is not resolved at this mode
  // count, so the analytic identities would be applied to the wrong function.
  double amax = 0.0;
  for (double c : a) amax = std::max(amax, std::fabs(c));
  const size_t tail_start = a.size() - std::max<size_t>(2, a.size() / 10);
  double tmax = 0.0;
  for (size_t k = tail_start; k < a.size(); ++k) tmax = std::max(tmax, std::fabs(a[k]));
  if (amax > 0.0 && tmax > 1e-8 * amax) {
    throw Error(ErrorCode::NonSmoothInput,
                "pv_cauchy: Chebyshev tail is not decaying; increase modes or smooth f");
  }
  return pv_cauchy_series(a, x, w);
}

namespace {

struct PathAccum {
  const std::function<cplx(cplx)>* g = nullptr;
  double max_mag = 0.0;
  cplx total = 0.0;

  cplx eval(cplx w) {
    const cplx v = (*g)(w);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw Error(ErrorCode::NonFiniteIntegrand, "contour_integral: non-finite sample");
    }
    max_mag = std::max(max_mag, std::abs(v));
    return v;
  }

  // One Gauss panel over the straight segment [z0, z1].
  void line_panel(cplx z0, cplx z1) {
    const cplx mid = 0.5 * (z0 + z1);
    const cplx half = 0.5 * (z1 - z0);
    const auto& xs = gl32_nodes();
    const auto& ws = gl32_weights();
    cplx s = 0.0;
    for (int i = 0; i < 32; ++i) s += ws[i] * eval(mid + half * xs[i]);
    total += s * half;
  }

  void segment(cplx z0, cplx z1, int panels) {
    for (int p = 0; p < panels; ++p) {
      const double t0 = static_cast<double>(p) / panels;
      const double t1 = static_cast<double>(p + 1) / panels;
      line_panel(z0 + (z1 - z0) * t0, z0 + (z1 - z0) * t1);
    }
  }

  // Geometrically graded ray from z0 in direction dir (unit), total length L.
  // Panel sizes grow by 1.5x, so the cost in L is logarithmic.
  void ray(cplx z0, cplx dir, double L, int panels) {
    double pos = 0.0;
    double step = 1.0;
    while (pos < L) {
      const double next = std::min(L, pos + step);
      segment(z0 + dir * pos, z0 + dir * next, panels);
      pos = next;
      step *= 1.5;
    }
  }

  void arc(cplx center, double radius, double th0, double th1, int panels) {
    const auto& xs = gl32_nodes();
    const auto& ws = gl32_weights();
    for (int p = 0; p < panels; ++p) {
      const double a0 = th0 + (th1 - th0) * p / panels;
      const double a1 = th0 + (th1 - th0) * (p + 1) / panels;
      const double mid = 0.5 * (a0 + a1);
      const double half = 0.5 * (a1 - a0);
      cplx s = 0.0;
      for (int i = 0; i < 32; ++i) {
        const double th = mid + half * xs[i];
        const cplx w = center + radius * std::exp(cplx(0.0, th));
        s += ws[i] * eval(w) * cplx(0.0, 1.0) * radius * std::exp(cplx(0.0, th));
      }
      total += s * half;
    }
  }
};

} // namespace

cplx contour_integral(const std::function<cplx(cplx)>& g, const ContourSpec& spec, int panels) {
  if (panels < 1) throw Error(ErrorCode::InvalidArgument, "contour_integral: panels >= 1");
  if (!(spec.s1 > 0.0) && spec.kind != ContourKind::Gamma) {
    throw Error(ErrorCode::InvalidArgument, "contour_integral: s1 must be positive");
  }
  PathAccum acc;
  acc.g = &g;
  const cplx x(spec.anchor, 0.0);
  const cplx up135 = cplx(-1.0, 1.0) / std::sqrt(2.0);
  bool check_tail = false;
  cplx tail_point;
  switch (spec.kind) {
    case ContourKind::Sigma: {
      if (!(spec.s2 > spec.s1 / std::sqrt(2.0))) {
        throw Error(ErrorCode::InvalidArgument, "contour_integral: Sigma needs s2 > s1/sqrt(2)");
      }
      const cplx corner = x + spec.s1 * up135;
      const cplx top(spec.anchor - spec.s1 / std::sqrt(2.0), spec.s2);
      acc.segment(x, corner, panels);
      acc.segment(corner, top, panels);
      acc.ray(top, cplx(-1.0, 0.0), spec.truncation, std::min(panels, 4));
      check_tail = true;
      tail_point = top - cplx(spec.truncation, 0.0);
      break;
    }
    case ContourKind::Pi: {
      const cplx top(spec.anchor, spec.s1);
      acc.segment(x, top, panels);
      acc.ray(top, cplx(-1.0, 0.0), spec.truncation, std::min(panels, 4));
      check_tail = true;
      tail_point = top - cplx(spec.truncation, 0.0);
      break;
    }
    case ContourKind::Gamma: {
      if (std::isfinite(spec.s1)) {
        if (!(spec.s1 > 0.0)) {
          throw Error(ErrorCode::InvalidArgument, "contour_integral: s1 must be positive");
        }
        acc.segment(x, x + spec.s1 * up135, panels);
      } else {
        acc.ray(x, up135, spec.truncation, std::min(panels, 4));
        check_tail = true;
        tail_point = x + spec.truncation * up135;
      }
      break;
    }
    case ContourKind::I: {
      acc.segment(x, x + cplx(0.0, spec.s1), panels);
      break;
    }
    case ContourKind::Circle: {
      acc.arc(x, spec.s1, 0.0, kPi, std::max(panels, 8));
      break;
    }
  }
  if (check_tail && acc.max_mag > 0.0) {
    const cplx gv = g(tail_point);
    if (!(std::abs(gv) <= 1e-12 * acc.max_mag)) {
      throw Error(ErrorCode::TailNotDecaying,
                  "contour_integral: integrand has not decayed at the ray cutoff");
    }
  }
  // The lower half path is the image of the upper half under conjugation and
  // reversal, so its contribution is minus the conjugate of the upper piece.
  // (I_plus + I_minus) / (2 pi i) = Im(I_plus) / pi, exactly real.
  return cplx(acc.total.imag() / kPi, 0.0);
}

} // namespace spiked
