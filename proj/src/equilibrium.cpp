#include "spiked/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <nlohmann/json.hpp>

#include "spiked/io.hpp"

namespace spiked {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Midpoint rule in theta, exact for trigonometric polynomials of degree
// < 2N; every integrand here has degree <= deg V, so N = deg+1 suffices.
struct ThetaRule {
  std::vector<double> cos_th;
  double weight;
  explicit ThetaRule(int N) : cos_th(N), weight(kPi / N) {
    for (int j = 0; j < N; ++j) cos_th[j] = std::cos(kPi * (j + 0.5) / N);
  }
};

int theta_nodes_for(const Potential& V) { return std::max(32, V.degree() + 2); }

struct EndpointSystem {
  double S0, S1, J00, J01, J10, J11;
};

EndpointSystem endpoint_system(const Potential& V, double b1, double b2, const ThetaRule& rule) {
  const double mid = 0.5 * (b1 + b2);
  const double rad = 0.5 * (b2 - b1);
  EndpointSystem out{0, 0, 0, 0, 0, 0};
  for (double c : rule.cos_th) {
    const double x = mid + rad * c;
    const double v1 = eval(V, x, 1);
    const double v2 = eval(V, x, 2);
    const double d1 = 0.5 * (1.0 - c);  // dx/db1
    const double d2 = 0.5 * (1.0 + c);  // dx/db2
    out.S0 += v1;
    out.S1 += x * v1;
    out.J00 += v2 * d1;
    out.J01 += v2 * d2;
    out.J10 += (v1 + x * v2) * d1;
    out.J11 += (v1 + x * v2) * d2;
  }
  out.S0 *= rule.weight;
  out.S1 *= rule.weight;
  out.J00 *= rule.weight;
  out.J01 *= rule.weight;
  out.J10 *= rule.weight;
  out.J11 *= rule.weight;
  return out;
}

double residual_norm(const EndpointSystem& s) {
  return std::max(std::fabs(s.S0), std::fabs(s.S1 - 2.0 * kPi));
}

// Radius that solves S1 = 2 pi exactly for the pure monomial leading term,
// centered at the coarse-grid minimizer of V.
std::pair<double, double> default_init(const Potential& V) {
  double xmin = 0.0, vmin = eval(V, 0.0, 0);
  for (int i = 0; i <= 2000; ++i) {
    const double x = -10.0 + 20.0 * i / 2000.0;
    const double v = eval(V, x, 0);
    if (v < vmin) {
      vmin = v;
      xmin = x;
    }
  }
  const int l = V.degree() / 2;
  const double lead = V.coeffs.back();
  double binom = 1.0;  // C(2l, l)
  for (int j = 1; j <= l; ++j) binom *= static_cast<double>(l + j) / j;
  const double rad = std::pow(std::pow(4.0, l) / (l * binom * lead), 1.0 / (2 * l));
  return {xmin - rad, xmin + rad};
}

bool newton_solve(const Potential& V, const ThetaRule& rule, double& b1, double& b2,
                  double* final_res) {
  EndpointSystem s = endpoint_system(V, b1, b2, rule);
  double res = residual_norm(s);
  for (int it = 0; it < 200; ++it) {
    if (res < 1e-12) {
      *final_res = res;
      return true;
    }
    const double det = s.J00 * s.J11 - s.J01 * s.J10;
    if (!std::isfinite(det) || std::fabs(det) < 1e-300) break;
    const double r0 = s.S0;
    const double r1 = s.S1 - 2.0 * kPi;
    double d1 = -(s.J11 * r0 - s.J01 * r1) / det;
    double d2 = -(-s.J10 * r0 + s.J00 * r1) / det;
    double lam = 1.0;
    bool moved = false;
    for (int half = 0; half < 40; ++half) {
      const double n1 = b1 + lam * d1;
      const double n2 = b2 + lam * d2;
      if (n2 - n1 > 1e-10 && std::isfinite(n1) && std::isfinite(n2)) {
        const EndpointSystem cand = endpoint_system(V, n1, n2, rule);
        const double cres = residual_norm(cand);
        if (cres < res || (half > 20 && std::isfinite(cres))) {
          b1 = n1;
          b2 = n2;
          s = cand;
          res = cres;
          moved = true;
          break;
        }
      }
      lam *= 0.5;
    }
    if (!moved) break;
  }
  *final_res = res;
  return res < 1e-12;
}

} // namespace

std::pair<double, double> endpoint_residuals(const Potential& V, double b1, double b2) {
  const ThetaRule rule(theta_nodes_for(V));
  const EndpointSystem s = endpoint_system(V, b1, b2, rule);
  return {s.S0, s.S1 - 2.0 * kPi};
}

std::pair<double, double> solve_support(const Potential& V,
                                        std::optional<std::pair<double, double>> init) {
  const ThetaRule rule(theta_nodes_for(V));
  std::vector<std::pair<double, double>> starts;
  if (init) starts.push_back(*init);
  starts.push_back(default_init(V));
  // Coarse 2-D fallback around the heuristic in case Newton stalls.
  {
    const auto [c1, c2] = default_init(V);
    const double mid = 0.5 * (c1 + c2);
    const double rad = 0.5 * (c2 - c1);
    double best1 = c1, best2 = c2, best = 1e300;
    for (int i = -8; i <= 8; ++i) {
      for (int j = -8; j <= 8; ++j) {
        const double m = mid + 0.25 * rad * i;
        const double r = rad * std::pow(2.0, j / 4.0);
        const EndpointSystem s = endpoint_system(V, m - r, m + r, rule);
        const double rn = residual_norm(s);
        if (rn < best) {
          best = rn;
          best1 = m - r;
          best2 = m + r;
        }
      }
    }
    starts.emplace_back(best1, best2);
  }
  double last_b1 = 0.0, last_b2 = 0.0, last_res = 1e300;
  for (const auto& s0 : starts) {
    double b1 = s0.first, b2 = s0.second, res = 1e300;
    if (!(b2 > b1)) continue;
    if (newton_solve(V, rule, b1, b2, &res)) {
      const std::vector<double> h = compute_h(V, b1, b2);
      double hmin = 1e300;
      for (int i = 0; i <= 512; ++i) {
        const double t = std::cos(kPi * i / 512.0);
        const double x = 0.5 * (b1 + b2) + 0.5 * (b2 - b1) * t;
        double hx = 0.0;
        for (size_t k = h.size(); k-- > 0;) hx = hx * x + h[k];
        hmin = std::min(hmin, hx);
      }
      if (hmin < -1e-10) {
        throw Error(ErrorCode::MultiBandSuspected,
                    "density factor h dips to " + io::g17(hmin) + " on the support");
      }
      return {b1, b2};
    }
    if (res < last_res) {
      last_res = res;
      last_b1 = b1;
      last_b2 = b2;
    }
  }
  throw Error(ErrorCode::NewtonDiverged,
              "endpoint iteration stalled at b1=" + io::g17(last_b1) + " b2=" + io::g17(last_b2) +
                  " residual=" + io::g17(last_res));
}

std::vector<double> compute_h(const Potential& V, double b1, double b2) {
  if (!(b2 > b1)) throw Error(ErrorCode::InvalidArgument, "compute_h: requires b2 > b1");
  const double mid = 0.5 * (b1 + b2);
  const double rad = 0.5 * (b2 - b1);
  const int d = V.degree();
  const std::vector<double> vp = derivative_coeffs(V, 1);  // V', degree d-1
  // Monomial moments M_q = (1/pi) int_0^pi (mid + rad cos th)^q dth; odd cosine
  // powers vanish and even ones have the closed central-binomial value.
  std::vector<double> M(d, 0.0);
  for (int q = 0; q < d; ++q) {
    double acc = 0.0;
    double choose = 1.0;  // C(q, j)
    for (int j = 0; j <= q; ++j) {
      if (j % 2 == 0) {
        double central = 1.0;  // C(j, j/2) / 2^j
        for (int i = 1; i <= j / 2; ++i) central *= static_cast<double>(j / 2 + i) / (4.0 * i);
        acc += choose * std::pow(mid, q - j) * std::pow(rad, j) * central;
      }
      choose *= static_cast<double>(q - j) / (j + 1);
    }
    M[q] = acc;
  }
  // h(x) = (1/pi) int [V'(x) - V'(s)] / [(x - s) sqrt((s-b1)(b2-s))] ds expands
  // monomial by monomial into sum_i x^i sum_{r>i} vp_r M_{r-1-i}.
  std::vector<double> h(std::max(1, d - 1), 0.0);
  for (int i = 0; i <= d - 2; ++i) {
    double acc = 0.0;
    for (int r = i + 1; r <= d - 1; ++r) acc += vp[r] * M[r - 1 - i];
    h[i] = acc;
  }
  if (h.empty() || std::fabs(h.back()) < 1e-14 * std::fabs(V.coeffs.back())) {
    throw Error(ErrorCode::DegreeMismatch, "h does not have the expected degree");
  }
  return h;
}

namespace {

// Chebyshev moments J_k = int T_k(t) q(t) sqrt(1-t^2) dt with
// q(t) = (rad^2 / 2pi) h(x(t)); zero for k > deg h + 2, so the log-kernel
// expansions below are finite sums.
std::vector<double> log_moments(const EquilibriumMeasure& eqm) {
  const int dh = static_cast<int>(eqm.h_coeffs.size()) - 1;
  const int K = dh + 2;
  const int m = dh + K / 2 + 4;  // exact: rule integrates degree <= 2m-1
  const double mid = eqm.mid();
  const double rad = eqm.rad();
  std::vector<double> J(K + 1, 0.0);
  for (int i = 1; i <= m; ++i) {
    const double th = kPi * i / (m + 1);
    const double t = std::cos(th);
    const double s2 = std::sin(th) * std::sin(th);
    const double x = mid + rad * t;
    double hx = 0.0;
    for (size_t k = eqm.h_coeffs.size(); k-- > 0;) hx = hx * x + eqm.h_coeffs[k];
    const double w = (rad * rad / (2.0 * kPi)) * (kPi / (m + 1)) * s2 * hx;
    double tk_prev = 1.0, tk = t;
    J[0] += w;
    for (int k = 1; k <= K; ++k) {
      J[k] += w * tk;
      const double nxt = 2.0 * t * tk - tk_prev;
      tk_prev = tk;
      tk = nxt;
    }
  }
  return J;
}

} // namespace

double lagrange_constant(const Potential& V, double b1, double b2,
                         const std::vector<double>& h_coeffs) {
  EquilibriumMeasure tmp;
  tmp.V = V;
  tmp.b1 = b1;
  tmp.b2 = b2;
  tmp.h_coeffs = h_coeffs;
  const double x0 = 0.5 * (b1 + b2);
  return 2.0 * log_integral_interior(tmp, x0) - eval(V, x0, 0);
}

EquilibriumMeasure solve_equilibrium(const Potential& V, int grid_m,
                                     std::optional<std::pair<double, double>> init) {
  EquilibriumMeasure eqm;
  eqm.V = V;
  std::tie(eqm.b1, eqm.b2) = solve_support(V, init);
  eqm.h_coeffs = compute_h(V, eqm.b1, eqm.b2);
  eqm.ell = lagrange_constant(V, eqm.b1, eqm.b2, eqm.h_coeffs);
  eqm.grid = make_cheb_grid(eqm.b1, eqm.b2, grid_m);
  return eqm;
}

double density(const EquilibriumMeasure& eqm, double x) {
  if (x < eqm.b1 || x > eqm.b2) return 0.0;
  double hx = 0.0;
  for (size_t k = eqm.h_coeffs.size(); k-- > 0;) hx = hx * x + eqm.h_coeffs[k];
  return std::sqrt((eqm.b2 - x) * (x - eqm.b1)) * hx / (2.0 * kPi);
}

double log_integral_interior(const EquilibriumMeasure& eqm, double x) {
  double t0 = (x - eqm.mid()) / eqm.rad();
  if (!(std::fabs(t0) <= 1.0 + 1e-12)) {
    throw Error(ErrorCode::EvaluationPointOutsideOpenInterval,
                "log_integral_interior: x must lie in the closed support");
  }
  t0 = std::clamp(t0, -1.0, 1.0);
  const std::vector<double> J = log_moments(eqm);
  double acc = std::log(0.5 * eqm.rad()) * J[0];
  double tk_prev = 1.0, tk = t0;
  for (size_t k = 1; k < J.size(); ++k) {
    acc -= (2.0 / k) * tk * J[k];
    const double nxt = 2.0 * t0 * tk - tk_prev;
    tk_prev = tk;
    tk = nxt;
  }
  return acc;
}

cplx log_integral(const EquilibriumMeasure& eqm, cplx z) {
  if (z.imag() == 0.0 && z.real() <= eqm.b2) {
    throw Error(ErrorCode::BranchCut, "log_integral: z lies on the branch cut");
  }
  const cplx t0 = (z - eqm.mid()) / eqm.rad();
  // Joukowski preimage with |z0| > 1; sqrt(t0-1)*sqrt(t0+1) puts the cut
  // exactly on [-1,1].
  const cplx w = std::sqrt(t0 - 1.0) * std::sqrt(t0 + 1.0);
  cplx z0 = t0 + w;
  if (std::abs(z0) < 1.0) z0 = t0 - w;
  const std::vector<double> J = log_moments(eqm);
  cplx acc = std::log(0.5 * eqm.rad() * z0) * J[0];
  const cplx zinv = 1.0 / z0;
  cplx zk = zinv;
  for (size_t k = 1; k < J.size(); ++k) {
    acc -= (2.0 / k) * zk * J[k];
    zk *= zinv;
  }
  return acc;
}

double log_integral_exterior(const EquilibriumMeasure& eqm, double x) {
  if (x > eqm.b2) return log_integral(eqm, cplx(x, 0.0)).real();
  if (x < eqm.b1) return log_integral(eqm, cplx(x, 1e-300)).real();
  throw Error(ErrorCode::InvalidArgument, "log_integral_exterior: x inside the support");
}

VariationalReport verify_variational(const EquilibriumMeasure& eqm, int n_interior,
                                     int n_exterior) {
  VariationalReport rep;
  const double mid = eqm.mid();
  const double rad = eqm.rad();
  for (int i = 0; i < n_interior; ++i) {
    const double t = std::cos(kPi * (i + 0.5) / n_interior);
    const double x = mid + rad * t;
    const double lhs = 2.0 * log_integral_interior(eqm, x) - eval(eqm.V, x, 0);
    rep.max_interior_residual = std::max(rep.max_interior_residual, std::fabs(lhs - eqm.ell));
  }
  rep.min_exterior_margin = 1e300;
  const double width = eqm.b2 - eqm.b1;
  const int per_side = std::max(1, n_exterior / 2);
  for (int side = 0; side < 2; ++side) {
    for (int i = 0; i < per_side; ++i) {
      // Log-spaced offsets from the edge out to ten support widths.
      const double frac = static_cast<double>(i) / per_side;
      const double off = width * (1e-4 * std::pow(1e5, frac));
      const double x = side == 0 ? eqm.b2 + off : eqm.b1 - off;
      const double lhs = 2.0 * log_integral_exterior(eqm, x) - eval(eqm.V, x, 0);
      rep.min_exterior_margin = std::min(rep.min_exterior_margin, eqm.ell - lhs);
    }
  }
  rep.equality_ok = rep.max_interior_residual <= 1e-8;
  rep.inequality_ok = rep.min_exterior_margin > 0.0;
  return rep;
}

ConditionReport check_conditions(const EquilibriumMeasure& eqm) {
  ConditionReport rep;
  const Potential& V = eqm.V;
  rep.cond1 = V.degree() >= 2 && V.degree() % 2 == 0 && V.coeffs.back() > 0.0;

  rep.min_h_on_support = 1e300;
  for (int i = 0; i <= 1024; ++i) {
    const double x = eqm.b1 + (eqm.b2 - eqm.b1) * i / 1024.0;
    double hx = 0.0;
    for (size_t k = eqm.h_coeffs.size(); k-- > 0;) hx = hx * x + eqm.h_coeffs[k];
    rep.min_h_on_support = std::min(rep.min_h_on_support, hx);
  }
  rep.normalization = integrate_mu(
      eqm.grid, [](double) { return 1.0; }, eqm.h_coeffs);
  const auto [r0, r1] = endpoint_residuals(V, eqm.b1, eqm.b2);
  rep.cond2 = rep.min_h_on_support >= -1e-10 && std::fabs(rep.normalization - 1.0) <= 1e-10 &&
              std::fabs(r0) <= 1e-10 && std::fabs(r1) <= 1e-10;

  // No real zeros of h: companion-matrix roots must all have nonzero
  // imaginary part (constant h passes vacuously).
  rep.cond3 = true;
  const int dh = static_cast<int>(eqm.h_coeffs.size()) - 1;
  if (dh >= 1) {
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(dh, dh);
    for (int i = 0; i < dh; ++i) comp(i, dh - 1) = -eqm.h_coeffs[i] / eqm.h_coeffs[dh];
    for (int i = 1; i < dh; ++i) comp(i, i - 1) = 1.0;
    const Eigen::VectorXcd roots = comp.eigenvalues();
    const double scale = std::max(1.0, eqm.b2 - eqm.b1);
    for (int i = 0; i < roots.size(); ++i) {
      if (std::fabs(roots(i).imag()) <= 1e-8 * scale) rep.cond3 = false;
    }
  } else {
    rep.cond3 = eqm.h_coeffs.at(0) > 0.0;
  }

  const VariationalReport var = verify_variational(eqm, 200, 200);
  rep.min_exterior_margin = var.min_exterior_margin;
  rep.cond4 = var.inequality_ok;
  return rep;
}

std::string eqm_to_json(const EquilibriumMeasure& eqm) {
  std::ostringstream os;
  os << "{\"b1\":" << io::g17(eqm.b1) << ",\"b2\":" << io::g17(eqm.b2)
     << ",\"h\":" << io::g17_array(eqm.h_coeffs) << ",\"ell\":" << io::g17(eqm.ell)
     << ",\"potential\":" << potential_to_json(eqm.V) << "}";
  return os.str();
}

EquilibriumMeasure eqm_from_json(const std::string& text, int grid_m) {
  nlohmann::json j = nlohmann::json::parse(text);
  EquilibriumMeasure eqm;
  eqm.V = potential_from_json(j.at("potential").dump());
  eqm.b1 = j.at("b1").get<double>();
  eqm.b2 = j.at("b2").get<double>();
  eqm.h_coeffs = j.at("h").get<std::vector<double>>();
  eqm.ell = j.at("ell").get<double>();
  eqm.grid = make_cheb_grid(eqm.b1, eqm.b2, grid_m);
  return eqm;
}

} // namespace spiked
