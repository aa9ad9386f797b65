#include "spiked/limit_laws.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "spiked/errors.hpp"
#include "spiked/io.hpp"
#include "spiked/special.hpp"

namespace spiked {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Same gate as pv_cauchy: a stagnant Chebyshev tail means the expansion has
// not resolved the function and the transform identities would act on noise.
void require_decay(const std::vector<double>& a, const char* who) {
  double amax = 0.0;
  for (double c : a) amax = std::max(amax, std::fabs(c));
  const size_t tail_start = a.size() - std::max<size_t>(2, a.size() / 10);
  double tmax = 0.0;
  for (size_t k = tail_start; k < a.size(); ++k) tmax = std::max(tmax, std::fabs(a[k]));
  if (amax > 0.0 && tmax > 1e-8 * amax) {
    throw Error(ErrorCode::NonSmoothInput,
                std::string(who) + ": Chebyshev tail is not decaying; increase modes");
  }
}

// d/dt of a T-series; input full convention (a[0] constant), output likewise.
std::vector<double> cheb_derivative(const std::vector<double>& a) {
  const int M = static_cast<int>(a.size());
  if (M <= 1) return {0.0};
  std::vector<double> c(M + 1, 0.0);
  for (int k = M - 1; k >= 1; --k) c[k - 1] = c[k + 1] + 2.0 * k * a[k];
  c[0] *= 0.5;
  c.resize(M - 1);
  return c;
}

} // namespace

double quadratic_A(const EquilibriumMeasure& eqm,
                   const std::function<double(double)>& f,
                   std::function<double(double)> fprime, int modes) {
  if (modes < 8) {
    throw Error(ErrorCode::InvalidArgument, "quadratic_A: modes must be at least 8");
  }
  const double mid = eqm.mid();
  const double rad = eqm.rad();

  std::vector<double> dcoef;
  if (fprime) {
    dcoef = cheb_analyze([&](double t) { return fprime(mid + rad * t); }, modes);
    require_decay(dcoef, "quadratic_A");
  } else {
    std::vector<double> fc =
        cheb_analyze([&](double t) { return f(mid + rad * t); }, modes);
    require_decay(fc, "quadratic_A");
    dcoef = cheb_derivative(fc);
    for (double& c : dcoef) c /= rad;
  }

  // In the variable t on [-1,1], x = mid + rad t, the weighted Hilbert
  // transform of f' picks up one factor rad and the outer 1/sqrt cancels the
  // other, leaving
  //   A = -(rad / 4 pi^2) int f(x(t)) PV(t) / sqrt(1-t^2) dt,
  //   PV(t) = PV int f'(x(s)) sqrt(1-s^2) / (s-t) ds,
  // and the outer integral is Gauss-Chebyshev.
  double sum = 0.0;
  for (int j = 0; j < modes; ++j) {
    const double t = std::cos(kPi * (j + 0.5) / modes);
    sum += f(mid + rad * t) * pv_cauchy_series(dcoef, t, PvWeight::Sqrt);
  }
  return -(rad / (4.0 * kPi * modes)) * sum;
}

double inner_A(const EquilibriumMeasure& eqm,
               const std::function<double(double)>& f,
               const std::function<double(double)>& g, int modes) {
  const double afg =
      quadratic_A(eqm, [&](double x) { return f(x) + g(x); }, {}, modes);
  const double af = quadratic_A(eqm, f, {}, modes);
  const double ag = quadratic_A(eqm, g, {}, modes);
  return 0.5 * (afg - af - ag);
}

double component_scale(const LawComponent& comp, int n) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "component_scale: n >= 1");
  return comp.scale_rule * std::pow(static_cast<double>(n), -1.0 / (2.0 * comp.k));
}

double M_beta_prefactor(const EquilibriumMeasure& eqm, double a, double u,
                        double beta, const NuMeasure* nu) {
  if (!(beta > 0.0)) {
    throw Error(ErrorCode::UnsupportedBeta, "M_beta_prefactor: beta must be positive");
  }
  if (beta != 2.0 && (nu == nullptr || !nu->integrate)) {
    throw Error(ErrorCode::NuRequired,
                "M_beta_prefactor: beta != 2 needs a nu plug-in (a zero measure is accepted)");
  }
  const double c = c_of_a(eqm, a);
  if (!(u > c)) {
    throw Error(ErrorCode::OutsideDomain, "M_beta_prefactor: requires u > c(a)");
  }

  auto p = [&](double x) { return -eval(eqm.V, x) + std::log(u - x); };
  auto pprime = [&](double x) { return -eval(eqm.V, x, 1) - 1.0 / (u - x); };

  const double p_mu = integrate_mu(eqm.grid, p, eqm.h_coeffs);
  const double a_p = quadratic_A(eqm, p, pprime, 512);
  double expo = -p_mu + a_p;
  if (beta != 2.0) expo += (2.0 / beta - 1.0) * nu->integrate(p);
  const double r_beta = std::exp(0.5 * beta * expo);

  const double bracket = 0.5 * beta * (a - g_deriv(eqm, u, 1));
  return r_beta * std::pow(bracket, 0.5 * beta - 1.0) * std::tgamma(0.5 * beta);
}

double flat2k_normalizer(int k) {
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "flat2k_normalizer: k >= 1");
  return std::tgamma(1.0 / (2.0 * k)) / k;
}

double q_beta(double beta, int k, double x1, double x2) {
  if (!(beta > 0.0)) throw Error(ErrorCode::UnsupportedBeta, "q_beta: beta must be positive");
  if (k < 2) throw Error(ErrorCode::InvalidArgument, "q_beta: requires k >= 2");
  if (!(x2 > x1)) throw Error(ErrorCode::DegenerateGap, "q_beta: requires x2 > x1");
  return (2.0 / beta) * (0.5 - 1.0 / (2.0 * k)) / (x2 - x1);
}

namespace {

LawComponent make_component(double beta, const CriticalPoint& cp, double weight) {
  LawComponent comp;
  comp.location = cp.x;
  comp.k = cp.order / 2;
  comp.kind = comp.k == 1 ? LawKind::Gaussian : LawKind::Flat2k;
  const double mag = 0.5 * beta * std::fabs(cp.deriv);
  comp.scale_rule =
      comp.k == 1 ? 1.0 / std::sqrt(mag)
                  : std::pow(mag / std::tgamma(2.0 * comp.k + 1.0),
                             -1.0 / (2.0 * comp.k));
  comp.weight = weight;
  return comp;
}

// log weights -> weights, normalized so the sum is exactly 1.
std::vector<double> softmax(const std::vector<double>& logw) {
  const double mx = *std::max_element(logw.begin(), logw.end());
  std::vector<double> w(logw.size());
  double s = 0.0;
  for (size_t i = 0; i < logw.size(); ++i) {
    w[i] = std::exp(logw[i] - mx);
    s += w[i];
  }
  double partial = 0.0;
  for (size_t i = 0; i + 1 < w.size(); ++i) {
    w[i] /= s;
    partial += w[i];
  }
  w.back() = 1.0 - partial;
  return w;
}

} // namespace

LimitLaw predict_limit(const EquilibriumMeasure& eqm, double a, double beta,
                       std::optional<double> alpha, const NuMeasure* nu) {
  if (!(beta > 0.0)) {
    throw Error(ErrorCode::UnsupportedBeta, "predict_limit: beta must be positive");
  }
  const PhaseReport rep = classify(eqm, a);
  if (rep.regime == Regime::Subcritical || rep.regime == Regime::AtCritical ||
      !rep.resolved) {
    throw Error(ErrorCode::SubcriticalUnsupported,
                "predict_limit: no limit law at or below the critical spike value");
  }

  LimitLaw law;
  law.beta = beta;
  const double al = alpha.value_or(0.0);

  if (rep.regime == Regime::SupercriticalUnique) {
    law.components.push_back(make_component(beta, rep.maximizers.front(), 1.0));
    return law;
  }

  // Secondary critical: mixture over the tied maximizers.  Without a nu
  // plug-in at beta != 2 the weights drop the exp((2/beta-1) int p dnu)
  // factor; that degraded mode is flagged, never silent.
  NuMeasure zero;
  const NuMeasure* use_nu = nu;
  if (beta != 2.0 && (nu == nullptr || !nu->integrate)) {
    zero.integrate = [](const std::function<double(double)>&) { return 0.0; };
    use_nu = &zero;
    law.partial = true;
  }

  const std::vector<CriticalPoint>& mx = rep.maximizers;
  const bool all_gaussian =
      std::all_of(mx.begin(), mx.end(),
                  [](const CriticalPoint& cp) { return cp.order == 2; });

  if (all_gaussian) {
    std::vector<double> logw(mx.size());
    for (size_t i = 0; i < mx.size(); ++i) {
      const double mag = 0.5 * beta * std::fabs(mx[i].deriv);
      logw[i] = 0.5 * beta * al * mx[i].x + 0.5 * std::log(2.0 * kPi / mag) +
                std::log(M_beta_prefactor(eqm, a, mx[i].x, beta, use_nu));
    }
    const std::vector<double> w = softmax(logw);
    for (size_t i = 0; i < mx.size(); ++i) {
      law.components.push_back(make_component(beta, mx[i], w[i]));
    }
    return law;
  }

  if (mx.size() == 2 && mx[0].order == 2 && mx[1].order > 2) {
    const int k = mx[1].order / 2;
    law.n_shift = NShift{q_beta(beta, k, mx[0].x, mx[1].x), al};
    const double mag1 = 0.5 * beta * std::fabs(mx[0].deriv);
    const double mag2 = 0.5 * beta * std::fabs(mx[1].deriv);
    std::vector<double> logd(2);
    logd[0] = 0.5 * beta * al * mx[0].x + 0.5 * std::log(2.0 * kPi / mag1) +
              std::log(M_beta_prefactor(eqm, a, mx[0].x, beta, use_nu));
    logd[1] = 0.5 * beta * al * mx[1].x +
              std::log(std::tgamma(2.0 * k + 1.0) / mag2) / (2.0 * k) +
              std::log(M_beta_prefactor(eqm, a, mx[1].x, beta, use_nu)) +
              std::log(flat2k_normalizer(k));
    const std::vector<double> w = softmax(logd);
    law.components.push_back(make_component(beta, mx[0], w[0]));
    law.components.push_back(make_component(beta, mx[1], w[1]));
    return law;
  }

  throw Error(ErrorCode::InvalidArgument,
              "predict_limit: unsupported degeneracy pattern among tied maximizers");
}

double law_cdf(const LimitLaw& law, int i, double T) {
  if (i < 0 || i >= static_cast<int>(law.components.size())) {
    throw Error(ErrorCode::IndexOutOfRange, "law_cdf: component index out of range");
  }
  double acc = 0.0;
  for (int j = 0; j < i; ++j) acc += law.components[j].weight;
  const LawComponent& comp = law.components[i];
  double F;
  if (comp.kind == LawKind::Gaussian) {
    F = norm_cdf(T);
  } else {
    const double s = 1.0 / (2.0 * comp.k);
    const double z = std::pow(std::fabs(T), 2.0 * comp.k);
    F = T >= 0.0 ? 0.5 + 0.5 * gamma_p(s, z) : 0.5 * gamma_q(s, z);
  }
  return acc + comp.weight * F;
}

std::string law_to_json(const LimitLaw& law) {
  std::ostringstream os;
  os << "{\"beta\":" << io::g17(law.beta);
  os << ",\"partial\":" << (law.partial ? "true" : "false");
  if (law.n_shift) {
    os << ",\"n_shift\":{\"q\":" << io::g17(law.n_shift->q)
       << ",\"alpha\":" << io::g17(law.n_shift->alpha) << "}";
  } else {
    os << ",\"n_shift\":null";
  }
  os << ",\"components\":[";
  for (size_t i = 0; i < law.components.size(); ++i) {
    const LawComponent& c = law.components[i];
    if (i) os << ",";
    os << "{\"location\":" << io::g17(c.location)
       << ",\"scale_rule\":" << io::g17(c.scale_rule) << ",\"k\":" << c.k
       << ",\"kind\":\"" << (c.kind == LawKind::Gaussian ? "gaussian" : "flat2k")
       << "\",\"weight\":" << io::g17(c.weight) << "}";
  }
  os << "]}";
  return os.str();
}

} // namespace spiked
