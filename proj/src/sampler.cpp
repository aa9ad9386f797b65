#include "spiked/sampler.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <nlohmann/json.hpp>
#include <sstream>

#include "spiked/errors.hpp"
#include "spiked/io.hpp"
#include "spiked/rng.hpp"
#include "spiked/special.hpp"

namespace spiked {

namespace {

// Entry variances from matching e^{-n Tr(V_beta(M) - A_beta M)} with
// V(x) = x^2: the diagonal and off-diagonal Gaussians below reproduce the
// quadratic form (beta/2) n sum lambda_j^2 on eigenvalues, and completing
// the square moves the spike into a mean shift a/2 of the corner entry.
double max_eig_beta1(int n, double a, Rng& rng) {
  Eigen::MatrixXd m(n, n);
  const double sd = 1.0 / std::sqrt(static_cast<double>(n));
  const double so = 1.0 / std::sqrt(2.0 * n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = sd * rng.normal();
    for (int j = i + 1; j < n; ++j) {
      const double w = so * rng.normal();
      m(i, j) = w;
      m(j, i) = w;
    }
  }
  m(0, 0) += 0.5 * a;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

double max_eig_beta2(int n, double a, Rng& rng) {
  Eigen::MatrixXcd m(n, n);
  const double sd = 1.0 / std::sqrt(2.0 * n);
  const double so = 1.0 / std::sqrt(4.0 * n);
  for (int i = 0; i < n; ++i) {
    m(i, i) = sd * rng.normal();
    for (int j = i + 1; j < n; ++j) {
      const std::complex<double> w(so * rng.normal(), so * rng.normal());
      m(i, j) = w;
      m(j, i) = std::conj(w);
    }
  }
  m(0, 0) += 0.5 * a;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

double max_eig_beta4(int n, double a, Rng& rng) {
  // Quaternion entries q = w + x i + y j + z k as 2x2 complex blocks
  // [[w+xi, y+zi], [-y+zi, w-xi]]; eigenvalues of the 2n x 2n self-dual
  // matrix come in Kramers pairs.
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  const double sd = 1.0 / std::sqrt(4.0 * n);
  const double so = 1.0 / std::sqrt(8.0 * n);
  for (int s = 0; s < n; ++s) {
    const double w = sd * rng.normal();
    m(2 * s, 2 * s) = w;
    m(2 * s + 1, 2 * s + 1) = w;
    for (int t = s + 1; t < n; ++t) {
      const double qw = so * rng.normal();
      const double qx = so * rng.normal();
      const double qy = so * rng.normal();
      const double qz = so * rng.normal();
      const std::complex<double> tl(qw, qx), tr(qy, qz);
      m(2 * s, 2 * t) = tl;
      m(2 * s, 2 * t + 1) = tr;
      m(2 * s + 1, 2 * t) = -std::conj(tr);
      m(2 * s + 1, 2 * t + 1) = std::conj(tl);
      m(2 * t, 2 * s) = std::conj(tl);
      m(2 * t + 1, 2 * s) = std::conj(tr);
      m(2 * t, 2 * s + 1) = -tr;
      m(2 * t + 1, 2 * s + 1) = tl;
    }
  }
  m(0, 0) += 0.5 * a;
  m(1, 1) += 0.5 * a;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

} // namespace

EmpiricalSample sample_gaussian_spiked(int n, double beta, double a, int trials,
                                       std::uint64_t seed) {
  if (n < 1 || trials < 1) {
    throw Error(ErrorCode::InvalidArgument, "sample_gaussian_spiked: n and trials >= 1");
  }
  if (beta != 1.0 && beta != 2.0 && beta != 4.0) {
    throw Error(ErrorCode::UnsupportedBeta,
                "sample_gaussian_spiked: direct sampling needs beta in {1,2,4}");
  }
  EmpiricalSample out;
  out.n = n;
  out.beta = beta;
  out.a = a;
  out.potential_hash = potential_hash(make_potential({0.0, 0.0, 1.0}));
  out.seed = seed;
  out.method = SampleMethod::DirectGaussian;
  out.values.reserve(trials);
  for (int t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
    double v;
    if (beta == 1.0) v = max_eig_beta1(n, a, rng);
    else if (beta == 2.0) v = max_eig_beta2(n, a, rng);
    else v = max_eig_beta4(n, a, rng);
    out.values.push_back(v);
  }
  std::sort(out.values.begin(), out.values.end());
  return out;
}

KsResult ks_compare(const EmpiricalSample& sample, const LimitLaw& law, int n) {
  if (sample.values.empty()) {
    throw Error(ErrorCode::EmptySample, "ks_compare: sample has no draws");
  }
  const size_t m = sample.values.size();
  auto mixture = [&](double T) {
    double F = 0.0;
    double prefix = 0.0;
    for (size_t i = 0; i < law.components.size(); ++i) {
      const LawComponent& c = law.components[i];
      const double t = (T - c.location) / component_scale(c, n);
      F += law_cdf(law, static_cast<int>(i), t) - prefix;
      prefix += c.weight;
    }
    return F;
  };
  KsResult res;
  for (size_t k = 0; k < m; ++k) {
    const double F = mixture(sample.values[k]);
    const double lo = std::fabs(F - static_cast<double>(k) / m);
    const double hi = std::fabs(F - static_cast<double>(k + 1) / m);
    if (lo > res.D) { res.D = lo; res.at = sample.values[k]; }
    if (hi > res.D) { res.D = hi; res.at = sample.values[k]; }
  }
  std::ostringstream os;
  os << "m=" << m << " D=" << io::g17(res.D) << " at=" << io::g17(res.at);
  res.summary = os.str();
  return res;
}

double ks_two_sample(const EmpiricalSample& x, const EmpiricalSample& y) {
  if (x.values.empty() || y.values.empty()) {
    throw Error(ErrorCode::EmptySample, "ks_two_sample: empty sample");
  }
  const auto& a = x.values;
  const auto& b = y.values;
  size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    if (a[i] <= b[j]) ++i;
    else ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / a.size() -
                              static_cast<double>(j) / b.size()));
  }
  return d;
}

std::string sample_meta_json(const EmpiricalSample& s) {
  std::ostringstream os;
  os << "{\"n\":" << s.n << ",\"beta\":" << io::g17(s.beta)
     << ",\"a\":" << io::g17(s.a) << ",\"potential_hash\":\""
     << io::hex64(s.potential_hash) << "\",\"seed\":" << s.seed
     << ",\"method\":\""
     << (s.method == SampleMethod::DirectGaussian ? "direct" : "mcmc") << "\""
     << ",\"trials\":" << s.values.size()
     << ",\"acceptance_rate\":" << io::g17(s.diagnostics.acceptance_rate)
     << ",\"iact\":" << io::g17(s.diagnostics.iact)
     << ",\"final_step\":" << io::g17(s.diagnostics.final_step)
     << ",\"adapted\":" << (s.diagnostics.adapted ? "true" : "false") << "}";
  return os.str();
}

std::string sample_to_csv(const EmpiricalSample& s) {
  std::ostringstream os;
  os << "# meta: " << sample_meta_json(s) << "\n";
  os << "xi_max\n";
  for (double v : s.values) os << io::g17(v) << "\n";
  return os.str();
}

EmpiricalSample sample_from_csv(const std::string& text) {
  EmpiricalSample s;
  std::istringstream is(text);
  std::string line;
  bool have_meta = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string tag = "# meta: ";
      if (line.rfind(tag, 0) == 0) {
        nlohmann::json j = nlohmann::json::parse(line.substr(tag.size()));
        s.n = j.at("n").get<int>();
        s.beta = j.at("beta").get<double>();
        s.a = j.at("a").get<double>();
        s.seed = j.at("seed").get<std::uint64_t>();
        s.method = j.at("method").get<std::string>() == "direct"
                       ? SampleMethod::DirectGaussian
                       : SampleMethod::MCMC;
        s.potential_hash =
            std::stoull(j.at("potential_hash").get<std::string>(), nullptr, 16);
        s.diagnostics.acceptance_rate = j.at("acceptance_rate").get<double>();
        s.diagnostics.iact = j.at("iact").get<double>();
        s.diagnostics.final_step = j.at("final_step").get<double>();
        s.diagnostics.adapted = j.at("adapted").get<bool>();
        have_meta = true;
      }
      continue;
    }
    if (line == "xi_max") continue;
    s.values.push_back(std::stod(line));
  }
  if (!have_meta || s.values.empty()) {
    throw Error(ErrorCode::EmptySample, "sample_from_csv: missing meta line or draws");
  }
  std::sort(s.values.begin(), s.values.end());
  return s;
}

} // namespace spiked
