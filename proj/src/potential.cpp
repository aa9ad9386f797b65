#include "spiked/potential.hpp"

#include <cmath>
#include <cstring>

#include <nlohmann/json.hpp>

#include "spiked/io.hpp"

namespace spiked {

Potential make_potential(const std::vector<double>& coeffs) {
  if (coeffs.empty()) throw Error(ErrorCode::EmptyCoefficients, "potential needs coefficients");
  std::vector<double> c = coeffs;
  while (c.size() > 1 && c.back() == 0.0) c.pop_back();
  const int deg = static_cast<int>(c.size()) - 1;
  for (double v : c)
    if (!std::isfinite(v)) throw Error(ErrorCode::InvalidArgument, "non-finite coefficient");
  if (deg < 2 || deg % 2 != 0)
    throw Error(ErrorCode::OddDegree,
                "potential degree must be an even integer >= 2, got " + std::to_string(deg));
  if (c.back() <= 0.0)
    throw Error(ErrorCode::NonpositiveLeading,
                "leading coefficient must be positive, got " + std::to_string(c.back()));
  return Potential{std::move(c)};
}

std::vector<double> derivative_coeffs(const Potential& V, int order) {
  std::vector<double> c = V.coeffs;
  for (int d = 0; d < order; ++d) {
    if (c.size() <= 1) return {0.0};
    std::vector<double> nc(c.size() - 1);
    for (std::size_t k = 1; k < c.size(); ++k) nc[k - 1] = c[k] * static_cast<double>(k);
    c = std::move(nc);
  }
  return c;
}

double eval(const Potential& V, double x, int order) {
  if (order < 0) throw Error(ErrorCode::InvalidArgument, "negative derivative order");
  if (order > V.degree()) return 0.0;
  std::vector<double> c = derivative_coeffs(V, order);
  double v = c.back();
  for (std::size_t k = c.size() - 1; k > 0; --k) v = v * x + c[k - 1];
  return v;
}

std::uint64_t potential_hash(const Potential& V) {
  std::uint64_t h = 14695981039346656037ull;
  for (double v : V.coeffs) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    for (int b = 0; b < 8; ++b) {
      h ^= (bits >> (8 * b)) & 0xffu;
      h *= 1099511628211ull;
    }
  }
  return h;
}

std::string potential_to_json(const Potential& V) {
  return "{\"coeffs\":" + io::g17_array(V.coeffs) + "}";
}

Potential potential_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  if (!j.contains("coeffs") || !j["coeffs"].is_array())
    throw Error(ErrorCode::InvalidArgument, "potential JSON needs a \"coeffs\" array");
  return make_potential(j["coeffs"].get<std::vector<double>>());
}

} // namespace spiked
