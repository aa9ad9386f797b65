#include "spiked/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "spiked/errors.hpp"

namespace spiked {

const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::OddDegree: return "OddDegree";
    case ErrorCode::NonpositiveLeading: return "NonpositiveLeading";
    case ErrorCode::EmptyCoefficients: return "EmptyCoefficients";
    case ErrorCode::InconsistentInputs: return "InconsistentInputs";
    case ErrorCode::NonFiniteIntegrand: return "NonFiniteIntegrand";
    case ErrorCode::EvaluationPointOutsideOpenInterval: return "EvaluationPointOutsideOpenInterval";
    case ErrorCode::TailNotDecaying: return "TailNotDecaying";
    case ErrorCode::NewtonDiverged: return "NewtonDiverged";
    case ErrorCode::MultiBandSuspected: return "MultiBandSuspected";
    case ErrorCode::DegreeMismatch: return "DegreeMismatch";
    case ErrorCode::BranchCut: return "BranchCut";
    case ErrorCode::NonpositiveSpike: return "NonpositiveSpike";
    case ErrorCode::SearchHorizonExceeded: return "SearchHorizonExceeded";
    case ErrorCode::NoInteriorMaximum: return "NoInteriorMaximum";
    case ErrorCode::AtEdge: return "AtEdge";
    case ErrorCode::NonSmoothInput: return "NonSmoothInput";
    case ErrorCode::NuRequired: return "NuRequired";
    case ErrorCode::OutsideDomain: return "OutsideDomain";
    case ErrorCode::SubcriticalUnsupported: return "SubcriticalUnsupported";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::DegenerateGap: return "DegenerateGap";
    case ErrorCode::UnsupportedBeta: return "UnsupportedBeta";
    case ErrorCode::SeriesTruncationInsufficient: return "SeriesTruncationInsufficient";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::ContourDisagreement: return "ContourDisagreement";
    case ErrorCode::DomainViolation: return "DomainViolation";
    case ErrorCode::SupportNotNormalized: return "SupportNotNormalized";
    case ErrorCode::IndicatorStarvation: return "IndicatorStarvation";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "UnknownError";
}

} // namespace spiked

namespace spiked::io {

const char* const version = "0.1.0";

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string g17_array(const std::vector<double>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ",";
    out += g17(v[i]);
  }
  out += "]";
  return out;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string provenance_header(const std::string& command, const std::string& config_canonical) {
  std::string h;
  h += "# generator: spiked " + std::string(version) + "\n";
  h += "# command: " + command + "\n";
  h += "# config-hash: " + hex64(fnv1a(config_canonical)) + "\n";
  return h;
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::InvalidArgument, "cannot open for writing: " + path);
  f << contents;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorCode::InvalidArgument, "cannot open: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

} // namespace spiked::io
