#ifndef SPIKED_IO_HPP
#define SPIKED_IO_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace spiked::io {

// All numeric output goes through %.17g so files round-trip exactly and
// reruns are byte-identical.
std::string g17(double v);
std::string g17_array(const std::vector<double>& v);

std::uint64_t fnv1a(const std::string& s);
std::string hex64(std::uint64_t v);

extern const char* const version;

// Comment-style provenance header shared by CSV outputs.
std::string provenance_header(const std::string& command, const std::string& config_canonical);

void write_file(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

} // namespace spiked::io

#endif
