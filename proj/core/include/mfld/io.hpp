#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace mfld {

// Shortest decimal form that round-trips the exact double.
std::string format_double(double x);

// One CSV file: header row + pre-formatted cells, '\n' line ends, no padding.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

std::uint64_t fnv1a64(const std::string& bytes);
std::string read_file(const std::string& path);
std::string file_hash_hex(const std::string& path);

}  // namespace mfld
