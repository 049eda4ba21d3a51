#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace genepool {

// Provenance header embedded in every emitted artifact: the seed, the full
// generating configuration, and the library version. With an identical Meta
// a rerun reproduces the artifact byte for byte.
struct Meta {
  std::uint64_t seed = 0;
  nlohmann::ordered_json config;  // null when there is nothing to echo
  std::string version;            // defaults to the library version

  Meta();
  Meta(std::uint64_t seed, nlohmann::ordered_json config);
};

nlohmann::ordered_json meta_to_json(const Meta& m);
Meta meta_from_json(const nlohmann::json& j);

// Comment block rendering of Meta for CSV files ('# key: value' lines).
std::string meta_to_comments(const Meta& m);

// Shortest decimal rendering that round-trips, '.' separator.
std::string format_double(double v);
double parse_double(std::string_view s);  // throws std::invalid_argument on junk
std::uint64_t parse_u64(std::string_view s);

std::vector<std::string_view> split(std::string_view text, char sep);

std::string read_file(const std::filesystem::path& path);

// Writes via a sibling temp file and rename, so failures leave no partial
// output behind.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace genepool
