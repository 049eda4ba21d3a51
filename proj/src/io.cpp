#include "genepool/io.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>
#include <system_error>

#include "genepool/version.hpp"

namespace genepool {

Meta::Meta() : config(nullptr), version(kVersion) {}

Meta::Meta(std::uint64_t seed_, nlohmann::ordered_json config_)
    : seed(seed_), config(std::move(config_)), version(kVersion) {}

nlohmann::ordered_json meta_to_json(const Meta& m) {
  nlohmann::ordered_json j;
  j["seed"] = m.seed;
  j["config"] = m.config;
  j["version"] = m.version;
  return j;
}

Meta meta_from_json(const nlohmann::json& j) {
  Meta m;
  m.seed = j.at("seed").get<std::uint64_t>();
  m.config = j.at("config");
  m.version = j.at("version").get<std::string>();
  return m;
}

std::string meta_to_comments(const Meta& m) {
  std::string out;
  out += "# seed: " + std::to_string(m.seed) + "\n";
  out += "# version: " + m.version + "\n";
  if (!m.config.is_null()) out += "# config: " + m.config.dump() + "\n";
  return out;
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw std::invalid_argument("parse_double: bad number '" + std::string(s) + "'");
  return v;
}

std::uint64_t parse_u64(std::string_view s) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw std::invalid_argument("parse_u64: bad number '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = text.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(text.substr(start));
      return out;
    }
    out.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return content;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view content) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace genepool
