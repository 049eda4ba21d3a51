#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace genepool {

using Digest = std::vector<std::uint8_t>;

// Pluggable digest used for transfer verification, challenge puzzles and key
// derivation. Instances are looked up by name so serialized artifacts can
// name the function they were built with.
class HashFunction {
 public:
  static const HashFunction& sha256();
  static const HashFunction& by_name(std::string_view name);  // throws if unknown

  const std::string& name() const { return name_; }
  std::size_t digest_length() const { return digest_length_; }

  Digest digest(std::span<const std::uint8_t> data) const { return fn_(data); }
  Digest digest(std::string_view data) const;

 private:
  using Fn = Digest (*)(std::span<const std::uint8_t>);
  HashFunction(std::string name, std::size_t length, Fn fn)
      : name_(std::move(name)), digest_length_(length), fn_(fn) {}

  std::string name_;
  std::size_t digest_length_;
  Fn fn_;
};

std::string hex_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> hex_decode(std::string_view hex);  // throws on bad input

}  // namespace genepool
