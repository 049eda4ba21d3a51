#include "genepool/hashing.hpp"

#include <openssl/evp.h>

#include <memory>
#include <stdexcept>

namespace genepool {

namespace {

// Reusing one context per thread keeps per-digest overhead low; responders
// hash hundreds of thousands of small candidate tuples in a tight loop.
Digest sha256_digest(std::span<const std::uint8_t> data) {
  struct CtxDeleter {
    void operator()(EVP_MD_CTX* ctx) const { EVP_MD_CTX_free(ctx); }
  };
  thread_local std::unique_ptr<EVP_MD_CTX, CtxDeleter> ctx{EVP_MD_CTX_new()};
  if (!ctx) throw std::runtime_error("sha256: EVP_MD_CTX_new failed");

  Digest out(32);
  unsigned int out_len = 0;
  if (EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), out.data(), &out_len) != 1 || out_len != 32)
    throw std::runtime_error("sha256: digest computation failed");
  return out;
}

}  // namespace

const HashFunction& HashFunction::sha256() {
  static const HashFunction h("sha256", 32, &sha256_digest);
  return h;
}

const HashFunction& HashFunction::by_name(std::string_view name) {
  if (name == "sha256") return sha256();
  throw std::invalid_argument("HashFunction: unknown hash '" + std::string(name) + "'");
}

Digest HashFunction::digest(std::string_view data) const {
  return fn_({reinterpret_cast<const std::uint8_t*>(data.data()), data.size()});
}

std::string hex_encode(std::span<const std::uint8_t> bytes) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xf]);
  }
  return out;
}

std::vector<std::uint8_t> hex_decode(std::string_view hex) {
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  if (hex.size() % 2 != 0) throw std::invalid_argument("hex_decode: odd length");
  std::vector<std::uint8_t> out(hex.size() / 2);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const int hi = nibble(hex[2 * i]);
    const int lo = nibble(hex[2 * i + 1]);
    if (hi < 0 || lo < 0) throw std::invalid_argument("hex_decode: invalid character");
    out[i] = static_cast<std::uint8_t>((hi << 4) | lo);
  }
  return out;
}

}  // namespace genepool
