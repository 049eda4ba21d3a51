#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace genepool {

// Symbol set for gene elements. Elements are handled as indices 0..size-1
// everywhere; the letter rendering (A..Z) exists only at I/O boundaries and
// only for alphabets of at most 26 symbols. Larger alphabets (e.g. 1024)
// render as integer arrays.
class Alphabet {
 public:
  explicit Alphabet(std::uint32_t size = 26) : size_(size) {
    if (size_ < 2) throw std::invalid_argument("Alphabet: size must be >= 2");
  }

  std::uint32_t size() const { return size_; }

  bool lettered() const { return size_ <= 26; }

  char letter(std::uint32_t index) const {
    if (!lettered()) throw std::invalid_argument("Alphabet: no letter rendering for size > 26");
    if (index >= size_) throw std::invalid_argument("Alphabet: index out of range");
    return static_cast<char>('A' + index);
  }

  std::uint32_t index_of(char letter) const {
    if (!lettered()) throw std::invalid_argument("Alphabet: no letter rendering for size > 26");
    const int idx = letter - 'A';
    if (idx < 0 || static_cast<std::uint32_t>(idx) >= size_)
      throw std::invalid_argument("Alphabet: letter out of range");
    return static_cast<std::uint32_t>(idx);
  }

  // Ordered symbol list; letters when available, decimal strings otherwise.
  std::vector<std::string> symbols() const {
    std::vector<std::string> out;
    out.reserve(size_);
    for (std::uint32_t i = 0; i < size_; ++i) {
      if (lettered())
        out.emplace_back(1, static_cast<char>('A' + i));
      else
        out.push_back(std::to_string(i));
    }
    return out;
  }

  bool operator==(const Alphabet&) const = default;

 private:
  std::uint32_t size_;
};

}  // namespace genepool
