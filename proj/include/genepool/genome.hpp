#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "genepool/alphabet.hpp"
#include "genepool/rng.hpp"

namespace genepool {

// Parameters of genome construction and reproduction. Two parents contribute
// an element with probability p_inherit each; otherwise (p_mutate) the child
// gets a fresh uniform draw over the alphabet. The three probabilities must
// partition unity.
struct GenomeParams {
  std::uint32_t length = 1000;
  Alphabet alphabet{26};
  double p_inherit = 0.48;
  double p_mutate = 0.04;

  // Throws std::invalid_argument on violation.
  void validate() const;
};

// A node's gene string, stored as alphabet indices.
struct GeneSequence {
  std::vector<std::uint16_t> elements;

  std::size_t size() const { return elements.size(); }
  bool operator==(const GeneSequence&) const = default;
};

// Which branch produced a child element. A mutation draw may coincide with a
// parent value; the origin records the branch taken, not the value.
enum class GeneOrigin : std::uint8_t { FromA, FromB, Mutation };

struct ReproduceTrace {
  GeneSequence child;
  std::vector<GeneOrigin> origins;
};

// Independent uniform draw per position.
GeneSequence random_genome(const GenomeParams& params, Rng& rng);

// Per-position mixture of the two parents plus uniform mutation.
// Throws std::invalid_argument if either parent length differs from params.
GeneSequence reproduce(const GeneSequence& a, const GeneSequence& b,
                       const GenomeParams& params, Rng& rng);

// Same draw sequence as reproduce(), additionally reporting per-position
// origins. reproduce(a,b,p,rng) and reproduce_traced(a,b,p,rng) consume the
// rng identically and build identical children.
ReproduceTrace reproduce_traced(const GeneSequence& a, const GeneSequence& b,
                                const GenomeParams& params, Rng& rng);

// Number of positions where a and b agree. Throws on length mismatch.
std::uint32_t match_count(const GeneSequence& a, const GeneSequence& b);

// C(n,k) p^k (1-p)^(n-k), in log space for n > 30. Throws if k > n or p
// outside [0,1].
double binomial_pmf(std::uint32_t k, std::uint32_t n, double p);

// (1 - p_mutate)^t: probability that a gene element survives t birth-time
// units without mutating. Throws for t < 0 or p_mutate outside [0,1].
double memory_factor(double t, double p_mutate);

// Uppercase rendering; only valid for lettered alphabets.
std::string to_letters(const GeneSequence& g, const Alphabet& alphabet);
GeneSequence from_letters(std::string_view text, const Alphabet& alphabet);

}  // namespace genepool
