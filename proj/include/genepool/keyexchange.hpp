#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "genepool/alphabet.hpp"
#include "genepool/genome.hpp"
#include "genepool/hashing.hpp"
#include "genepool/rng.hpp"

#include <nlohmann/json.hpp>

namespace genepool {

// Secret bijection on alphabet indices applied to gene elements before
// transmission (mapping[x] is the transmitted code for element x).
struct CodeTable {
  std::vector<std::uint16_t> mapping;

  static CodeTable identity(std::uint32_t size);
  static CodeTable random(std::uint32_t size, Rng& rng);

  std::uint32_t size() const { return static_cast<std::uint32_t>(mapping.size()); }
  std::uint16_t operator()(std::uint16_t x) const { return mapping[x]; }
  CodeTable inverted() const;

  // Throws std::invalid_argument unless mapping is a permutation of 0..size-1.
  void validate() const;

  bool operator==(const CodeTable&) const = default;
};

// Secret reordering of genome positions (mapping[i] is the source position
// transmitted in slot i).
struct IndexPermutation {
  std::vector<std::uint32_t> mapping;

  static IndexPermutation identity(std::uint32_t n);
  static IndexPermutation random(std::uint32_t n, Rng& rng);
  // Shuffles positions only within contiguous windows of the given width; the
  // last window may be shorter. Window width 1 gives the identity.
  static IndexPermutation block_local(std::uint32_t n, std::uint32_t window, Rng& rng);

  std::uint32_t size() const { return static_cast<std::uint32_t>(mapping.size()); }
  std::uint32_t operator()(std::uint32_t i) const { return mapping[i]; }
  IndexPermutation inverted() const;

  void validate() const;

  bool operator==(const IndexPermutation&) const = default;
};

// Empirical I x I contingency table between the receiver's own gene elements
// (rows) and the received code symbols (columns).
struct ConditionalTable {
  std::uint32_t alphabet_size = 0;
  std::vector<std::vector<std::uint32_t>> counts;  // counts[x][y]
  std::vector<std::uint32_t> row_totals;

  std::uint64_t total() const;
  bool row_empty(std::uint32_t x) const { return row_totals[x] == 0; }
  // p(y|x); throws std::invalid_argument on an empty row.
  double conditional(std::uint32_t x, std::uint32_t y) const;
};

// What the sender puts on the wire: coded, reordered gene elements plus a
// digest that lets the receiver confirm a recovered (code table, permutation)
// pair without ever seeing either in the clear.
struct TransferBundle {
  std::vector<std::uint16_t> payload;
  Digest verification_digest;
};

// payload[i] = g(genome_x[phi(i)]); digest binds (g, phi).
// Throws std::invalid_argument on size mismatches.
TransferBundle encode(const GeneSequence& genome_x, const CodeTable& g,
                      const IndexPermutation& phi, const HashFunction& hash);

// Inverse of encode given the true (g, phi): returns the sender's genome.
GeneSequence decode(const std::vector<std::uint16_t>& payload, const CodeTable& g,
                    const IndexPermutation& phi);

// counts[x][y] = |{i : genome_y[phi_candidate(i)] = x and payload[i] = y}|.
ConditionalTable conditional_table(const std::vector<std::uint16_t>& payload,
                                   const GeneSequence& genome_y,
                                   const IndexPermutation& phi_candidate,
                                   const Alphabet& alphabet);

// Sum over positions of -log2 p(payload[i] | own element at phi(i)), with
// plug-in probabilities from the empirical table. 0 iff every occupied row is
// concentrated in a single column; n*log2(I) for uniform rows. Throws on an
// empty table.
double conditional_entropy(const ConditionalTable& table);
double conditional_entropy(const std::vector<std::uint16_t>& payload,
                           const GeneSequence& genome_y,
                           const IndexPermutation& phi_candidate,
                           const Alphabet& alphabet);

// Plug-in mutual information (bits per symbol) of the empirical joint; 0 for
// independent pairs up to estimation noise, log2(I) for a deterministic
// bijection. Throws on an empty table.
double mutual_information(const ConditionalTable& table);
double mutual_information(const std::vector<std::uint16_t>& payload,
                          const GeneSequence& genome_y,
                          const IndexPermutation& phi_candidate,
                          const Alphabet& alphabet);

struct CodeTableRecovery {
  CodeTable table;
  std::vector<double> row_confidence;  // row max / row total, 0 for empty rows
};

// Bijection maximizing the total count mass; among equal-weight optima the
// lexicographically smallest mapping. Throws if every row is empty.
CodeTableRecovery recover_code_table(const ConditionalTable& table);

struct RankedCandidate {
  std::size_t candidate_index;  // position in the supplied candidate list
  double mutual_information;
};

struct PermutationRecovery {
  std::vector<RankedCandidate> ranking;  // descending MI, ties by candidate index
  bool verified = false;
  std::size_t winner_index = 0;  // into the candidate list; meaningful iff verified
  CodeTable recovered_table;     // meaningful iff verified
};

// Ranks candidate permutations by mutual information, then walks the ranking
// recovering a code table for each and checking (table, candidate) against
// the sender's verification digest. Stops at the first verified pair.
PermutationRecovery recover_permutation(const std::vector<std::uint16_t>& payload,
                                        const GeneSequence& genome_y,
                                        const std::vector<IndexPermutation>& candidates,
                                        const Digest& verification_digest,
                                        const HashFunction& hash,
                                        const Alphabet& alphabet);

// Canonical byte encoding of (g, phi) used for both the verification digest
// and key derivation: sizes then mapping values, little-endian.
std::vector<std::uint8_t> canonical_encoding(const CodeTable& g, const IndexPermutation& phi);

// Digest sent with a transfer. Domain-separated from derive_shared_key so the
// wire never carries the key itself.
Digest transfer_digest(const CodeTable& g, const IndexPermutation& phi,
                       const HashFunction& hash);

// Deterministic key material from a verified (g, phi); length equals the
// hash's digest length.
Digest derive_shared_key(const CodeTable& g, const IndexPermutation& phi,
                         const HashFunction& hash);

// Percent rendering of the table, one row per local symbol: header
// `local,<sym>,...`, entries rounded to whole percents, empty rows all zero.
std::string table_to_percent_csv(const ConditionalTable& table, const Alphabet& alphabet);

// Raw-count JSON form and its inverse.
nlohmann::ordered_json table_to_json(const ConditionalTable& table);
ConditionalTable table_from_json(const nlohmann::json& j);

nlohmann::ordered_json bundle_to_json(const TransferBundle& bundle, const Alphabet& alphabet);
TransferBundle bundle_from_json(const nlohmann::json& j, const Alphabet& alphabet);

}  // namespace genepool
