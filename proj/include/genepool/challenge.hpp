#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>
#include <nlohmann/json.hpp>

#include "genepool/alphabet.hpp"
#include "genepool/genome.hpp"
#include "genepool/hashing.hpp"
#include "genepool/rng.hpp"

namespace genepool {

using BigInt = boost::multiprecision::cpp_int;
using BigRational = boost::multiprecision::cpp_rational;

// Per-position symbol model a prover holds about a challenger's genome: the
// corresponding element matches the prover's own with probability p_rel, and
// takes each other value with probability q = (1-p_rel)/(I-1).
struct PosteriorModel {
  double p_rel = 1.0 / 3.0;
  std::uint32_t alphabet_size = 26;

  double q() const { return (1.0 - p_rel) / (alphabet_size - 1); }

  // Requires 1/I <= p_rel <= 1: candidates farther from the prover's own
  // tuple must never be more likely than closer ones.
  void validate() const;
};

// Hashed gene-element puzzle. true_digest_index is verifier-side bookkeeping;
// wire serialization omits it.
struct Challenge {
  std::vector<std::uint32_t> indices;
  std::vector<Digest> digests;  // one true digest among decoys, shuffled
  std::vector<std::uint8_t> salt;
  std::string hash_name;
  std::optional<std::size_t> true_digest_index;
};

struct ChallengeResponse {
  std::optional<std::size_t> chosen_digest_index;
  std::uint64_t candidates_tested = 0;
  double elapsed_ms = 0.0;  // informational; verdicts use candidates_tested
};

enum class Verdict { Relative, Alien, Inconclusive };

std::string_view to_string(Verdict v);
Verdict verdict_from_string(std::string_view s);

// hash(salt || tuple elements as little-endian u16).
Digest tuple_digest(const std::vector<std::uint8_t>& salt,
                    const std::vector<std::uint16_t>& tuple, const HashFunction& hash);

// Builds a challenge over the given distinct positions: one digest of the
// verifier's elements there, n_decoys digests of distinct random non-true
// tuples, shuffled, all salted. Throws on duplicate or out-of-range indices.
Challenge issue_challenge(const GeneSequence& verifier_genome,
                          const std::vector<std::uint32_t>& index_set,
                          std::uint32_t n_decoys, const Alphabet& alphabet,
                          const HashFunction& hash, Rng& rng);

// Yields every tuple in alphabet^m exactly once, in non-increasing posterior
// probability: by ascending number of positions differing from the prover's
// own elements, lexicographically within each such tier. Lazy; O(m) state.
class PosteriorEnumerator {
 public:
  PosteriorEnumerator(std::vector<std::uint16_t> own_elements, const PosteriorModel& model);

  // Next tuple, or nullptr once all I^m tuples have been emitted. The
  // pointee is reused between calls.
  const std::vector<std::uint16_t>* next();

  std::uint64_t emitted() const { return emitted_; }
  std::uint32_t mismatch_tier() const { return tier_; }

  // p_rel^(m-k) * q^k: posterior of any tuple differing in k positions.
  double tier_probability(std::uint32_t k) const;

 private:
  bool seed_tier();
  bool advance();
  void fill_suffix(std::uint32_t from, std::uint32_t need);

  std::vector<std::uint16_t> own_;
  std::uint32_t I_;
  std::uint32_t m_;
  double p_, q_;
  std::uint32_t tier_ = 0;
  bool started_ = false;
  bool done_ = false;
  std::vector<std::uint16_t> tuple_;
  std::vector<std::uint32_t> mismatch_prefix_;  // [i] = mismatches before position i
  std::uint64_t emitted_ = 0;
};

// Walks candidates in posterior order from the prover's own elements at the
// challenge positions, hashing each against every challenge digest; stops at
// the first hit or after budget candidates. Budget exhaustion leaves
// chosen_digest_index empty.
ChallengeResponse respond(const GeneSequence& prover_genome, const Challenge& challenge,
                          const PosteriorModel& model, std::uint64_t budget);

// Number of length-n tuples agreeing with a reference in exactly k positions:
// C(n,k) * (I-1)^(n-k), exact. Throws for k > n or I < 2.
BigInt search_space_size(std::uint32_t n, std::uint32_t k, std::uint32_t I);

// Exact posterior of one tuple mismatching a reference in k of m positions,
// with q = (1-p_rel)/(I-1) in exact rational arithmetic.
BigRational tier_tuple_probability(std::uint32_t m, std::uint32_t k, std::uint32_t I,
                                   const BigRational& p_rel);

struct WorkRatioReport {
  BigInt uniform_prefix;  // smallest candidate count reaching target under a flat posterior
  BigInt ordered_prefix;  // smallest posterior-ordered prefix reaching target
  BigRational ratio;      // uniform_prefix / ordered_prefix
  double ratio_as_double = 0.0;
};

// How many times fewer candidates a relative needs to cover target_mass of
// the posterior than a searcher with no genome information. Exact tier
// arithmetic throughout. Throws unless 0 < target < 1 and 1/I <= p_rel <= 1.
WorkRatioReport work_ratio(std::uint32_t n, std::uint32_t I, const BigRational& p_rel,
                           const BigRational& target_mass);
// Same, converting the double-valued model exactly to rationals.
WorkRatioReport work_ratio(std::uint32_t n, const PosteriorModel& model, double target_mass);

// Relative: true digest within work_threshold candidates. Alien: decoy chosen
// or budget exhausted. Inconclusive: true digest but over threshold. Requires
// the verifier-side challenge (with true_digest_index).
Verdict verdict(const ChallengeResponse& response, const Challenge& challenge,
                std::uint64_t work_threshold);

// Wire forms: {indices, digests, salt, hash_name} / {digest_index,
// candidates_tested, elapsed_ms}. Gene elements never appear.
nlohmann::ordered_json challenge_to_json(const Challenge& c);
Challenge challenge_from_json(const nlohmann::json& j);
nlohmann::ordered_json response_to_json(const ChallengeResponse& r);
ChallengeResponse response_from_json(const nlohmann::json& j);

}  // namespace genepool
