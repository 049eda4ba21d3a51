#include "genepool/challenge.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstring>
#include <numeric>
#include <set>
#include <stdexcept>

namespace genepool {

namespace {

void write_tuple(std::vector<std::uint8_t>& buf, std::size_t offset,
                 const std::vector<std::uint16_t>& tuple) {
  for (std::size_t i = 0; i < tuple.size(); ++i) {
    buf[offset + 2 * i] = static_cast<std::uint8_t>(tuple[i] & 0xff);
    buf[offset + 2 * i + 1] = static_cast<std::uint8_t>(tuple[i] >> 8);
  }
}

std::uint64_t digest_prefix(const Digest& d) {
  std::uint64_t p = 0;
  std::memcpy(&p, d.data(), std::min<std::size_t>(8, d.size()));
  return p;
}

BigInt binomial_coefficient(std::uint32_t n, std::uint32_t k) {
  if (k > n - k) k = n - k;
  BigInt c = 1;
  for (std::uint32_t i = 1; i <= k; ++i) {
    c *= n - k + i;
    c /= i;
  }
  return c;
}

BigInt ceil_div(const BigInt& num, const BigInt& den) { return (num + den - 1) / den; }

BigRational rational_pow(const BigRational& base, std::uint32_t exp) {
  BigRational r = 1;
  for (std::uint32_t i = 0; i < exp; ++i) r *= base;
  return r;
}

}  // namespace

void PosteriorModel::validate() const {
  if (alphabet_size < 2) throw std::invalid_argument("PosteriorModel: alphabet too small");
  if (!(p_rel <= 1.0) || !(p_rel >= 1.0 / alphabet_size))
    throw std::invalid_argument("PosteriorModel: p_rel must lie in [1/I, 1]");
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Relative: return "relative";
    case Verdict::Alien: return "alien";
    case Verdict::Inconclusive: return "inconclusive";
  }
  throw std::logic_error("to_string: bad verdict");
}

Verdict verdict_from_string(std::string_view s) {
  if (s == "relative") return Verdict::Relative;
  if (s == "alien") return Verdict::Alien;
  if (s == "inconclusive") return Verdict::Inconclusive;
  throw std::invalid_argument("verdict_from_string: unknown verdict");
}

Digest tuple_digest(const std::vector<std::uint8_t>& salt,
                    const std::vector<std::uint16_t>& tuple, const HashFunction& hash) {
  std::vector<std::uint8_t> buf(salt.size() + 2 * tuple.size());
  std::copy(salt.begin(), salt.end(), buf.begin());
  write_tuple(buf, salt.size(), tuple);
  return hash.digest(buf);
}

Challenge issue_challenge(const GeneSequence& verifier_genome,
                          const std::vector<std::uint32_t>& index_set,
                          std::uint32_t n_decoys, const Alphabet& alphabet,
                          const HashFunction& hash, Rng& rng) {
  if (index_set.empty()) throw std::invalid_argument("issue_challenge: empty index set");
  std::set<std::uint32_t> distinct(index_set.begin(), index_set.end());
  if (distinct.size() != index_set.size())
    throw std::invalid_argument("issue_challenge: duplicate indices");
  for (auto i : index_set)
    if (i >= verifier_genome.size())
      throw std::invalid_argument("issue_challenge: index out of range");

  Challenge c;
  c.indices = index_set;
  c.hash_name = hash.name();
  c.salt.resize(16);
  for (int half = 0; half < 2; ++half) {
    std::uint64_t r = rng.next_u64();
    for (int b = 0; b < 8; ++b) c.salt[8 * half + b] = static_cast<std::uint8_t>(r >> (8 * b));
  }

  std::vector<std::uint16_t> true_tuple;
  true_tuple.reserve(index_set.size());
  for (auto i : index_set) true_tuple.push_back(verifier_genome.elements[i]);

  std::vector<std::vector<std::uint16_t>> tuples{true_tuple};
  while (tuples.size() < 1u + n_decoys) {
    std::vector<std::uint16_t> decoy(index_set.size());
    for (auto& e : decoy) e = static_cast<std::uint16_t>(rng.index(alphabet.size()));
    if (std::find(tuples.begin(), tuples.end(), decoy) == tuples.end())
      tuples.push_back(std::move(decoy));
  }

  std::vector<std::size_t> order(tuples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  rng.shuffle(order);

  c.digests.resize(tuples.size());
  for (std::size_t slot = 0; slot < order.size(); ++slot) {
    c.digests[slot] = tuple_digest(c.salt, tuples[order[slot]], hash);
    if (order[slot] == 0) c.true_digest_index = slot;
  }
  return c;
}

PosteriorEnumerator::PosteriorEnumerator(std::vector<std::uint16_t> own_elements,
                                         const PosteriorModel& model)
    : own_(std::move(own_elements)),
      I_(model.alphabet_size),
      m_(static_cast<std::uint32_t>(own_.size())),
      p_(model.p_rel),
      q_(model.q()) {
  model.validate();
  if (m_ == 0) throw std::invalid_argument("PosteriorEnumerator: empty tuple");
  for (auto e : own_)
    if (e >= I_) throw std::invalid_argument("PosteriorEnumerator: element outside alphabet");
  tuple_.resize(m_);
  mismatch_prefix_.resize(m_ + 1, 0);
}

double PosteriorEnumerator::tier_probability(std::uint32_t k) const {
  if (k > m_) throw std::invalid_argument("tier_probability: tier out of range");
  return std::pow(p_, static_cast<double>(m_ - k)) * std::pow(q_, static_cast<double>(k));
}

// Lexicographically smallest completion of positions [from, m) holding
// exactly `need` mismatches against own_. Requires 0 <= need <= m - from.
void PosteriorEnumerator::fill_suffix(std::uint32_t from, std::uint32_t need) {
  for (std::uint32_t j = from; j < m_; ++j) {
    const std::uint32_t remaining_after = m_ - 1 - j;
    // Smallest viable symbols: the cheapest substitution and own_[j] itself.
    // All other substitutions share the first one's cost and are larger.
    std::uint16_t chosen = own_[j];
    std::uint32_t cost = 0;
    const std::uint16_t smallest_sub = (own_[j] == 0) ? 1 : 0;
    const bool sub_first = smallest_sub < own_[j];
    const bool sub_ok = need >= 1 && need - 1 <= remaining_after;
    const bool keep_ok = need <= remaining_after;
    if (sub_first ? sub_ok : (!keep_ok && sub_ok)) {
      chosen = smallest_sub;
      cost = 1;
    }
    tuple_[j] = chosen;
    need -= cost;
    mismatch_prefix_[j + 1] = mismatch_prefix_[j] + cost;
  }
}

bool PosteriorEnumerator::seed_tier() {
  if (tier_ > m_) return false;
  mismatch_prefix_[0] = 0;
  fill_suffix(0, tier_);
  return true;
}

// Next tuple of the current tier in lexicographic order: find the rightmost
// position that can move to a larger symbol while the suffix can still make
// up the tier's mismatch count, then minimize the suffix.
bool PosteriorEnumerator::advance() {
  for (std::uint32_t ii = m_; ii > 0; --ii) {
    const std::uint32_t i = ii - 1;
    const std::uint32_t prefix = mismatch_prefix_[i];
    const std::uint32_t remaining_after = m_ - 1 - i;

    std::uint16_t best = 0;
    std::uint32_t best_cost = 0;
    bool found = false;
    if (own_[i] > tuple_[i]) {
      const std::uint32_t need_after = tier_ - prefix;  // keep costs 0
      if (need_after <= remaining_after) {
        best = own_[i];
        best_cost = 0;
        found = true;
      }
    }
    std::uint16_t sub = static_cast<std::uint16_t>(tuple_[i] + 1);
    if (sub == own_[i]) ++sub;
    if (sub < I_ && tier_ >= prefix + 1 && tier_ - prefix - 1 <= remaining_after) {
      if (!found || sub < best) {
        best = sub;
        best_cost = 1;
        found = true;
      }
    }
    if (found) {
      tuple_[i] = best;
      mismatch_prefix_[i + 1] = prefix + best_cost;
      fill_suffix(i + 1, tier_ - prefix - best_cost);
      return true;
    }
  }
  return false;
}

const std::vector<std::uint16_t>* PosteriorEnumerator::next() {
  if (done_) return nullptr;
  if (!started_) {
    started_ = true;
    tier_ = 0;
    seed_tier();
  } else if (!advance()) {
    ++tier_;
    if (!seed_tier()) {
      done_ = true;
      return nullptr;
    }
  }
  ++emitted_;
  return &tuple_;
}

ChallengeResponse respond(const GeneSequence& prover_genome, const Challenge& challenge,
                          const PosteriorModel& model, std::uint64_t budget) {
  if (budget == 0) throw std::invalid_argument("respond: budget must be positive");
  if (challenge.digests.empty()) throw std::invalid_argument("respond: no digests");
  for (auto i : challenge.indices)
    if (i >= prover_genome.size())
      throw std::invalid_argument("respond: challenge index outside prover genome");
  const HashFunction& hash = HashFunction::by_name(challenge.hash_name);

  std::vector<std::uint16_t> own;
  own.reserve(challenge.indices.size());
  for (auto i : challenge.indices) own.push_back(prover_genome.elements[i]);

  std::vector<std::uint64_t> prefixes;
  prefixes.reserve(challenge.digests.size());
  for (const auto& d : challenge.digests) prefixes.push_back(digest_prefix(d));

  std::vector<std::uint8_t> buf(challenge.salt.size() + 2 * own.size());
  std::copy(challenge.salt.begin(), challenge.salt.end(), buf.begin());

  const auto start = std::chrono::steady_clock::now();
  ChallengeResponse r;
  PosteriorEnumerator en(own, model);
  while (en.emitted() < budget) {
    const auto* tuple = en.next();
    if (!tuple) break;
    write_tuple(buf, challenge.salt.size(), *tuple);
    const Digest d = hash.digest(buf);
    const std::uint64_t p = digest_prefix(d);
    for (std::size_t k = 0; k < challenge.digests.size(); ++k) {
      if (prefixes[k] == p && challenge.digests[k] == d) {
        r.chosen_digest_index = k;
        break;
      }
    }
    if (r.chosen_digest_index) break;
  }
  r.candidates_tested = en.emitted();
  r.elapsed_ms = std::chrono::duration<double, std::milli>(
                     std::chrono::steady_clock::now() - start)
                     .count();
  return r;
}

BigInt search_space_size(std::uint32_t n, std::uint32_t k, std::uint32_t I) {
  if (k > n) throw std::invalid_argument("search_space_size: k out of range");
  if (I < 2) throw std::invalid_argument("search_space_size: alphabet too small");
  return binomial_coefficient(n, k) * boost::multiprecision::pow(BigInt(I - 1), n - k);
}

BigRational tier_tuple_probability(std::uint32_t m, std::uint32_t k, std::uint32_t I,
                                   const BigRational& p_rel) {
  if (k > m) throw std::invalid_argument("tier_tuple_probability: k out of range");
  if (I < 2) throw std::invalid_argument("tier_tuple_probability: alphabet too small");
  const BigRational q = (1 - p_rel) / (I - 1);
  return rational_pow(p_rel, m - k) * rational_pow(q, k);
}

WorkRatioReport work_ratio(std::uint32_t n, std::uint32_t I, const BigRational& p_rel,
                           const BigRational& target_mass) {
  if (I < 2) throw std::invalid_argument("work_ratio: alphabet too small");
  if (!(target_mass > 0) || !(target_mass < 1))
    throw std::invalid_argument("work_ratio: target mass must lie in (0,1)");
  if (p_rel > 1 || p_rel < BigRational(1, I))
    throw std::invalid_argument("work_ratio: p_rel must lie in [1/I, 1]");

  WorkRatioReport rep;
  const BigInt space = boost::multiprecision::pow(BigInt(I), n);
  rep.uniform_prefix = ceil_div(boost::multiprecision::numerator(target_mass) * space,
                                boost::multiprecision::denominator(target_mass));

  BigRational cumulative = 0;
  BigInt prefix_count = 0;
  for (std::uint32_t k = 0; k <= n; ++k) {  // k mismatches, ascending
    const BigInt tier_count = binomial_coefficient(n, k) *
                              boost::multiprecision::pow(BigInt(I - 1), k);
    const BigRational per_tuple = tier_tuple_probability(n, k, I, p_rel);
    const BigRational tier_mass = BigRational(tier_count) * per_tuple;
    if (cumulative + tier_mass >= target_mass) {
      const BigRational need = target_mass - cumulative;
      const BigRational tuples = need / per_tuple;
      rep.ordered_prefix = prefix_count + ceil_div(boost::multiprecision::numerator(tuples),
                                                   boost::multiprecision::denominator(tuples));
      rep.ratio = BigRational(rep.uniform_prefix, rep.ordered_prefix);
      rep.ratio_as_double = rep.ratio.convert_to<double>();
      return rep;
    }
    cumulative += tier_mass;
    prefix_count += tier_count;
  }
  throw std::logic_error("work_ratio: posterior mass below target");  // masses sum to 1
}

WorkRatioReport work_ratio(std::uint32_t n, const PosteriorModel& model, double target_mass) {
  model.validate();
  return work_ratio(n, model.alphabet_size, BigRational(model.p_rel),
                    BigRational(target_mass));
}

Verdict verdict(const ChallengeResponse& response, const Challenge& challenge,
                std::uint64_t work_threshold) {
  if (!challenge.true_digest_index)
    throw std::invalid_argument("verdict: challenge carries no verifier-side truth");
  if (!response.chosen_digest_index) return Verdict::Alien;
  if (*response.chosen_digest_index != *challenge.true_digest_index) return Verdict::Alien;
  return response.candidates_tested <= work_threshold ? Verdict::Relative
                                                      : Verdict::Inconclusive;
}

nlohmann::ordered_json challenge_to_json(const Challenge& c) {
  nlohmann::ordered_json j;
  j["indices"] = c.indices;
  std::vector<std::string> hex;
  hex.reserve(c.digests.size());
  for (const auto& d : c.digests) hex.push_back(hex_encode(d));
  j["digests"] = hex;
  j["salt"] = hex_encode(c.salt);
  j["hash_name"] = c.hash_name;
  return j;
}

Challenge challenge_from_json(const nlohmann::json& j) {
  Challenge c;
  c.indices = j.at("indices").get<std::vector<std::uint32_t>>();
  for (const auto& h : j.at("digests")) c.digests.push_back(hex_decode(h.get_ref<const std::string&>()));
  c.salt = hex_decode(j.at("salt").get_ref<const std::string&>());
  c.hash_name = j.at("hash_name").get<std::string>();
  return c;
}

nlohmann::ordered_json response_to_json(const ChallengeResponse& r) {
  nlohmann::ordered_json j;
  if (r.chosen_digest_index)
    j["digest_index"] = *r.chosen_digest_index;
  else
    j["digest_index"] = nullptr;
  j["candidates_tested"] = r.candidates_tested;
  j["elapsed_ms"] = r.elapsed_ms;
  return j;
}

ChallengeResponse response_from_json(const nlohmann::json& j) {
  ChallengeResponse r;
  if (!j.at("digest_index").is_null()) r.chosen_digest_index = j.at("digest_index").get<std::size_t>();
  r.candidates_tested = j.at("candidates_tested").get<std::uint64_t>();
  r.elapsed_ms = j.at("elapsed_ms").get<double>();
  return r;
}

}  // namespace genepool
