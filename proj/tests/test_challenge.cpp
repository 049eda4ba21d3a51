#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <set>
#include <stdexcept>
#include <vector>

#include "genepool/challenge.hpp"

using namespace genepool;

namespace {

const Alphabet kAz{26};
const HashFunction& kHash = HashFunction::sha256();

GeneSequence seq(std::initializer_list<std::uint16_t> xs) {
  GeneSequence g;
  g.elements = xs;
  return g;
}

std::vector<std::vector<std::uint16_t>> drain(PosteriorEnumerator& e) {
  std::vector<std::vector<std::uint16_t>> out;
  while (const auto* t = e.next()) out.push_back(*t);
  return out;
}

}  // namespace

TEST_CASE("posterior model validation") {
  PosteriorModel ok;
  CHECK_NOTHROW(ok.validate());

  PosteriorModel low{0.01, 26};  // below 1/26: own tuple would not be the mode
  CHECK_THROWS_AS(low.validate(), std::invalid_argument);

  PosteriorModel high{1.5, 26};
  CHECK_THROWS_AS(high.validate(), std::invalid_argument);

  PosteriorModel uniform{1.0 / 26.0, 26};
  CHECK_NOTHROW(uniform.validate());
  CHECK(uniform.q() == doctest::Approx(1.0 / 26.0));
}

TEST_CASE("tuple digest is deterministic and input-sensitive") {
  const std::vector<std::uint8_t> salt{1, 2, 3, 4};
  const std::vector<std::uint16_t> tuple{0, 25, 7};
  Digest d1 = tuple_digest(salt, tuple, kHash);
  Digest d2 = tuple_digest(salt, tuple, kHash);
  CHECK(d1 == d2);
  CHECK(d1.size() == 32);

  CHECK(tuple_digest({1, 2, 3, 5}, tuple, kHash) != d1);
  CHECK(tuple_digest(salt, {0, 25, 8}, kHash) != d1);
}

TEST_CASE("issue_challenge structure") {
  Rng rng{7};
  GenomeParams gp;
  GeneSequence genome = random_genome(gp, rng);

  Challenge c = issue_challenge(genome, {10, 20, 30, 40}, 9, kAz, kHash, rng);
  CHECK(c.indices == std::vector<std::uint32_t>{10, 20, 30, 40});
  REQUIRE(c.digests.size() == 10);
  REQUIRE(c.true_digest_index.has_value());
  CHECK(*c.true_digest_index < c.digests.size());
  CHECK_FALSE(c.salt.empty());
  CHECK(c.hash_name == "sha256");

  std::set<Digest> distinct(c.digests.begin(), c.digests.end());
  CHECK(distinct.size() == c.digests.size());

  // The true digest really is the verifier's elements at the indices.
  std::vector<std::uint16_t> truth;
  for (auto i : c.indices) truth.push_back(genome.elements[i]);
  CHECK(c.digests[*c.true_digest_index] == tuple_digest(c.salt, truth, kHash));

  CHECK_THROWS_AS(issue_challenge(genome, {1, 1, 2}, 3, kAz, kHash, rng),
                  std::invalid_argument);
  CHECK_THROWS_AS(issue_challenge(genome, {1, 2, 5000}, 3, kAz, kHash, rng),
                  std::invalid_argument);
}

TEST_CASE("enumerator visits every tuple once in posterior order") {
  SUBCASE("small exhaustive case") {
    PosteriorModel model{1.0 / 3.0, 4};
    PosteriorEnumerator e({0, 1}, model);
    auto all = drain(e);
    REQUIRE(all.size() == 16);
    CHECK(all.front() == std::vector<std::uint16_t>{0, 1});  // own tuple first

    std::set<std::vector<std::uint16_t>> distinct(all.begin(), all.end());
    CHECK(distinct.size() == 16);

    // Mismatch count against the own tuple never decreases, and within a
    // tier the tuples come lexicographically.
    auto mismatches = [](const std::vector<std::uint16_t>& t) {
      const std::vector<std::uint16_t> own{0, 1};
      std::uint32_t k = 0;
      for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i] != own[i]) ++k;
      return k;
    };
    std::uint32_t prev_tier = 0;
    std::vector<std::uint16_t> prev;
    for (const auto& t : all) {
      const std::uint32_t k = mismatches(t);
      CHECK(k >= prev_tier);
      if (k == prev_tier && !prev.empty()) CHECK(prev < t);
      prev_tier = k;
      prev = t;
    }
  }

  SUBCASE("alphabet-26 pair count") {
    PosteriorModel model{1.0 / 3.0, 26};
    PosteriorEnumerator e({4, 17}, model);
    auto all = drain(e);
    CHECK(all.size() == 26 * 26);
    std::set<std::vector<std::uint16_t>> distinct(all.begin(), all.end());
    CHECK(distinct.size() == all.size());
  }

  SUBCASE("m=4 bijection") {
    PosteriorModel model{0.4, 6};
    PosteriorEnumerator e({0, 5, 2, 3}, model);
    auto all = drain(e);
    CHECK(all.size() == 1296);
    std::set<std::vector<std::uint16_t>> distinct(all.begin(), all.end());
    CHECK(distinct.size() == 1296);
  }
}

TEST_CASE("tier probabilities normalize over the tuple space") {
  PosteriorModel model{1.0 / 3.0, 26};
  PosteriorEnumerator e({0, 1, 2}, model);
  // Sum over tiers of (tier size) * (tier probability) = 1.
  double total = 0.0;
  for (std::uint32_t k = 0; k <= 3; ++k) {
    double size = 1.0;
    // C(3,k) * 25^k
    const double choose[4] = {1, 3, 3, 1};
    size = choose[k] * std::pow(25.0, k);
    total += size * e.tier_probability(k);
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));

  // Posterior never increases with distance from the own tuple.
  for (std::uint32_t k = 1; k <= 3; ++k)
    CHECK(e.tier_probability(k) <= e.tier_probability(k - 1));
}

TEST_CASE("flat model makes every tuple posterior exactly uniform") {
  const BigRational p{1, 26};
  for (std::uint32_t m = 1; m <= 4; ++m) {
    BigRational expected{1, boost::multiprecision::pow(BigInt{26}, m)};
    for (std::uint32_t k = 0; k <= m; ++k)
      CHECK(tier_tuple_probability(m, k, 26, p) == expected);
  }
}

TEST_CASE("two-position tier arithmetic") {
  // p = 1/3, q = 2/75: the own tuple plus the 50 single-mismatch tuples.
  const BigRational p{1, 3};
  const BigRational tier0 = tier_tuple_probability(2, 0, 26, p);
  const BigRational tier1 = tier_tuple_probability(2, 1, 26, p);
  CHECK(tier0 == BigRational{1, 9});
  CHECK(tier1 == BigRational{2, 225});
  CHECK(tier0 + 50 * tier1 == BigRational{5, 9});

  // Walking tuples in posterior order, mass 1/2 is first reached at tuple 45.
  BigRational acc{0};
  int count = 0;
  PosteriorModel model{1.0 / 3.0, 26};
  PosteriorEnumerator e({0, 1}, model);
  while (e.next()) {
    acc += tier_tuple_probability(2, e.mismatch_tier(), 26, p);
    ++count;
    if (acc >= BigRational{1, 2}) break;
  }
  CHECK(count == 45);
}

TEST_CASE("search space sizes partition the tuple space") {
  for (std::uint32_t I : {4u, 26u, 1024u}) {
    for (std::uint32_t n = 1; n <= 12; ++n) {
      BigInt sum = 0;
      for (std::uint32_t k = 0; k <= n; ++k) sum += search_space_size(n, k, I);
      CHECK(sum == boost::multiprecision::pow(BigInt{I}, n));
    }
  }

  CHECK(search_space_size(10, 3, 26) == BigInt{"732421875000"});
  CHECK(search_space_size(10, 10, 26) == 1);
  CHECK(search_space_size(10, 0, 26) ==
        boost::multiprecision::pow(BigInt{25}, 10));
  CHECK_THROWS_AS(search_space_size(5, 6, 26), std::invalid_argument);
  CHECK_THROWS_AS(search_space_size(5, 2, 1), std::invalid_argument);
}

TEST_CASE("work ratio is exact and monotone in relatedness") {
  const BigRational half{1, 2};

  SUBCASE("uniform relatedness gives ratio one") {
    WorkRatioReport r = work_ratio(6, 26, BigRational{1, 26}, half);
    CHECK(r.ratio == BigRational{1});
    CHECK(r.uniform_prefix == r.ordered_prefix);
  }

  SUBCASE("ratio never decreases as p_rel grows") {
    BigRational prev{0};
    for (const auto& p : {BigRational{1, 26}, BigRational{1, 10}, BigRational{1, 5},
                          BigRational{1, 3}, BigRational{1, 2}, BigRational{7, 10},
                          BigRational{9, 10}}) {
      WorkRatioReport r = work_ratio(6, 26, p, half);
      CHECK(r.ratio >= prev);
      prev = r.ratio;
    }
  }

  SUBCASE("rejects degenerate targets and models") {
    CHECK_THROWS_AS(work_ratio(6, 26, BigRational{1, 3}, BigRational{0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(work_ratio(6, 26, BigRational{1, 3}, BigRational{1}),
                    std::invalid_argument);
    CHECK_THROWS_AS(work_ratio(6, 26, BigRational{1, 100}, half), std::invalid_argument);
  }
}

TEST_CASE("responding to an own-genome challenge takes one candidate") {
  Rng rng{17};
  GenomeParams gp;
  GeneSequence genome = random_genome(gp, rng);
  Challenge c = issue_challenge(genome, {3, 99, 500, 900}, 9, kAz, kHash, rng);

  PosteriorModel model{1.0 / 3.0, 26};
  ChallengeResponse r = respond(genome, c, model, 456976);
  CHECK(r.candidates_tested == 1);
  REQUIRE(r.chosen_digest_index.has_value());
  CHECK(*r.chosen_digest_index == *c.true_digest_index);
  CHECK(verdict(r, c, 456976) == Verdict::Relative);
  CHECK(verdict(r, c, 0) == Verdict::Inconclusive);  // over a zero threshold
}

TEST_CASE("work equals the true tuple's enumeration rank") {
  SUBCASE("hand-derived rank in a tiny space") {
    // Own tuple (0,1), true tuple (0,2), I=4: tier 0 gives (0,1); tier 1 in
    // lexicographic order starts (0,0), (0,2) -> three candidates tested.
    GeneSequence verifier = seq({0, 2});
    GeneSequence prover = seq({0, 1});
    Rng rng{23};
    Alphabet a4{4};
    Challenge c = issue_challenge(verifier, {0, 1}, 0, a4, kHash, rng);
    PosteriorModel model{1.0 / 3.0, 4};
    ChallengeResponse r = respond(prover, c, model, 100);
    CHECK(r.candidates_tested == 3);
    REQUIRE(r.chosen_digest_index.has_value());
    CHECK(*r.chosen_digest_index == *c.true_digest_index);
  }

  SUBCASE("rank agrees with a fresh enumeration walk") {
    Rng rng{29};
    const std::uint32_t m = 3, I = 5;
    Alphabet a5{I};
    PosteriorModel model{0.5, I};
    GenomeParams gp;
    gp.length = 10;
    gp.alphabet = a5;
    for (int trial = 0; trial < 30; ++trial) {
      GeneSequence verifier = random_genome(gp, rng);
      GeneSequence prover = random_genome(gp, rng);
      Challenge c = issue_challenge(verifier, {1, 4, 7}, 0, a5, kHash, rng);

      std::vector<std::uint16_t> own{prover.elements[1], prover.elements[4],
                                     prover.elements[7]};
      std::vector<std::uint16_t> truth{verifier.elements[1], verifier.elements[4],
                                       verifier.elements[7]};
      PosteriorEnumerator e(own, model);
      std::uint64_t rank = 0;
      while (const auto* t = e.next()) {
        ++rank;
        if (*t == truth) break;
      }
      ChallengeResponse r = respond(prover, c, model, 1u << 20);
      CHECK(r.candidates_tested == rank);
      REQUIRE(r.chosen_digest_index.has_value());
      (void)m;
    }
  }
}

TEST_CASE("budget exhaustion leaves no digest chosen") {
  // True tuple differs from the prover everywhere; a 10-candidate budget
  // cannot leave tier one of a 4-position challenge.
  GeneSequence verifier = seq({1, 1, 1, 1});
  GeneSequence prover = seq({2, 2, 2, 2});
  Rng rng{31};
  Challenge c = issue_challenge(verifier, {0, 1, 2, 3}, 0, kAz, kHash, rng);
  PosteriorModel model{1.0 / 3.0, 26};
  ChallengeResponse r = respond(prover, c, model, 10);
  CHECK(r.candidates_tested == 10);
  CHECK_FALSE(r.chosen_digest_index.has_value());
  CHECK(verdict(r, c, 456976) == Verdict::Alien);
}

TEST_CASE("a decoy matching the prover's beliefs is chosen and flags alien") {
  // Hand-built challenge whose first digest is the prover's own tuple: the
  // prover tests it first and reveals itself.
  GeneSequence prover = seq({3, 4});
  const std::vector<std::uint8_t> salt{9, 9, 9};
  Challenge c;
  c.indices = {0, 1};
  c.salt = salt;
  c.hash_name = "sha256";
  c.digests.push_back(tuple_digest(salt, {3, 4}, kHash));   // decoy == prover's own
  c.digests.push_back(tuple_digest(salt, {5, 6}, kHash));   // the real truth
  c.true_digest_index = 1;

  PosteriorModel model{1.0 / 3.0, 26};
  ChallengeResponse r = respond(prover, c, model, 1000);
  CHECK(r.candidates_tested == 1);
  REQUIRE(r.chosen_digest_index.has_value());
  CHECK(*r.chosen_digest_index == 0);
  CHECK(verdict(r, c, 1000) == Verdict::Alien);
}

TEST_CASE("verdict requires the verifier-side challenge") {
  Challenge wire;
  wire.indices = {0, 1};
  wire.salt = {1};
  wire.hash_name = "sha256";
  wire.digests.push_back(tuple_digest(wire.salt, {0, 0}, kHash));
  ChallengeResponse r;
  r.chosen_digest_index = 0;
  r.candidates_tested = 1;
  CHECK_THROWS_AS(verdict(r, wire, 100), std::invalid_argument);
}

TEST_CASE("verdict strings round trip") {
  for (Verdict v : {Verdict::Relative, Verdict::Alien, Verdict::Inconclusive})
    CHECK(verdict_from_string(to_string(v)) == v);
  CHECK_THROWS_AS(verdict_from_string("hmm"), std::invalid_argument);
}

TEST_CASE("wire json omits the true digest slot") {
  Rng rng{37};
  GenomeParams gp;
  GeneSequence genome = random_genome(gp, rng);
  Challenge c = issue_challenge(genome, {1, 2, 3, 4}, 5, kAz, kHash, rng);

  nlohmann::ordered_json cj = challenge_to_json(c);
  CHECK_FALSE(cj.contains("true_digest_index"));
  Challenge back = challenge_from_json(cj);
  CHECK(back.indices == c.indices);
  CHECK(back.digests == c.digests);
  CHECK(back.salt == c.salt);
  CHECK(back.hash_name == c.hash_name);
  CHECK_FALSE(back.true_digest_index.has_value());

  ChallengeResponse r;
  r.chosen_digest_index = 3;
  r.candidates_tested = 77;
  r.elapsed_ms = 1.5;
  ChallengeResponse r2 = response_from_json(response_to_json(r));
  CHECK(r2.chosen_digest_index == r.chosen_digest_index);
  CHECK(r2.candidates_tested == r.candidates_tested);

  ChallengeResponse none;
  none.candidates_tested = 5;
  nlohmann::ordered_json nj = response_to_json(none);
  CHECK(nj["digest_index"].is_null());
  CHECK_FALSE(response_from_json(nj).chosen_digest_index.has_value());
}
