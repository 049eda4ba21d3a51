#include "doctest.h"

#include <array>
#include <cmath>
#include <stdexcept>

#include "genepool/genome.hpp"

using namespace genepool;

namespace {

GenomeParams default_params() { return GenomeParams{}; }

}  // namespace

TEST_CASE("alphabet basics") {
  Alphabet a{26};
  CHECK(a.size() == 26);
  CHECK(a.lettered());
  CHECK(a.letter(0) == 'A');
  CHECK(a.letter(25) == 'Z');
  CHECK(a.index_of('Q') == 16);
  CHECK_THROWS_AS(Alphabet{1}, std::invalid_argument);

  Alphabet big{1024};
  CHECK_FALSE(big.lettered());
  CHECK_THROWS_AS(big.letter(0), std::invalid_argument);
}

TEST_CASE("params validation") {
  CHECK_NOTHROW(default_params().validate());

  GenomeParams p = default_params();
  p.length = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);

  p = default_params();
  p.p_inherit = 0.6;  // 2*0.6 + 0.04 != 1
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);

  p = default_params();
  p.p_mutate = -0.1;
  p.p_inherit = 0.55;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);

  // Degenerate but legal corners: no mutation, and mutation only.
  p = default_params();
  p.p_inherit = 0.5;
  p.p_mutate = 0.0;
  CHECK_NOTHROW(p.validate());
  p.p_inherit = 0.0;
  p.p_mutate = 1.0;
  CHECK_NOTHROW(p.validate());
}

TEST_CASE("random genome domain and determinism") {
  GenomeParams p = default_params();
  p.length = 1;
  Rng r1{7};
  GeneSequence g = random_genome(p, r1);
  REQUIRE(g.size() == 1);
  CHECK(g.elements[0] < 26);

  p.length = 500;
  Rng ra{42}, rb{42}, rc{43};
  CHECK(random_genome(p, ra) == random_genome(p, rb));
  Rng ra2{42};
  CHECK_FALSE(random_genome(p, ra2) == random_genome(p, rc));
}

TEST_CASE("random genome symbol frequencies are uniform") {
  GenomeParams p = default_params();
  p.length = 1000;
  Rng rng{11};
  std::array<std::uint64_t, 26> freq{};
  const int genomes = 200;
  for (int i = 0; i < genomes; ++i) {
    GeneSequence g = random_genome(p, rng);
    for (auto e : g.elements) ++freq[e];
  }
  const double total = genomes * 1000.0;
  const double expect = total / 26.0;
  // 5 sigma of Binomial(total, 1/26) per symbol.
  const double band = 5.0 * std::sqrt(total * (1.0 / 26.0) * (25.0 / 26.0));
  for (auto f : freq) CHECK(std::abs(static_cast<double>(f) - expect) < band);
}

TEST_CASE("reproduce edge cases") {
  GenomeParams p = default_params();
  p.length = 50;

  Rng rng{3};
  GeneSequence a = random_genome(p, rng);
  GeneSequence b = random_genome(p, rng);

  SUBCASE("length mismatch rejected") {
    GeneSequence shorter = a;
    shorter.elements.pop_back();
    CHECK_THROWS_AS(reproduce(shorter, b, p, rng), std::invalid_argument);
    CHECK_THROWS_AS(reproduce(a, shorter, p, rng), std::invalid_argument);
  }

  SUBCASE("identical parents without mutation reproduce exactly") {
    GenomeParams nomut = p;
    nomut.p_inherit = 0.5;
    nomut.p_mutate = 0.0;
    CHECK(reproduce(a, a, nomut, rng) == a);
  }

  SUBCASE("mutation-only params give uniform children regardless of parents") {
    GenomeParams mutonly = p;
    mutonly.p_inherit = 0.0;
    mutonly.p_mutate = 1.0;
    mutonly.length = 1000;
    GeneSequence zeros;
    zeros.elements.assign(1000, 0);
    std::array<std::uint64_t, 26> freq{};
    for (int i = 0; i < 100; ++i) {
      GeneSequence c = reproduce(zeros, zeros, mutonly, rng);
      for (auto e : c.elements) ++freq[e];
    }
    const double total = 100 * 1000.0;
    const double band = 5.0 * std::sqrt(total * (1.0 / 26.0) * (25.0 / 26.0));
    for (auto f : freq) CHECK(std::abs(static_cast<double>(f) - total / 26.0) < band);
  }

  SUBCASE("traced origins agree with the plain call") {
    Rng r1{99}, r2{99};
    ReproduceTrace t = reproduce_traced(a, b, p, r1);
    GeneSequence c = reproduce(a, b, p, r2);
    CHECK(t.child == c);
    REQUIRE(t.origins.size() == p.length);
    for (std::size_t i = 0; i < t.origins.size(); ++i) {
      if (t.origins[i] == GeneOrigin::FromA) CHECK(t.child.elements[i] == a.elements[i]);
      if (t.origins[i] == GeneOrigin::FromB) CHECK(t.child.elements[i] == b.elements[i]);
    }
  }
}

TEST_CASE("reproduction mixture passes chi-square against the exact trinomial") {
  // Parents differ everywhere, so the three observable categories are
  // child==a, child==b and child==neither. A mutation draw can coincide with
  // a parent value, which shifts mass from the third category into the first
  // two: P(==a) = P(==b) = p_inherit + p_mutate/I, P(neither) =
  // p_mutate*(I-2)/I.
  GenomeParams p = default_params();
  p.length = 1000;
  const std::uint32_t I = p.alphabet.size();

  GeneSequence a, b;
  a.elements.assign(p.length, 0);
  b.elements.assign(p.length, 1);

  Rng rng{2024};
  std::uint64_t from_a = 0, from_b = 0, neither = 0;
  const int repeats = 200;  // 2*10^5 positions
  for (int r = 0; r < repeats; ++r) {
    GeneSequence c = reproduce(a, b, p, rng);
    for (std::size_t i = 0; i < c.elements.size(); ++i) {
      if (c.elements[i] == a.elements[i]) ++from_a;
      else if (c.elements[i] == b.elements[i]) ++from_b;
      else ++neither;
    }
  }
  const double total = static_cast<double>(repeats) * p.length;
  const double pa = p.p_inherit + p.p_mutate / I;
  const double pn = p.p_mutate * (I - 2.0) / I;
  const std::array<double, 3> expected{pa * total, pa * total, pn * total};
  const std::array<double, 3> observed{static_cast<double>(from_a),
                                       static_cast<double>(from_b),
                                       static_cast<double>(neither)};
  double chi2 = 0.0;
  for (int i = 0; i < 3; ++i) {
    const double d = observed[i] - expected[i];
    chi2 += d * d / expected[i];
  }
  CHECK(chi2 < 13.8155);  // df=2, alpha=0.001
}

TEST_CASE("match_count") {
  Alphabet a26{26};
  GeneSequence x = from_letters("ABC", a26);
  GeneSequence y = from_letters("ABD", a26);
  CHECK(match_count(x, y) == 2);
  CHECK(match_count(y, x) == 2);
  CHECK(match_count(x, x) == 3);

  GeneSequence z = from_letters("ABCD", a26);
  CHECK_THROWS_AS(match_count(x, z), std::invalid_argument);

  GenomeParams p = default_params();
  Rng rng{5};
  GeneSequence u = random_genome(p, rng);
  GeneSequence v = random_genome(p, rng);
  const std::uint32_t m = match_count(u, v);
  CHECK(m == match_count(v, u));
  CHECK(m <= p.length);
}

TEST_CASE("binomial_pmf values and normalization") {
  CHECK(binomial_pmf(0, 10, 1.0 / 26.0) == doctest::Approx(0.6755641688257988).epsilon(1e-12));

  const double mass345 = binomial_pmf(3, 10, 1.0 / 3.0) + binomial_pmf(4, 10, 1.0 / 3.0) +
                         binomial_pmf(5, 10, 1.0 / 3.0);
  CHECK(mass345 == doctest::Approx(0.6242950769699741).epsilon(1e-9));
  CHECK(mass345 > 0.5);

  for (std::uint32_t n : {10u, 100u, 1000u}) {
    double sum = 0.0;
    for (std::uint32_t k = 0; k <= n; ++k) sum += binomial_pmf(k, n, 1.0 / 3.0);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }

  // Symmetric case peaks at the midpoint; tiny p puts the mode at zero.
  double best = -1.0;
  std::uint32_t argbest = 0;
  for (std::uint32_t k = 0; k <= 10; ++k) {
    const double f = binomial_pmf(k, 10, 0.5);
    if (f > best) { best = f; argbest = k; }
  }
  CHECK(argbest == 5);
  CHECK(binomial_pmf(0, 10, 1.0 / 26.0) > binomial_pmf(1, 10, 1.0 / 26.0));

  CHECK_THROWS_AS(binomial_pmf(11, 10, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(binomial_pmf(0, 10, 1.5), std::invalid_argument);
}

TEST_CASE("memory_factor") {
  CHECK(memory_factor(0.0, 0.04) == doctest::Approx(1.0));
  CHECK(memory_factor(1.0, 0.04) == doctest::Approx(0.96));
  CHECK(memory_factor(50.0, 0.04) == doctest::Approx(0.12988579352203838).epsilon(1e-12));

  // Multiplicative in t.
  const double m10 = memory_factor(10.0, 0.04);
  const double m25 = memory_factor(25.0, 0.04);
  CHECK(memory_factor(35.0, 0.04) == doctest::Approx(m10 * m25).epsilon(1e-12));

  // Non-increasing in t.
  double prev = 2.0;
  for (double t = 0.0; t <= 100.0; t += 7.5) {
    const double m = memory_factor(t, 0.04);
    CHECK(m <= prev);
    prev = m;
  }

  CHECK_THROWS_AS(memory_factor(-1.0, 0.04), std::invalid_argument);
  CHECK_THROWS_AS(memory_factor(1.0, 1.5), std::invalid_argument);
}

TEST_CASE("letter round trip") {
  Alphabet a26{26};
  GeneSequence g = from_letters("GENEPOOL", a26);
  CHECK(to_letters(g, a26) == "GENEPOOL");
  CHECK_THROWS_AS(from_letters("abc!", a26), std::invalid_argument);
}
