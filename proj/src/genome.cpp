#include "genepool/genome.hpp"

#include <cmath>
#include <stdexcept>

namespace genepool {

void GenomeParams::validate() const {
  if (length == 0) throw std::invalid_argument("GenomeParams: length must be positive");
  if (!(p_mutate >= 0.0) || !(p_mutate <= 1.0))
    throw std::invalid_argument("GenomeParams: p_mutate must lie in [0,1]");
  if (p_inherit < 0.0)
    throw std::invalid_argument("GenomeParams: p_inherit must be non-negative");
  if (std::abs(2.0 * p_inherit + p_mutate - 1.0) > 1e-12)
    throw std::invalid_argument("GenomeParams: 2*p_inherit + p_mutate must equal 1");
}

GeneSequence random_genome(const GenomeParams& params, Rng& rng) {
  params.validate();
  GeneSequence g;
  g.elements.resize(params.length);
  const std::uint32_t I = params.alphabet.size();
  for (auto& e : g.elements) e = static_cast<std::uint16_t>(rng.index(I));
  return g;
}

ReproduceTrace reproduce_traced(const GeneSequence& a, const GeneSequence& b,
                                const GenomeParams& params, Rng& rng) {
  params.validate();
  if (a.size() != params.length || b.size() != params.length)
    throw std::invalid_argument("reproduce: parent length does not match params");

  const std::uint32_t n = params.length;
  const std::uint32_t I = params.alphabet.size();
  const double p1 = params.p_inherit;
  const double p2 = 2.0 * params.p_inherit;

  ReproduceTrace t;
  t.child.elements.resize(n);
  t.origins.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const double u = rng.real();
    if (u < p1) {
      t.child.elements[i] = a.elements[i];
      t.origins[i] = GeneOrigin::FromA;
    } else if (u < p2) {
      t.child.elements[i] = b.elements[i];
      t.origins[i] = GeneOrigin::FromB;
    } else {
      t.child.elements[i] = static_cast<std::uint16_t>(rng.index(I));
      t.origins[i] = GeneOrigin::Mutation;
    }
  }
  return t;
}

GeneSequence reproduce(const GeneSequence& a, const GeneSequence& b,
                       const GenomeParams& params, Rng& rng) {
  return std::move(reproduce_traced(a, b, params, rng).child);
}

std::uint32_t match_count(const GeneSequence& a, const GeneSequence& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("match_count: length mismatch");
  std::uint32_t count = 0;
  for (std::size_t i = 0; i < a.elements.size(); ++i)
    if (a.elements[i] == b.elements[i]) ++count;
  return count;
}

double binomial_pmf(std::uint32_t k, std::uint32_t n, double p) {
  if (k > n) throw std::invalid_argument("binomial_pmf: k out of range");
  if (p < 0.0 || p > 1.0) throw std::invalid_argument("binomial_pmf: p out of range");
  if (p == 0.0) return k == 0 ? 1.0 : 0.0;
  if (p == 1.0) return k == n ? 1.0 : 0.0;

  if (n > 30) {
    const double log_pmf = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
                           std::lgamma(n - k + 1.0) + k * std::log(p) +
                           (n - k) * std::log1p(-p);
    return std::exp(log_pmf);
  }

  double binom = 1.0;
  for (std::uint32_t i = 1; i <= k; ++i)
    binom = binom * (n - k + i) / i;
  return binom * std::pow(p, k) * std::pow(1.0 - p, n - k);
}

double memory_factor(double t, double p_mutate) {
  if (t < 0.0) throw std::invalid_argument("memory_factor: t must be >= 0");
  if (p_mutate < 0.0 || p_mutate > 1.0)
    throw std::invalid_argument("memory_factor: p_mutate out of range");
  return std::pow(1.0 - p_mutate, t);
}

std::string to_letters(const GeneSequence& g, const Alphabet& alphabet) {
  std::string s;
  s.reserve(g.size());
  for (auto e : g.elements) s.push_back(alphabet.letter(e));
  return s;
}

GeneSequence from_letters(std::string_view text, const Alphabet& alphabet) {
  GeneSequence g;
  g.elements.reserve(text.size());
  for (char c : text)
    g.elements.push_back(static_cast<std::uint16_t>(alphabet.index_of(c)));
  return g;
}

}  // namespace genepool
