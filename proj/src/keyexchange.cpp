#include "genepool/keyexchange.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "genepool/assignment.hpp"

namespace genepool {

namespace {

// Distinct prefixes keep the wire digest and the derived key unrelated even
// though both are computed from the same (g, phi) encoding.
constexpr std::string_view kVerifyDomain = "key-transfer/verify:";
constexpr std::string_view kKeyDomain = "key-transfer/key:";

void append_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xff));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void append_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int s = 0; s < 32; s += 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

Digest domain_digest(std::string_view domain, const std::vector<std::uint8_t>& body,
                     const HashFunction& hash) {
  std::vector<std::uint8_t> buf;
  buf.reserve(domain.size() + body.size());
  buf.insert(buf.end(), domain.begin(), domain.end());
  buf.insert(buf.end(), body.begin(), body.end());
  return hash.digest(buf);
}

}  // namespace

CodeTable CodeTable::identity(std::uint32_t size) {
  CodeTable t;
  t.mapping.resize(size);
  std::iota(t.mapping.begin(), t.mapping.end(), std::uint16_t{0});
  return t;
}

CodeTable CodeTable::random(std::uint32_t size, Rng& rng) {
  CodeTable t = identity(size);
  rng.shuffle(t.mapping);
  return t;
}

CodeTable CodeTable::inverted() const {
  CodeTable inv;
  inv.mapping.resize(mapping.size());
  for (std::size_t x = 0; x < mapping.size(); ++x)
    inv.mapping[mapping[x]] = static_cast<std::uint16_t>(x);
  return inv;
}

void CodeTable::validate() const {
  std::vector<char> seen(mapping.size(), 0);
  for (auto v : mapping) {
    if (v >= mapping.size() || seen[v])
      throw std::invalid_argument("CodeTable: mapping is not a bijection");
    seen[v] = 1;
  }
}

IndexPermutation IndexPermutation::identity(std::uint32_t n) {
  IndexPermutation p;
  p.mapping.resize(n);
  std::iota(p.mapping.begin(), p.mapping.end(), std::uint32_t{0});
  return p;
}

IndexPermutation IndexPermutation::random(std::uint32_t n, Rng& rng) {
  IndexPermutation p = identity(n);
  rng.shuffle(p.mapping);
  return p;
}

IndexPermutation IndexPermutation::block_local(std::uint32_t n, std::uint32_t window,
                                               Rng& rng) {
  if (window == 0) throw std::invalid_argument("block_local: window must be positive");
  IndexPermutation p = identity(n);
  for (std::uint32_t start = 0; start < n; start += window) {
    const std::uint32_t end = std::min(start + window, n);
    for (std::uint32_t i = end - start; i > 1; --i) {
      const auto j = static_cast<std::uint32_t>(rng.index(i));
      std::swap(p.mapping[start + i - 1], p.mapping[start + j]);
    }
  }
  return p;
}

IndexPermutation IndexPermutation::inverted() const {
  IndexPermutation inv;
  inv.mapping.resize(mapping.size());
  for (std::size_t i = 0; i < mapping.size(); ++i) inv.mapping[mapping[i]] = static_cast<std::uint32_t>(i);
  return inv;
}

void IndexPermutation::validate() const {
  std::vector<char> seen(mapping.size(), 0);
  for (auto v : mapping) {
    if (v >= mapping.size() || seen[v])
      throw std::invalid_argument("IndexPermutation: mapping is not a bijection");
    seen[v] = 1;
  }
}

std::uint64_t ConditionalTable::total() const {
  std::uint64_t t = 0;
  for (auto rt : row_totals) t += rt;
  return t;
}

double ConditionalTable::conditional(std::uint32_t x, std::uint32_t y) const {
  if (row_empty(x)) throw std::invalid_argument("ConditionalTable: empty row");
  return static_cast<double>(counts[x][y]) / static_cast<double>(row_totals[x]);
}

TransferBundle encode(const GeneSequence& genome_x, const CodeTable& g,
                      const IndexPermutation& phi, const HashFunction& hash) {
  g.validate();
  phi.validate();
  if (phi.size() != genome_x.size())
    throw std::invalid_argument("encode: permutation size does not match genome length");
  TransferBundle b;
  b.payload.resize(genome_x.size());
  for (std::uint32_t i = 0; i < phi.size(); ++i) {
    const std::uint16_t e = genome_x.elements[phi(i)];
    if (e >= g.size()) throw std::invalid_argument("encode: gene element outside code table");
    b.payload[i] = g(e);
  }
  b.verification_digest = transfer_digest(g, phi, hash);
  return b;
}

GeneSequence decode(const std::vector<std::uint16_t>& payload, const CodeTable& g,
                    const IndexPermutation& phi) {
  g.validate();
  phi.validate();
  if (phi.size() != payload.size())
    throw std::invalid_argument("decode: permutation size does not match payload length");
  const CodeTable ginv = g.inverted();
  GeneSequence out;
  out.elements.resize(payload.size());
  for (std::uint32_t i = 0; i < payload.size(); ++i) {
    if (payload[i] >= g.size()) throw std::invalid_argument("decode: symbol outside code table");
    out.elements[phi(i)] = ginv(payload[i]);
  }
  return out;
}

ConditionalTable conditional_table(const std::vector<std::uint16_t>& payload,
                                   const GeneSequence& genome_y,
                                   const IndexPermutation& phi_candidate,
                                   const Alphabet& alphabet) {
  if (payload.size() != genome_y.size() || phi_candidate.size() != payload.size())
    throw std::invalid_argument("conditional_table: length mismatch");
  const std::uint32_t I = alphabet.size();
  ConditionalTable t;
  t.alphabet_size = I;
  t.counts.assign(I, std::vector<std::uint32_t>(I, 0));
  t.row_totals.assign(I, 0);
  for (std::uint32_t i = 0; i < payload.size(); ++i) {
    const std::uint16_t x = genome_y.elements[phi_candidate(i)];
    const std::uint16_t y = payload[i];
    if (x >= I || y >= I)
      throw std::invalid_argument("conditional_table: symbol outside alphabet");
    ++t.counts[x][y];
    ++t.row_totals[x];
  }
  return t;
}

double conditional_entropy(const ConditionalTable& table) {
  if (table.total() == 0) throw std::invalid_argument("conditional_entropy: empty table");
  double h = 0.0;
  for (std::uint32_t x = 0; x < table.alphabet_size; ++x) {
    if (table.row_totals[x] == 0) continue;
    const double rt = table.row_totals[x];
    for (std::uint32_t y = 0; y < table.alphabet_size; ++y) {
      const std::uint32_t c = table.counts[x][y];
      if (c == 0) continue;
      h -= static_cast<double>(c) * std::log2(static_cast<double>(c) / rt);
    }
  }
  return h;
}

double conditional_entropy(const std::vector<std::uint16_t>& payload,
                           const GeneSequence& genome_y,
                           const IndexPermutation& phi_candidate,
                           const Alphabet& alphabet) {
  return conditional_entropy(conditional_table(payload, genome_y, phi_candidate, alphabet));
}

double mutual_information(const ConditionalTable& table) {
  const std::uint64_t total = table.total();
  if (total == 0) throw std::invalid_argument("mutual_information: empty table");
  const double N = static_cast<double>(total);
  std::vector<double> col_totals(table.alphabet_size, 0.0);
  for (std::uint32_t x = 0; x < table.alphabet_size; ++x)
    for (std::uint32_t y = 0; y < table.alphabet_size; ++y)
      col_totals[y] += table.counts[x][y];
  double mi = 0.0;
  for (std::uint32_t x = 0; x < table.alphabet_size; ++x) {
    if (table.row_totals[x] == 0) continue;
    const double rt = table.row_totals[x];
    for (std::uint32_t y = 0; y < table.alphabet_size; ++y) {
      const std::uint32_t c = table.counts[x][y];
      if (c == 0) continue;
      mi += (c / N) * std::log2(c * N / (rt * col_totals[y]));
    }
  }
  return mi;
}

double mutual_information(const std::vector<std::uint16_t>& payload,
                          const GeneSequence& genome_y,
                          const IndexPermutation& phi_candidate,
                          const Alphabet& alphabet) {
  return mutual_information(conditional_table(payload, genome_y, phi_candidate, alphabet));
}

CodeTableRecovery recover_code_table(const ConditionalTable& table) {
  if (table.total() == 0) throw std::invalid_argument("recover_code_table: all rows empty");
  const std::uint32_t I = table.alphabet_size;
  std::vector<std::vector<double>> weight(I, std::vector<double>(I));
  for (std::uint32_t x = 0; x < I; ++x)
    for (std::uint32_t y = 0; y < I; ++y) weight[x][y] = table.counts[x][y];
  const AssignmentResult res = lexicographic_max_weight_assignment(weight);

  CodeTableRecovery out;
  out.table.mapping.resize(I);
  out.row_confidence.resize(I, 0.0);
  for (std::uint32_t x = 0; x < I; ++x) {
    out.table.mapping[x] = static_cast<std::uint16_t>(res.assignment[x]);
    if (table.row_totals[x] != 0) {
      const auto row_max = *std::max_element(table.counts[x].begin(), table.counts[x].end());
      out.row_confidence[x] =
          static_cast<double>(row_max) / static_cast<double>(table.row_totals[x]);
    }
  }
  return out;
}

PermutationRecovery recover_permutation(const std::vector<std::uint16_t>& payload,
                                        const GeneSequence& genome_y,
                                        const std::vector<IndexPermutation>& candidates,
                                        const Digest& verification_digest,
                                        const HashFunction& hash,
                                        const Alphabet& alphabet) {
  if (candidates.empty())
    throw std::invalid_argument("recover_permutation: empty candidate set");

  PermutationRecovery out;
  out.ranking.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i)
    out.ranking.push_back({i, mutual_information(payload, genome_y, candidates[i], alphabet)});
  std::sort(out.ranking.begin(), out.ranking.end(),
            [](const RankedCandidate& a, const RankedCandidate& b) {
              if (a.mutual_information != b.mutual_information)
                return a.mutual_information > b.mutual_information;
              return a.candidate_index < b.candidate_index;
            });

  for (const RankedCandidate& rc : out.ranking) {
    const IndexPermutation& phi = candidates[rc.candidate_index];
    const ConditionalTable table = conditional_table(payload, genome_y, phi, alphabet);
    const CodeTableRecovery rec = recover_code_table(table);
    if (transfer_digest(rec.table, phi, hash) == verification_digest) {
      out.verified = true;
      out.winner_index = rc.candidate_index;
      out.recovered_table = rec.table;
      break;
    }
  }
  return out;
}

std::vector<std::uint8_t> canonical_encoding(const CodeTable& g, const IndexPermutation& phi) {
  std::vector<std::uint8_t> out;
  out.reserve(8 + 2 * g.mapping.size() + 4 * phi.mapping.size());
  append_u32(out, g.size());
  for (auto v : g.mapping) append_u16(out, v);
  append_u32(out, phi.size());
  for (auto v : phi.mapping) append_u32(out, v);
  return out;
}

Digest transfer_digest(const CodeTable& g, const IndexPermutation& phi,
                       const HashFunction& hash) {
  return domain_digest(kVerifyDomain, canonical_encoding(g, phi), hash);
}

Digest derive_shared_key(const CodeTable& g, const IndexPermutation& phi,
                         const HashFunction& hash) {
  return domain_digest(kKeyDomain, canonical_encoding(g, phi), hash);
}

std::string table_to_percent_csv(const ConditionalTable& table, const Alphabet& alphabet) {
  if (alphabet.size() != table.alphabet_size)
    throw std::invalid_argument("table_to_percent_csv: alphabet size mismatch");
  const auto symbols = alphabet.symbols();
  std::string out = "local";
  for (const auto& s : symbols) {
    out += ',';
    out += s;
  }
  out += '\n';
  for (std::uint32_t x = 0; x < table.alphabet_size; ++x) {
    out += symbols[x];
    for (std::uint32_t y = 0; y < table.alphabet_size; ++y) {
      long pct = 0;
      if (table.row_totals[x] != 0)
        pct = std::lround(100.0 * table.counts[x][y] / table.row_totals[x]);
      out += ',';
      out += std::to_string(pct);
    }
    out += '\n';
  }
  return out;
}

nlohmann::ordered_json table_to_json(const ConditionalTable& table) {
  nlohmann::ordered_json j;
  j["alphabet_size"] = table.alphabet_size;
  j["counts"] = table.counts;
  j["row_totals"] = table.row_totals;
  j["total"] = table.total();
  return j;
}

ConditionalTable table_from_json(const nlohmann::json& j) {
  ConditionalTable t;
  t.alphabet_size = j.at("alphabet_size").get<std::uint32_t>();
  t.counts = j.at("counts").get<std::vector<std::vector<std::uint32_t>>>();
  if (t.counts.size() != t.alphabet_size)
    throw std::invalid_argument("table_from_json: row count mismatch");
  t.row_totals.assign(t.alphabet_size, 0);
  for (std::uint32_t x = 0; x < t.alphabet_size; ++x) {
    if (t.counts[x].size() != t.alphabet_size)
      throw std::invalid_argument("table_from_json: column count mismatch");
    for (auto c : t.counts[x]) t.row_totals[x] += c;
  }
  if (j.contains("row_totals") &&
      j.at("row_totals").get<std::vector<std::uint32_t>>() != t.row_totals)
    throw std::invalid_argument("table_from_json: inconsistent row totals");
  return t;
}

nlohmann::ordered_json bundle_to_json(const TransferBundle& bundle, const Alphabet& alphabet) {
  nlohmann::ordered_json j;
  if (alphabet.lettered()) {
    std::string s;
    s.reserve(bundle.payload.size());
    for (auto v : bundle.payload) s.push_back(alphabet.letter(v));
    j["payload"] = s;
  } else {
    j["payload"] = bundle.payload;
  }
  j["digest"] = hex_encode(bundle.verification_digest);
  return j;
}

TransferBundle bundle_from_json(const nlohmann::json& j, const Alphabet& alphabet) {
  TransferBundle b;
  const auto& payload = j.at("payload");
  if (payload.is_string()) {
    for (char c : payload.get_ref<const std::string&>())
      b.payload.push_back(static_cast<std::uint16_t>(alphabet.index_of(c)));
  } else {
    b.payload = payload.get<std::vector<std::uint16_t>>();
    for (auto v : b.payload)
      if (v >= alphabet.size())
        throw std::invalid_argument("bundle_from_json: symbol outside alphabet");
  }
  b.verification_digest = hex_decode(j.at("digest").get_ref<const std::string&>());
  return b;
}

}  // namespace genepool
