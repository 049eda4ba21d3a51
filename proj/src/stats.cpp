#include "genepool/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace genepool {

namespace {

// Data rows of a CSV payload: comments and the single header line removed.
std::vector<std::string_view> data_rows(std::string_view text) {
  std::vector<std::string_view> rows;
  bool header_seen = false;
  for (std::string_view line : split(text, '\n')) {
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    rows.push_back(line);
  }
  return rows;
}

std::string comment_value(std::string_view text, std::string_view key) {
  const std::string prefix = "# " + std::string(key) + ": ";
  for (std::string_view line : split(text, '\n'))
    if (line.starts_with(prefix)) return std::string(line.substr(prefix.size()));
  return {};
}

}  // namespace

double MatchHistogram::mean() const {
  if (n_pairs == 0) throw std::invalid_argument("MatchHistogram: empty");
  double sum = 0.0;
  for (std::uint32_t k = 0; k <= n; ++k) sum += static_cast<double>(k) * counts[k];
  return sum / static_cast<double>(n_pairs);
}

std::uint32_t MatchHistogram::min_match() const {
  for (std::uint32_t k = 0; k <= n; ++k)
    if (counts[k]) return k;
  throw std::invalid_argument("MatchHistogram: empty");
}

std::uint32_t MatchHistogram::max_match() const {
  for (std::uint32_t k = n + 1; k > 0; --k)
    if (counts[k - 1]) return k - 1;
  throw std::invalid_argument("MatchHistogram: empty");
}

double MatchHistogram::mass_at_or_above(std::uint32_t k) const {
  if (n_pairs == 0) throw std::invalid_argument("MatchHistogram: empty");
  std::uint64_t above = 0;
  for (std::uint32_t i = k; i <= n; ++i) above += counts[i];
  return static_cast<double>(above) / static_cast<double>(n_pairs);
}

MatchHistogram pairwise_match_distribution(const Population& pop, std::uint64_t pair_budget) {
  const auto& nodes = pop.nodes();
  if (nodes.size() < 2)
    throw std::invalid_argument("pairwise_match_distribution: need at least two nodes");

  MatchHistogram h;
  h.n = pop.params().genome.length;
  h.counts.assign(h.n + 1, 0);
  h.params_tag = "max_size=" + std::to_string(pop.params().max_size) +
                 ";parents=" + std::to_string(pop.params().parent_count) +
                 ";clock=" + std::to_string(pop.clock());

  const std::uint64_t all_pairs =
      static_cast<std::uint64_t>(nodes.size()) * (nodes.size() - 1) / 2;
  if (all_pairs <= pair_budget) {
    for (std::size_t i = 0; i < nodes.size(); ++i)
      for (std::size_t j = i + 1; j < nodes.size(); ++j)
        ++h.counts[match_count(nodes[i].genome, nodes[j].genome)];
    h.n_pairs = all_pairs;
  } else {
    Rng rng = Rng(pop.params().seed).derive(0x68697374ULL + pop.clock());
    for (std::uint64_t k = 0; k < pair_budget; ++k) {
      const auto [i, j] = rng.distinct_pair(nodes.size());
      ++h.counts[match_count(nodes[i].genome, nodes[j].genome)];
    }
    h.n_pairs = pair_budget;
  }
  return h;
}

std::vector<double> binomial_reference(std::uint32_t n, double p) {
  std::vector<double> pmf(n + 1);
  for (std::uint32_t k = 0; k <= n; ++k) pmf[k] = binomial_pmf(k, n, p);
  return pmf;
}

std::vector<CurvePoint> overlay_memory_factor(const Trajectory& traj, double p_mutate,
                                              double scale, double normalizer) {
  if (!(normalizer > 0.0))
    throw std::invalid_argument("overlay_memory_factor: normalizer must be positive");
  std::vector<CurvePoint> curve;
  curve.reserve(traj.size());
  for (const SnapshotStats& s : traj)
    curve.push_back({s.clock,
                     scale * memory_factor(static_cast<double>(s.clock) / normalizer, p_mutate)});
  return curve;
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());

  const auto na = static_cast<double>(a.size());
  const auto nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double fa = 0.0, fb = 0.0, d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double d1 = a[i];
    const double d2 = b[j];
    if (d1 <= d2) fa = static_cast<double>(++i) / na;
    if (d2 <= d1) fb = static_cast<double>(++j) / nb;
    d = std::max(d, std::abs(fa - fb));
  }
  d = std::max(d, std::abs(1.0 - fb));
  d = std::max(d, std::abs(fa - 1.0));

  KsResult r;
  r.statistic = d;
  const double ne = na * nb / (na + nb);
  const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  if (lambda < 1e-9) {
    r.p_value = 1.0;
    return r;
  }
  double q = 0.0;
  double sign = 1.0;
  for (int term = 1; term <= 100; ++term) {
    const double t = sign * std::exp(-2.0 * term * term * lambda * lambda);
    q += t;
    if (std::abs(t) < 1e-12) break;
    sign = -sign;
  }
  r.p_value = std::clamp(2.0 * q, 0.0, 1.0);
  return r;
}

std::vector<RebinnedBin> rebin(const MatchHistogram& h, std::uint32_t width) {
  if (width == 0) throw std::invalid_argument("rebin: width must be positive");
  std::vector<RebinnedBin> bins;
  for (std::uint32_t lo = 0; lo <= h.n; lo += width) {
    RebinnedBin b;
    b.lo = lo;
    b.hi = std::min(lo + width - 1, h.n);
    for (std::uint32_t k = b.lo; k <= b.hi; ++k) b.count += h.counts[k];
    bins.push_back(b);
  }
  return bins;
}

std::string histogram_to_csv(const MatchHistogram& h, const Meta& meta) {
  std::string out = meta_to_comments(meta);
  if (!h.params_tag.empty()) out += "# tag: " + h.params_tag + "\n";
  out += "match_count,count\n";
  for (std::uint32_t k = 0; k <= h.n; ++k)
    out += std::to_string(k) + "," + std::to_string(h.counts[k]) + "\n";
  return out;
}

MatchHistogram histogram_from_csv(std::string_view text) {
  MatchHistogram h;
  h.params_tag = comment_value(text, "tag");
  for (std::string_view row : data_rows(text)) {
    const auto cells = split(row, ',');
    if (cells.size() != 2) throw std::invalid_argument("histogram_from_csv: bad row");
    const auto k = parse_u64(cells[0]);
    if (k != h.counts.size()) throw std::invalid_argument("histogram_from_csv: bins out of order");
    h.counts.push_back(parse_u64(cells[1]));
    h.n_pairs += h.counts.back();
  }
  if (h.counts.empty()) throw std::invalid_argument("histogram_from_csv: no data");
  h.n = static_cast<std::uint32_t>(h.counts.size() - 1);
  return h;
}

std::string trajectory_to_csv(const Trajectory& traj, const Meta& meta) {
  std::string out = meta_to_comments(meta);
  out += "clock,mean_match,min_match,max_match,population_size\n";
  for (const SnapshotStats& s : traj) {
    out += std::to_string(s.clock) + "," + format_double(s.mean_match) + "," +
           std::to_string(s.min_match) + "," + std::to_string(s.max_match) + "," +
           std::to_string(s.population_size) + "\n";
  }
  return out;
}

Trajectory trajectory_from_csv(std::string_view text) {
  Trajectory traj;
  for (std::string_view row : data_rows(text)) {
    const auto cells = split(row, ',');
    if (cells.size() != 5) throw std::invalid_argument("trajectory_from_csv: bad row");
    SnapshotStats s;
    s.clock = parse_u64(cells[0]);
    s.mean_match = parse_double(cells[1]);
    s.min_match = static_cast<std::uint32_t>(parse_u64(cells[2]));
    s.max_match = static_cast<std::uint32_t>(parse_u64(cells[3]));
    s.population_size = static_cast<std::uint32_t>(parse_u64(cells[4]));
    traj.push_back(s);
  }
  return traj;
}

std::string reference_curve_to_csv(const std::vector<double>& pmf, const Meta& meta) {
  std::string out = meta_to_comments(meta);
  out += "k,pmf\n";
  for (std::size_t k = 0; k < pmf.size(); ++k)
    out += std::to_string(k) + "," + format_double(pmf[k]) + "\n";
  return out;
}

std::vector<double> reference_curve_from_csv(std::string_view text) {
  std::vector<double> pmf;
  for (std::string_view row : data_rows(text)) {
    const auto cells = split(row, ',');
    if (cells.size() != 2) throw std::invalid_argument("reference_curve_from_csv: bad row");
    if (parse_u64(cells[0]) != pmf.size())
      throw std::invalid_argument("reference_curve_from_csv: rows out of order");
    pmf.push_back(parse_double(cells[1]));
  }
  return pmf;
}

std::string overlay_to_csv(const std::vector<CurvePoint>& curve, const Meta& meta) {
  std::string out = meta_to_comments(meta);
  out += "clock,value\n";
  for (const CurvePoint& p : curve)
    out += std::to_string(p.clock) + "," + format_double(p.value) + "\n";
  return out;
}

std::vector<CurvePoint> overlay_from_csv(std::string_view text) {
  std::vector<CurvePoint> curve;
  for (std::string_view row : data_rows(text)) {
    const auto cells = split(row, ',');
    if (cells.size() != 2) throw std::invalid_argument("overlay_from_csv: bad row");
    curve.push_back({parse_u64(cells[0]), parse_double(cells[1])});
  }
  return curve;
}

nlohmann::ordered_json histogram_to_json(const MatchHistogram& h, const Meta& meta) {
  nlohmann::ordered_json j;
  j["meta"] = meta_to_json(meta);
  j["histogram"] = {{"n", h.n},
                    {"counts", h.counts},
                    {"n_pairs", h.n_pairs},
                    {"params_tag", h.params_tag}};
  return j;
}

MatchHistogram histogram_from_json(const nlohmann::json& j) {
  const auto& d = j.at("histogram");
  MatchHistogram h;
  h.n = d.at("n").get<std::uint32_t>();
  h.counts = d.at("counts").get<std::vector<std::uint64_t>>();
  h.n_pairs = d.at("n_pairs").get<std::uint64_t>();
  h.params_tag = d.at("params_tag").get<std::string>();
  if (h.counts.size() != h.n + 1u)
    throw std::invalid_argument("histogram_from_json: bin count mismatch");
  return h;
}

nlohmann::ordered_json trajectory_to_json(const Trajectory& traj, const Meta& meta) {
  nlohmann::ordered_json j;
  j["meta"] = meta_to_json(meta);
  nlohmann::ordered_json points = nlohmann::ordered_json::array();
  for (const SnapshotStats& s : traj)
    points.push_back({{"clock", s.clock},
                      {"mean_match", s.mean_match},
                      {"min_match", s.min_match},
                      {"max_match", s.max_match},
                      {"population_size", s.population_size}});
  j["trajectory"] = std::move(points);
  return j;
}

Trajectory trajectory_from_json(const nlohmann::json& j) {
  Trajectory traj;
  for (const auto& p : j.at("trajectory")) {
    SnapshotStats s;
    s.clock = p.at("clock").get<std::uint64_t>();
    s.mean_match = p.at("mean_match").get<double>();
    s.min_match = p.at("min_match").get<std::uint32_t>();
    s.max_match = p.at("max_match").get<std::uint32_t>();
    s.population_size = p.at("population_size").get<std::uint32_t>();
    traj.push_back(s);
  }
  return traj;
}

nlohmann::ordered_json reference_curve_to_json(const std::vector<double>& pmf,
                                               const Meta& meta) {
  nlohmann::ordered_json j;
  j["meta"] = meta_to_json(meta);
  j["pmf"] = pmf;
  return j;
}

std::vector<double> reference_curve_from_json(const nlohmann::json& j) {
  return j.at("pmf").get<std::vector<double>>();
}

}  // namespace genepool
