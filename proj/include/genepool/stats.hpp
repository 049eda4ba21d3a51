#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "genepool/io.hpp"
#include "genepool/population.hpp"

namespace genepool {

// Exact histogram of pairwise match counts, unit-width integer bins 0..n.
struct MatchHistogram {
  std::uint32_t n = 0;
  std::vector<std::uint64_t> counts;  // size n + 1
  std::uint64_t n_pairs = 0;
  std::string params_tag;

  double mean() const;
  std::uint32_t min_match() const;  // throws on an empty histogram
  std::uint32_t max_match() const;
  // Pair mass at or above the given match count, as a fraction of n_pairs.
  double mass_at_or_above(std::uint32_t k) const;

  bool operator==(const MatchHistogram&) const = default;
};

// All distinct pairs when their number fits pair_budget, else pair_budget
// sampled pairs of distinct nodes (rng derived from the population seed and
// clock). Throws with fewer than two nodes.
MatchHistogram pairwise_match_distribution(const Population& pop, std::uint64_t pair_budget);

// Unrelated-pair reference: pmf[k] = C(n,k) p^k (1-p)^(n-k) for k = 0..n.
std::vector<double> binomial_reference(std::uint32_t n, double p);

struct CurvePoint {
  std::uint64_t clock = 0;
  double value = 0.0;
  bool operator==(const CurvePoint&) const = default;
};

// scale * (1 - p_mutate)^(clock / normalizer) at the trajectory's clocks.
// The normalizer converts raw birth counts into births per parent slot (use
// parent_count to compare pools of different size on one axis).
std::vector<CurvePoint> overlay_memory_factor(const Trajectory& traj, double p_mutate,
                                              double scale, double normalizer);

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value. Throws on
// an empty sample.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct RebinnedBin {
  std::uint32_t lo = 0;  // inclusive
  std::uint32_t hi = 0;  // inclusive
  std::uint64_t count = 0;
};

// Coarse bins of the given width for plotting; conserves total counts.
std::vector<RebinnedBin> rebin(const MatchHistogram& h, std::uint32_t width);

// CSV forms. Data lines follow '#' metadata comments; parsers ignore
// comments, so parse(export(x)) == x for the data payload.
std::string histogram_to_csv(const MatchHistogram& h, const Meta& meta);
MatchHistogram histogram_from_csv(std::string_view text);

std::string trajectory_to_csv(const Trajectory& traj, const Meta& meta);
Trajectory trajectory_from_csv(std::string_view text);

std::string reference_curve_to_csv(const std::vector<double>& pmf, const Meta& meta);
std::vector<double> reference_curve_from_csv(std::string_view text);

std::string overlay_to_csv(const std::vector<CurvePoint>& curve, const Meta& meta);
std::vector<CurvePoint> overlay_from_csv(std::string_view text);

// JSON mirrors carrying the same data plus the metadata header.
nlohmann::ordered_json histogram_to_json(const MatchHistogram& h, const Meta& meta);
MatchHistogram histogram_from_json(const nlohmann::json& j);

nlohmann::ordered_json trajectory_to_json(const Trajectory& traj, const Meta& meta);
Trajectory trajectory_from_json(const nlohmann::json& j);

nlohmann::ordered_json reference_curve_to_json(const std::vector<double>& pmf, const Meta& meta);
std::vector<double> reference_curve_from_json(const nlohmann::json& j);

}  // namespace genepool
