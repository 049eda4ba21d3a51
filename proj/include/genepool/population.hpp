#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "genepool/genome.hpp"
#include "genepool/rng.hpp"

namespace genepool {

using NodeId = std::uint64_t;

struct Node {
  NodeId id = 0;
  GeneSequence genome;
  std::uint64_t birth_time = 0;
  bool parent_eligible = false;
};

struct PopulationParams {
  GenomeParams genome;
  std::uint32_t max_size = 100;
  std::uint32_t parent_count = 100;
  std::uint64_t seed = 0;

  // Throws std::invalid_argument on violation.
  void validate() const;
};

struct BirthDeathEvent {
  std::uint64_t clock = 0;  // birth count after this event
  NodeId child = 0;
  NodeId parent_a = 0;
  NodeId parent_b = 0;
  std::optional<NodeId> removed;
};

struct SnapshotStats {
  std::uint64_t clock = 0;
  double mean_match = 0.0;
  std::uint32_t min_match = 0;
  std::uint32_t max_match = 0;
  std::uint32_t population_size = 0;

  bool operator==(const SnapshotStats&) const = default;
};

using Trajectory = std::vector<SnapshotStats>;

// Pairwise match statistics at one instant: every distinct pair when the
// pool holds at most kFullPairLimit nodes, otherwise kPairSampleBudget pairs
// of distinct nodes drawn with an rng derived from (population seed, clock),
// so sampling never disturbs the evolution stream.
inline constexpr std::uint32_t kFullPairLimit = 200;
inline constexpr std::uint32_t kPairSampleBudget = 10000;

// Periodic membership snapshot kept for stale-copy adversaries.
struct HistorySnapshot {
  std::uint64_t clock = 0;
  std::vector<std::pair<NodeId, GeneSequence>> members;
};

// The evolving gene pool. Single writer: step()/run() mutate in place.
class Population {
 public:
  // Two founder nodes with independent uniform genomes, both eligible.
  static Population bootstrap(const PopulationParams& params);

  // One birth: two distinct parents uniform over the eligible set produce a
  // child; if the pool then exceeds max_size a uniformly random node
  // (newborn included) dies; eligibility is repaired to exactly
  // min(parent_count, size) by promoting the youngest non-eligible nodes.
  // Throws std::logic_error with fewer than two eligible parents.
  BirthDeathEvent step();

  // Applies step() `births` times. Snapshots the initial state, then every
  // snapshot_every births of this run. Throws if snapshot_every is zero.
  Trajectory run(std::uint64_t births, std::uint64_t snapshot_every);

  const std::vector<Node>& nodes() const { return nodes_; }
  const PopulationParams& params() const { return params_; }
  std::uint64_t clock() const { return clock_; }

  // First id never used by any node, living or dead.
  NodeId next_node_id() const { return next_id_; }

  std::vector<NodeId> eligible_parents() const;

  const Node* find(NodeId id) const;

  // Pairwise match statistics over the whole pool at the current clock.
  SnapshotStats snapshot_stats() const;

  // Mean pairwise match over all distinct pairs within the given id set.
  double mean_match_among(const std::vector<NodeId>& ids) const;

  // Event log of every birth since bootstrap.
  const std::vector<BirthDeathEvent>& event_log() const { return events_; }

  // Start recording membership snapshots every `every` births (and one
  // immediately). Required before stale-copy lookups.
  void enable_history(std::uint64_t every);
  bool history_enabled() const { return history_every_ != 0; }
  const std::vector<HistorySnapshot>& history() const { return history_; }

  // Genome of node `id` as of `age_births` before the current clock: the
  // node's own (immutable) genome if it was already alive then and still is,
  // otherwise looked up in the newest history snapshot at or before the
  // reference time. Throws std::invalid_argument when the reference time
  // precedes all history or the node was not alive at it.
  const GeneSequence& genome_as_of(NodeId id, std::uint64_t age_births) const;

 private:
  Population(const PopulationParams& params);
  void repair_eligibility();
  void record_history_if_due();

  PopulationParams params_;
  Rng rng_;
  std::vector<Node> nodes_;  // insertion order; erase preserves order
  std::uint64_t clock_ = 0;
  NodeId next_id_ = 0;
  std::vector<BirthDeathEvent> events_;
  std::uint64_t history_every_ = 0;
  std::vector<HistorySnapshot> history_;
};

}  // namespace genepool
