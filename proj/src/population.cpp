#include "genepool/population.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace genepool {

void PopulationParams::validate() const {
  genome.validate();
  if (max_size < 2) throw std::invalid_argument("PopulationParams: max_size must be >= 2");
  if (parent_count < 2)
    throw std::invalid_argument("PopulationParams: parent_count must be >= 2");
  if (parent_count > max_size)
    throw std::invalid_argument("PopulationParams: parent_count must not exceed max_size");
}

Population::Population(const PopulationParams& params)
    : params_(params), rng_(params.seed) {}

Population Population::bootstrap(const PopulationParams& params) {
  params.validate();
  Population pop(params);
  for (int i = 0; i < 2; ++i) {
    Node n;
    n.id = pop.next_id_++;
    n.genome = random_genome(params.genome, pop.rng_);
    n.birth_time = 0;
    n.parent_eligible = true;
    pop.nodes_.push_back(std::move(n));
  }
  return pop;
}

BirthDeathEvent Population::step() {
  std::vector<std::size_t> eligible;
  eligible.reserve(params_.parent_count);
  for (std::size_t i = 0; i < nodes_.size(); ++i)
    if (nodes_[i].parent_eligible) eligible.push_back(i);
  if (eligible.size() < 2)
    throw std::logic_error("Population::step: fewer than two eligible parents");

  const auto [ia, ib] = rng_.distinct_pair(eligible.size());
  const Node& pa = nodes_[eligible[ia]];
  const Node& pb = nodes_[eligible[ib]];

  BirthDeathEvent ev;
  ev.parent_a = pa.id;
  ev.parent_b = pb.id;

  Node child;
  child.genome = reproduce(pa.genome, pb.genome, params_.genome, rng_);
  ++clock_;
  child.id = next_id_++;
  child.birth_time = clock_;
  child.parent_eligible = false;
  ev.clock = clock_;
  ev.child = child.id;
  nodes_.push_back(std::move(child));

  if (nodes_.size() > params_.max_size) {
    const auto victim = static_cast<std::size_t>(rng_.index(nodes_.size()));
    ev.removed = nodes_[victim].id;
    nodes_.erase(nodes_.begin() + static_cast<std::ptrdiff_t>(victim));
  }

  repair_eligibility();
  events_.push_back(ev);
  record_history_if_due();
  return ev;
}

void Population::repair_eligibility() {
  const std::size_t target = std::min<std::size_t>(params_.parent_count, nodes_.size());
  std::size_t current = 0;
  for (const Node& n : nodes_)
    if (n.parent_eligible) ++current;
  while (current < target) {
    Node* youngest = nullptr;
    for (Node& n : nodes_) {
      if (n.parent_eligible) continue;
      if (!youngest || n.birth_time > youngest->birth_time ||
          (n.birth_time == youngest->birth_time && n.id > youngest->id))
        youngest = &n;
    }
    youngest->parent_eligible = true;  // target <= size, so one always exists
    ++current;
  }
}

Trajectory Population::run(std::uint64_t births, std::uint64_t snapshot_every) {
  if (snapshot_every == 0)
    throw std::invalid_argument("Population::run: snapshot_every must be positive");
  Trajectory traj;
  traj.push_back(snapshot_stats());
  for (std::uint64_t i = 1; i <= births; ++i) {
    step();
    if (i % snapshot_every == 0) traj.push_back(snapshot_stats());
  }
  return traj;
}

std::vector<NodeId> Population::eligible_parents() const {
  std::vector<NodeId> ids;
  for (const Node& n : nodes_)
    if (n.parent_eligible) ids.push_back(n.id);
  return ids;
}

const Node* Population::find(NodeId id) const {
  for (const Node& n : nodes_)
    if (n.id == id) return &n;
  return nullptr;
}

SnapshotStats Population::snapshot_stats() const {
  SnapshotStats s;
  s.clock = clock_;
  s.population_size = static_cast<std::uint32_t>(nodes_.size());
  s.min_match = std::numeric_limits<std::uint32_t>::max();

  double sum = 0.0;
  std::uint64_t pairs = 0;
  auto accumulate = [&](const Node& a, const Node& b) {
    const std::uint32_t m = match_count(a.genome, b.genome);
    sum += m;
    ++pairs;
    s.min_match = std::min(s.min_match, m);
    s.max_match = std::max(s.max_match, m);
  };

  if (nodes_.size() <= kFullPairLimit) {
    for (std::size_t i = 0; i < nodes_.size(); ++i)
      for (std::size_t j = i + 1; j < nodes_.size(); ++j) accumulate(nodes_[i], nodes_[j]);
  } else {
    Rng srng = rng_.derive(0x70616972ULL + clock_);
    for (std::uint32_t k = 0; k < kPairSampleBudget; ++k) {
      const auto [i, j] = srng.distinct_pair(nodes_.size());
      accumulate(nodes_[i], nodes_[j]);
    }
  }
  s.mean_match = pairs ? sum / static_cast<double>(pairs) : 0.0;
  if (pairs == 0) s.min_match = 0;
  return s;
}

double Population::mean_match_among(const std::vector<NodeId>& ids) const {
  if (ids.size() < 2)
    throw std::invalid_argument("mean_match_among: need at least two ids");
  std::vector<const Node*> members;
  members.reserve(ids.size());
  for (NodeId id : ids) {
    const Node* n = find(id);
    if (!n) throw std::invalid_argument("mean_match_among: unknown node id");
    members.push_back(n);
  }
  double sum = 0.0;
  std::uint64_t pairs = 0;
  for (std::size_t i = 0; i < members.size(); ++i)
    for (std::size_t j = i + 1; j < members.size(); ++j) {
      sum += match_count(members[i]->genome, members[j]->genome);
      ++pairs;
    }
  return sum / static_cast<double>(pairs);
}

void Population::enable_history(std::uint64_t every) {
  if (every == 0) throw std::invalid_argument("enable_history: interval must be positive");
  history_every_ = every;
  HistorySnapshot snap;
  snap.clock = clock_;
  for (const Node& n : nodes_) snap.members.emplace_back(n.id, n.genome);
  history_.push_back(std::move(snap));
}

void Population::record_history_if_due() {
  if (history_every_ == 0 || clock_ % history_every_ != 0) return;
  HistorySnapshot snap;
  snap.clock = clock_;
  for (const Node& n : nodes_) snap.members.emplace_back(n.id, n.genome);
  history_.push_back(std::move(snap));
}

const GeneSequence& Population::genome_as_of(NodeId id, std::uint64_t age_births) const {
  if (age_births > clock_)
    throw std::invalid_argument("genome_as_of: reference time precedes bootstrap");
  const std::uint64_t t_ref = clock_ - age_births;

  if (const Node* n = find(id); n && n->birth_time <= t_ref) return n->genome;

  const HistorySnapshot* best = nullptr;
  for (const HistorySnapshot& snap : history_) {
    if (snap.clock > t_ref) break;  // history is clock-ordered
    best = &snap;
  }
  if (!best) throw std::invalid_argument("genome_as_of: no history at the reference time");
  for (const auto& [mid, genome] : best->members)
    if (mid == id) return genome;
  throw std::invalid_argument("genome_as_of: node not alive at the reference time");
}

}  // namespace genepool
