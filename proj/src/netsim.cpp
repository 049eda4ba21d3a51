#include "genepool/netsim.hpp"

#include "genepool/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace genepool {

namespace {

// k distinct positions in [0, n), ascending.
std::vector<std::uint32_t> draw_distinct_indices(std::uint32_t k, std::uint32_t n, Rng& rng) {
  std::vector<std::uint32_t> out;
  out.reserve(k);
  while (out.size() < k) {
    const auto candidate = static_cast<std::uint32_t>(rng.index(n));
    if (std::find(out.begin(), out.end(), candidate) == out.end()) out.push_back(candidate);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<NodeId> committee_for(NodeId suspect, const std::vector<NodeId>& legit,
                                  std::uint32_t size, Rng& rng) {
  std::vector<NodeId> pool = legit;
  rng.shuffle(pool);
  std::vector<NodeId> committee;
  committee.reserve(size);
  for (NodeId id : pool) {
    if (id == suspect) continue;
    committee.push_back(id);
    if (committee.size() == size) break;
  }
  if (committee.size() < size) throw std::invalid_argument("committee: not enough members");
  return committee;
}

nlohmann::ordered_json committee_to_json(const CommitteeResult& r) {
  nlohmann::ordered_json votes = nlohmann::ordered_json::array();
  for (Verdict v : r.votes) votes.push_back(std::string(to_string(v)));
  return nlohmann::ordered_json{{"suspect", r.suspect},
                                {"committee", r.committee},
                                {"votes", votes},
                                {"works", r.works},
                                {"consensus", std::string(to_string(r.consensus))}};
}

template <typename T>
void read_field(const nlohmann::json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> known,
                         const char* where) {
  for (const auto& [key, value] : j.items()) {
    if (std::find_if(known.begin(), known.end(),
                     [&](const char* k) { return key == k; }) == known.end()) {
      throw std::invalid_argument(std::string(where) + ": unknown key '" + key + "'");
    }
  }
}

}  // namespace

std::string_view to_string(EndpointRole role) {
  switch (role) {
    case EndpointRole::Legitimate: return "legitimate";
    case EndpointRole::RandomAdversary: return "random_adversary";
    case EndpointRole::Clone: return "clone";
    case EndpointRole::StaleCopy: return "stale_copy";
  }
  throw std::logic_error("unreachable");
}

SimNetwork::SimNetwork(const Population& pop, std::uint64_t seed)
    : pop_(&pop), rng_(seed), next_endpoint_id_(pop.next_node_id()) {
  endpoints_.reserve(pop.nodes().size());
  for (const Node& node : pop.nodes()) {
    endpoints_.push_back({node.id, node.genome, EndpointRole::Legitimate});
  }
}

SimNetwork SimNetwork::spawn(const Population& pop, std::uint64_t seed) {
  return SimNetwork(pop, seed);
}

NodeId SimNetwork::inject_adversary(const AdversaryKind& kind, Rng& rng) {
  Endpoint endpoint;
  endpoint.id = next_endpoint_id_++;
  switch (kind.variant) {
    case AdversaryKind::Variant::RandomGenome:
      endpoint.genome = random_genome(pop_->params().genome, rng);
      endpoint.role = EndpointRole::RandomAdversary;
      break;
    case AdversaryKind::Variant::CloneOf: {
      const Endpoint* victim = find(kind.victim);
      if (victim == nullptr) throw std::invalid_argument("inject_adversary: victim not found");
      endpoint.genome = victim->genome;
      endpoint.role = EndpointRole::Clone;
      break;
    }
    case AdversaryKind::Variant::StaleCopy:
      endpoint.genome = pop_->genome_as_of(kind.victim, kind.age_births);
      endpoint.role = EndpointRole::StaleCopy;
      break;
  }
  endpoints_.push_back(std::move(endpoint));
  return endpoints_.back().id;
}

const Endpoint* SimNetwork::find(NodeId id) const {
  for (const Endpoint& e : endpoints_) {
    if (e.id == id) return &e;
  }
  return nullptr;
}

std::vector<NodeId> SimNetwork::ids_with_role(EndpointRole role) const {
  std::vector<NodeId> out;
  for (const Endpoint& e : endpoints_) {
    if (e.role == role) out.push_back(e.id);
  }
  return out;
}

void SimNetwork::transmit(NodeId from, NodeId to, std::string kind,
                          nlohmann::ordered_json body) {
  trace_.push_back({next_seq_++, from, to, std::move(kind), std::move(body)});
}

ProtocolTranscript SimNetwork::run_pairwise_recognition(NodeId initiator, NodeId responder,
                                                        const RecognitionParams& params) {
  if (initiator == responder) {
    throw std::invalid_argument("run_pairwise_recognition: endpoints must differ");
  }
  const Endpoint* init = find(initiator);
  const Endpoint* resp = find(responder);
  if (init == nullptr || resp == nullptr) {
    throw std::invalid_argument("run_pairwise_recognition: unknown endpoint");
  }
  const GenomeParams& genome = pop_->params().genome;
  const HashFunction hash = HashFunction::by_name(params.hash_name);

  const auto indices = draw_distinct_indices(params.index_count, genome.length, rng_);
  ProtocolTranscript t;
  t.initiator = initiator;
  t.responder = responder;
  t.challenge =
      issue_challenge(init->genome, indices, params.n_decoys, genome.alphabet, hash, rng_);
  transmit(initiator, responder, "challenge", challenge_to_json(t.challenge));

  const PosteriorModel model{params.p_rel, genome.alphabet.size()};
  t.response = respond(resp->genome, t.challenge, model, params.budget);
  transmit(responder, initiator, "response", response_to_json(t.response));

  t.verdict = verdict(t.response, t.challenge, params.work_threshold);
  return t;
}

std::vector<std::pair<NodeId, NodeId>> SimNetwork::clone_detection(
    std::uint32_t similarity_threshold) const {
  std::vector<std::pair<NodeId, NodeId>> flagged;
  for (std::size_t i = 0; i < endpoints_.size(); ++i) {
    for (std::size_t j = i + 1; j < endpoints_.size(); ++j) {
      if (match_count(endpoints_[i].genome, endpoints_[j].genome) >= similarity_threshold) {
        const NodeId a = endpoints_[i].id;
        const NodeId b = endpoints_[j].id;
        flagged.emplace_back(std::min(a, b), std::max(a, b));
      }
    }
  }
  return flagged;
}

CommitteeResult SimNetwork::collaborative_check(NodeId suspect,
                                                const std::vector<NodeId>& committee,
                                                const RecognitionParams& params,
                                                double quorum) {
  if (committee.empty()) throw std::invalid_argument("collaborative_check: empty committee");
  if (std::find(committee.begin(), committee.end(), suspect) != committee.end()) {
    throw std::invalid_argument("collaborative_check: suspect cannot vote");
  }
  CommitteeResult result;
  result.suspect = suspect;
  result.committee = committee;
  std::size_t alien = 0;
  std::size_t relative = 0;
  for (NodeId member : committee) {
    const ProtocolTranscript t = run_pairwise_recognition(member, suspect, params);
    result.votes.push_back(t.verdict);
    result.works.push_back(t.response.candidates_tested);
    if (t.verdict == Verdict::Alien) ++alien;
    if (t.verdict == Verdict::Relative) ++relative;
  }
  const auto size = static_cast<double>(committee.size());
  if (static_cast<double>(alien) / size >= quorum) {
    result.consensus = Verdict::Alien;
  } else if (static_cast<double>(relative) / size >= quorum) {
    result.consensus = Verdict::Relative;
  } else {
    result.consensus = Verdict::Inconclusive;
  }
  return result;
}

std::string SimNetwork::trace_to_json_lines() const {
  std::string out;
  for (const Message& m : trace_) {
    nlohmann::ordered_json line{
        {"seq", m.seq}, {"from", m.from}, {"to", m.to}, {"kind", m.kind}, {"body", m.body}};
    out += line.dump();
    out += '\n';
  }
  return out;
}

DetectionMetrics metrics(const std::vector<CommitteeResult>& adversary_checks,
                         const std::vector<CommitteeResult>& legitimate_checks) {
  DetectionMetrics m;
  std::uint64_t adversary_votes = 0;
  std::uint64_t adversary_alien_votes = 0;
  std::uint64_t legitimate_votes = 0;
  std::uint64_t legitimate_alien_votes = 0;

  auto absorb = [&m](const CommitteeResult& check, std::uint64_t& votes,
                     std::uint64_t& alien_votes) {
    for (std::size_t i = 0; i < check.votes.size(); ++i) {
      ++votes;
      if (check.votes[i] == Verdict::Alien) ++alien_votes;
      switch (check.votes[i]) {
        case Verdict::Relative: m.relative_work.push_back(check.works[i]); break;
        case Verdict::Alien: m.alien_work.push_back(check.works[i]); break;
        case Verdict::Inconclusive: m.inconclusive_work.push_back(check.works[i]); break;
      }
    }
  };

  m.adversary_checks = adversary_checks.size();
  for (const CommitteeResult& check : adversary_checks) {
    if (check.consensus == Verdict::Alien) ++m.adversary_alien_consensus;
    absorb(check, adversary_votes, adversary_alien_votes);
  }
  m.legitimate_checks = legitimate_checks.size();
  for (const CommitteeResult& check : legitimate_checks) {
    if (check.consensus == Verdict::Alien) ++m.legitimate_alien_consensus;
    absorb(check, legitimate_votes, legitimate_alien_votes);
  }

  auto rate = [](std::uint64_t hits, std::uint64_t total) {
    return total == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(total);
  };
  m.tpr = rate(m.adversary_alien_consensus, m.adversary_checks);
  m.fpr = rate(m.legitimate_alien_consensus, m.legitimate_checks);
  m.member_tpr = rate(adversary_alien_votes, adversary_votes);
  m.member_fpr = rate(legitimate_alien_votes, legitimate_votes);
  return m;
}

ScenarioConfig ScenarioConfig::bundled_default() {
  ScenarioConfig config;
  config.population.parent_count = 10;
  config.population.seed = 101;
  config.network_seed = 202;
  return config;
}

void ScenarioConfig::validate() const {
  population.validate();
  if (births == 0) throw std::invalid_argument("scenario: births must be positive");
  if (index_count == 0 || index_count > population.genome.length) {
    throw std::invalid_argument("scenario: index_count must be in [1, genome length]");
  }
  if (budget == 0) throw std::invalid_argument("scenario: budget must be positive");
  if (committee_size == 0) throw std::invalid_argument("scenario: committee_size must be positive");
  if (committee_size + 1 > population.max_size) {
    throw std::invalid_argument("scenario: committee larger than the pool allows");
  }
  if (!(quorum > 0.0 && quorum <= 1.0)) {
    throw std::invalid_argument("scenario: quorum must lie in (0, 1]");
  }
  if (calibration_trials == 0) {
    throw std::invalid_argument("scenario: calibration_trials must be positive");
  }
  HashFunction::by_name(hash_name);
}

ScenarioConfig ScenarioConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw std::invalid_argument("scenario config: expected an object");
  reject_unknown_keys(j,
                      {"population", "births", "network_seed", "random_adversaries", "clones",
                       "stale_copies", "stale_age", "index_count", "n_decoys", "budget",
                       "committee_size", "quorum", "calibration_trials", "legitimate_checks",
                       "hash_name"},
                      "scenario config");
  ScenarioConfig config = bundled_default();
  if (auto it = j.find("population"); it != j.end()) {
    const nlohmann::json& p = *it;
    if (!p.is_object()) throw std::invalid_argument("scenario config: population must be an object");
    reject_unknown_keys(
        p, {"length", "alphabet", "p_inherit", "p_mutate", "max_size", "parent_count", "seed"},
        "scenario config population");
    read_field(p, "length", config.population.genome.length);
    if (auto a = p.find("alphabet"); a != p.end()) {
      config.population.genome.alphabet = Alphabet{a->get<std::uint32_t>()};
    }
    read_field(p, "p_inherit", config.population.genome.p_inherit);
    read_field(p, "p_mutate", config.population.genome.p_mutate);
    read_field(p, "max_size", config.population.max_size);
    read_field(p, "parent_count", config.population.parent_count);
    read_field(p, "seed", config.population.seed);
  }
  read_field(j, "births", config.births);
  read_field(j, "network_seed", config.network_seed);
  read_field(j, "random_adversaries", config.random_adversaries);
  read_field(j, "clones", config.clones);
  read_field(j, "stale_copies", config.stale_copies);
  read_field(j, "stale_age", config.stale_age);
  read_field(j, "index_count", config.index_count);
  read_field(j, "n_decoys", config.n_decoys);
  read_field(j, "budget", config.budget);
  read_field(j, "committee_size", config.committee_size);
  read_field(j, "quorum", config.quorum);
  read_field(j, "calibration_trials", config.calibration_trials);
  read_field(j, "legitimate_checks", config.legitimate_checks);
  read_field(j, "hash_name", config.hash_name);
  config.validate();
  return config;
}

nlohmann::ordered_json ScenarioConfig::to_json() const {
  return nlohmann::ordered_json{
      {"population",
       {{"length", population.genome.length},
        {"alphabet", population.genome.alphabet.size()},
        {"p_inherit", population.genome.p_inherit},
        {"p_mutate", population.genome.p_mutate},
        {"max_size", population.max_size},
        {"parent_count", population.parent_count},
        {"seed", population.seed}}},
      {"births", births},
      {"network_seed", network_seed},
      {"random_adversaries", random_adversaries},
      {"clones", clones},
      {"stale_copies", stale_copies},
      {"stale_age", stale_age},
      {"index_count", index_count},
      {"n_decoys", n_decoys},
      {"budget", budget},
      {"committee_size", committee_size},
      {"quorum", quorum},
      {"calibration_trials", calibration_trials},
      {"legitimate_checks", legitimate_checks},
      {"hash_name", hash_name}};
}

ScenarioResult run_scenario(const ScenarioConfig& config) {
  config.validate();
  ScenarioResult result;
  result.config = config;

  Population pop = Population::bootstrap(config.population);
  if (config.stale_copies > 0) {
    pop.enable_history(std::max<std::uint64_t>(1, config.population.max_size));
  }
  pop.run(config.births, config.births);

  const std::uint32_t n = config.population.genome.length;
  const std::uint32_t I = config.population.genome.alphabet.size();

  // Thresholds come from legitimate behaviour only, before any adversary
  // exists: the match ceiling among real relatives sets the clone line, the
  // p99 of true-digest search work sets the work line.
  const MatchHistogram hist = pairwise_match_distribution(pop, kPairSampleBudget);
  const double mean_rate = hist.mean() / static_cast<double>(n);
  result.p_rel_hat = std::clamp(mean_rate, 1.0 / static_cast<double>(I), 1.0);
  result.max_legitimate_match = hist.max_match();
  const double sigma = std::sqrt(static_cast<double>(n) * mean_rate * (1.0 - mean_rate));
  const auto margin = static_cast<std::uint32_t>(std::ceil(3.0 * sigma));
  result.clone_threshold = std::min(n - 1, result.max_legitimate_match + margin);

  SimNetwork net = SimNetwork::spawn(pop, config.network_seed);
  const std::vector<NodeId> legit = net.ids_with_role(EndpointRole::Legitimate);
  if (legit.size() < 2) throw std::invalid_argument("scenario: need at least two nodes");

  RecognitionParams calibration;
  calibration.index_count = config.index_count;
  calibration.n_decoys = config.n_decoys;
  calibration.p_rel = result.p_rel_hat;
  calibration.budget = config.budget;
  calibration.work_threshold = config.budget;
  calibration.hash_name = config.hash_name;
  for (std::uint32_t trial = 0; trial < config.calibration_trials; ++trial) {
    const auto [i, j] = net.rng().distinct_pair(legit.size());
    const ProtocolTranscript t =
        net.run_pairwise_recognition(legit[i], legit[j], calibration);
    if (t.verdict == Verdict::Relative) {
      result.calibration_work.push_back(t.response.candidates_tested);
    }
  }
  if (result.calibration_work.empty()) {
    result.work_threshold = config.budget;
  } else {
    std::vector<std::uint64_t> sorted = result.calibration_work;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t rank = static_cast<std::size_t>(
        std::ceil(0.99 * static_cast<double>(sorted.size())));
    result.work_threshold = sorted[rank - 1];
  }

  std::vector<NodeId> random_ids;
  for (std::uint32_t i = 0; i < config.random_adversaries; ++i) {
    random_ids.push_back(net.inject_adversary(AdversaryKind::random_genome(), net.rng()));
  }
  std::vector<NodeId> victims = legit;
  net.rng().shuffle(victims);
  for (std::uint32_t i = 0; i < config.clones; ++i) {
    const NodeId victim = victims[i % victims.size()];
    const NodeId clone = net.inject_adversary(AdversaryKind::clone_of(victim), net.rng());
    result.clone_victims[clone] = victim;
  }
  std::vector<NodeId> stale_ids;
  for (std::uint32_t i = 0; i < config.stale_copies; ++i) {
    // Victims come from the membership roster as of the reference time, so a
    // copy can outlive its original.
    const std::uint64_t t_ref =
        config.stale_age >= pop.clock() ? 0 : pop.clock() - config.stale_age;
    const HistorySnapshot* snap = nullptr;
    for (const HistorySnapshot& candidate : pop.history()) {
      if (candidate.clock <= t_ref) snap = &candidate;
    }
    if (snap == nullptr || snap->members.empty()) {
      throw std::invalid_argument("scenario: no history at the stale reference time");
    }
    const NodeId victim = snap->members[net.rng().index(snap->members.size())].first;
    const std::uint64_t age = pop.clock() - snap->clock;
    stale_ids.push_back(net.inject_adversary(AdversaryKind::stale_copy(victim, age), net.rng()));
  }

  RecognitionParams check = calibration;
  check.work_threshold = result.work_threshold;
  for (NodeId suspect : random_ids) {
    result.adversary_checks.push_back(net.collaborative_check(
        suspect, committee_for(suspect, legit, config.committee_size, net.rng()), check,
        config.quorum));
  }
  for (NodeId suspect : stale_ids) {
    result.stale_checks.push_back(net.collaborative_check(
        suspect, committee_for(suspect, legit, config.committee_size, net.rng()), check,
        config.quorum));
  }
  for (std::uint32_t i = 0; i < config.legitimate_checks; ++i) {
    const NodeId suspect = legit[net.rng().index(legit.size())];
    result.legitimate_check_results.push_back(net.collaborative_check(
        suspect, committee_for(suspect, legit, config.committee_size, net.rng()), check,
        config.quorum));
  }

  result.clone_flags = net.clone_detection(result.clone_threshold);
  for (const auto& [clone, victim] : result.clone_victims) {
    const auto pair = std::make_pair(std::min(clone, victim), std::max(clone, victim));
    if (std::find(result.clone_flags.begin(), result.clone_flags.end(), pair) ==
        result.clone_flags.end()) {
      result.all_clones_flagged = false;
    }
  }

  result.detection = metrics(result.adversary_checks, result.legitimate_check_results);
  result.trace_jsonl = net.trace_to_json_lines();
  return result;
}

nlohmann::ordered_json report_to_json(const ScenarioResult& result) {
  nlohmann::ordered_json flags = nlohmann::ordered_json::array();
  for (const auto& [a, b] : result.clone_flags) flags.push_back({a, b});
  nlohmann::ordered_json victims = nlohmann::ordered_json::array();
  for (const auto& [clone, victim] : result.clone_victims) victims.push_back({clone, victim});

  auto committees = [](const std::vector<CommitteeResult>& checks) {
    nlohmann::ordered_json out = nlohmann::ordered_json::array();
    for (const CommitteeResult& check : checks) out.push_back(committee_to_json(check));
    return out;
  };

  const DetectionMetrics& d = result.detection;
  return nlohmann::ordered_json{
      {"config", result.config.to_json()},
      {"calibration",
       {{"p_rel_hat", result.p_rel_hat},
        {"max_legitimate_match", result.max_legitimate_match},
        {"clone_threshold", result.clone_threshold},
        {"work_threshold", result.work_threshold},
        {"work", result.calibration_work}}},
      {"clone_detection",
       {{"flags", flags}, {"victims", victims}, {"all_clones_flagged", result.all_clones_flagged}}},
      {"committee_checks",
       {{"adversary", committees(result.adversary_checks)},
        {"stale", committees(result.stale_checks)},
        {"legitimate", committees(result.legitimate_check_results)}}},
      {"detection",
       {{"adversary_checks", d.adversary_checks},
        {"adversary_alien_consensus", d.adversary_alien_consensus},
        {"legitimate_checks", d.legitimate_checks},
        {"legitimate_alien_consensus", d.legitimate_alien_consensus},
        {"tpr", d.tpr},
        {"fpr", d.fpr},
        {"member_tpr", d.member_tpr},
        {"member_fpr", d.member_fpr},
        {"work",
         {{"relative", d.relative_work},
          {"alien", d.alien_work},
          {"inconclusive", d.inconclusive_work}}}}}};
}

}  // namespace genepool
