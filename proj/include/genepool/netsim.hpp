#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "genepool/challenge.hpp"
#include "genepool/population.hpp"

namespace genepool {

enum class EndpointRole { Legitimate, RandomAdversary, Clone, StaleCopy };

std::string_view to_string(EndpointRole role);

struct AdversaryKind {
  enum class Variant { RandomGenome, CloneOf, StaleCopy };

  Variant variant = Variant::RandomGenome;
  NodeId victim = 0;             // CloneOf and StaleCopy
  std::uint64_t age_births = 0;  // StaleCopy: how far back the copy was taken

  static AdversaryKind random_genome() { return {Variant::RandomGenome, 0, 0}; }
  static AdversaryKind clone_of(NodeId victim) { return {Variant::CloneOf, victim, 0}; }
  static AdversaryKind stale_copy(NodeId victim, std::uint64_t age_births) {
    return {Variant::StaleCopy, victim, age_births};
  }
};

struct Endpoint {
  NodeId id = 0;
  GeneSequence genome;
  EndpointRole role = EndpointRole::Legitimate;
};

// One wire transmission. Bodies hold only the challenge/response wire forms;
// raw gene elements of any endpoint never appear in a trace.
struct Message {
  std::uint64_t seq = 0;
  NodeId from = 0;
  NodeId to = 0;
  std::string kind;  // "challenge" or "response"
  nlohmann::ordered_json body;
};

struct RecognitionParams {
  std::uint32_t index_count = 4;
  std::uint32_t n_decoys = 9;
  double p_rel = 1.0 / 3.0;
  std::uint64_t budget = 456976;
  std::uint64_t work_threshold = 456976;
  std::string hash_name = "sha256";
};

struct ProtocolTranscript {
  NodeId initiator = 0;
  NodeId responder = 0;
  Challenge challenge;  // verifier-side record, including the true digest slot
  ChallengeResponse response;
  Verdict verdict = Verdict::Inconclusive;
};

struct CommitteeResult {
  NodeId suspect = 0;
  std::vector<NodeId> committee;
  std::vector<Verdict> votes;               // one per member, committee order
  std::vector<std::uint64_t> works;         // candidates tested per member
  Verdict consensus = Verdict::Inconclusive;
};

// Deterministic in-memory host for recognition protocols: endpoints mirror a
// population's nodes, adversaries can be injected, and every transmission is
// appended to a FIFO trace. Single writer.
class SimNetwork {
 public:
  // One endpoint per living node. The population must outlive the network;
  // stale-copy injection additionally needs its history enabled.
  static SimNetwork spawn(const Population& pop, std::uint64_t seed);

  // Returns the new endpoint's id. Throws when a referenced victim is
  // missing, or when stale history is unavailable.
  NodeId inject_adversary(const AdversaryKind& kind, Rng& rng);

  const std::vector<Endpoint>& endpoints() const { return endpoints_; }
  const Endpoint* find(NodeId id) const;
  std::vector<NodeId> ids_with_role(EndpointRole role) const;

  // Full challenge/response exchange across the simulated wire. The
  // initiator issues the challenge; the responder answers from its own
  // genome; the initiator's verdict uses params.work_threshold.
  ProtocolTranscript run_pairwise_recognition(NodeId initiator, NodeId responder,
                                              const RecognitionParams& params);

  // Pairs of endpoints whose match count reaches the threshold, each pair
  // with the smaller id first, ordered by endpoint position.
  std::vector<std::pair<NodeId, NodeId>> clone_detection(
      std::uint32_t similarity_threshold) const;

  // Every committee member challenges the suspect. Consensus is alien when
  // the alien-vote fraction reaches the quorum, else relative when the
  // relative-vote fraction does, else inconclusive (alien checked first, so
  // an exact split at quorum 1/2 resolves to alien).
  CommitteeResult collaborative_check(NodeId suspect, const std::vector<NodeId>& committee,
                                      const RecognitionParams& params, double quorum = 0.5);

  const std::vector<Message>& trace() const { return trace_; }
  std::string trace_to_json_lines() const;

  Rng& rng() { return rng_; }

 private:
  explicit SimNetwork(const Population& pop, std::uint64_t seed);
  void transmit(NodeId from, NodeId to, std::string kind, nlohmann::ordered_json body);

  const Population* pop_;
  Rng rng_;
  std::vector<Endpoint> endpoints_;
  std::vector<Message> trace_;
  std::uint64_t next_seq_ = 0;
  NodeId next_endpoint_id_ = 0;
};

// Member-level aggregation over committee outcomes: rates of committee-level
// detection plus per-vote work-count pools keyed by verdict.
struct DetectionMetrics {
  std::uint64_t adversary_checks = 0;
  std::uint64_t adversary_alien_consensus = 0;
  std::uint64_t legitimate_checks = 0;
  std::uint64_t legitimate_alien_consensus = 0;
  double tpr = 0.0;  // adversary_alien_consensus / adversary_checks
  double fpr = 0.0;  // legitimate_alien_consensus / legitimate_checks
  double member_tpr = 0.0;  // alien votes over adversary member trials
  double member_fpr = 0.0;  // alien votes over legitimate member trials
  std::vector<std::uint64_t> relative_work;
  std::vector<std::uint64_t> alien_work;
  std::vector<std::uint64_t> inconclusive_work;
};

DetectionMetrics metrics(const std::vector<CommitteeResult>& adversary_checks,
                         const std::vector<CommitteeResult>& legitimate_checks);

struct ScenarioConfig {
  PopulationParams population;
  std::uint64_t births = 10000;
  std::uint64_t network_seed = 1;
  std::uint32_t random_adversaries = 20;
  std::uint32_t clones = 20;
  std::uint32_t stale_copies = 0;
  std::uint64_t stale_age = 0;
  std::uint32_t index_count = 4;
  std::uint32_t n_decoys = 9;
  std::uint64_t budget = 456976;
  std::uint32_t committee_size = 5;
  double quorum = 0.5;
  std::uint32_t calibration_trials = 100;
  std::uint32_t legitimate_checks = 20;
  std::string hash_name = "sha256";

  // The bundled scenario: 100-node/10-parent pool, 20 random adversaries,
  // 20 clones, thresholds calibrated per run.
  static ScenarioConfig bundled_default();

  // Strict: unknown keys are rejected. Throws std::invalid_argument.
  static ScenarioConfig from_json(const nlohmann::json& j);
  nlohmann::ordered_json to_json() const;
  void validate() const;
};

struct ScenarioResult {
  ScenarioConfig config;

  // Calibration outputs.
  double p_rel_hat = 0.0;
  std::uint32_t max_legitimate_match = 0;
  std::uint32_t clone_threshold = 0;
  std::uint64_t work_threshold = 0;
  std::vector<std::uint64_t> calibration_work;  // true-digest finds, trial order

  std::vector<CommitteeResult> adversary_checks;  // random-genome suspects
  std::vector<CommitteeResult> stale_checks;
  std::vector<CommitteeResult> legitimate_check_results;
  std::vector<std::pair<NodeId, NodeId>> clone_flags;
  std::map<NodeId, NodeId> clone_victims;  // clone endpoint id -> victim id
  bool all_clones_flagged = true;

  DetectionMetrics detection;

  // Full message trace as JSON lines. Not part of report_to_json: response
  // bodies carry wall-clock timings, so the trace is not run-stable.
  std::string trace_jsonl;
};

// Runs the scenario end to end: evolve the pool, spawn the network,
// calibrate thresholds from legitimate behaviour, inject adversaries, run
// committee checks and clone detection, aggregate. Deterministic in the
// config's seeds.
ScenarioResult run_scenario(const ScenarioConfig& config);

// Canonical report document; byte-identical across runs with equal seeds.
nlohmann::ordered_json report_to_json(const ScenarioResult& result);

}  // namespace genepool
