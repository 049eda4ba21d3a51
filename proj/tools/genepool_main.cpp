// Command-line front end: reproducible experiment runs over the library,
// every output stamped with {seed, resolved config, version} so a run can be
// regenerated from any of its files.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "genepool/challenge.hpp"
#include "genepool/io.hpp"
#include "genepool/keyexchange.hpp"
#include "genepool/netsim.hpp"
#include "genepool/population.hpp"
#include "genepool/stats.hpp"
#include "genepool/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;
using namespace genepool;

namespace {

struct GlobalOptions {
  std::uint64_t seed = 1;
  std::string config_path;
  std::string out_dir;
  std::string format = "csv";
  unsigned jobs = 1;
};

// Replica/trial seeds branch off the base seed; index 0 keeps the base seed
// itself so a single run is transparent about what it used.
std::uint64_t replica_seed(std::uint64_t base, std::uint64_t index) {
  return index == 0 ? base : Rng(base).derive(0x7265706cULL + index).seed();
}

template <typename Fn>
void parallel_for(std::uint64_t count, unsigned jobs, Fn&& fn) {
  if (jobs <= 1 || count <= 1) {
    for (std::uint64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  const unsigned workers = static_cast<unsigned>(
      std::min<std::uint64_t>(jobs, count));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::uint64_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  }
  for (std::thread& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

json load_config_file(const std::string& path) {
  const json j = json::parse(read_file(path));
  if (!j.is_object()) throw std::invalid_argument("config: expected a JSON object");
  return j;
}

void reject_unknown(const json& j, std::initializer_list<const char*> known) {
  for (const auto& [key, value] : j.items()) {
    bool found = false;
    for (const char* k : known) {
      if (key == k) {
        found = true;
        break;
      }
    }
    if (!found) throw std::invalid_argument("config: unknown key '" + key + "'");
  }
}

template <typename T>
void read_key(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) out = it->get<T>();
}

fs::path prepare_out_dir(const GlobalOptions& global) {
  fs::path dir = global.out_dir;
  fs::create_directories(dir);
  return dir;
}

void emit(const fs::path& dir, const std::string& name, const std::string& content) {
  write_file_atomic((dir / name).string(), content);
  std::cout << "wrote " << (dir / name).string() << "\n";
}

std::string dump(const ordered_json& j) { return j.dump(2) + "\n"; }

// ---------------------------------------------------------------- simulate

struct SimulateSettings {
  PopulationParams pop;
  std::uint64_t births = 10000;
  std::uint64_t snapshot_every = 500;
  std::uint64_t pair_budget = 10000;
  std::uint32_t replicas = 1;

  static constexpr std::initializer_list<const char*> kKeys = {
      "seed",      "length",        "alphabet",    "p_inherit", "p_mutate", "max_size",
      "parents",   "births",        "snapshot_every", "pair_budget", "replicas"};

  void apply(const json& j) {
    reject_unknown(j, kKeys);
    read_key(j, "seed", pop.seed);
    read_key(j, "length", pop.genome.length);
    if (auto it = j.find("alphabet"); it != j.end()) {
      pop.genome.alphabet = Alphabet{it->get<std::uint32_t>()};
    }
    read_key(j, "p_inherit", pop.genome.p_inherit);
    read_key(j, "p_mutate", pop.genome.p_mutate);
    read_key(j, "max_size", pop.max_size);
    read_key(j, "parents", pop.parent_count);
    read_key(j, "births", births);
    read_key(j, "snapshot_every", snapshot_every);
    read_key(j, "pair_budget", pair_budget);
    read_key(j, "replicas", replicas);
  }

  ordered_json to_json() const {
    return ordered_json{{"seed", pop.seed},
                        {"length", pop.genome.length},
                        {"alphabet", pop.genome.alphabet.size()},
                        {"p_inherit", pop.genome.p_inherit},
                        {"p_mutate", pop.genome.p_mutate},
                        {"max_size", pop.max_size},
                        {"parents", pop.parent_count},
                        {"births", births},
                        {"snapshot_every", snapshot_every},
                        {"pair_budget", pair_budget},
                        {"replicas", replicas}};
  }

  void validate() const {
    pop.validate();
    if (births == 0) throw std::invalid_argument("config: births must be positive");
    if (snapshot_every == 0) throw std::invalid_argument("config: snapshot_every must be positive");
    if (pair_budget == 0) throw std::invalid_argument("config: pair_budget must be positive");
    if (replicas == 0) throw std::invalid_argument("config: replicas must be positive");
  }
};

std::string events_to_json_lines(const std::vector<BirthDeathEvent>& events) {
  std::string out;
  for (const BirthDeathEvent& e : events) {
    ordered_json line{{"clock", e.clock},
                      {"child", e.child},
                      {"parent_a", e.parent_a},
                      {"parent_b", e.parent_b},
                      {"removed", e.removed ? ordered_json(*e.removed) : ordered_json(nullptr)}};
    out += line.dump();
    out += '\n';
  }
  return out;
}

int run_simulate(const GlobalOptions& global, const SimulateSettings& settings) {
  settings.validate();
  const fs::path dir = prepare_out_dir(global);
  const ordered_json config = settings.to_json();
  const Meta meta{settings.pop.seed, config};
  const std::uint32_t n = settings.pop.genome.length;

  struct ReplicaOutput {
    Trajectory trajectory;
    MatchHistogram histogram;
    std::vector<double> reference;
    std::string events;
  };
  std::vector<ReplicaOutput> outputs(settings.replicas);

  parallel_for(settings.replicas, global.jobs, [&](std::uint64_t r) {
    PopulationParams params = settings.pop;
    params.seed = replica_seed(settings.pop.seed, r);
    Population pop = Population::bootstrap(params);
    ReplicaOutput& out = outputs[r];
    out.trajectory = pop.run(settings.births, settings.snapshot_every);
    out.histogram = pairwise_match_distribution(pop, settings.pair_budget);
    out.reference =
        binomial_reference(n, out.histogram.mean() / static_cast<double>(n));
    out.events = events_to_json_lines(pop.event_log());
  });

  for (std::uint32_t r = 0; r < settings.replicas; ++r) {
    const std::string suffix =
        settings.replicas == 1 ? "" : "_r" + std::to_string(r);
    const ReplicaOutput& out = outputs[r];
    if (global.format == "csv") {
      emit(dir, "trajectory" + suffix + ".csv", trajectory_to_csv(out.trajectory, meta));
      emit(dir, "histogram" + suffix + ".csv", histogram_to_csv(out.histogram, meta));
      emit(dir, "reference" + suffix + ".csv", reference_curve_to_csv(out.reference, meta));
    } else {
      emit(dir, "trajectory" + suffix + ".json", dump(trajectory_to_json(out.trajectory, meta)));
      emit(dir, "histogram" + suffix + ".json", dump(histogram_to_json(out.histogram, meta)));
      emit(dir, "reference" + suffix + ".json",
           dump(reference_curve_to_json(out.reference, meta)));
    }
    emit(dir, "events" + suffix + ".jsonl", out.events);
  }
  return 0;
}

// -------------------------------------------------------------- keyexchange

struct KeyexchangeSettings {
  PopulationParams pop;
  std::uint64_t births = 5000;
  std::string phi_mode = "block";  // "identity" or "block"
  std::uint32_t window = 25;
  std::uint32_t family = 8;
  std::uint32_t trials = 20;
  bool unrelated = false;

  KeyexchangeSettings() { pop.parent_count = 10; }

  static constexpr std::initializer_list<const char*> kKeys = {
      "seed",   "length", "alphabet", "p_inherit", "p_mutate", "max_size",
      "parents", "births", "phi_mode", "window",    "family",   "trials",
      "unrelated"};

  void apply(const json& j) {
    reject_unknown(j, kKeys);
    read_key(j, "seed", pop.seed);
    read_key(j, "length", pop.genome.length);
    if (auto it = j.find("alphabet"); it != j.end()) {
      pop.genome.alphabet = Alphabet{it->get<std::uint32_t>()};
    }
    read_key(j, "p_inherit", pop.genome.p_inherit);
    read_key(j, "p_mutate", pop.genome.p_mutate);
    read_key(j, "max_size", pop.max_size);
    read_key(j, "parents", pop.parent_count);
    read_key(j, "births", births);
    read_key(j, "phi_mode", phi_mode);
    read_key(j, "window", window);
    read_key(j, "family", family);
    read_key(j, "trials", trials);
    read_key(j, "unrelated", unrelated);
  }

  ordered_json to_json() const {
    return ordered_json{{"seed", pop.seed},
                        {"length", pop.genome.length},
                        {"alphabet", pop.genome.alphabet.size()},
                        {"p_inherit", pop.genome.p_inherit},
                        {"p_mutate", pop.genome.p_mutate},
                        {"max_size", pop.max_size},
                        {"parents", pop.parent_count},
                        {"births", births},
                        {"phi_mode", phi_mode},
                        {"window", window},
                        {"family", family},
                        {"trials", trials},
                        {"unrelated", unrelated}};
  }

  void validate() const {
    pop.validate();
    if (births == 0) throw std::invalid_argument("config: births must be positive");
    if (phi_mode != "identity" && phi_mode != "block") {
      throw std::invalid_argument("config: phi_mode must be 'identity' or 'block'");
    }
    if (phi_mode == "block" && window == 0) {
      throw std::invalid_argument("config: window must be positive");
    }
    if (family == 0) throw std::invalid_argument("config: family must be positive");
    if (trials == 0) throw std::invalid_argument("config: trials must be positive");
  }
};

struct KeyexchangeTrial {
  std::uint64_t seed = 0;
  bool verified = false;
  bool exact_table = false;
  bool round_trip = false;
  bool keys_agree = false;
  std::size_t true_index = 0;
  std::size_t winner_index = 0;
  double mi_true = 0.0;
  double mi_best_other = 0.0;
  double entropy_true = 0.0;
  // First trial keeps its artifacts for the table/bundle exports.
  std::string table_percent_csv;
  ordered_json table_json;
  ordered_json bundle_json;
};

int run_keyexchange(const GlobalOptions& global, const KeyexchangeSettings& settings) {
  settings.validate();
  const fs::path dir = prepare_out_dir(global);
  const ordered_json config = settings.to_json();
  const Meta meta{settings.pop.seed, config};
  const Alphabet alphabet = settings.pop.genome.alphabet;
  const HashFunction hash = HashFunction::sha256();

  std::vector<KeyexchangeTrial> trials(settings.trials);
  parallel_for(settings.trials, global.jobs, [&](std::uint64_t t) {
    KeyexchangeTrial& trial = trials[t];
    trial.seed = replica_seed(settings.pop.seed, t);

    PopulationParams params = settings.pop;
    params.seed = trial.seed;
    Population pop = Population::bootstrap(params);
    pop.run(settings.births, settings.births);

    Rng rng = Rng(trial.seed).derive(0x6b786665ULL);
    const auto [xi, yi] = rng.distinct_pair(pop.nodes().size());
    const GeneSequence& genome_x = pop.nodes()[xi].genome;
    const GeneSequence genome_y = settings.unrelated
                                      ? random_genome(params.genome, rng)
                                      : pop.nodes()[yi].genome;

    const CodeTable g = CodeTable::random(alphabet.size(), rng);
    std::vector<IndexPermutation> candidates;
    candidates.reserve(settings.family);
    for (std::uint32_t c = 0; c < settings.family; ++c) {
      candidates.push_back(settings.phi_mode == "identity"
                               ? IndexPermutation::identity(params.genome.length)
                               : IndexPermutation::block_local(params.genome.length,
                                                               settings.window, rng));
    }
    trial.true_index =
        settings.phi_mode == "identity" ? 0 : rng.index(candidates.size());
    const IndexPermutation& phi = candidates[trial.true_index];

    const TransferBundle bundle = encode(genome_x, g, phi, hash);
    const PermutationRecovery recovery = recover_permutation(
        bundle.payload, genome_y, candidates, bundle.verification_digest, hash, alphabet);

    trial.verified = recovery.verified;
    trial.winner_index = recovery.verified ? recovery.winner_index : 0;
    trial.exact_table = recovery.verified && recovery.recovered_table == g;
    if (recovery.verified) {
      trial.round_trip =
          decode(bundle.payload, recovery.recovered_table,
                 candidates[recovery.winner_index]) == genome_x;
      trial.keys_agree = derive_shared_key(g, phi, hash) ==
                         derive_shared_key(recovery.recovered_table,
                                           candidates[recovery.winner_index], hash);
    }
    for (const RankedCandidate& rc : recovery.ranking) {
      if (rc.candidate_index == trial.true_index) {
        trial.mi_true = rc.mutual_information;
      } else {
        trial.mi_best_other = std::max(trial.mi_best_other, rc.mutual_information);
      }
    }
    const ConditionalTable table =
        conditional_table(bundle.payload, genome_y, phi, alphabet);
    trial.entropy_true = conditional_entropy(table);
    if (t == 0) {
      trial.table_percent_csv = table_to_percent_csv(table, alphabet);
      trial.table_json = table_to_json(table);
      trial.bundle_json = bundle_to_json(bundle, alphabet);
    }
  });

  std::uint32_t successes = 0;
  ordered_json rows = ordered_json::array();
  for (const KeyexchangeTrial& trial : trials) {
    const bool success = trial.verified && trial.exact_table && trial.round_trip &&
                         trial.keys_agree && trial.winner_index == trial.true_index;
    if (success) ++successes;
    rows.push_back(ordered_json{{"seed", trial.seed},
                                {"verified", trial.verified},
                                {"true_index", trial.true_index},
                                {"winner_index", trial.winner_index},
                                {"exact_table", trial.exact_table},
                                {"round_trip", trial.round_trip},
                                {"keys_agree", trial.keys_agree},
                                {"success", success},
                                {"mi_true", trial.mi_true},
                                {"mi_best_other", trial.mi_best_other},
                                {"conditional_entropy_true", trial.entropy_true}});
  }

  ordered_json report{{"meta", meta_to_json(meta)},
                      {"trials", settings.trials},
                      {"successes", successes},
                      {"success_rate",
                       static_cast<double>(successes) / static_cast<double>(settings.trials)},
                      {"runs", rows}};

  emit(dir, "keyexchange_report.json", dump(report));
  emit(dir, "conditional_table.csv",
       meta_to_comments(meta) + trials[0].table_percent_csv);
  ordered_json table_doc{{"meta", meta_to_json(meta)}, {"table", trials[0].table_json}};
  emit(dir, "conditional_table.json", dump(table_doc));
  ordered_json bundle_doc{{"meta", meta_to_json(meta)}, {"bundle", trials[0].bundle_json}};
  emit(dir, "bundle.json", dump(bundle_doc));
  return 0;
}

// ---------------------------------------------------------------- challenge

struct ChallengeSettings {
  PopulationParams pop;
  std::uint64_t births = 5000;
  std::uint32_t index_count = 4;
  std::uint32_t decoys = 0;
  std::uint64_t budget = 456976;
  std::uint32_t trials = 20;
  std::uint32_t analytic_n = 10;
  double target_mass = 0.5;

  ChallengeSettings() { pop.parent_count = 10; }

  static constexpr std::initializer_list<const char*> kKeys = {
      "seed",     "length",     "alphabet", "p_inherit",  "p_mutate",
      "max_size", "parents",    "births",   "index_count", "decoys",
      "budget",   "trials",     "analytic_n", "target_mass"};

  void apply(const json& j) {
    reject_unknown(j, kKeys);
    read_key(j, "seed", pop.seed);
    read_key(j, "length", pop.genome.length);
    if (auto it = j.find("alphabet"); it != j.end()) {
      pop.genome.alphabet = Alphabet{it->get<std::uint32_t>()};
    }
    read_key(j, "p_inherit", pop.genome.p_inherit);
    read_key(j, "p_mutate", pop.genome.p_mutate);
    read_key(j, "max_size", pop.max_size);
    read_key(j, "parents", pop.parent_count);
    read_key(j, "births", births);
    read_key(j, "index_count", index_count);
    read_key(j, "decoys", decoys);
    read_key(j, "budget", budget);
    read_key(j, "trials", trials);
    read_key(j, "analytic_n", analytic_n);
    read_key(j, "target_mass", target_mass);
  }

  ordered_json to_json() const {
    return ordered_json{{"seed", pop.seed},
                        {"length", pop.genome.length},
                        {"alphabet", pop.genome.alphabet.size()},
                        {"p_inherit", pop.genome.p_inherit},
                        {"p_mutate", pop.genome.p_mutate},
                        {"max_size", pop.max_size},
                        {"parents", pop.parent_count},
                        {"births", births},
                        {"index_count", index_count},
                        {"decoys", decoys},
                        {"budget", budget},
                        {"trials", trials},
                        {"analytic_n", analytic_n},
                        {"target_mass", target_mass}};
  }

  void validate() const {
    pop.validate();
    if (births == 0) throw std::invalid_argument("config: births must be positive");
    if (index_count == 0 || index_count > pop.genome.length) {
      throw std::invalid_argument("config: index_count must be in [1, length]");
    }
    if (budget == 0) throw std::invalid_argument("config: budget must be positive");
    if (trials == 0) throw std::invalid_argument("config: trials must be positive");
    if (!(target_mass > 0.0 && target_mass < 1.0)) {
      throw std::invalid_argument("config: target_mass must lie in (0, 1)");
    }
  }
};

double median_of(std::vector<std::uint64_t> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t h = v.size() / 2;
  if (v.size() % 2 == 1) return static_cast<double>(v[h]);
  return (static_cast<double>(v[h - 1]) + static_cast<double>(v[h])) / 2.0;
}

std::string work_csv(const std::vector<std::uint64_t>& works, const Meta& meta) {
  std::string out = meta_to_comments(meta) + "trial,work\n";
  for (std::size_t i = 0; i < works.size(); ++i) {
    out += std::to_string(i) + "," + std::to_string(works[i]) + "\n";
  }
  return out;
}

ordered_json work_ratio_entry(std::uint32_t n, std::uint32_t I, const BigRational& p_rel,
                              const std::string& p_label, double target) {
  const WorkRatioReport r = work_ratio(n, I, p_rel, BigRational(target));
  return ordered_json{{"n", n},
                      {"alphabet", I},
                      {"p_rel", p_label},
                      {"target_mass", target},
                      {"uniform_prefix", r.uniform_prefix.str()},
                      {"ordered_prefix", r.ordered_prefix.str()},
                      {"ratio",
                       boost::multiprecision::numerator(r.ratio).str() + "/" +
                           boost::multiprecision::denominator(r.ratio).str()},
                      {"ratio_double", r.ratio_as_double}};
}

struct ChallengeTrialOutcome {
  std::uint64_t relative_work = 0;
  std::uint64_t alien_work = 0;
  std::string relative_verdict;
  std::string alien_verdict;
  double p_rel_hat = 0.0;
};

int run_challenge(const GlobalOptions& global, const ChallengeSettings& settings) {
  settings.validate();
  const fs::path dir = prepare_out_dir(global);
  const ordered_json config = settings.to_json();
  const Meta meta{settings.pop.seed, config};
  const Alphabet alphabet = settings.pop.genome.alphabet;
  const std::uint32_t I = alphabet.size();
  const HashFunction hash = HashFunction::sha256();

  std::vector<ChallengeTrialOutcome> outcomes(settings.trials);
  parallel_for(settings.trials, global.jobs, [&](std::uint64_t t) {
    const std::uint64_t tseed = replica_seed(settings.pop.seed, t);
    PopulationParams params = settings.pop;
    params.seed = tseed;
    Population pop = Population::bootstrap(params);
    pop.run(settings.births, settings.births);

    Rng rng = Rng(tseed).derive(0x6368616cULL);
    const auto [vi, ri] = rng.distinct_pair(pop.nodes().size());
    const GeneSequence& verifier = pop.nodes()[vi].genome;
    const GeneSequence& relative = pop.nodes()[ri].genome;
    const GeneSequence alien = random_genome(params.genome, rng);

    std::vector<std::uint32_t> indices;
    while (indices.size() < settings.index_count) {
      const auto c = static_cast<std::uint32_t>(rng.index(params.genome.length));
      if (std::find(indices.begin(), indices.end(), c) == indices.end()) {
        indices.push_back(c);
      }
    }
    const Challenge challenge =
        issue_challenge(verifier, indices, settings.decoys, alphabet, hash, rng);

    const SnapshotStats stats = pop.snapshot_stats();
    PosteriorModel model;
    model.alphabet_size = I;
    model.p_rel = std::clamp(stats.mean_match / params.genome.length,
                             1.0 / static_cast<double>(I), 1.0);

    // Same challenge for both responders: the pair differs only in genome.
    const ChallengeResponse from_relative =
        respond(relative, challenge, model, settings.budget);
    const ChallengeResponse from_alien = respond(alien, challenge, model, settings.budget);

    ChallengeTrialOutcome& out = outcomes[t];
    out.relative_work = from_relative.candidates_tested;
    out.alien_work = from_alien.candidates_tested;
    out.relative_verdict =
        std::string(to_string(verdict(from_relative, challenge, settings.budget)));
    out.alien_verdict =
        std::string(to_string(verdict(from_alien, challenge, settings.budget)));
    out.p_rel_hat = model.p_rel;
  });

  std::vector<std::uint64_t> relative_work, alien_work;
  ordered_json rows = ordered_json::array();
  double p_rel_mean = 0.0;
  for (std::size_t t = 0; t < outcomes.size(); ++t) {
    const ChallengeTrialOutcome& out = outcomes[t];
    relative_work.push_back(out.relative_work);
    alien_work.push_back(out.alien_work);
    p_rel_mean += out.p_rel_hat / static_cast<double>(outcomes.size());
    rows.push_back(ordered_json{{"trial", t},
                                {"relative_work", out.relative_work},
                                {"relative_verdict", out.relative_verdict},
                                {"alien_work", out.alien_work},
                                {"alien_verdict", out.alien_verdict}});
  }

  ordered_json nk_rows = ordered_json::array();
  for (std::uint32_t k = 0; k <= settings.analytic_n; ++k) {
    nk_rows.push_back(ordered_json{
        {"k", k}, {"count", search_space_size(settings.analytic_n, k, I).str()}});
  }

  const BigRational one_third(1, 3);
  ordered_json ratios = ordered_json::array();
  ratios.push_back(
      work_ratio_entry(settings.analytic_n, I, one_third, "1/3", settings.target_mass));
  ratios.push_back(
      work_ratio_entry(settings.analytic_n, 1024, one_third, "1/3", settings.target_mass));

  // Two-position block: the whole tier 0+1 neighbourhood and the shortest
  // posterior-ordered prefix reaching the target mass.
  const BigRational p = one_third;
  const BigRational q = (1 - p) / (I - 1);
  const BigRational tier01 = p * p + 2 * (I - 1) * p * q;
  const WorkRatioReport two_index =
      work_ratio(2, I, one_third, BigRational(settings.target_mass));
  char rounded[16];
  std::snprintf(rounded, sizeof(rounded), "%.2f",
                static_cast<double>(tier01.convert_to<double>()));
  ordered_json pair_block{{"index_count", 2},
                          {"alphabet", I},
                          {"p_rel", "1/3"},
                          {"tier01_candidates", 1 + 2 * (I - 1)},
                          {"tier01_mass", tier01.convert_to<double>()},
                          {"tier01_mass_rounded", rounded},
                          {"target_mass", settings.target_mass},
                          {"target_prefix", two_index.ordered_prefix.str()}};

  ordered_json report{
      {"meta", meta_to_json(meta)},
      {"trials", settings.trials},
      {"p_rel_hat_mean", p_rel_mean},
      {"relative",
       {{"median_work", median_of(relative_work)}, {"work", relative_work}}},
      {"alien", {{"median_work", median_of(alien_work)}, {"work", alien_work}}},
      {"runs", rows},
      {"analytics",
       {{"search_space", {{"n", settings.analytic_n}, {"alphabet", I}, {"rows", nk_rows}}},
        {"work_ratio", ratios},
        {"two_index_block", pair_block}}}};

  emit(dir, "challenge_report.json", dump(report));
  if (global.format == "csv") {
    emit(dir, "work_relative.csv", work_csv(relative_work, meta));
    emit(dir, "work_alien.csv", work_csv(alien_work, meta));
  }
  return 0;
}

// ------------------------------------------------------------------- attack

int run_attack(const GlobalOptions& global, const ScenarioConfig& scenario,
               bool dump_trace) {
  const fs::path dir = prepare_out_dir(global);
  const ScenarioResult result = run_scenario(scenario);
  const Meta meta{scenario.population.seed, scenario.to_json()};
  ordered_json doc{{"meta", meta_to_json(meta)}, {"report", report_to_json(result)}};
  emit(dir, "detection_report.json", dump(doc));
  if (dump_trace) emit(dir, "trace.jsonl", result.trace_jsonl);
  return 0;
}

// ------------------------------------------------------------------- export

int run_export(const GlobalOptions& global) {
  const fs::path dir = prepare_out_dir(global);
  emit(dir, "simulate_config.json", dump(SimulateSettings{}.to_json()));
  emit(dir, "keyexchange_config.json", dump(KeyexchangeSettings{}.to_json()));
  emit(dir, "challenge_config.json", dump(ChallengeSettings{}.to_json()));
  emit(dir, "attack_scenario.json", dump(ScenarioConfig::bundled_default().to_json()));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Genetic node identity simulator: pool evolution, kinship key "
               "transfer, challenge-response recognition, adversary detection."};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  GlobalOptions global;
  const char* env_out = std::getenv("GENEPOOL_OUT");
  global.out_dir = env_out ? env_out : ".";

  app.add_option("--seed", global.seed, "Base seed for the run");
  app.add_option("--config", global.config_path, "JSON config file; flags override it");
  app.add_option("--out", global.out_dir,
                 "Output directory (default $GENEPOOL_OUT or '.')");
  app.add_option("--format", global.format, "Output format for tabular data")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--jobs", global.jobs, "Worker threads for independent replicas");

  auto* sim = app.add_subcommand("simulate", "Evolve a pool; write trajectory, "
                                             "histogram, reference curve, event log");
  sim->fallthrough();
  SimulateSettings sim_settings;
  sim->add_option("--length", sim_settings.pop.genome.length, "Genome length");
  std::uint32_t sim_alphabet = 26;
  sim->add_option("--alphabet", sim_alphabet, "Alphabet size");
  sim->add_option("--p-inherit", sim_settings.pop.genome.p_inherit,
                  "Per-parent inheritance probability");
  sim->add_option("--p-mutate", sim_settings.pop.genome.p_mutate, "Mutation probability");
  sim->add_option("--max-size", sim_settings.pop.max_size, "Population cap");
  sim->add_option("--parents", sim_settings.pop.parent_count, "Eligible parent count");
  sim->add_option("--births", sim_settings.births, "Birth events to run");
  sim->add_option("--snapshot-every", sim_settings.snapshot_every, "Snapshot interval");
  sim->add_option("--pair-budget", sim_settings.pair_budget,
                  "Sampled pairs for large pools");
  sim->add_option("--replicas", sim_settings.replicas, "Independent replicas");

  auto* kx = app.add_subcommand("keyexchange", "Code-table transfer between two pool "
                                               "nodes; recovery report and table");
  kx->fallthrough();
  KeyexchangeSettings kx_settings;
  kx->add_option("--length", kx_settings.pop.genome.length, "Genome length");
  std::uint32_t kx_alphabet = 26;
  kx->add_option("--alphabet", kx_alphabet, "Alphabet size");
  kx->add_option("--p-inherit", kx_settings.pop.genome.p_inherit,
                 "Per-parent inheritance probability");
  kx->add_option("--p-mutate", kx_settings.pop.genome.p_mutate, "Mutation probability");
  kx->add_option("--max-size", kx_settings.pop.max_size, "Population cap");
  kx->add_option("--parents", kx_settings.pop.parent_count, "Eligible parent count");
  kx->add_option("--births", kx_settings.births, "Birth events before the exchange");
  kx->add_option("--phi-mode", kx_settings.phi_mode, "'identity' or 'block'")
      ->check(CLI::IsMember({"identity", "block"}));
  kx->add_option("--window", kx_settings.window, "Block window for block phi");
  kx->add_option("--family", kx_settings.family, "Candidate permutation count");
  kx->add_option("--trials", kx_settings.trials, "Independent trials");
  kx->add_flag("--unrelated", kx_settings.unrelated,
               "Receiver is an unrelated random genome");

  auto* ch = app.add_subcommand("challenge", "Paired relative/alien recognition "
                                             "trials plus analytic tables");
  ch->fallthrough();
  ChallengeSettings ch_settings;
  ch->add_option("--length", ch_settings.pop.genome.length, "Genome length");
  std::uint32_t ch_alphabet = 26;
  ch->add_option("--alphabet", ch_alphabet, "Alphabet size");
  ch->add_option("--p-inherit", ch_settings.pop.genome.p_inherit,
                 "Per-parent inheritance probability");
  ch->add_option("--p-mutate", ch_settings.pop.genome.p_mutate, "Mutation probability");
  ch->add_option("--max-size", ch_settings.pop.max_size, "Population cap");
  ch->add_option("--parents", ch_settings.pop.parent_count, "Eligible parent count");
  ch->add_option("--births", ch_settings.births, "Birth events before the trials");
  ch->add_option("--indices", ch_settings.index_count, "Challenged position count");
  ch->add_option("--decoys", ch_settings.decoys, "Decoy digests per challenge");
  ch->add_option("--budget", ch_settings.budget, "Candidate budget per response");
  ch->add_option("--trials", ch_settings.trials, "Paired trials");
  ch->add_option("--analytic-n", ch_settings.analytic_n,
                 "Position count for the analytic tables");
  ch->add_option("--target-mass", ch_settings.target_mass,
                 "Posterior mass target for prefix analytics");

  auto* atk = app.add_subcommand("attack", "Run an adversary-detection scenario; "
                                           "write the detection report");
  atk->fallthrough();
  bool dump_trace = false;
  atk->add_flag("--dump-trace", dump_trace, "Also write the message trace");
  std::uint64_t atk_network_seed = 0;
  atk->add_option("--network-seed", atk_network_seed, "Network seed override");

  auto* exp = app.add_subcommand("export", "Write the default config and scenario "
                                           "files for every subcommand");
  exp->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    std::optional<json> config;
    if (!global.config_path.empty()) config = load_config_file(global.config_path);

    if (sim->parsed()) {
      SimulateSettings settings;
      if (config) settings.apply(*config);
      // Flags win over the config file.
      auto seen = [&](const char* name) { return sim->count(name) > 0; };
      if (seen("--length")) settings.pop.genome.length = sim_settings.pop.genome.length;
      if (seen("--alphabet")) settings.pop.genome.alphabet = Alphabet{sim_alphabet};
      if (seen("--p-inherit")) settings.pop.genome.p_inherit = sim_settings.pop.genome.p_inherit;
      if (seen("--p-mutate")) settings.pop.genome.p_mutate = sim_settings.pop.genome.p_mutate;
      if (seen("--max-size")) settings.pop.max_size = sim_settings.pop.max_size;
      if (seen("--parents")) settings.pop.parent_count = sim_settings.pop.parent_count;
      if (seen("--births")) settings.births = sim_settings.births;
      if (seen("--snapshot-every")) settings.snapshot_every = sim_settings.snapshot_every;
      if (seen("--pair-budget")) settings.pair_budget = sim_settings.pair_budget;
      if (seen("--replicas")) settings.replicas = sim_settings.replicas;
      if (app.count("--seed") > 0) settings.pop.seed = global.seed;
      return run_simulate(global, settings);
    }
    if (kx->parsed()) {
      KeyexchangeSettings settings;
      if (config) settings.apply(*config);
      auto seen = [&](const char* name) { return kx->count(name) > 0; };
      if (seen("--length")) settings.pop.genome.length = kx_settings.pop.genome.length;
      if (seen("--alphabet")) settings.pop.genome.alphabet = Alphabet{kx_alphabet};
      if (seen("--p-inherit")) settings.pop.genome.p_inherit = kx_settings.pop.genome.p_inherit;
      if (seen("--p-mutate")) settings.pop.genome.p_mutate = kx_settings.pop.genome.p_mutate;
      if (seen("--max-size")) settings.pop.max_size = kx_settings.pop.max_size;
      if (seen("--parents")) settings.pop.parent_count = kx_settings.pop.parent_count;
      if (seen("--births")) settings.births = kx_settings.births;
      if (seen("--phi-mode")) settings.phi_mode = kx_settings.phi_mode;
      if (seen("--window")) settings.window = kx_settings.window;
      if (seen("--family")) settings.family = kx_settings.family;
      if (seen("--trials")) settings.trials = kx_settings.trials;
      if (seen("--unrelated")) settings.unrelated = kx_settings.unrelated;
      if (app.count("--seed") > 0) settings.pop.seed = global.seed;
      return run_keyexchange(global, settings);
    }
    if (ch->parsed()) {
      ChallengeSettings settings;
      if (config) settings.apply(*config);
      auto seen = [&](const char* name) { return ch->count(name) > 0; };
      if (seen("--length")) settings.pop.genome.length = ch_settings.pop.genome.length;
      if (seen("--alphabet")) settings.pop.genome.alphabet = Alphabet{ch_alphabet};
      if (seen("--p-inherit")) settings.pop.genome.p_inherit = ch_settings.pop.genome.p_inherit;
      if (seen("--p-mutate")) settings.pop.genome.p_mutate = ch_settings.pop.genome.p_mutate;
      if (seen("--max-size")) settings.pop.max_size = ch_settings.pop.max_size;
      if (seen("--parents")) settings.pop.parent_count = ch_settings.pop.parent_count;
      if (seen("--births")) settings.births = ch_settings.births;
      if (seen("--indices")) settings.index_count = ch_settings.index_count;
      if (seen("--decoys")) settings.decoys = ch_settings.decoys;
      if (seen("--budget")) settings.budget = ch_settings.budget;
      if (seen("--trials")) settings.trials = ch_settings.trials;
      if (seen("--analytic-n")) settings.analytic_n = ch_settings.analytic_n;
      if (seen("--target-mass")) settings.target_mass = ch_settings.target_mass;
      if (app.count("--seed") > 0) settings.pop.seed = global.seed;
      return run_challenge(global, settings);
    }
    if (atk->parsed()) {
      ScenarioConfig scenario = config ? ScenarioConfig::from_json(*config)
                                       : ScenarioConfig::bundled_default();
      if (app.count("--seed") > 0) scenario.population.seed = global.seed;
      if (atk->count("--network-seed") > 0) scenario.network_seed = atk_network_seed;
      scenario.validate();
      return run_attack(global, scenario, dump_trace);
    }
    if (exp->parsed()) return run_export(global);
  } catch (const json::parse_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
