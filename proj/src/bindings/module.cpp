#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>

#include "genepool/challenge.hpp"
#include "genepool/keyexchange.hpp"
#include "genepool/netsim.hpp"
#include "genepool/population.hpp"
#include "genepool/stats.hpp"
#include "genepool/version.hpp"

namespace py = pybind11;
using namespace genepool;

namespace {

py::bytes to_bytes(const Digest& d) {
  return py::bytes(reinterpret_cast<const char*>(d.data()), d.size());
}

Digest from_bytes(const py::bytes& b) {
  const std::string s = b;
  return Digest(s.begin(), s.end());
}

// Arbitrary-precision results cross over as native Python ints.
py::object to_py_int(const BigInt& v) {
  return py::module_::import("builtins").attr("int")(v.str());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Genetic node identity: gene pool evolution, kinship key transfer, "
            "challenge-response recognition, adversary detection.";
  m.attr("__version__") = kVersion;

  py::class_<Rng>(m, "Rng")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def("next_u64", &Rng::next_u64)
      .def("index", &Rng::index, py::arg("bound"))
      .def("real", &Rng::real)
      .def("derive", &Rng::derive, py::arg("stream"))
      .def_property_readonly("seed", &Rng::seed);

  py::class_<Alphabet>(m, "Alphabet")
      .def(py::init<std::uint32_t>(), py::arg("size"))
      .def_property_readonly("size", &Alphabet::size)
      .def("lettered", &Alphabet::lettered)
      .def("letter", &Alphabet::letter, py::arg("index"))
      .def("index_of", &Alphabet::index_of, py::arg("letter"))
      .def(py::self == py::self);

  py::class_<GenomeParams>(m, "GenomeParams")
      .def(py::init([](std::uint32_t length, std::uint32_t alphabet, double p_inherit,
                       double p_mutate) {
             GenomeParams p;
             p.length = length;
             p.alphabet = Alphabet{alphabet};
             p.p_inherit = p_inherit;
             p.p_mutate = p_mutate;
             p.validate();
             return p;
           }),
           py::arg("length") = 1000, py::arg("alphabet") = 26,
           py::arg("p_inherit") = 0.48, py::arg("p_mutate") = 0.04)
      .def_readwrite("length", &GenomeParams::length)
      .def_readwrite("alphabet", &GenomeParams::alphabet)
      .def_readwrite("p_inherit", &GenomeParams::p_inherit)
      .def_readwrite("p_mutate", &GenomeParams::p_mutate)
      .def("validate", &GenomeParams::validate);

  py::class_<GeneSequence>(m, "GeneSequence")
      .def(py::init<>())
      .def(py::init([](std::vector<std::uint16_t> elements) {
             GeneSequence g;
             g.elements = std::move(elements);
             return g;
           }),
           py::arg("elements"))
      .def_readwrite("elements", &GeneSequence::elements)
      .def("__len__", &GeneSequence::size)
      .def(py::self == py::self);

  m.def("random_genome", &random_genome, py::arg("params"), py::arg("rng"));
  m.def("reproduce", &reproduce, py::arg("a"), py::arg("b"), py::arg("params"),
        py::arg("rng"));
  m.def("match_count", &match_count, py::arg("a"), py::arg("b"));
  m.def("binomial_pmf", &binomial_pmf, py::arg("k"), py::arg("n"), py::arg("p"));
  m.def("memory_factor", &memory_factor, py::arg("t"), py::arg("p_mutate"));
  m.def("to_letters", &to_letters, py::arg("genome"), py::arg("alphabet"));
  m.def("from_letters", &from_letters, py::arg("text"), py::arg("alphabet"));

  py::class_<Node>(m, "Node")
      .def_readonly("id", &Node::id)
      .def_readonly("genome", &Node::genome)
      .def_readonly("birth_time", &Node::birth_time)
      .def_readonly("parent_eligible", &Node::parent_eligible);

  py::class_<PopulationParams>(m, "PopulationParams")
      .def(py::init([](const GenomeParams& genome, std::uint32_t max_size,
                       std::uint32_t parent_count, std::uint64_t seed) {
             PopulationParams p;
             p.genome = genome;
             p.max_size = max_size;
             p.parent_count = parent_count;
             p.seed = seed;
             p.validate();
             return p;
           }),
           py::arg("genome") = GenomeParams{}, py::arg("max_size") = 100,
           py::arg("parent_count") = 100, py::arg("seed") = 0)
      .def_readwrite("genome", &PopulationParams::genome)
      .def_readwrite("max_size", &PopulationParams::max_size)
      .def_readwrite("parent_count", &PopulationParams::parent_count)
      .def_readwrite("seed", &PopulationParams::seed);

  py::class_<BirthDeathEvent>(m, "BirthDeathEvent")
      .def_readonly("clock", &BirthDeathEvent::clock)
      .def_readonly("child", &BirthDeathEvent::child)
      .def_readonly("parent_a", &BirthDeathEvent::parent_a)
      .def_readonly("parent_b", &BirthDeathEvent::parent_b)
      .def_readonly("removed", &BirthDeathEvent::removed);

  py::class_<SnapshotStats>(m, "SnapshotStats")
      .def_readonly("clock", &SnapshotStats::clock)
      .def_readonly("mean_match", &SnapshotStats::mean_match)
      .def_readonly("min_match", &SnapshotStats::min_match)
      .def_readonly("max_match", &SnapshotStats::max_match)
      .def_readonly("population_size", &SnapshotStats::population_size);

  py::class_<Population>(m, "Population")
      .def_static("bootstrap", &Population::bootstrap, py::arg("params"))
      .def("step", &Population::step)
      .def("run", &Population::run, py::arg("births"), py::arg("snapshot_every"))
      .def_property_readonly("nodes", &Population::nodes)
      .def_property_readonly("clock", &Population::clock)
      .def_property_readonly("next_node_id", &Population::next_node_id)
      .def("eligible_parents", &Population::eligible_parents)
      .def("snapshot_stats", &Population::snapshot_stats)
      .def("mean_match_among", &Population::mean_match_among, py::arg("ids"))
      .def("enable_history", &Population::enable_history, py::arg("every"))
      .def("genome_as_of", &Population::genome_as_of, py::arg("id"),
           py::arg("age_births"));

  py::class_<MatchHistogram>(m, "MatchHistogram")
      .def_readonly("n", &MatchHistogram::n)
      .def_readonly("counts", &MatchHistogram::counts)
      .def_readonly("n_pairs", &MatchHistogram::n_pairs)
      .def("mean", &MatchHistogram::mean)
      .def("min_match", &MatchHistogram::min_match)
      .def("max_match", &MatchHistogram::max_match)
      .def("mass_at_or_above", &MatchHistogram::mass_at_or_above, py::arg("k"));

  m.def("pairwise_match_distribution", &pairwise_match_distribution, py::arg("pop"),
        py::arg("pair_budget") = 10000);
  m.def("binomial_reference", &binomial_reference, py::arg("n"), py::arg("p"));

  py::class_<KsResult>(m, "KsResult")
      .def_readonly("statistic", &KsResult::statistic)
      .def_readonly("p_value", &KsResult::p_value);
  m.def("ks_two_sample", &ks_two_sample, py::arg("a"), py::arg("b"));

  py::class_<CodeTable>(m, "CodeTable")
      .def_static("identity", &CodeTable::identity, py::arg("size"))
      .def_static("random", &CodeTable::random, py::arg("size"), py::arg("rng"))
      .def_readwrite("mapping", &CodeTable::mapping)
      .def("__call__", &CodeTable::operator(), py::arg("x"))
      .def("inverted", &CodeTable::inverted)
      .def(py::self == py::self);

  py::class_<IndexPermutation>(m, "IndexPermutation")
      .def_static("identity", &IndexPermutation::identity, py::arg("n"))
      .def_static("random", &IndexPermutation::random, py::arg("n"), py::arg("rng"))
      .def_static("block_local", &IndexPermutation::block_local, py::arg("n"),
                  py::arg("window"), py::arg("rng"))
      .def_readwrite("mapping", &IndexPermutation::mapping)
      .def("__call__", &IndexPermutation::operator(), py::arg("i"))
      .def("inverted", &IndexPermutation::inverted)
      .def(py::self == py::self);

  py::class_<HashFunction>(m, "HashFunction")
      .def_static("sha256", &HashFunction::sha256)
      .def_static("by_name", &HashFunction::by_name, py::arg("name"))
      .def_property_readonly("name", &HashFunction::name)
      .def_property_readonly("digest_length", &HashFunction::digest_length)
      .def("digest", [](const HashFunction& h, const py::bytes& data) {
        return to_bytes(h.digest(static_cast<std::string_view>(std::string(data))));
      });

  py::class_<ConditionalTable>(m, "ConditionalTable")
      .def_readonly("alphabet_size", &ConditionalTable::alphabet_size)
      .def_readonly("counts", &ConditionalTable::counts)
      .def_readonly("row_totals", &ConditionalTable::row_totals)
      .def("total", &ConditionalTable::total)
      .def("conditional", &ConditionalTable::conditional, py::arg("x"), py::arg("y"));

  py::class_<TransferBundle>(m, "TransferBundle")
      .def_readonly("payload", &TransferBundle::payload)
      .def_property_readonly("verification_digest", [](const TransferBundle& b) {
        return to_bytes(b.verification_digest);
      });

  m.def("encode", &encode, py::arg("genome"), py::arg("g"), py::arg("phi"),
        py::arg("hash"));
  m.def("decode", &decode, py::arg("payload"), py::arg("g"), py::arg("phi"));
  m.def("conditional_table", &conditional_table, py::arg("payload"), py::arg("genome"),
        py::arg("phi_candidate"), py::arg("alphabet"));
  m.def("conditional_entropy",
        py::overload_cast<const ConditionalTable&>(&conditional_entropy),
        py::arg("table"));
  m.def("mutual_information",
        py::overload_cast<const ConditionalTable&>(&mutual_information),
        py::arg("table"));

  py::class_<CodeTableRecovery>(m, "CodeTableRecovery")
      .def_readonly("table", &CodeTableRecovery::table)
      .def_readonly("row_confidence", &CodeTableRecovery::row_confidence);
  m.def("recover_code_table", &recover_code_table, py::arg("table"));

  py::class_<RankedCandidate>(m, "RankedCandidate")
      .def_readonly("candidate_index", &RankedCandidate::candidate_index)
      .def_readonly("mutual_information", &RankedCandidate::mutual_information);

  py::class_<PermutationRecovery>(m, "PermutationRecovery")
      .def_readonly("ranking", &PermutationRecovery::ranking)
      .def_readonly("verified", &PermutationRecovery::verified)
      .def_readonly("winner_index", &PermutationRecovery::winner_index)
      .def_readonly("recovered_table", &PermutationRecovery::recovered_table);

  m.def("recover_permutation",
        [](const std::vector<std::uint16_t>& payload, const GeneSequence& genome,
           const std::vector<IndexPermutation>& candidates, const py::bytes& digest,
           const HashFunction& hash, const Alphabet& alphabet) {
          return recover_permutation(payload, genome, candidates, from_bytes(digest),
                                     hash, alphabet);
        },
        py::arg("payload"), py::arg("genome"), py::arg("candidates"),
        py::arg("verification_digest"), py::arg("hash"), py::arg("alphabet"));

  m.def("transfer_digest", [](const CodeTable& g, const IndexPermutation& phi,
                              const HashFunction& hash) {
    return to_bytes(transfer_digest(g, phi, hash));
  });
  m.def("derive_shared_key", [](const CodeTable& g, const IndexPermutation& phi,
                                const HashFunction& hash) {
    return to_bytes(derive_shared_key(g, phi, hash));
  });
  m.def("table_to_percent_csv", &table_to_percent_csv, py::arg("table"),
        py::arg("alphabet"));

  py::class_<PosteriorModel>(m, "PosteriorModel")
      .def(py::init([](double p_rel, std::uint32_t alphabet_size) {
             PosteriorModel model;
             model.p_rel = p_rel;
             model.alphabet_size = alphabet_size;
             model.validate();
             return model;
           }),
           py::arg("p_rel") = 1.0 / 3.0, py::arg("alphabet_size") = 26)
      .def_readwrite("p_rel", &PosteriorModel::p_rel)
      .def_readwrite("alphabet_size", &PosteriorModel::alphabet_size)
      .def("q", &PosteriorModel::q);

  py::class_<Challenge>(m, "Challenge")
      .def_readonly("indices", &Challenge::indices)
      .def_property_readonly("digests",
                             [](const Challenge& c) {
                               std::vector<py::bytes> out;
                               out.reserve(c.digests.size());
                               for (const Digest& d : c.digests) out.push_back(to_bytes(d));
                               return out;
                             })
      .def_property_readonly("salt", [](const Challenge& c) { return to_bytes(c.salt); })
      .def_readonly("hash_name", &Challenge::hash_name)
      .def_readonly("true_digest_index", &Challenge::true_digest_index);

  py::class_<ChallengeResponse>(m, "ChallengeResponse")
      .def_readonly("chosen_digest_index", &ChallengeResponse::chosen_digest_index)
      .def_readonly("candidates_tested", &ChallengeResponse::candidates_tested)
      .def_readonly("elapsed_ms", &ChallengeResponse::elapsed_ms);

  py::enum_<Verdict>(m, "Verdict")
      .value("Relative", Verdict::Relative)
      .value("Alien", Verdict::Alien)
      .value("Inconclusive", Verdict::Inconclusive);

  m.def("issue_challenge", &issue_challenge, py::arg("verifier_genome"),
        py::arg("index_set"), py::arg("n_decoys"), py::arg("alphabet"), py::arg("hash"),
        py::arg("rng"));
  m.def("respond", &respond, py::arg("prover_genome"), py::arg("challenge"),
        py::arg("model"), py::arg("budget"));
  m.def("verdict", &verdict, py::arg("response"), py::arg("challenge"),
        py::arg("work_threshold"));
  m.def("tuple_digest", [](const py::bytes& salt, const std::vector<std::uint16_t>& tuple,
                           const HashFunction& hash) {
    return to_bytes(tuple_digest(from_bytes(salt), tuple, hash));
  });

  m.def("search_space_size", [](std::uint32_t n, std::uint32_t k, std::uint32_t I) {
    return to_py_int(search_space_size(n, k, I));
  });
  m.def("work_ratio",
        [](std::uint32_t n, const PosteriorModel& model, double target_mass) {
          const WorkRatioReport r = work_ratio(n, model, target_mass);
          py::dict out;
          out["uniform_prefix"] = to_py_int(r.uniform_prefix);
          out["ordered_prefix"] = to_py_int(r.ordered_prefix);
          out["ratio"] = r.ratio_as_double;
          return out;
        },
        py::arg("n"), py::arg("model"), py::arg("target_mass") = 0.5);

  m.def("bundled_default_scenario", []() {
    return ScenarioConfig::bundled_default().to_json().dump();
  });
  m.def("run_scenario", [](const std::string& config_json) {
    const ScenarioConfig config =
        ScenarioConfig::from_json(nlohmann::json::parse(config_json));
    return report_to_json(run_scenario(config)).dump();
  },
        py::arg("config_json"));
}
