"""Genetic node identity for ad hoc networks.

Evolving gene pool, kinship statistics, code-table key transfer,
challenge-response recognition and an adversary-detection simulator.
All randomness flows from explicit seeds; equal seeds give equal results.
"""

from ._core import (  # noqa: F401
    Alphabet,
    BirthDeathEvent,
    Challenge,
    ChallengeResponse,
    CodeTable,
    CodeTableRecovery,
    ConditionalTable,
    GeneSequence,
    GenomeParams,
    HashFunction,
    IndexPermutation,
    KsResult,
    MatchHistogram,
    Node,
    PermutationRecovery,
    Population,
    PopulationParams,
    PosteriorModel,
    RankedCandidate,
    Rng,
    SnapshotStats,
    TransferBundle,
    Verdict,
    __version__,
    binomial_pmf,
    binomial_reference,
    bundled_default_scenario,
    conditional_entropy,
    conditional_table,
    decode,
    derive_shared_key,
    encode,
    from_letters,
    issue_challenge,
    ks_two_sample,
    match_count,
    memory_factor,
    mutual_information,
    pairwise_match_distribution,
    random_genome,
    recover_code_table,
    recover_permutation,
    reproduce,
    respond,
    run_scenario,
    search_space_size,
    table_to_percent_csv,
    to_letters,
    transfer_digest,
    tuple_digest,
    verdict,
    work_ratio,
)
