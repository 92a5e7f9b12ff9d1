"""Exact and approximate nucleus-constrained decoding for autoregressive models.

The library has three layers:

* :mod:`~nucleus_search.models` — scoring models (lookup tables, smoothed
  n-grams, seeded random models) behind one ``next_distribution`` interface,
  plus model file I/O and sequence scoring.
* :mod:`~nucleus_search.pruning` — the nucleus (top-p) set and tail-pruned
  renormalization, shared by every consumer so there is exactly one
  threshold rule in the package.
* :mod:`~nucleus_search.search` — beam search, best-first p-exact search,
  and dynamic beam search, all emitting the same result/trace types;
  :mod:`~nucleus_search.oracle` provides the brute-force enumeration the
  searches are validated against, and :mod:`~nucleus_search.rerank` the
  length-normalized reranking of finished hypotheses.
"""

from . import errors
from .errors import (
    EmptyCorpus,
    EmptyResult,
    InvalidConfig,
    InvalidDistribution,
    InvalidThreshold,
    InvalidTokenId,
    MisplacedEos,
    MissingTrace,
    ModelFormatError,
    NoFinishedHypothesis,
    NucleusSearchError,
    SpaceTooLarge,
    UnfinishedHypothesis,
    UnknownContext,
)
from .models import (
    BOS_TOKEN,
    EOS_TOKEN,
    Distribution,
    NGramModel,
    ScoringModel,
    TableModel,
    Vocabulary,
    load_model,
    random_model,
    save_model,
    score_sequence,
    train_ngram,
)
from .oracle import (
    MAX_SEQUENCES,
    EnumeratedSequence,
    enumerate_sequences,
    exhaustive_best,
    space_size,
)
from .pruning import Nucleus, PrunedDistribution, nucleus_set, tail_prune
from .rerank import RerankedResult, length_normalized_score, rerank
from .search import (
    DEFAULT_CANDIDATE_CAP,
    DEFAULT_MAX_STEPS,
    Hypothesis,
    MaxRankReport,
    SearchConfig,
    SearchResult,
    StepTrace,
    analyze_max_rank,
    beam_search,
    dynamic_beam_search,
    p_exact_search,
    run_search,
)

__version__ = "0.1.0"

__all__ = [
    "BOS_TOKEN",
    "DEFAULT_CANDIDATE_CAP",
    "DEFAULT_MAX_STEPS",
    "Distribution",
    "EOS_TOKEN",
    "EmptyCorpus",
    "EmptyResult",
    "EnumeratedSequence",
    "Hypothesis",
    "InvalidConfig",
    "InvalidDistribution",
    "InvalidThreshold",
    "InvalidTokenId",
    "MAX_SEQUENCES",
    "MaxRankReport",
    "MisplacedEos",
    "MissingTrace",
    "ModelFormatError",
    "NGramModel",
    "NoFinishedHypothesis",
    "Nucleus",
    "NucleusSearchError",
    "PrunedDistribution",
    "RerankedResult",
    "ScoringModel",
    "SearchConfig",
    "SearchResult",
    "SpaceTooLarge",
    "StepTrace",
    "TableModel",
    "UnfinishedHypothesis",
    "UnknownContext",
    "Vocabulary",
    "analyze_max_rank",
    "beam_search",
    "dynamic_beam_search",
    "enumerate_sequences",
    "errors",
    "exhaustive_best",
    "length_normalized_score",
    "load_model",
    "nucleus_set",
    "p_exact_search",
    "random_model",
    "rerank",
    "run_search",
    "save_model",
    "score_sequence",
    "space_size",
    "tail_prune",
    "train_ngram",
    "__version__",
]
