"""Beam search and two top-p search variants over autoregressive models.

All three algorithms share the same candidate mechanics: at each step the
pool consists of every single-token extension of each live unfinished prefix
plus each finished hypothesis carried along as a single unexpandable
candidate.  Hypotheses are compared by cumulative log probability with a
deterministic global tie-break (higher score first, then shorter sequence,
then lexicographic token ids, then lower parent rank), so identical inputs
always produce identical outputs.

* :func:`beam_search` keeps the best ``k`` pool candidates per step.  A
  finished hypothesis stays only while fewer than ``k`` better candidates
  exist; search stops once every kept candidate is finished or the step
  budget runs out.
* :func:`p_exact_search` treats each step's nucleus as a feasibility filter
  and runs best-first search over the surviving space, so the first finished
  hypothesis it pops is the most probable sequence built solely from top-p
  tokens (exact up to frontier truncation by ``candidate_cap``).
* :func:`dynamic_beam_search` renormalizes pool scores into a distribution
  over candidates and sizes the next beam as that distribution's nucleus,
  widening where the model is uncertain and narrowing where it is confident.
  Hypotheses keep their original cumulative scores.

Every hypothesis records the 1-based rank it held in each step's sorted pool,
which :func:`analyze_max_rank` uses to split a batch of results by the worst
rank any output's prefix ever occupied.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import (
    EmptyResult,
    InvalidConfig,
    MissingTrace,
    NoFinishedHypothesis,
)
from .models import ScoringModel
from .pruning import check_threshold, nucleus_cut, nucleus_set, tail_prune

ALGORITHMS = ("beam", "p_exact", "dynamic")
SCORING_MODES = ("original", "renormalized")
UNFINISHED_MODES = ("error", "return_flagged")

DEFAULT_CANDIDATE_CAP = 320
DEFAULT_MAX_STEPS = 200


@dataclass(frozen=True)
class Hypothesis:
    """A (possibly complete) decoded sequence.

    ``cum_logprob`` is always the sum of per-step log probabilities under the
    original model distribution.  ``rank_history`` holds the 1-based rank the
    hypothesis occupied in each sorted candidate pool it survived, including
    steps where it sat in the beam already finished.
    """

    tokens: Tuple[int, ...]
    cum_logprob: float
    finished: bool
    rank_history: Tuple[int, ...] = ()

    def __len__(self) -> int:
        return len(self.tokens)


def _last_rank(hyp: Hypothesis) -> int:
    return hyp.rank_history[-1] if hyp.rank_history else 0


def _result_key(hyp: Hypothesis):
    # global tie-break: higher score, shorter, lexicographic ids, parent rank
    return (-hyp.cum_logprob, len(hyp.tokens), hyp.tokens, _last_rank(hyp))


@dataclass(frozen=True)
class SearchConfig:
    """Parameters for one search run.

    Exactly the parameters relevant to the chosen algorithm may be set:
    ``k`` for beam search, ``p`` for the top-p variants, ``k_cap`` and
    ``scoring`` only where they mean something.  ``candidate_cap`` bounds the
    number of candidates kept after every expansion wave in all three
    algorithms.
    """

    algorithm: str
    k: Optional[int] = None
    p: Optional[float] = None
    candidate_cap: int = DEFAULT_CANDIDATE_CAP
    k_cap: Optional[int] = None
    max_steps: int = DEFAULT_MAX_STEPS
    scoring: str = "original"
    on_unfinished: str = "error"

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise InvalidConfig(f"unknown algorithm {self.algorithm!r}; expected one of {ALGORITHMS}")
        if self.candidate_cap < 1:
            raise InvalidConfig(f"candidate_cap must be >= 1, got {self.candidate_cap}")
        if self.max_steps < 1:
            raise InvalidConfig(f"max_steps must be >= 1, got {self.max_steps}")
        if self.scoring not in SCORING_MODES:
            raise InvalidConfig(f"scoring must be one of {SCORING_MODES}, got {self.scoring!r}")
        if self.on_unfinished not in UNFINISHED_MODES:
            raise InvalidConfig(
                f"on_unfinished must be one of {UNFINISHED_MODES}, got {self.on_unfinished!r}"
            )
        if self.k_cap is not None and self.k_cap < 1:
            raise InvalidConfig(f"k_cap must be >= 1, got {self.k_cap}")
        if self.algorithm == "beam":
            if self.k is None or self.k < 1:
                raise InvalidConfig("beam search requires k >= 1")
            if self.p is not None:
                raise InvalidConfig("beam search takes no threshold p")
            if self.k_cap is not None:
                raise InvalidConfig("beam search takes no k_cap; its width is k")
            if self.scoring != "original":
                raise InvalidConfig("beam search only supports original scoring")
        else:
            if self.k is not None:
                raise InvalidConfig(f"{self.algorithm} search takes no beam width k")
            if self.p is None:
                raise InvalidConfig(f"{self.algorithm} search requires a threshold p")
            check_threshold(self.p)
            if self.algorithm == "dynamic" and self.scoring != "original":
                raise InvalidConfig("dynamic search keeps original scores; scoring must be 'original'")

    @classmethod
    def beam(cls, k: int, **kwargs) -> "SearchConfig":
        return cls(algorithm="beam", k=k, **kwargs)

    @classmethod
    def p_exact(cls, p: float, **kwargs) -> "SearchConfig":
        return cls(algorithm="p_exact", p=p, **kwargs)

    @classmethod
    def dynamic(cls, p: float, **kwargs) -> "SearchConfig":
        return cls(algorithm="dynamic", p=p, **kwargs)


@dataclass(frozen=True)
class StepTrace:
    """One expansion step (beam/dynamic) or expansion wave (p_exact).

    For beam and dynamic search, ``pool_size`` counts pool candidates,
    ``width`` counts survivors, ``ranks`` are the survivors' 1-based pool
    ranks, and ``selected`` lists their token sequences.  For p_exact,
    ``ranks`` and ``selected`` describe the wave's newly admitted prefixes
    (ranked within the frontier right after the pushes), ``pool_size`` is the
    frontier size at that moment, and ``width`` is the frontier size after
    cap truncation.  ``nucleus_mass`` is the candidate-nucleus mass for the
    dynamic search and the step nucleus mass for p_exact.
    """

    pool_size: int
    width: int
    ranks: Tuple[int, ...]
    selected: Tuple[Tuple[int, ...], ...]
    nucleus_mass: Optional[float] = None


@dataclass(frozen=True)
class SearchResult:
    """Finished hypotheses in result order plus the per-step trace.

    ``unfinished_flag`` marks the one exceptional shape: no hypothesis
    finished within budget and the configuration asked for the best
    unfinished one instead of an error.
    """

    finished: Tuple[Hypothesis, ...]
    unfinished_flag: bool
    trace: Tuple[StepTrace, ...]

    @property
    def top(self) -> Hypothesis:
        if not self.finished:
            raise EmptyResult("result holds no hypotheses")
        return self.finished[0]


# ---------------------------------------------------------------------------
# Shared pool mechanics for beam and dynamic search
# ---------------------------------------------------------------------------


def _expand_pool(model: ScoringModel, context: Optional[str], live: Sequence[Hypothesis]):
    """Score the full candidate pool for one step.

    Returns (parents, done, scores) where scores lays out every extension of
    each unfinished parent (vocabulary-contiguous blocks, parent order
    preserved) followed by each already-finished hypothesis.
    """
    parents = [h for h in live if not h.finished]
    done = [h for h in live if h.finished]
    vsize = len(model.vocabulary)
    blocks = []
    for hyp in parents:
        dist = model.next_distribution(context, hyp.tokens)
        blocks.append(hyp.cum_logprob + dist.log_probs)
    if done:
        blocks.append(np.array([h.cum_logprob for h in done], dtype=np.float64))
    scores = np.concatenate(blocks) if blocks else np.zeros(0, dtype=np.float64)
    return parents, done, scores, vsize


def _pool_key_fn(parents, done, scores, vsize) -> Callable[[int], tuple]:
    n_ext = len(parents) * vsize

    def key(i: int):
        s = float(scores[i])
        if i < n_ext:
            parent = parents[i // vsize]
            tok = i % vsize
            return (-s, len(parent.tokens) + 1, parent.tokens + (tok,), _last_rank(parent))
        hyp = done[i - n_ext]
        return (-s, len(hyp.tokens), hyp.tokens, _last_rank(hyp))

    return key


def _pick_top(scores: np.ndarray, m: int, key: Callable[[int], tuple]) -> List[int]:
    """Indices of the pool's best ``m`` candidates, in exact global rank order.

    Prefilters on raw score with argpartition and only breaks ties through
    the full key, so boundary ties never depend on array layout.
    """
    n = len(scores)
    if m >= n:
        candidates = range(n)
    else:
        part = np.argpartition(-scores, m - 1)
        threshold = scores[part[m - 1]]
        candidates = np.flatnonzero(scores >= threshold)
    ordered = sorted(candidates, key=key)
    return [int(i) for i in ordered[:m]]


def _materialize(index, rank, parents, done, scores, vsize, eos_id) -> Hypothesis:
    n_ext = len(parents) * vsize
    if index < n_ext:
        parent = parents[index // vsize]
        tok = index % vsize
        return Hypothesis(
            tokens=parent.tokens + (tok,),
            cum_logprob=float(scores[index]),
            finished=tok == eos_id,
            rank_history=parent.rank_history + (rank,),
        )
    hyp = done[index - n_ext]
    return Hypothesis(
        tokens=hyp.tokens,
        cum_logprob=hyp.cum_logprob,
        finished=True,
        rank_history=hyp.rank_history + (rank,),
    )


def _finalize(live, steps, config) -> SearchResult:
    finished = sorted((h for h in live if h.finished), key=_result_key)
    if finished:
        return SearchResult(tuple(finished), False, tuple(steps))
    if config.on_unfinished == "error":
        raise NoFinishedHypothesis(
            f"no hypothesis reached EOS within {config.max_steps} steps"
        )
    best = min((h for h in live if not h.finished), key=_result_key)
    return SearchResult((best,), True, tuple(steps))


def _root() -> Hypothesis:
    return Hypothesis(tokens=(), cum_logprob=0.0, finished=False)


def beam_search(model: ScoringModel, context: Optional[str], config: SearchConfig) -> SearchResult:
    """Fixed-width beam search.

    Keeps the ``k`` best pool candidates per step (finished hypotheses
    compete as single candidates and are discarded once ``k`` better ones
    exist).  Terminates when every kept candidate is finished or after
    ``max_steps`` steps, and returns the kept finished hypotheses sorted by
    cumulative log probability.
    """
    if config.algorithm != "beam":
        raise InvalidConfig(f"beam_search called with algorithm {config.algorithm!r}")
    eos = model.vocabulary.eos_id
    limit = min(config.k, config.candidate_cap)
    live: List[Hypothesis] = [_root()]
    steps: List[StepTrace] = []
    for _ in range(config.max_steps):
        parents, done, scores, vsize = _expand_pool(model, context, live)
        m = min(limit, len(scores))
        picked = _pick_top(scores, m, _pool_key_fn(parents, done, scores, vsize))
        live = [
            _materialize(i, rank, parents, done, scores, vsize, eos)
            for rank, i in enumerate(picked, start=1)
        ]
        steps.append(
            StepTrace(
                pool_size=len(scores),
                width=len(live),
                ranks=tuple(range(1, len(live) + 1)),
                selected=tuple(h.tokens for h in live),
            )
        )
        if all(h.finished for h in live):
            break
    return _finalize(live, steps, config)


def _log_normalize(scores: np.ndarray) -> np.ndarray:
    """exp(scores - logsumexp(scores)); uniform if every score is -inf."""
    top = float(scores.max())
    if top == float("-inf"):
        return np.full(len(scores), 1.0 / len(scores))
    shifted = np.exp(scores - top)
    return shifted / shifted.sum()


def dynamic_beam_search(model: ScoringModel, context: Optional[str], config: SearchConfig) -> SearchResult:
    """Beam search whose width tracks the entropy of the candidate pool.

    Pool scores are renormalized into a probability distribution over
    candidates; the nucleus of that distribution at threshold ``p`` (bounded
    by ``candidate_cap`` and optionally ``k_cap``) sets the next width.
    Selected hypotheses keep their original cumulative log probabilities.
    """
    if config.algorithm != "dynamic":
        raise InvalidConfig(f"dynamic_beam_search called with algorithm {config.algorithm!r}")
    eos = model.vocabulary.eos_id
    width_cap = config.candidate_cap if config.k_cap is None else min(config.candidate_cap, config.k_cap)
    live: List[Hypothesis] = [_root()]
    steps: List[StepTrace] = []
    for _ in range(config.max_steps):
        parents, done, scores, vsize = _expand_pool(model, context, live)
        normalized = _log_normalize(scores)
        # descending-probability order equals descending-score order
        sorted_probs = np.sort(normalized)[::-1]
        size, mass = nucleus_cut(sorted_probs, config.p)
        m = min(size, width_cap)
        picked = _pick_top(scores, m, _pool_key_fn(parents, done, scores, vsize))
        live = [
            _materialize(i, rank, parents, done, scores, vsize, eos)
            for rank, i in enumerate(picked, start=1)
        ]
        steps.append(
            StepTrace(
                pool_size=len(scores),
                width=len(live),
                ranks=tuple(range(1, len(live) + 1)),
                selected=tuple(h.tokens for h in live),
                nucleus_mass=mass,
            )
        )
        if all(h.finished for h in live):
            break
    return _finalize(live, steps, config)


# ---------------------------------------------------------------------------
# p-exact search
# ---------------------------------------------------------------------------


class _Frontier:
    """Best-first frontier kept as a sorted list of comparison keys.

    Keys embed the full global tie-break and are unique (they contain the
    token sequence), so rank queries are plain bisections.  A parallel dict
    maps each key to its hypothesis payload.
    """

    def __init__(self):
        self.keys: List[tuple] = []
        self.payload: Dict[tuple, tuple] = {}

    def __len__(self) -> int:
        return len(self.keys)

    def push(self, key: tuple, hyp: Hypothesis, search_score: float) -> None:
        bisect.insort(self.keys, key)
        self.payload[key] = (hyp, search_score)

    def pop_best(self):
        key = self.keys.pop(0)
        hyp, search_score = self.payload.pop(key)
        return key, hyp, search_score

    def rank_of(self, key: tuple) -> int:
        return bisect.bisect_left(self.keys, key) + 1

    def truncate(self, cap: int) -> None:
        if len(self.keys) > cap:
            for key in self.keys[cap:]:
                del self.payload[key]
            del self.keys[cap:]

    def finished_items(self):
        return [self.payload[k][0] for k in self.keys if self.payload[k][0].finished]


def p_exact_search(model: ScoringModel, context: Optional[str], config: SearchConfig) -> SearchResult:
    """Best-first search over the space of sequences built from top-p tokens.

    Each expansion takes the best live prefix, prunes its next-token
    distribution to the nucleus at ``p``, and pushes the surviving
    extensions.  Because extending a sequence only lowers its score, the
    first finished hypothesis popped is optimal within the feasible space.
    Under ``scoring="renormalized"`` the frontier is ordered by per-step
    renormalized log probabilities instead (results still report original
    cumulative scores).  Truncating the frontier to ``candidate_cap`` (and
    ``k_cap``, if set) after every wave is the only source of approximation.
    """
    if config.algorithm != "p_exact":
        raise InvalidConfig(f"p_exact_search called with algorithm {config.algorithm!r}")
    eos = model.vocabulary.eos_id
    renormalized = config.scoring == "renormalized"
    cap = config.candidate_cap if config.k_cap is None else min(config.candidate_cap, config.k_cap)
    frontier = _Frontier()
    root = _root()
    frontier.push((0.0, 0, (), 0), root, 0.0)
    best_dead_end: Optional[Hypothesis] = None
    best_dead_end_key: Optional[tuple] = None
    steps: List[StepTrace] = []

    while len(frontier):
        key, hyp, search_score = frontier.pop_best()
        if hyp.finished:
            # the first finished pop is optimal; any other finished hypotheses
            # still alive in the frontier follow in frontier (score) order
            ordered = (hyp,) + tuple(frontier.finished_items())
            return SearchResult(ordered, False, tuple(steps))
        if len(hyp.tokens) >= config.max_steps:
            if best_dead_end_key is None or key < best_dead_end_key:
                best_dead_end, best_dead_end_key = hyp, key
            continue

        dist = model.next_distribution(context, hyp.tokens)
        if renormalized:
            pruned = tail_prune(dist, config.p)
            nucleus = pruned.nucleus
            step_logs = pruned.distribution.log_probs
        else:
            nucleus = nucleus_set(dist, config.p)
            step_logs = dist.log_probs

        new_keys = []
        for tok in nucleus.token_ids:
            cum = hyp.cum_logprob + float(dist.log_probs[tok])
            child_score = search_score + float(step_logs[tok])
            child_key = (-child_score, len(hyp.tokens) + 1, hyp.tokens + (tok,), _last_rank(hyp))
            frontier.push(child_key, None, child_score)  # hypothesis filled in below
            new_keys.append((child_key, tok, cum))
        # ranks are positions in the frontier after the whole wave's pushes
        ranks = []
        selected = []
        for child_key, tok, cum in new_keys:
            rank = frontier.rank_of(child_key)
            child = Hypothesis(
                tokens=hyp.tokens + (tok,),
                cum_logprob=cum,
                finished=tok == eos,
                rank_history=hyp.rank_history + (rank,),
            )
            frontier.payload[child_key] = (child, frontier.payload[child_key][1])
            ranks.append(rank)
            selected.append(child.tokens)
        pool_size = len(frontier)
        frontier.truncate(cap)
        steps.append(
            StepTrace(
                pool_size=pool_size,
                width=len(frontier),
                ranks=tuple(sorted(ranks)),
                selected=tuple(selected),
                nucleus_mass=nucleus.mass,
            )
        )

    if config.on_unfinished == "error" or best_dead_end is None:
        raise NoFinishedHypothesis(
            f"no sequence within {config.max_steps} steps stays inside the "
            f"top-{config.p} feasible space and ends with EOS"
        )
    return SearchResult((best_dead_end,), True, tuple(steps))


def run_search(model: ScoringModel, context: Optional[str], config: SearchConfig) -> SearchResult:
    """Dispatch to the algorithm named by ``config.algorithm``."""
    if config.algorithm == "beam":
        return beam_search(model, context, config)
    if config.algorithm == "p_exact":
        return p_exact_search(model, context, config)
    return dynamic_beam_search(model, context, config)


# ---------------------------------------------------------------------------
# Max-rank analysis
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MaxRankReport:
    """Partition of instances by the worst pool rank their output survived."""

    threshold: int
    within: Tuple[str, ...]
    beyond: Tuple[str, ...]
    max_rank_by_id: Mapping[str, int] = field(default_factory=dict)

    @property
    def counts(self) -> Tuple[int, int]:
        return (len(self.within), len(self.beyond))


RankSource = Union[SearchResult, Sequence[int]]


def analyze_max_rank(results: Mapping[str, RankSource], threshold: int) -> MaxRankReport:
    """Split instances by ``max(rank_history) <= threshold``.

    ``results`` maps instance ids to SearchResults (whose top hypothesis
    supplies the rank history) or directly to rank sequences.  Instances
    whose output only ever survived at rank ``threshold`` or better land in
    ``within``; the rest land in ``beyond``.
    """
    if threshold < 1:
        raise ValueError(f"threshold must be >= 1, got {threshold}")
    max_ranks: Dict[str, int] = {}
    for instance_id, source in results.items():
        if isinstance(source, SearchResult):
            try:
                ranks = source.top.rank_history
            except EmptyResult as exc:
                raise MissingTrace(f"instance {instance_id!r} has no hypothesis to rank") from exc
        else:
            ranks = tuple(int(r) for r in source)
        max_ranks[instance_id] = max(ranks) if ranks else 0
    within = tuple(sorted(i for i, m in max_ranks.items() if m <= threshold))
    beyond = tuple(sorted(i for i, m in max_ranks.items() if m > threshold))
    return MaxRankReport(threshold=int(threshold), within=within, beyond=beyond, max_rank_by_id=max_ranks)
