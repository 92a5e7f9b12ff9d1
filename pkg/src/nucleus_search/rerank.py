"""Length-normalized reranking of finished hypotheses.

Raw cumulative log probability favors short sequences because every step
adds a non-positive term.  Dividing the total cost by the sequence length
(EOS included) scores sequences by their average per-token cost instead,
which is the usual antidote when comparing candidates of different lengths.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

from .errors import EmptyResult, UnfinishedHypothesis
from .search import Hypothesis, SearchResult, _result_key


def length_normalized_score(hypothesis: Hypothesis) -> float:
    """Average negative log probability per token: ``-cum_logprob / n``.

    ``n`` counts every emitted token including EOS.  Lower is better.  Only
    finished hypotheses have a defined length.
    """
    if not hypothesis.finished:
        raise UnfinishedHypothesis("cannot length-normalize a hypothesis that never emitted EOS")
    return -hypothesis.cum_logprob / len(hypothesis.tokens)


@dataclass(frozen=True)
class RerankedResult:
    """Finished hypotheses sorted by ascending normalized score, plus the
    scores themselves (parallel tuples)."""

    hypotheses: Tuple[Hypothesis, ...]
    scores: Tuple[float, ...]

    @property
    def top(self) -> Hypothesis:
        return self.hypotheses[0]


def rerank(result: SearchResult) -> RerankedResult:
    """Reorder a result's finished hypotheses by length-normalized score.

    Ties fall back to the global hypothesis tie-break, so reranking the same
    set is deterministic regardless of input order.
    """
    finished = [h for h in result.finished if h.finished]
    if not finished:
        raise EmptyResult("result contains no finished hypotheses to rerank")
    scored = sorted(finished, key=lambda h: (length_normalized_score(h),) + _result_key(h))
    return RerankedResult(
        hypotheses=tuple(scored),
        scores=tuple(length_normalized_score(h) for h in scored),
    )
