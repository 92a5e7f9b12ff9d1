"""Brute-force enumeration used to certify the search implementations.

On vocabularies and depths small enough to enumerate, every EOS-terminated
sequence can be scored directly, which gives an independent ground truth for
the searches: the best sequence overall, or the best sequence whose every
token lies in its step's nucleus.  Nucleus membership is re-derived through
the pruning module's public operations so both sides of an equivalence check
share one threshold rule.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from .errors import SpaceTooLarge
from .models import ScoringModel
from .pruning import check_threshold, nucleus_set, tail_prune

# Hard ceiling on how many sequences enumeration may visit.
MAX_SEQUENCES = 10_000_000


@dataclass(frozen=True)
class EnumeratedSequence:
    """One EOS-terminated sequence with its exact cumulative log probability
    and, per tested threshold, whether every token sat in its step nucleus."""

    tokens: Tuple[int, ...]
    cum_logprob: float
    feasible_under_p: Mapping[float, bool] = field(default_factory=dict)


def space_size(vocab_size: int, max_len: int) -> int:
    """Number of EOS-terminated sequences of total length <= max_len."""
    alphabet = vocab_size - 1
    if alphabet <= 0:
        return 1 if max_len >= 1 else 0
    if alphabet == 1:
        return max_len
    return (alphabet ** max_len - 1) // (alphabet - 1)


def _check_space(model: ScoringModel, max_len: int) -> None:
    if max_len < 1:
        raise ValueError(f"max_len must be >= 1, got {max_len}")
    count = space_size(len(model.vocabulary), max_len)
    if count > MAX_SEQUENCES:
        raise SpaceTooLarge(f"{count} sequences exceed the enumeration limit of {MAX_SEQUENCES}")


def enumerate_sequences(
    model: ScoringModel,
    context: Optional[str],
    max_len: int,
    p_values: Sequence[float] = (),
) -> List[EnumeratedSequence]:
    """Every sequence of at most ``max_len - 1`` non-EOS tokens plus EOS.

    Scores accumulate per-step log probabilities in prefix order, the same
    arithmetic :func:`~nucleus_search.models.score_sequence` performs.  When
    ``p_values`` is given, each sequence also records whether it survives
    nucleus filtering at each threshold.
    """
    _check_space(model, max_len)
    thresholds = tuple(check_threshold(p) for p in p_values)
    eos = model.vocabulary.eos_id
    non_eos = [t for t in range(len(model.vocabulary)) if t != eos]
    out: List[EnumeratedSequence] = []

    def walk(prefix: Tuple[int, ...], score: float, feasible: Tuple[bool, ...]) -> None:
        dist = model.next_distribution(context, prefix)
        memberships = tuple(frozenset(nucleus_set(dist, p).token_ids) for p in thresholds)
        eos_score = score + float(dist.log_probs[eos])
        eos_feasible = tuple(f and eos in m for f, m in zip(feasible, memberships))
        out.append(
            EnumeratedSequence(
                tokens=prefix + (eos,),
                cum_logprob=eos_score,
                feasible_under_p=dict(zip(thresholds, eos_feasible)),
            )
        )
        if len(prefix) + 1 < max_len:
            for tok in non_eos:
                walk(
                    prefix + (tok,),
                    score + float(dist.log_probs[tok]),
                    tuple(f and tok in m for f, m in zip(feasible, memberships)),
                )

    walk((), 0.0, (True,) * len(thresholds))
    return out


def exhaustive_best(
    model: ScoringModel,
    context: Optional[str],
    p: Optional[float],
    max_len: int,
    scoring: str = "original",
) -> Optional[EnumeratedSequence]:
    """Ground-truth argmax over all EOS-terminated sequences up to ``max_len``.

    With ``p`` set, only sequences whose every token lies in its step's
    nucleus compete; ``scoring`` then chooses between the original cumulative
    log probability and the sum of per-step tail-pruned (renormalized) log
    probabilities.  Ties break exactly as in the searches: higher score,
    shorter sequence, lexicographic token ids.  Returns ``None`` when the
    feasible set is empty.  Reported ``cum_logprob`` is always the original
    model score.
    """
    if scoring not in ("original", "renormalized"):
        raise ValueError(f"scoring must be 'original' or 'renormalized', got {scoring!r}")
    _check_space(model, max_len)
    threshold = None if p is None else check_threshold(p)
    use_renormalized = threshold is not None and scoring == "renormalized"
    eos = model.vocabulary.eos_id
    non_eos = [t for t in range(len(model.vocabulary)) if t != eos]
    best: Dict[str, object] = {"key": None, "row": None}

    def offer(tokens: Tuple[int, ...], cum: float, mode_score: float) -> None:
        key = (-mode_score, len(tokens), tokens)
        if best["key"] is None or key < best["key"]:
            best["key"] = key
            best["row"] = EnumeratedSequence(
                tokens=tokens,
                cum_logprob=cum,
                feasible_under_p={} if threshold is None else {threshold: True},
            )

    def walk(prefix: Tuple[int, ...], cum: float, mode_score: float) -> None:
        dist = model.next_distribution(context, prefix)
        if threshold is None:
            members = None
            step_logs = dist.log_probs
        else:
            if use_renormalized:
                pruned = tail_prune(dist, threshold)
                members = frozenset(pruned.nucleus.token_ids)
                step_logs = pruned.distribution.log_probs
            else:
                members = frozenset(nucleus_set(dist, threshold).token_ids)
                step_logs = dist.log_probs
        if members is None or eos in members:
            offer(
                prefix + (eos,),
                cum + float(dist.log_probs[eos]),
                mode_score + float(step_logs[eos]),
            )
        if len(prefix) + 1 < max_len:
            for tok in non_eos:
                if members is None or tok in members:
                    walk(
                        prefix + (tok,),
                        cum + float(dist.log_probs[tok]),
                        mode_score + float(step_logs[tok]),
                    )

    walk((), 0.0, 0.0)
    return best["row"]
