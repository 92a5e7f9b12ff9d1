"""Top-p (nucleus) truncation of probability distributions.

The nucleus of a distribution at threshold ``p`` is the smallest set of
tokens, taken in descending probability order, whose cumulative probability
reaches ``p``.  Cumulative comparison uses ``>=`` and ties between equal
probabilities are broken by ascending token id, so the set is deterministic.
Tail pruning zeroes everything outside the nucleus and renormalizes the rest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .errors import InvalidThreshold
from .models import Distribution


def check_threshold(p: float) -> float:
    """Validate a nucleus threshold; returns it as a plain float."""
    p = float(p)
    if not (0.0 < p <= 1.0) or math.isnan(p):
        raise InvalidThreshold(f"threshold must lie in (0, 1], got {p!r}")
    return p


@dataclass(frozen=True)
class Nucleus:
    """The chosen token ids (descending probability, ascending id on ties),
    their total original probability mass, and the threshold that produced
    them."""

    token_ids: Tuple[int, ...]
    mass: float
    p: float

    def __contains__(self, token_id: int) -> bool:
        return token_id in self.token_ids

    def __len__(self) -> int:
        return len(self.token_ids)


@dataclass(frozen=True)
class PrunedDistribution:
    """A renormalized distribution together with the nucleus that shaped it."""

    distribution: Distribution
    nucleus: Nucleus


def nucleus_cut(sorted_probs: np.ndarray, p: float) -> Tuple[int, float]:
    """Size and mass of the shortest prefix of a descending-sorted probability
    vector whose cumulative sum reaches ``p``.

    The target is capped at the vector's own total so that ``p = 1.0`` selects
    exactly the positive-probability prefix even when floating-point rounding
    leaves the total a hair under one.  This is the one threshold rule shared
    by token-level pruning and the candidate-pool pruning inside the dynamic
    search.
    """
    p = check_threshold(p)
    if len(sorted_probs) == 0:
        raise ValueError("cannot take the nucleus of an empty vector")
    cum = np.cumsum(sorted_probs)
    target = min(p, float(cum[-1]))
    idx = int(np.searchsorted(cum, target, side="left"))
    return idx + 1, float(cum[idx])


def nucleus_set(dist: Distribution, p: float) -> Nucleus:
    """Smallest set of tokens whose cumulative probability reaches ``p``."""
    p = check_threshold(p)
    ids = np.arange(len(dist))
    # primary key: probability descending; tie key: token id ascending
    order = np.lexsort((ids, -dist.probs))
    size, mass = nucleus_cut(dist.probs[order], p)
    return Nucleus(tuple(int(i) for i in order[:size]), mass, p)


def tail_prune(dist: Distribution, p: float) -> PrunedDistribution:
    """Zero every token outside the nucleus and renormalize the rest.

    Nucleus members keep their relative proportions (divided by the nucleus
    mass); everything else gets probability exactly zero.
    """
    nucleus = nucleus_set(dist, p)
    member_ids = list(nucleus.token_ids)
    out = np.zeros(len(dist), dtype=np.float64)
    out[member_ids] = dist.probs[member_ids] / nucleus.mass
    return PrunedDistribution(Distribution(out), nucleus)
