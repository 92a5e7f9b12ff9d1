"""Vocabularies, next-token distributions, and autoregressive scoring models.

A scoring model maps a (context id, prefix of token ids) pair to a
:class:`Distribution` over the next token.  Sequence probability factorizes
autoregressively, so the log probability of a full sequence is the sum of
per-step log probabilities; :func:`score_sequence` is the single code path
used for that sum everywhere in the library.

Three backends are provided:

* :class:`TableModel` -- explicit lookup table, the workhorse for small
  hand-built fixtures and for seeded random models.
* :class:`NGramModel` -- add-k smoothed n-gram counts, trained from plain
  text with :func:`train_ngram`.  Distributions are strictly positive.
* :func:`random_model` -- reproducible Dirichlet-sampled table models for
  fuzzing searches against the brute-force oracle.
"""

from __future__ import annotations

import itertools
import json
import threading
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

import numpy as np

from .errors import (
    EmptyCorpus,
    InvalidDistribution,
    InvalidTokenId,
    MisplacedEos,
    ModelFormatError,
    UnknownContext,
)

EOS_TOKEN = "</s>"
# Internal history-padding marker for n-gram models.  It never appears in a
# Vocabulary and corpora must not contain it.
BOS_TOKEN = "<s>"

# |sum(probs) - 1| tolerance for in-memory distributions vs. model files.
SUM_TOLERANCE = 1e-9
FILE_SUM_TOLERANCE = 1e-6


class Vocabulary:
    """Ordered token inventory with a reserved end-of-sequence token.

    Token ids are dense indices into ``tokens``.  The EOS string is always
    ``"</s>"`` and must be present exactly once.
    """

    __slots__ = ("tokens", "eos_id", "_ids")

    def __init__(self, tokens: Sequence[str]):
        toks = tuple(tokens)
        if not toks:
            raise ModelFormatError("vocabulary is empty")
        seen = set()
        for t in toks:
            if not isinstance(t, str) or not t:
                raise ModelFormatError(f"vocabulary token {t!r} is not a non-empty string")
            if t in seen:
                raise ModelFormatError(f"vocabulary token {t!r} appears more than once")
            seen.add(t)
        if EOS_TOKEN not in seen:
            raise ModelFormatError(f"vocabulary must contain the EOS token {EOS_TOKEN!r}")
        self.tokens = toks
        self.eos_id = toks.index(EOS_TOKEN)
        self._ids = {t: i for i, t in enumerate(toks)}

    def __len__(self) -> int:
        return len(self.tokens)

    def __eq__(self, other) -> bool:
        return isinstance(other, Vocabulary) and self.tokens == other.tokens

    def __repr__(self) -> str:
        return f"Vocabulary({len(self.tokens)} tokens, eos_id={self.eos_id})"

    def id_of(self, token: str) -> int:
        try:
            return self._ids[token]
        except KeyError:
            raise InvalidTokenId(f"token {token!r} is not in the vocabulary") from None

    def to_tokens(self, ids: Sequence[int]) -> Tuple[str, ...]:
        return tuple(self.tokens[i] for i in ids)


class Distribution:
    """A next-token probability vector with cached natural-log values.

    Both arrays are read-only; a Distribution is safe to share across
    concurrent searches.
    """

    __slots__ = ("probs", "log_probs")

    def __init__(self, probs):
        arr = np.array(probs, dtype=np.float64)
        if arr.ndim != 1 or arr.size == 0:
            raise InvalidDistribution("probabilities must form a non-empty vector")
        if not np.all(np.isfinite(arr)) or np.any(arr < 0.0):
            raise InvalidDistribution("probabilities must be finite and non-negative")
        total = float(arr.sum())
        if abs(total - 1.0) > SUM_TOLERANCE:
            raise InvalidDistribution(f"probabilities sum to {total!r}, not 1")
        with np.errstate(divide="ignore"):
            logs = np.log(arr)
        arr.setflags(write=False)
        logs.setflags(write=False)
        self.probs = arr
        self.log_probs = logs

    @classmethod
    def normalized(cls, probs, tolerance: float = FILE_SUM_TOLERANCE) -> "Distribution":
        """Validate against a looser sum tolerance, then renormalize exactly.

        This is the loading path for model files: values straight from JSON
        may carry serialization noise up to ``tolerance`` and are divided by
        their sum before the strict constructor sees them.
        """
        arr = np.array(probs, dtype=np.float64)
        if arr.ndim != 1 or arr.size == 0:
            raise InvalidDistribution("probabilities must form a non-empty vector")
        if not np.all(np.isfinite(arr)) or np.any(arr < 0.0):
            raise InvalidDistribution("probabilities must be finite and non-negative")
        total = float(arr.sum())
        if abs(total - 1.0) > tolerance:
            raise InvalidDistribution(f"probabilities sum to {total!r}, outside tolerance {tolerance}")
        return cls(arr / total)

    def __len__(self) -> int:
        return int(self.probs.size)

    def __repr__(self) -> str:
        return f"Distribution({np.array2string(self.probs, precision=4)})"


def _check_prefix(vocab: Vocabulary, prefix: Sequence[int]) -> Tuple[int, ...]:
    """Validate a prefix of token ids: in range and EOS-free."""
    out = tuple(int(t) for t in prefix)
    n = len(vocab)
    for t in out:
        if t < 0 or t >= n:
            raise InvalidTokenId(f"token id {t} is outside the vocabulary of size {n}")
        if t == vocab.eos_id:
            raise InvalidTokenId("prefix must not contain the EOS token")
    return out


class ScoringModel:
    """Interface for deterministic autoregressive models.

    Implementations are immutable after construction and must return
    bitwise-identical distributions for identical inputs, which makes them
    safe to share across threads.
    """

    vocabulary: Vocabulary

    def next_distribution(self, context: Optional[str], prefix: Sequence[int]) -> Distribution:
        """Distribution over the next token given ``context`` and ``prefix``.

        ``context`` conditions the whole sequence (``None`` and ``""`` both
        mean "unconditional"): table models use it as an opaque lookup key,
        n-gram models read it as whitespace-separated conditioning tokens.
        ``prefix`` is the sequence of non-EOS token ids generated so far.
        """
        raise NotImplementedError


class TableModel(ScoringModel):
    """Explicit lookup table: one stored Distribution per (context, prefix).

    An optional fallback distribution answers lookups with no entry; without
    it, a missing entry raises :class:`UnknownContext`.
    """

    def __init__(
        self,
        vocabulary: Vocabulary,
        entries: Mapping[str, Mapping[Tuple[int, ...], Distribution]],
        fallback: Optional[Distribution] = None,
    ):
        self.vocabulary = vocabulary
        size = len(vocabulary)
        table: Dict[str, Dict[Tuple[int, ...], Distribution]] = {}
        for ctx, prefixes in entries.items():
            if not isinstance(ctx, str):
                raise ModelFormatError(f"context key {ctx!r} is not a string")
            inner: Dict[Tuple[int, ...], Distribution] = {}
            for prefix, dist in prefixes.items():
                checked = _check_prefix(vocabulary, prefix)
                if len(dist) != size:
                    raise ModelFormatError(
                        f"entry for context {ctx!r}, prefix {checked!r} has "
                        f"{len(dist)} probabilities for a vocabulary of {size}"
                    )
                inner[checked] = dist
            table[ctx] = inner
        if fallback is not None and len(fallback) != size:
            raise ModelFormatError("fallback distribution does not match the vocabulary size")
        self._entries = table
        self._fallback = fallback

    @property
    def entries(self) -> Mapping[str, Mapping[Tuple[int, ...], Distribution]]:
        return self._entries

    @property
    def fallback(self) -> Optional[Distribution]:
        return self._fallback

    def next_distribution(self, context: Optional[str], prefix: Sequence[int]) -> Distribution:
        checked = _check_prefix(self.vocabulary, prefix)
        ctx = context or ""
        dist = self._entries.get(ctx, {}).get(checked)
        if dist is None:
            dist = self._fallback
        if dist is None:
            raise UnknownContext(
                f"no entry for context {ctx!r} and prefix of length {len(checked)}, and no fallback"
            )
        return dist


class NGramModel(ScoringModel):
    """Add-k smoothed n-gram model.

    ``counts`` maps a history (tuple of ``order - 1`` token strings, padded on
    the left with the internal begin marker) to per-token occurrence counts.
    Every probability is ``(count + add_k) / (total + add_k * |V|)``, hence
    strictly positive.  Histories outside ``counts`` fall back to the uniform
    smoothed distribution, so the model is defined for every prefix.
    """

    _CACHE_LIMIT = 65536

    def __init__(
        self,
        vocabulary: Vocabulary,
        order: int,
        counts: Mapping[Tuple[str, ...], Mapping[str, int]],
        add_k: float,
    ):
        if order < 1:
            raise ValueError(f"order must be >= 1, got {order}")
        if not add_k > 0:
            raise ValueError(f"add_k must be > 0, got {add_k}")
        self.vocabulary = vocabulary
        self.order = int(order)
        self.add_k = float(add_k)
        allowed = set(vocabulary.tokens)
        history_alphabet = (allowed - {EOS_TOKEN}) | {BOS_TOKEN}
        normalized: Dict[Tuple[str, ...], Dict[str, int]] = {}
        for history, per_token in counts.items():
            hist = tuple(history)
            if len(hist) != self.order - 1:
                raise ModelFormatError(
                    f"history {hist!r} has length {len(hist)}, expected {self.order - 1}"
                )
            for tok in hist:
                if tok not in history_alphabet:
                    raise ModelFormatError(f"history token {tok!r} is not in the vocabulary")
            inner: Dict[str, int] = {}
            for tok, count in per_token.items():
                if tok not in allowed:
                    raise ModelFormatError(f"counted token {tok!r} is not in the vocabulary")
                c = int(count)
                if c < 0:
                    raise ModelFormatError(f"count for token {tok!r} is negative")
                inner[tok] = c
            normalized[hist] = inner
        self.counts = normalized
        self._allowed = allowed
        self._cache: Dict[Tuple[str, ...], Distribution] = {}
        self._cache_lock = threading.Lock()

    def _context_names(self, context: Optional[str]) -> Tuple[str, ...]:
        names = tuple(context.split()) if context else ()
        for name in names:
            if name == EOS_TOKEN or name == BOS_TOKEN or name not in self._allowed:
                raise UnknownContext(
                    f"context token {name!r} is not a usable vocabulary token"
                )
        return names

    def _history(self, context_names: Tuple[str, ...], prefix: Tuple[int, ...]) -> Tuple[str, ...]:
        if self.order == 1:
            return ()
        names = context_names + tuple(self.vocabulary.tokens[i] for i in prefix)
        padded = (BOS_TOKEN,) * (self.order - 1) + names
        return padded[-(self.order - 1):]

    def _distribution_for(self, history: Tuple[str, ...]) -> Distribution:
        cached = self._cache.get(history)
        if cached is not None:
            return cached
        size = len(self.vocabulary)
        weights = np.full(size, self.add_k, dtype=np.float64)
        per_token = self.counts.get(history, {})
        total = 0
        for tok, count in per_token.items():
            weights[self.vocabulary.id_of(tok)] += count
            total += count
        dist = Distribution(weights / (total + self.add_k * size))
        with self._cache_lock:
            if len(self._cache) < self._CACHE_LIMIT:
                self._cache[history] = dist
        return dist

    def next_distribution(self, context: Optional[str], prefix: Sequence[int]) -> Distribution:
        """Distribution after ``context`` (whitespace-separated conditioning
        tokens) followed by ``prefix``; only the last ``order - 1`` of the
        combined history matter."""
        checked = _check_prefix(self.vocabulary, prefix)
        return self._distribution_for(self._history(self._context_names(context), checked))


def score_sequence(model: ScoringModel, context: Optional[str], tokens: Sequence[int]) -> float:
    """Cumulative log probability of a complete sequence.

    The sequence must be non-empty and contain exactly one EOS, at the final
    position.  The returned value is the sum of per-step log probabilities
    from :meth:`ScoringModel.next_distribution`; a zero-probability step makes
    it ``-inf``.
    """
    toks = tuple(int(t) for t in tokens)
    if not toks:
        raise MisplacedEos("cannot score an empty sequence")
    eos = model.vocabulary.eos_id
    size = len(model.vocabulary)
    for t in toks:
        if t < 0 or t >= size:
            raise InvalidTokenId(f"token id {t} is outside the vocabulary of size {size}")
    if toks[-1] != eos:
        raise MisplacedEos("sequence must end with the EOS token")
    if eos in toks[:-1]:
        raise MisplacedEos("EOS may only appear at the final position")
    total = 0.0
    for t, tok in enumerate(toks):
        dist = model.next_distribution(context, toks[:t])
        total += float(dist.log_probs[tok])
    return total


def train_ngram(corpus: Iterable[str], order: int, add_k: float = 1.0) -> NGramModel:
    """Count n-grams from lines of whitespace-separated tokens.

    Every line implicitly ends with one EOS event; EOS never appears mid-line
    and the corpus must not contain the reserved ``</s>`` / ``<s>`` strings.
    The vocabulary is the sorted set of corpus tokens plus EOS.  Blank lines
    are ignored.
    """
    if order < 1:
        raise ValueError(f"order must be >= 1, got {order}")
    if not add_k > 0:
        raise ValueError(f"add_k must be > 0, got {add_k}")
    lines = [line.split() for line in corpus]
    lines = [line for line in lines if line]
    if not lines:
        raise EmptyCorpus("corpus contains no non-blank lines")
    seen = set()
    for line in lines:
        for tok in line:
            if tok in (EOS_TOKEN, BOS_TOKEN):
                raise ModelFormatError(f"corpus contains the reserved token {tok!r}")
            seen.add(tok)
    vocab = Vocabulary(sorted(seen) + [EOS_TOKEN])
    counts: Dict[Tuple[str, ...], Dict[str, int]] = {}
    for line in lines:
        history = (BOS_TOKEN,) * (order - 1)
        for tok in line + [EOS_TOKEN]:
            per_token = counts.setdefault(history, {})
            per_token[tok] = per_token.get(tok, 0) + 1
            if order > 1:
                history = (history + (tok,))[-(order - 1):]
    return NGramModel(vocab, order, counts, add_k)


# Guard against accidentally materializing an enormous prefix table.
_MAX_TABLE_ENTRIES = 1_000_000


def random_model(
    seed: int,
    vocab_size: int,
    max_prefix_len: int,
    concentration: float = 1.0,
) -> TableModel:
    """Reproducible random table model for fuzzing.

    Tokens are ``t0 .. t{n-2}`` plus EOS.  Every prefix of non-EOS tokens up
    to ``max_prefix_len`` receives an independent draw from a symmetric
    Dirichlet with the given concentration (large values give near-uniform
    distributions).  Identical arguments produce bitwise-identical models.
    """
    if vocab_size < 2:
        raise ValueError(f"vocab_size must be >= 2, got {vocab_size}")
    if max_prefix_len < 1:
        raise ValueError(f"max_prefix_len must be >= 1, got {max_prefix_len}")
    if not concentration > 0:
        raise ValueError(f"concentration must be > 0, got {concentration}")
    alphabet = vocab_size - 1
    count = max_prefix_len + 1 if alphabet == 1 else (alphabet ** (max_prefix_len + 1) - 1) // (alphabet - 1)
    if count > _MAX_TABLE_ENTRIES:
        raise ValueError(f"prefix table would hold {count} entries (limit {_MAX_TABLE_ENTRIES})")
    vocab = Vocabulary([f"t{i}" for i in range(alphabet)] + [EOS_TOKEN])
    rng = np.random.default_rng(seed)
    alpha = np.full(vocab_size, float(concentration))
    prefixes: Dict[Tuple[int, ...], Distribution] = {}
    for length in range(max_prefix_len + 1):
        for prefix in itertools.product(range(alphabet), repeat=length):
            prefixes[prefix] = Distribution(rng.dirichlet(alpha))
    return TableModel(vocab, {"": prefixes})


# ---------------------------------------------------------------------------
# Model files
#
# JSON schema:
#   {"type": "table", "vocab": [...], "entries": {ctx: {prefix key: [probs]}},
#    "fallback": [probs]?}                     -- prefix key: space-joined
#                                                 token strings, "" for empty
#   {"type": "ngram", "vocab": [...], "order": n, "add_k": k,
#    "counts": {history key: {token: count}}}  -- history key: space-joined,
#                                                 may contain the pad marker
# Probabilities are validated to sum to 1 within 1e-6, then renormalized.
# ---------------------------------------------------------------------------


def save_model(model: ScoringModel, path) -> None:
    """Serialize a TableModel or NGramModel to a JSON file."""
    if isinstance(model, TableModel):
        payload = {
            "type": "table",
            "vocab": list(model.vocabulary.tokens),
            "entries": {
                ctx: {
                    " ".join(model.vocabulary.tokens[i] for i in prefix): [float(x) for x in dist.probs]
                    for prefix, dist in sorted(prefixes.items())
                }
                for ctx, prefixes in sorted(model.entries.items())
            },
        }
        if model.fallback is not None:
            payload["fallback"] = [float(x) for x in model.fallback.probs]
    elif isinstance(model, NGramModel):
        payload = {
            "type": "ngram",
            "vocab": list(model.vocabulary.tokens),
            "order": model.order,
            "add_k": model.add_k,
            "counts": {
                " ".join(history): dict(sorted(per_token.items()))
                for history, per_token in sorted(model.counts.items())
            },
        }
    else:
        raise ModelFormatError(f"cannot serialize model of type {type(model).__name__}")
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=False)
        fh.write("\n")


def _load_probs(raw, size: int, where: str) -> Distribution:
    if not isinstance(raw, list) or len(raw) != size:
        raise ModelFormatError(f"{where}: expected a list of {size} probabilities")
    try:
        return Distribution.normalized(raw)
    except InvalidDistribution as exc:
        raise ModelFormatError(f"{where}: {exc}") from exc


def load_model(path) -> ScoringModel:
    """Load a model file written by :func:`save_model` (or by hand)."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            payload = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ModelFormatError(f"{path}: not valid JSON ({exc})") from exc
    if not isinstance(payload, dict):
        raise ModelFormatError(f"{path}: top-level value must be an object")
    kind = payload.get("type")
    vocab_raw = payload.get("vocab")
    if not isinstance(vocab_raw, list):
        raise ModelFormatError(f"{path}: 'vocab' must be a list of token strings")
    vocab = Vocabulary(vocab_raw)
    size = len(vocab)

    if kind == "table":
        entries_raw = payload.get("entries")
        if not isinstance(entries_raw, dict):
            raise ModelFormatError(f"{path}: 'entries' must be an object")
        entries: Dict[str, Dict[Tuple[int, ...], Distribution]] = {}
        for ctx, prefixes_raw in entries_raw.items():
            if not isinstance(prefixes_raw, dict):
                raise ModelFormatError(f"{path}: entries for context {ctx!r} must be an object")
            inner: Dict[Tuple[int, ...], Distribution] = {}
            for key, raw in prefixes_raw.items():
                names = key.split() if key else []
                try:
                    prefix = tuple(vocab.id_of(name) for name in names)
                except InvalidTokenId as exc:
                    raise ModelFormatError(f"{path}: prefix key {key!r}: {exc}") from exc
                inner[prefix] = _load_probs(raw, size, f"{path}: context {ctx!r}, prefix {key!r}")
            entries[ctx] = inner
        fallback = None
        if "fallback" in payload:
            fallback = _load_probs(payload["fallback"], size, f"{path}: fallback")
        try:
            return TableModel(vocab, entries, fallback)
        except (ModelFormatError, InvalidTokenId) as exc:
            raise ModelFormatError(f"{path}: {exc}") from exc

    if kind == "ngram":
        order = payload.get("order")
        add_k = payload.get("add_k")
        counts_raw = payload.get("counts")
        if not isinstance(order, int):
            raise ModelFormatError(f"{path}: 'order' must be an integer")
        if not isinstance(add_k, (int, float)):
            raise ModelFormatError(f"{path}: 'add_k' must be a number")
        if not isinstance(counts_raw, dict):
            raise ModelFormatError(f"{path}: 'counts' must be an object")
        counts: Dict[Tuple[str, ...], Dict[str, int]] = {}
        for key, per_token in counts_raw.items():
            if not isinstance(per_token, dict):
                raise ModelFormatError(f"{path}: counts for history {key!r} must be an object")
            history = tuple(key.split()) if key else ()
            counts[history] = per_token
        try:
            return NGramModel(vocab, order, counts, add_k)
        except (ModelFormatError, ValueError) as exc:
            raise ModelFormatError(f"{path}: {exc}") from exc

    raise ModelFormatError(f"{path}: unknown model type {kind!r}")
