"""Shared fixtures and independent reference implementations for the tests.

Everything here is deliberately written the dumb way (sorting by explicit
keys, accumulating with ``math.fsum``) so it cannot share a bug with the
library code it checks.
"""

import math

import numpy as np

from nucleus_search import Distribution, EOS_TOKEN, TableModel, Vocabulary


def dist_over(vocab, probs_by_token):
    """Distribution from a {token: prob} mapping; missing tokens get 0."""
    vec = np.zeros(len(vocab))
    for token, prob in probs_by_token.items():
        vec[vocab.id_of(token)] = prob
    return Distribution(vec)


def table_model(tokens, entries_by_context, fallback=None):
    """TableModel from string-keyed fixtures.

    ``entries_by_context`` maps a context id to {prefix string: {token: prob}}
    where the prefix string is space-joined tokens ("" for the root).
    """
    vocab = Vocabulary(tokens)
    entries = {}
    for ctx, by_prefix in entries_by_context.items():
        inner = {}
        for prefix_str, probs in by_prefix.items():
            prefix = tuple(vocab.id_of(t) for t in prefix_str.split())
            inner[prefix] = dist_over(vocab, probs)
        entries[ctx] = inner
    fb = dist_over(vocab, fallback) if fallback is not None else None
    return TableModel(vocab, entries, fb)


def eos_bias_model():
    """Three-token model where the empty sequence is the unpruned argmax.

    Ending immediately costs probability 0.2, while each continuation costs
    0.4; after the first token everything is uniform.  Classic setup where
    maximizing raw sequence probability yields the empty output.
    """
    third = 1.0 / 3.0
    return table_model(
        ["a", "b", EOS_TOKEN],
        {"": {"": {"a": 0.4, "b": 0.4, EOS_TOKEN: 0.2}}},
        fallback={"a": third, "b": third, EOS_TOKEN: third},
    )


def eos_starve_model():
    """Model whose nucleus at p <= 0.9 never contains EOS.

    The root gives EOS probability zero and every later step gives it 0.1
    behind two 0.45 tokens, so no finished sequence survives pruning.
    """
    return table_model(
        ["a", "b", EOS_TOKEN],
        {"": {"": {"a": 0.5, "b": 0.5}}},
        fallback={"a": 0.45, "b": 0.45, EOS_TOKEN: 0.1},
    )


def cap_mismatch_model():
    """Fixture where frontier truncation provably changes the p-exact result.

    At p = 0.9 the only cheap finished sequence goes through ``b``, but the
    greedy-looking ``a`` branch scores higher at depth one, so a frontier
    capped at one candidate follows ``a`` into a dead end.
    """
    return table_model(
        ["a", "b", EOS_TOKEN],
        {"": {
            "": {"a": 0.55, "b": 0.43, EOS_TOKEN: 0.02},
            "a": {"a": 0.45, "b": 0.45, EOS_TOKEN: 0.1},
            "b": {"a": 0.05, "b": 0.05, EOS_TOKEN: 0.9},
        }},
        fallback={"a": 1 / 3, "b": 1 / 3, EOS_TOKEN: 1 / 3},
    )


def greedy_decode(model, context, max_steps):
    """Independent greedy reference: argmax token each step, lowest id on ties.

    Returns (token ids, cumulative log probability, finished flag).
    """
    tokens = []
    total = 0.0
    eos = model.vocabulary.eos_id
    for _ in range(max_steps):
        dist = model.next_distribution(context, tokens)
        best = min(range(len(dist)), key=lambda i: (-dist.probs[i], i))
        tokens.append(best)
        total += float(dist.log_probs[best])
        if best == eos:
            return tuple(tokens), total, True
    return tuple(tokens), total, False


def reference_nucleus(probs, p):
    """Linear-scan nucleus: ids in descending probability, ascending id order,
    accumulated until the running mass reaches min(p, total)."""
    order = sorted(range(len(probs)), key=lambda i: (-probs[i], i))
    total = math.fsum(probs)
    target = min(p, total)
    chosen = []
    mass = 0.0
    for i in order:
        chosen.append(i)
        mass += probs[i]
        if mass >= target:
            break
    return tuple(chosen)


def unfinished_mass(model, context, max_len):
    """Total probability of all length-``max_len`` prefixes with no EOS,
    i.e. the mass enumeration cannot capture as finished sequences."""
    eos = model.vocabulary.eos_id
    non_eos = [t for t in range(len(model.vocabulary)) if t != eos]

    def walk(prefix, prob):
        if len(prefix) == max_len:
            return prob
        dist = model.next_distribution(context, prefix)
        return math.fsum(walk(prefix + (t,), prob * float(dist.probs[t])) for t in non_eos)

    return walk((), 1.0)
