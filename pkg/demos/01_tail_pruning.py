"""Tail pruning in one picture.

A probability distribution is cut down to its *nucleus*: the smallest set
of tokens, taken in descending probability order, whose combined mass
reaches a threshold p. Everything outside the nucleus is zeroed and the
survivors are renormalized. Run this to see where the boundary lands for
a single distribution as p grows, including the two conventions that
matter in edge cases: the boundary token that *reaches* p is included
(>= rule), and ties in probability are broken toward lower token ids.
"""

import numpy as np

from nucleus_search import Distribution, nucleus_set, tail_prune

LABELS = ("the", "a", "this", "that", "every", "no")
dist = Distribution(np.array([0.30, 0.25, 0.25, 0.10, 0.06, 0.04]))

print("token probabilities:")
for token_id, label in enumerate(LABELS):
    print(f"  {token_id}: {label!r:8} {dist.probs[token_id]:.2f}")

for p in (0.30, 0.55, 0.80, 1.00):
    nucleus = nucleus_set(dist, p)
    members = ", ".join(LABELS[i] for i in nucleus.token_ids)
    print(f"\np = {p:.2f} -> nucleus of {len(nucleus)} token(s), "
          f"mass {nucleus.mass:.2f}: {members}")
    pruned = tail_prune(dist, p).distribution
    survivors = {LABELS[i]: round(float(pruned.probs[i]), 4)
                 for i in nucleus.token_ids}
    print(f"  renormalized: {survivors} (sum {float(pruned.probs.sum()):.6f})")

# p = 0.30: 'the' alone reaches the target, so the nucleus is a singleton
# even though 'a' is close behind.
# p = 0.55: 'a' and 'this' are tied at 0.25; the lower id ('a') enters first
# and already reaches 0.55, so 'this' stays out.
# p = 1.00: every positive-probability token survives and renormalization
# is the identity.
print("\nthe >= rule means mass never falls short of min(p, total mass),")
print("and raising p only ever grows the nucleus, never reshuffles it.")
