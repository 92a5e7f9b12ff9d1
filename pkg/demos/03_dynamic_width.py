"""Dynamic beams spend width only where the model is uncertain.

A fixed-width beam explores k hypotheses per step no matter how peaked
the candidate pool is. The dynamic variant instead normalizes the pool's
scores into a distribution, takes its nucleus at threshold p, and uses
the nucleus size as the width for that step: near-ties keep many
candidates alive, confident steps keep few.

The model below is uncertain between 'a' and 'b' everywhere, so the pool
of near-tied candidates grows every step and the width follows it until
a k_cap clamps it.
"""

import numpy as np

from nucleus_search import (
    Distribution,
    EOS_TOKEN,
    SearchConfig,
    TableModel,
    Vocabulary,
    dynamic_beam_search,
)

vocab = Vocabulary(("a", "b", EOS_TOKEN))
near_tie = Distribution(np.array([0.4999995, 0.4999995, 0.000001]))
model = TableModel(vocab, {"": {(): near_tie}}, fallback=near_tie)


def show(label, config):
    result = dynamic_beam_search(model, "", config)
    print(f"{label}:")
    print("  step   pool  width  nucleus mass")
    for step_number, step in enumerate(result.trace, start=1):
        print(f"  {step_number:4d} {step.pool_size:6d} {step.width:6d}"
              f"  {step.nucleus_mass:.6f}")
    print()


show("p = 0.6, uncapped     (width grows as near-ties multiply)",
     SearchConfig.dynamic(p=0.6, max_steps=3, on_unfinished="return_flagged"))

show("p = 0.6, k_cap = 3    (same choices, clamped)",
     SearchConfig.dynamic(p=0.6, k_cap=3, max_steps=3,
                          on_unfinished="return_flagged"))

show("p = 0.05, uncapped    (a confident-looking pool: width stays 1)",
     SearchConfig.dynamic(p=0.05, max_steps=3, on_unfinished="return_flagged"))

print("hypotheses keep their original cumulative log probabilities;")
print("the normalization only decides how many survive each step.")
