"""Why prune at all? The degenerate-optimum problem.

Autoregressive models often put a fat chunk of probability on stopping
immediately, because every one of the many longer continuations has to
split what is left. Exact unpruned search then happily returns the empty
sequence. Restricting every step to the nucleus removes the early-stop
token whenever it is not among the most probable continuations, and the
*pruned* optimum becomes a sequence people would actually want.

This script builds a tiny model with that shape, shows the unpruned
optimum, then shows what exact search returns once steps are pruned at
p = 0.7. It also shows that a narrow beam has the opposite failure mode
on the same model: width 2 never selects the stop token at all.
"""

import math

import numpy as np

from nucleus_search import (
    Distribution,
    EOS_TOKEN,
    NoFinishedHypothesis,
    SearchConfig,
    TableModel,
    Vocabulary,
    beam_search,
    exhaustive_best,
    p_exact_search,
)

vocab = Vocabulary(("a", "b", EOS_TOKEN))
root = Distribution(np.array([0.4, 0.4, 0.2]))
uniform = Distribution(np.array([1 / 3, 1 / 3, 1 / 3]))
model = TableModel(vocab, {"": {(): root}}, fallback=uniform)

print("step 1 distribution:  a 0.40   b 0.40   <stop> 0.20")
print("every later step:     uniform thirds\n")

best = exhaustive_best(model, "", None, 4)
print(f"unpruned optimum: {vocab.to_tokens(best.tokens)} "
      f"(prob {math.exp(best.cum_logprob):.4f})")
print("  stopping immediately beats any two-step sequence, because the")
print("  best of those costs 0.4 * 1/3 = 0.1333.\n")

result = p_exact_search(model, "", SearchConfig.p_exact(p=0.7, max_steps=4))
top = result.top
print(f"p-exact at p=0.7: {vocab.to_tokens(top.tokens)} "
      f"(prob {math.exp(top.cum_logprob):.4f})")
print("  at the root, {a, b} already covers 0.7, so stopping is pruned;")
print("  after 'a' the uniform step keeps all three tokens and the search")
print("  stops at the first feasible finished sequence.\n")

try:
    beam_search(model, "", SearchConfig.beam(k=2, max_steps=4))
except NoFinishedHypothesis:
    print("beam with k=2: no finished hypothesis at all --")
    print("  both slots go to 'a'/'b' continuations every step and the")
    print("  stop token is never competitive. A wider beam (k=3) fixes it:")

wide = beam_search(model, "", SearchConfig.beam(k=3, max_steps=4))
print(f"beam with k=3: {vocab.to_tokens(wide.top.tokens)} "
      f"(prob {math.exp(wide.top.cum_logprob):.4f})")
