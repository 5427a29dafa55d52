# %% [markdown]
# # Tracing out replicas
#
# Start from an invariant state on n + k replicas and trace out k of them.
# The result is close to a mixture of coherent states on the remaining n,
# with distance at most 3npq / (2(n + k - p - q)). We compute the distance
# directly for p = q = 1.

# %%
import numpy as np

from supq import CoherentState, bargmann_inner, definetti_gap, expand, ratio_and_bound
from supq.definetti import su11_state

for k in (2, 4, 6):
    psi = expand(CoherentState([[0.3]], 2 + k), 8)
    psi = psi.scale(1 / np.sqrt(complex(bargmann_inner(psi, psi)).real))
    r = definetti_gap(psi, 2, k)
    print(f"k={k}: distance {r.distance:.4f}  bound {r.theorem_bound:.3f}  tail {r.tail:.3f}")

# %% [markdown]
# A less classical input: the top vector of a four-dimensional invariant
# block.

# %%
r = definetti_gap(su11_state([0, 0, 0, 1], 4), 2, 2)
print(r.distance, r.theorem_bound)

# %% [markdown]
# The mixture's trace is the ratio of normalization constants C_k / C_{n+k},
# an exact rational that can be checked against its lower bound.

# %%
rb = ratio_and_bound(1, 1, 4, 40)
print(rb.ratio, float(rb.ratio), rb.lower_bound, rb.respects_lower_bound)
