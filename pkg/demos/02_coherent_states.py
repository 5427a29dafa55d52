# %% [markdown]
# # Coherent states on the matrix ball
#
# Each p x q matrix L with spectral norm below one labels a normalized state
# det(1 - L L^+)^{n/2} exp(tr L^T Z). Overlaps have the closed form
# det(1 - L1^+ L2)^{-n} times the normalizations; here we compare it with a
# truncated power series and check that group transformations preserve
# fidelities.

# %%
import numpy as np

from supq import CoherentState, bargmann_inner, expand, fidelity, overlap, random_disc_point, random_group_element
from supq import mobius_act

rng = np.random.default_rng(1)
L1, L2 = random_disc_point(rng, 1, 2), random_disc_point(rng, 1, 2)
closed = overlap(L1, L2, 1)
for d in (10, 20, 40):
    series = complex(bargmann_inner(expand(CoherentState(L1, 1), d), expand(CoherentState(L2, 1), d)))
    print(f"d={d:>2}  |series - closed| / |closed| = {abs(series - closed) / abs(closed):.2e}")

# %% [markdown]
# Fidelity is unchanged when both labels are moved by the same element of
# SU(p,q).

# %%
g = random_group_element(rng, 1, 2)
print(fidelity(L1, L2, 3), fidelity(mobius_act(g, L1), mobius_act(g, L2), 3))

# %% [markdown]
# For p = q = 1 and n = 1 the state with parameter lambda is a two-mode
# squeezed vacuum: the coefficient of (z z')^k is proportional to lambda^k.

# %%
psi = expand(CoherentState([[0.5]], 1), 6)
for key, c in sorted(psi.terms.items()):
    print(key, complex(c))
