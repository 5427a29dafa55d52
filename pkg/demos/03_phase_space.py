# %% [markdown]
# # Covariance matrices and symplectic transport
#
# Coherent states are Gaussian, so each is fixed by a real covariance matrix.
# A group element g acts on labels by a fractional linear map and on
# covariance matrices by a real symplectic matrix s(g); the two actions agree.

# %%
import numpy as np

from supq import covariance, is_symplectic, mobius_act, omega, random_disc_point, random_group_element, symplectic_of

np.set_printoptions(precision=4, suppress=True)
print(covariance([[0.6]]))

# %%
rng = np.random.default_rng(2)
worst = 0.0
for _ in range(100):
    g = random_group_element(rng, 2, 1)
    L = random_disc_point(rng, 2, 1)
    S = symplectic_of(g)
    worst = max(worst, np.abs(covariance(mobius_act(g, L)) - S @ covariance(L) @ S.T).max())
print("worst transport residual:", worst)

# %% [markdown]
# Each s(g) preserves the symplectic form, and every coherent covariance is
# a pure-state covariance: G W G^T = W and det G = 1.

# %%
G = covariance(random_disc_point(rng, 2, 2))
W = omega(2, 2)
print(is_symplectic(S, 2, 1), np.abs(G @ W @ G.T - W).max(), np.linalg.det(G))
