# %% [markdown]
# # Invariant polynomials on n replicas
#
# A state of n replicas of p + q bosonic modes is a polynomial in the
# variables z[t, i] and z'[t, j]. Simultaneous rotations of the replica index
# leave the contractions Z_ij = sum_t z[t, i] z'[t, j] fixed, and the
# invariant polynomials of degree d turn out to be exactly the polynomials of
# degree d in the Z_ij.

# %%
from math import comb

from supq import Layout, Z_poly, bargmann_inner, invariant_subspace_dim, is_invariant, laplacian
from supq import laplacian_kernel_dim_in_invariants, maximally_entangled

lay = Layout(1, 2, 3)
Z11, Z12 = Z_poly(lay, 0, 0), Z_poly(lay, 0, 1)
f = Z11 * Z11 + Z11 * Z12
print("invariant:", is_invariant(f), "  squared norm:", bargmann_inner(f, f))

# %% [markdown]
# Counting invariants degree by degree: the dimension equals the number of
# monomials of degree d in pq commuting variables.

# %%
for p, q, n in [(1, 1, 2), (1, 2, 2), (2, 2, 3)]:
    dims = [invariant_subspace_dim(p, q, n, d) for d in range(4)]
    expect = [comb(p * q + d, d) for d in range(4)]
    print(f"p={p} q={q} n={n}: {dims}  binomial {expect}")

# %% [markdown]
# The mixed Laplacian sum_t d/dz[t,i] d/dz'[t,j] maps invariants to
# invariants, and only constants are annihilated by all of them.

# %%
# with n = 3 replicas the Laplacian sends Z11^2 to 2(n + 1) Z11
print("laplacian of Z11^2 is 8 Z11:", not (laplacian(Z11 * Z11, 0, 0) - Z11.scale(8)).terms)
print("kernel dims:", [laplacian_kernel_dim_in_invariants(1, 2, 2, d) for d in range(4)])

# %% [markdown]
# The maximally entangled vector sum_k Z^k / k! truncated at degree d has
# squared norm binom(n(p+q) + d, d).

# %%
psi = maximally_entangled(1, 1, 2, 4)
print("norm^2:", bargmann_inner(psi, psi), "expected", comb(2 * 2 + 4, 4))
