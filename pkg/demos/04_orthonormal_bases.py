# %% [markdown]
# # Explicit bases of the invariant subspace
#
# For p = q = 1 the invariants are powers Z^k and the operators K+, K-, K0
# built from them close into an su(1,1) algebra. The Casimir acts as the
# scalar (n/2)(n/2 - 1). For p = q = 2 a conjectured orthonormal family is
# checked entry by entry in exact rational arithmetic.

# %%
from supq import casimir, su11_commutator_check, su22_gram

for n in (1, 2, 3):
    res = su11_commutator_check(n, 8)
    _, rep = casimir(n, 8)
    print(n, all(r["interior"] == 0 for r in res.values()), rep["expected"], set(rep["interior_diagonal"]))

# %%
for n in (2, 3):
    rep = su22_gram(n, 3)
    print(f"n={n}: {len(rep.indices)} vectors, Gram is identity: {rep.is_identity}")

# %% [markdown]
# Swapping in a plausible alternative binomial factor breaks orthogonality
# as soon as the total weight reaches four.

# %%
rep = su22_gram(2, 4, variant="alternative")
print("alternative variant identity:", rep.is_identity, " first bad entry:", rep.offending[0][:2])
