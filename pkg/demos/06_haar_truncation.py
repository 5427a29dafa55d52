# %% [markdown]
# # Corners of Haar unitaries
#
# The scaled n x n corner of a Haar unitary of size m looks like a matrix of
# independent complex Gaussians once m is much larger than n^3. For n = 1
# the total variation distance is computable exactly; for larger n binned
# statistics give lower bounds with bootstrap intervals.

# %%
import numpy as np

from supq import CountDistribution, TruncationParams, count_fidelity, tv_lower_bounds, tv_n1_exact

for m in (4, 16, 64, 256, 1024):
    print(f"m={m:>4}  exact TV {tv_n1_exact(m):.5f}  bound 2/(m-1) {2 / (m - 1):.5f}")

# %%
for m in (25, 100, 400):
    for e in tv_lower_bounds(TruncationParams(m, 2, 50_000, seed=0), bins=32):
        print(f"m={m:>3} {e.statistic:<11} {e.estimate:.4f} [{e.ci_lo:.4f}, {e.ci_hi:.4f}] "
              f"floor {e.noise_floor:.4f} bound {e.theorem_bound:.4f}")

# %% [markdown]
# Photon counts: a Poisson law against a negative binomial with the same
# mean. Their fidelity approaches one as m grows.

# %%
p = CountDistribution("poisson", alpha2=(1.0,))
for m in (1, 10, 100, 1000):
    q = CountDistribution("negbin", m=m, sigma=(np.sqrt(1 / (m + 1)),))
    print(m, count_fidelity(p, q)[0])
