"""Truncated Haar unitaries against i.i.d. complex Gaussians.

The law ``H_{m,n}`` of ``sqrt(m)`` times the upper-left ``n x n`` block of a
Haar ``U(m)`` matrix is compared with ``G^{n x n}`` (i.i.d. standard complex
normal entries, ``E|g|^2 = 1``). For ``n = 1`` the total variation distance is
computed from the exact radial law; for ``n >= 2`` binned pushforwards under
scalar statistics give data-processing lower bounds.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import os

import numpy as np
from scipy import integrate, optimize, stats

from .errors import BudgetError, DimensionError, ParameterError

CHUNK = 8192


@dataclass(frozen=True)
class TruncationParams:
    """Sizes, sample budget and seed of a truncation experiment."""

    m: int
    n: int
    budget: int = 100_000
    seed: int = 0

    def __post_init__(self):
        if self.n < 1 or self.m < self.n:
            raise ParameterError("need 1 <= n <= m")
        if self.budget < 1:
            raise BudgetError("budget must be positive")

    @property
    def theorem_bound(self):
        return 2.0 * self.n ** 3 / (self.m - self.n) if self.m > self.n else float("inf")


def _ginibre(rng, shape):
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def _phase_fix(Q, R):
    d = np.diagonal(R, axis1=-2, axis2=-1)
    return Q * (d.conj() / np.abs(d))[..., None, :]


def sample_haar_unitary(rng, m, size=None, phase_correct=True):
    """Haar ``U(m)`` sample(s); ``phase_correct=False`` gives the raw QR factor."""
    shape = (m, m) if size is None else (size, m, m)
    Q, R = np.linalg.qr(_ginibre(rng, shape))
    return _phase_fix(Q, R) if phase_correct else Q


def sample_haar_truncated(params, rng, size=None):
    """``sqrt(m)`` times the upper-left ``n x n`` block of a Haar ``U(m)`` matrix.

    Only the first ``n`` columns are generated (thin QR of an ``m x n``
    Ginibre matrix with the diagonal phase correction); they are distributed
    as the first ``n`` columns of a Haar unitary.
    """
    m, n = params.m, params.n
    shape = (m, n) if size is None else (size, m, n)
    Q, R = np.linalg.qr(_ginibre(rng, shape))
    Q = _phase_fix(Q, R)
    return np.sqrt(m) * Q[..., :n, :]


def sample_gaussian(rng, n, size=None):
    shape = (n, n) if size is None else (size, n, n)
    return _ginibre(rng, shape)


# n = 1 ---------------------------------------------------------------------


def n1_density(x, m):
    """Density of ``|sqrt(m) U_11|^2``: ``((m-1)/m) (1 - x/m)^{m-2}`` on ``[0, m]``.

    ``|U_11|^2`` is the first coordinate of a uniform point on the unit
    sphere of ``C^m``, i.e. ``Beta(1, m-1)``.
    """
    x = np.asarray(x, dtype=float)
    inside = (x >= 0) & (x <= m)
    out = np.zeros_like(x)
    out[inside] = (m - 1) / m * (1 - x[inside] / m) ** (m - 2)
    return out


def n1_cdf(x, m):
    x = np.clip(np.asarray(x, dtype=float), 0, m)
    return 1.0 - (1.0 - x / m) ** (m - 1)


def tv_n1_exact(m):
    """Total variation between ``sqrt(m) U_11`` and a standard complex normal.

    Both laws are rotation invariant, so the distance equals that of the
    squared moduli: ``n1_density`` against ``Exp(1)``. The density ratio
    crosses 1 exactly twice (it increases up to ``x = 2`` and then
    decreases), and ``(1/2) int |f - g|`` is integrated adaptively with the
    crossings as breakpoints.
    """
    if m < 2:
        raise ParameterError("m must be at least 2")
    if m == 2:
        logr = lambda x: np.log(0.5) + x
    else:
        logr = lambda x: np.log((m - 1) / m) + (m - 2) * np.log1p(-x / m) + x
    pts = [0.0]
    if logr(2.0) > 0:
        pts.append(optimize.brentq(logr, 0.0, 2.0, xtol=1e-15))
        hi = m * (1 - 1e-15)
        if logr(hi) < 0:
            pts.append(optimize.brentq(logr, 2.0, hi, xtol=1e-14))
    pts.append(float(m))
    diff = lambda x: abs(float(n1_density(x, m)) - np.exp(-x))
    total = 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        val, _ = integrate.quad(diff, a, b, epsabs=1e-14, epsrel=1e-12, limit=200)
        total += val
    total += np.exp(-m)  # Gaussian mass beyond the support
    return 0.5 * total


def n1_ks_check(m=8, samples=1_000_000, seed=0):
    """KS statistic of sampled ``|sqrt(m) U_11|^2`` against ``n1_cdf``."""
    rng = np.random.default_rng(seed)
    params = TruncationParams(m, 1, samples, seed)
    vals = []
    left = samples
    while left:
        c = min(CHUNK * 8, left)
        vals.append(np.abs(sample_haar_truncated(params, rng, c)[:, 0, 0]) ** 2)
        left -= c
    x = np.concatenate(vals)
    res = stats.kstest(x, lambda t: n1_cdf(t, m))
    return float(res.statistic), float(res.pvalue)


# pushforward lower bounds --------------------------------------------------


def _abs2_entry(X):
    return np.abs(X[:, 0, 0]) ** 2


def _real_entry(X):
    return X[:, 0, 0].real


def _frobenius(X):
    return np.sum(np.abs(X) ** 2, axis=(1, 2))


def _logabsdet(X):
    return np.linalg.slogdet(X)[1]


# name -> (function, exact Gaussian reference quantile function or None)
STATISTICS = {
    "abs2_entry": (_abs2_entry, lambda u, n: stats.expon.ppf(u)),
    "real_entry": (_real_entry, lambda u, n: stats.norm.ppf(u, scale=np.sqrt(0.5))),
    "frobenius": (_frobenius, lambda u, n: stats.gamma.ppf(u, n * n)),
    "logabsdet": (_logabsdet, None),
}


@dataclass
class TVEstimate:
    """Binned TV estimate with a percentile-bootstrap CI.

    ``noise_floor`` is the expected plug-in TV between two independent
    samples of one law with the same bin probabilities; estimates at or
    below it are consistent with zero.
    """

    m: int
    n: int
    statistic: str
    bins: int
    estimate: float
    ci_lo: float
    ci_hi: float
    estimate_bias_corrected: float
    noise_floor: float
    theorem_bound: float
    budget: int
    seed: int

    @property
    def ci_width(self):
        return self.ci_hi - self.ci_lo

    @property
    def passed(self):
        return self.estimate <= self.theorem_bound + 3 * self.ci_width

    def to_json_obj(self):
        out = dict(self.__dict__)
        out["passed"] = self.passed
        return out


def _chunks(total):
    out = []
    while total > 0:
        c = min(CHUNK, total)
        out.append(c)
        total -= c
    return out


def _edges(statistic, n, bins, rng_ref, ref_samples):
    fn, ppf = STATISTICS[statistic]
    u = np.arange(1, bins) / bins
    if ppf is not None:
        return ppf(u, n)
    vals = np.concatenate([fn(sample_gaussian(rng_ref, n, c)) for c in _chunks(ref_samples)])
    return np.quantile(vals, u)


def _histograms(sampler, statistics, edges, budget, seq, threads):
    """Histograms of several statistics from one sharded sample stream.

    Every chunk owns a child seed, so the result does not depend on
    ``threads``.
    """
    sizes = _chunks(budget)
    seeds = seq.spawn(len(sizes))

    def work(args):
        size, s = args
        X = sampler(np.random.default_rng(s), size)
        return [
            np.bincount(np.searchsorted(e, STATISTICS[st][0](X), side="right"), minlength=len(e) + 1)
            for st, e in zip(statistics, edges)
        ]

    jobs = list(zip(sizes, seeds))
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            parts = list(ex.map(work, jobs))
    else:
        parts = [work(j) for j in jobs]
    totals = [np.zeros(len(e) + 1, dtype=np.int64) for e in edges]
    for part in parts:  # fixed reduction order
        for t, h in zip(totals, part):
            t += h
    return totals


def default_threads():
    env = os.environ.get("SUPQ_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def binned_tv(h1, h2):
    return 0.5 * float(np.abs(h1 / h1.sum() - h2 / h2.sum()).sum())


def _noise_floor(probs, budget):
    sd = np.sqrt(2 * probs * (1 - probs) / budget)
    return float(0.5 * np.sum(sd) * np.sqrt(2 / np.pi))


def tv_lower_bounds(params, statistics=tuple(STATISTICS), bins=64, n_boot=200, threads=1, reference="haar"):
    """Empirical TV between binned pushforwards of ``H_{m,n}`` and ``G``.

    Bins are equiprobable under the Gaussian law (exact quantiles where
    known, otherwise quantiles of an independent Gaussian pilot sample). By
    data processing the binned TV is a lower bound on the TV of the full
    laws; the plug-in estimate carries an upward bias of about
    ``noise_floor``. The CI is a percentile bootstrap over multinomial
    resamples of both histograms.

    Parameters
    ----------
    params : TruncationParams
    statistics : sequence of str
        Keys of :data:`STATISTICS`.
    reference : {"haar", "gaussian"}
        ``"gaussian"`` replaces ``H_{m,n}`` by a second Gaussian sample, a
        null check whose estimate should sit at the noise floor.

    Returns
    -------
    list of TVEstimate
    """
    if bins < 2:
        raise ParameterError("need at least 2 bins")
    if params.budget < 10_000:
        raise BudgetError("need at least 1e4 samples per distribution")
    for s in statistics:
        if s not in STATISTICS:
            raise ParameterError(f"unknown statistic {s!r}")
    n = params.n
    seq_h, seq_g, seq_ref, seq_boot = np.random.SeedSequence([params.seed, params.m, params.n]).spawn(4)
    rng_ref = np.random.default_rng(seq_ref)
    edges = [_edges(s, n, bins, rng_ref, params.budget) for s in statistics]
    if reference == "gaussian":
        sampler_h = lambda r, c: sample_gaussian(r, n, c)
    elif reference == "haar":
        sampler_h = lambda r, c: sample_haar_truncated(params, r, c)
    else:
        raise ParameterError(f"unknown reference {reference!r}")
    hh = _histograms(sampler_h, statistics, edges, params.budget, seq_h, threads)
    hg = _histograms(lambda r, c: sample_gaussian(r, n, c), statistics, edges, params.budget, seq_g, threads)
    rb = np.random.default_rng(seq_boot)
    out = []
    for s, h_h, h_g in zip(statistics, hh, hg):
        est = binned_tv(h_h, h_g)
        ph, pg = h_h / h_h.sum(), h_g / h_g.sum()
        boots = np.array([
            binned_tv(rb.multinomial(params.budget, ph), rb.multinomial(params.budget, pg))
            for _ in range(n_boot)
        ])
        lo, hi = np.quantile(boots, [0.025, 0.975])
        out.append(TVEstimate(
            m=params.m,
            n=n,
            statistic=s,
            bins=bins,
            estimate=est,
            ci_lo=float(lo),
            ci_hi=float(hi),
            estimate_bias_corrected=float(max(0.0, 2 * est - boots.mean())),
            noise_floor=_noise_floor(pg, params.budget),
            theorem_bound=params.theorem_bound,
            budget=params.budget,
            seed=params.seed,
        ))
    return out


def tv_lower_bound(params, statistic="abs2_entry", **kw):
    """Single-statistic form of :func:`tv_lower_bounds`."""
    return tv_lower_bounds(params, (statistic,), **kw)[0]


def tv_sweep(ns=(1, 2, 3), factors=(4, 8, 16, 32, 64), budget=100_000, seed=0,
             statistics=tuple(STATISTICS), bins=64, threads=1):
    """Certification sweep over ``m = factor * n``; returns a list of TVEstimate."""
    out = []
    for n in ns:
        for f in factors:
            out += tv_lower_bounds(TruncationParams(f * n, n, budget, seed), statistics, bins=bins, threads=threads)
    return out


# count distributions -------------------------------------------------------


@dataclass(frozen=True)
class CountDistribution:
    """Product photon-count law over modes.

    ``kind="poisson"`` uses ``alpha2`` (means per mode); ``kind="negbin"``
    uses ``m`` and ``sigma`` (per-mode ``q(k) = (1-s^2)^m C(m+k-1,k) s^{2k}``).
    """

    kind: str
    alpha2: tuple = ()
    m: int = 0
    sigma: tuple = ()

    def __post_init__(self):
        if self.kind == "poisson":
            if any(a < 0 for a in self.alpha2):
                raise ParameterError("Poisson means must be nonnegative")
        elif self.kind == "negbin":
            if self.m < 1 or any(not (0 <= s < 1) for s in self.sigma):
                raise ParameterError("need m >= 1 and 0 <= sigma < 1")
        else:
            raise ParameterError(f"unknown kind {self.kind!r}")

    @property
    def modes(self):
        return len(self.alpha2) if self.kind == "poisson" else len(self.sigma)

    def mode_law(self, i):
        if self.kind == "poisson":
            return stats.poisson(self.alpha2[i])
        return stats.nbinom(self.m, 1.0 - self.sigma[i] ** 2)


def count_fidelity(p, q, tail_cap=1e-12):
    """``F(p, q) = (sum_k sqrt(p_k q_k))^2`` for product laws.

    The sum factorizes over modes. Each mode is summed up to the first count
    where both tails are below ``tail_cap``; by Cauchy-Schwarz the neglected
    part of each Bhattacharyya sum is at most ``sqrt(tail_p tail_q)``.

    Returns
    -------
    fidelity : float
    tail_bound : float
        Upper bound on ``F_true - fidelity``.
    """
    if p.modes != q.modes:
        raise DimensionError("distributions have different mode counts")
    bc = 1.0
    bc_hi = 1.0
    for i in range(p.modes):
        a, b = p.mode_law(i), q.mode_law(i)
        K = 16
        while a.sf(K) >= tail_cap or b.sf(K) >= tail_cap:
            K *= 2
        k = np.arange(K + 1)
        s = float(np.sum(np.sqrt(a.pmf(k) * b.pmf(k))))
        rest = float(np.sqrt(a.sf(K) * b.sf(K)))
        bc *= s
        bc_hi *= s + rest
    return bc ** 2, bc_hi ** 2 - bc ** 2


def negbin_moments(m, sigma):
    """Mean ``m s^2 / (1-s^2)`` and variance ``m s^2 / (1-s^2)^2`` per mode.

    Exact arithmetic is preserved for Fraction inputs.
    """
    means, variances = [], []
    for s in sigma:
        s2 = s * s
        if not (0 <= s2 < 1):
            raise ParameterError("need 0 <= sigma < 1")
        means.append(m * s2 / (1 - s2))
        variances.append(m * s2 / (1 - s2) ** 2)
    return means, variances


def negbin_convolution_residual(m, sigma, K=200):
    """Sup-norm gap between the ``m``-fold convolution of the geometric law and ``nbinom``."""
    s2 = sigma * sigma
    k = np.arange(K + 1)
    geo = (1 - s2) * s2 ** k
    acc = np.zeros(K + 1)
    acc[0] = 1.0
    for _ in range(m):
        acc = np.convolve(acc, geo)[: K + 1]
    return float(np.max(np.abs(acc - stats.nbinom.pmf(k, m, 1 - s2))))


def eigenangle_chi2(m=8, samples=10_000, bins=32, seed=0, phase_correct=True):
    """Chi-square p-value for uniformity of eigenvalue arguments of sampled U(m)."""
    rng = np.random.default_rng(seed)
    counts = np.zeros(bins, dtype=np.int64)
    for c in _chunks(samples):
        U = sample_haar_unitary(rng, m, c, phase_correct=phase_correct)
        ang = np.angle(np.linalg.eigvals(U)).ravel()
        counts += np.bincount(((ang + np.pi) / (2 * np.pi) * bins).astype(int) % bins, minlength=bins)
    return float(stats.chisquare(counts).pvalue)
