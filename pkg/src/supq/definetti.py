"""Resolution of the identity and the Gaussian de Finetti approximation.

Trace distances follow the halved convention ``||A||_tr = tr|A| / 2``.
"""

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial, pi, sqrt

import numpy as np

from .coherent import overlap
from .constants import PiMultiple, normalization_constant
from .errors import BudgetError, DimensionError, ParameterError
from .fock import FockPoly, Layout, Z_poly, bargmann_inner, is_invariant, reduced_density
from .hyperbolic import InvariantMeasureSpec, as_disc_point, sample_invariant

__all__ = [
    "PiMultiple",
    "normalization_constant",
    "RatioBound",
    "ratio_and_bound",
    "polar_grid",
    "resolution_gram",
    "reproducing_kernel_check",
    "su11_state",
    "definetti_gap",
]


@dataclass(frozen=True)
class RatioBound:
    """Exact ratio ``C_k / C_{n+k}`` in three independent forms, and the bounds."""

    p: int
    q: int
    n: int
    k: int
    ratio: Fraction
    ratio_factorial: Fraction
    ratio_product: Fraction
    lower_bound: Fraction
    definetti_bound: Fraction

    @property
    def consistent(self):
        return self.ratio == self.ratio_factorial == self.ratio_product

    @property
    def respects_lower_bound(self):
        return self.ratio >= self.lower_bound


def ratio_and_bound(p, q, n, k):
    """``C_k / C_{n+k}`` and the bounds ``1 - npq/(n+k-p-q+1)``, ``3npq / (2(n+k-p-q))``.

    Examples
    --------
    >>> rb = ratio_and_bound(1, 1, 2, 2)
    >>> rb.ratio, rb.lower_bound
    (Fraction(1, 3), Fraction(1, 3))
    """
    if n < 0:
        raise ParameterError("n must be nonnegative")
    if k < p + q:
        raise ParameterError(f"k must be >= p+q = {p + q}")
    direct = (normalization_constant(p, q, k) / normalization_constant(p, q, n + k)).coeff
    fact = Fraction(1)
    for i in range(q):
        fact *= Fraction(
            factorial(k - q + i) * factorial(n + k - p - q + i),
            factorial(k - p - q + i) * factorial(n + k - q + i),
        )
    prod = Fraction(1)
    for i in range(q):
        for j in range(1, p + 1):
            prod *= Fraction(k - p - q + i + j, n + k - p - q + i + j)
    lower = 1 - Fraction(n * p * q, n + k - p - q + 1)
    dF = Fraction(0) if n == 0 else Fraction(3 * n * p * q, 2 * (n + k - p - q))
    return RatioBound(p, q, n, k, direct, fact, prod, lower, dF)


def polar_grid(radial=200, angular=64):
    """Nodes and weights for ``int_{|l|<1} f(l) d^2 l``.

    Gauss-Legendre in the radius on ``[0, 1]`` (weights include the Jacobian
    ``r``) times the uniform rule in the angle.
    """
    x, w = np.polynomial.legendre.leggauss(radial)
    r = 0.5 * (x + 1.0)
    wr = 0.5 * w * r
    theta = 2 * pi * np.arange(angular) / angular
    lam = (r[:, None] * np.exp(1j * theta[None, :])).ravel()
    weights = (wr[:, None] * np.full(angular, 2 * pi / angular)[None, :]).ravel()
    return lam, weights


def _a(n, j):
    return comb(n + j - 1, j)


def resolution_gram(n, jmax, radial=200, angular=64):
    """``G_jl = int <psi_j|l,n><l,n|psi_l> dmu_{1,1,n}`` by polar quadrature.

    The identity resolution predicts ``G = 1``.
    """
    C = float(normalization_constant(1, 1, n))
    lam, w = polar_grid(radial, angular)
    u = 1.0 - np.abs(lam) ** 2
    amp = np.array([sqrt(_a(n, j)) * lam ** j for j in range(jmax + 1)])
    weight = C * w * u ** (n - 2)
    return (amp * weight) @ amp.conj().T


def _overlap_batch(L1, Ls, n):
    """``<L1, n | L, n>`` for a stack of parameters ``Ls``."""
    p, q = L1.shape
    d1 = np.real(np.linalg.det(np.eye(p) - L1 @ L1.conj().T))
    d = np.real(np.linalg.det(np.eye(p) - Ls @ np.conj(np.swapaxes(Ls, 1, 2))))
    cross = np.linalg.det(np.eye(q) - L1.conj().T[None] @ Ls)
    return (np.sqrt(d1 * d) / cross) ** n


def reproducing_kernel_check(p, q, n, L1, L2, budget=200_000, rng=None, radial=200, angular=64):
    """Estimate ``int <L1|L,n><L,n|L2> dmu_{p,q,n}`` and compare with the overlap.

    ``p = q = 1`` uses deterministic polar quadrature (``budget`` ignored);
    otherwise importance sampling from :func:`supq.hyperbolic.sample_invariant`.

    Returns
    -------
    estimate : complex
    closed_form : complex
    error : float
        Quadrature: ``|estimate - closed_form|``. Monte Carlo: the standard
        error of the estimate.
    """
    spec = InvariantMeasureSpec(p, q, n)
    L1 = as_disc_point(L1, p, q)
    L2 = as_disc_point(L2, p, q)
    closed = overlap(L1, L2, n)
    if p == 1 and q == 1:
        lam, w = polar_grid(radial, angular)
        Ls = lam.reshape(-1, 1, 1)
        vals = _overlap_batch(L1, Ls, n) * np.conj(_overlap_batch(L2, Ls, n))
        dens = float(spec.C_n) * (1.0 - np.abs(lam) ** 2) ** (-2)
        est = complex(np.sum(vals * dens * w))
        return est, closed, abs(est - closed)
    if budget < 1000:
        raise BudgetError("Monte Carlo needs at least 1000 samples")
    rng = np.random.default_rng(rng)
    Ls, ws = sample_invariant(rng, spec, size=budget)
    vals = _overlap_batch(L1, Ls, n) * np.conj(_overlap_batch(L2, Ls, n)) * ws
    est = complex(vals.mean())
    se = float(np.sqrt((vals.real.var(ddof=1) + vals.imag.var(ddof=1)) / budget))
    return est, closed, se


# de Finetti -----------------------------------------------------------------


def _su11_powers(lay, d):
    Z = Z_poly(lay, 0, 0)
    out = [FockPoly.one(lay)]
    for _ in range(d):
        out.append(out[-1] * Z)
    return out


def su11_state(coeffs, N):
    """``sum_j c_j psi_{j,N}`` on ``Layout(1, 1, N)`` with float coefficients."""
    lay = Layout(1, 1, N)
    out = FockPoly(lay)
    for j, (c, Zj) in enumerate(zip(coeffs, _su11_powers(lay, len(coeffs) - 1))):
        if c:
            norm = sqrt(factorial(N + j - 1) * factorial(j) / factorial(N - 1))
            out = out + Zj.scale(complex(c) / norm)
    return out


@dataclass
class DeFinettiResult:
    n: int
    k: int
    d: int
    d_mix: int
    distance: float
    tail: float
    tail_mass: float
    theorem_bound: float
    mixture_trace: float
    ratio: float
    min_mixture_eigenvalue: float

    @property
    def passed(self):
        return self.distance <= self.theorem_bound + self.tail

    def to_json_obj(self):
        out = dict(self.__dict__)
        out["passed"] = self.passed
        return out


def definetti_gap(state, n, k, extra_degree=4, radial=200, angular=64, tol=1e-10):
    """Trace distance between ``tr_k |psi><psi|`` and its coherent mixture.

    Parameters
    ----------
    state : FockPoly
        Normalized U(n+k)-invariant state on ``Layout(1, 1, n + k)``.
    n, k : int
        Kept and traced replicas; ``k >= 2``.
    extra_degree : int
        The mixture is resolved up to degree ``d + extra_degree``.

    Notes
    -----
    The mixture ``C_k int nu(l) |l,n><l,n| dmu_{1,1}`` is exactly computable
    on the basis ``psi_{j,n}`` for ``j <= d'``; its remaining mass ``t`` is
    known from its trace ``C_k / C_{n+k}``. For a positive block operator with
    corner trace ``T`` and tail trace ``t`` the neglected part has halved
    trace norm at most ``sqrt(t T) + t / 2``, reported as ``tail``.
    """
    lay = state.layout
    N = n + k
    if (lay.p, lay.q, lay.n) != (1, 1, N):
        raise DimensionError("state must live on Layout(1, 1, n + k)")
    if k < 2 or n < 1:
        raise ParameterError("need n >= 1 and k >= 2")
    if not is_invariant(state, tol=tol):
        raise ParameterError("state is not U(n+k)-invariant")
    norm2 = complex(bargmann_inner(state, state)).real
    if abs(norm2 - 1.0) > 1e-9:
        raise ParameterError(f"state is not normalized (norm^2 = {norm2})")
    d = max(lay.degrees(key)[0] for key in state.terms)
    dm = d + extra_degree

    # components on psi_{j,N}
    powN = _su11_powers(lay, d)
    c = np.array([
        complex(bargmann_inner(Zj, state)) / sqrt(factorial(N + j - 1) * factorial(j) / factorial(N - 1))
        for j, Zj in enumerate(powN)
    ])

    # reduced state on the first n replicas, in the psi_{j,n} basis
    traced = [lay.z(t, 0) for t in range(n, N)] + [lay.zp(t, 0) for t in range(n, N)]
    rho_op = reduced_density(state, traced)
    lay_n = Layout(1, 1, n)
    pown = _su11_powers(lay_n, dm)
    nrm = [sqrt(factorial(n + j - 1) * factorial(j) / factorial(n - 1)) for j in range(dm + 1)]
    rho = np.zeros((dm + 1, dm + 1), dtype=complex)
    for j in range(d + 1):
        for l in range(d + 1):
            rho[j, l] = complex(rho_op.sandwich(pown[j], pown[l])) / (nrm[j] * nrm[l])
    support = complex(rho_op.trace()).real - np.trace(rho).real
    if abs(support) > 1e-9:
        raise ArithmeticError("reduced state leaves the invariant subspace")

    # mixture on psi_{j,n}, j <= d'
    Ck = float(normalization_constant(1, 1, k))
    lam, w = polar_grid(radial, angular)
    u = 1.0 - np.abs(lam) ** 2
    aN = np.array([sqrt(_a(N, j)) for j in range(d + 1)])
    amp_psi = (c * aN) @ np.array([np.conj(lam) ** j for j in range(d + 1)])
    nu = u ** N * np.abs(amp_psi) ** 2
    F = np.array([sqrt(_a(n, j)) * lam ** j for j in range(dm + 1)])
    weight = Ck * w * nu * u ** (n - 2)
    mix = (F * weight) @ F.conj().T
    mix = 0.5 * (mix + mix.conj().T)

    ratio = float(ratio_and_bound(1, 1, n, k).ratio)
    corner = float(np.trace(mix).real)
    t = max(ratio - corner, 0.0)
    tail = sqrt(t * corner) + 0.5 * t
    dist = 0.5 * float(np.abs(np.linalg.eigvalsh(rho - mix)).sum())
    return DeFinettiResult(
        n=n,
        k=k,
        d=d,
        d_mix=dm,
        distance=dist,
        tail=tail,
        tail_mass=t,
        theorem_bound=float(ratio_and_bound(1, 1, n, k).definetti_bound),
        mixture_trace=corner,
        ratio=ratio,
        min_mixture_eigenvalue=float(np.linalg.eigvalsh(mix).min()),
    )
