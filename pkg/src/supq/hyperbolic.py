"""The matrix ball ``D_{p,q}``, the group ``SU(p,q)`` and its action.

``SU(p,q)`` acts on ``D_{p,q}`` by the fractional linear map
``g . L = (A L + B)(C L + D)^{-1}``. This left action is the one under
which coherent-state covariance matrices transport by ``s(g)`` (see
:mod:`supq.phase_space`). The transposed formula
``(A^T L + C^T)(B^T L + D^T)^{-1}`` is the same map applied to ``g^T`` and is
exposed as :func:`mobius_act_transposed`.
"""

from dataclasses import dataclass, field

import numpy as np

from .constants import normalization_constant
from .errors import DimensionError, ParameterError, SingularityError

TOL = 1e-10
DISC_MARGIN = 1e-12
MAX_SQUEEZE = 5.0


def in_disc(L, margin=DISC_MARGIN):
    """True iff the largest singular value of ``L`` is below ``1 - margin``."""
    L = np.atleast_2d(np.asarray(L, dtype=complex))
    return bool(np.linalg.norm(L, 2) < 1.0 - margin)


def as_disc_point(L, p=None, q=None):
    L = np.atleast_2d(np.asarray(L, dtype=complex))
    if p is not None and L.shape != (p, q):
        raise DimensionError(f"expected a {p}x{q} matrix, got {L.shape}")
    if not in_disc(L):
        raise ParameterError("matrix is not in the open unit ball")
    return L


@dataclass(frozen=True)
class GroupElement:
    """Element of ``SU(p,q)`` stored by blocks ``[[A, B], [C, D]]``."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray

    def __post_init__(self):
        A, B, C, D = (np.atleast_2d(np.asarray(x, dtype=complex)) for x in (self.A, self.B, self.C, self.D))
        p, q = A.shape[0], D.shape[0]
        if A.shape != (p, p) or D.shape != (q, q) or B.shape != (p, q) or C.shape != (q, p):
            raise DimensionError("block shapes are inconsistent")
        for name, x in zip("ABCD", (A, B, C, D)):
            x.setflags(write=False)
            object.__setattr__(self, name, x)

    @property
    def p(self):
        return self.A.shape[0]

    @property
    def q(self):
        return self.D.shape[0]

    @property
    def matrix(self):
        return np.block([[self.A, self.B], [self.C, self.D]])

    @classmethod
    def from_matrix(cls, g, p, q):
        g = np.asarray(g, dtype=complex)
        if g.shape != (p + q, p + q):
            raise DimensionError("matrix size does not match p+q")
        return cls(g[:p, :p], g[:p, p:], g[p:, :p], g[p:, p:])

    @classmethod
    def identity(cls, p, q):
        return cls.from_matrix(np.eye(p + q), p, q)

    def __matmul__(self, other):
        if (self.p, self.q) != (other.p, other.q):
            raise DimensionError("elements of different groups")
        return GroupElement.from_matrix(self.matrix @ other.matrix, self.p, self.q)

    def inverse(self):
        # g^{-1} = J g^dagger J
        J = signature(self.p, self.q)
        return GroupElement.from_matrix(J @ self.matrix.conj().T @ J, self.p, self.q)

    def transpose(self):
        return GroupElement.from_matrix(self.matrix.T, self.p, self.q)


def signature(p, q):
    return np.diag(np.r_[np.ones(p), -np.ones(q)]).astype(complex)


def validate_group_element(g, tol=TOL):
    """Check the block relations of ``SU(p,q)`` and ``det g = 1``.

    Returns
    -------
    bool
        True iff ``AA^+ - BB^+ = 1``, ``AC^+ = BD^+``, ``DD^+ - CC^+ = 1`` and
        ``|det g - 1| <= tol``, each residual measured in operator norm.
    """
    A, B, C, D = g.A, g.B, g.C, g.D
    p, q = g.p, g.q
    res = [
        np.linalg.norm(A @ A.conj().T - B @ B.conj().T - np.eye(p), 2),
        np.linalg.norm(A @ C.conj().T - B @ D.conj().T, 2),
        np.linalg.norm(D @ D.conj().T - C @ C.conj().T - np.eye(q), 2),
        abs(np.linalg.det(g.matrix) - 1.0),
    ]
    return bool(max(res) <= tol)


def _solve_right(num, den):
    """``num @ den^{-1}`` with a conditioning guard."""
    if np.linalg.cond(den) > 1e12:
        raise SingularityError("denominator of the fractional linear map is singular")
    return np.linalg.solve(den.T, num.T).T


def mobius_act(g, L):
    """``(A L + B)(C L + D)^{-1}``.

    Examples
    --------
    >>> import numpy as np
    >>> g = GroupElement.identity(1, 1)
    >>> complex(mobius_act(g, [[0.3]])[0, 0])
    (0.3+0j)
    """
    L = np.atleast_2d(np.asarray(L, dtype=complex))
    if L.shape != (g.p, g.q):
        raise DimensionError(f"expected a {g.p}x{g.q} matrix")
    return _solve_right(g.A @ L + g.B, g.C @ L + g.D)


def mobius_act_transposed(g, L):
    """``(A^T L + C^T)(B^T L + D^T)^{-1}``, which equals ``mobius_act(g^T, L)``."""
    L = np.atleast_2d(np.asarray(L, dtype=complex))
    if L.shape != (g.p, g.q):
        raise DimensionError(f"expected a {g.p}x{g.q} matrix")
    return _solve_right(g.A.T @ L + g.C.T, g.B.T @ L + g.D.T)


def haar_unitary(rng, n):
    """Haar ``U(n)`` sample from the phase-corrected QR of a Ginibre matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    Q, R = np.linalg.qr(z)
    d = np.diagonal(R)
    return Q * (d.conj() / np.abs(d))


def block_unitary(U, V):
    """``diag(U, V)``; an element of ``SU(p,q)`` when ``det(U) det(V) = 1``."""
    U = np.atleast_2d(np.asarray(U, dtype=complex))
    V = np.atleast_2d(np.asarray(V, dtype=complex))
    p, q = U.shape[0], V.shape[0]
    return GroupElement(U, np.zeros((p, q)), np.zeros((q, p)), V)


def squeeze_element(R, p, q):
    """Boost ``h_R`` with ``r = min(p, q)`` rapidities on the diagonal.

    ``A = diag(cosh R, 1)``, ``D = diag(cosh R, 1)``, ``B = C^T`` carries
    ``sinh R`` on its leading diagonal. It maps ``0`` to ``diag(tanh R)``.
    """
    R = np.asarray(R, dtype=float).ravel()
    r = min(p, q)
    if R.size != r:
        raise DimensionError(f"expected {r} rapidities")
    A = np.eye(p, dtype=complex)
    D = np.eye(q, dtype=complex)
    B = np.zeros((p, q), dtype=complex)
    A[range(r), range(r)] = np.cosh(R)
    D[range(r), range(r)] = np.cosh(R)
    B[range(r), range(r)] = np.sinh(R)
    return GroupElement(A, B, B.T.copy(), D)


def unsqueeze_element(sigma, p, q):
    """``g' = [[C, -S], [-S^T, C~]]`` built from ``sigma = tanh R``; sends ``sigma`` to 0."""
    sigma = np.asarray(sigma, dtype=float).ravel()
    return squeeze_element(-np.arctanh(sigma), p, q)


def random_group_element(rng, p, q, squeeze_scale=1.0):
    """Random ``g = g_{U2,V2} h_R g_{U1,V1}`` in ``SU(p,q)``.

    Unitary factors are Haar; the determinant of each block-unitary factor is
    set to 1 by a phase on the first column of ``V``. Rapidities are uniform
    on ``[0, squeeze_scale]`` and capped at 5.
    """
    if squeeze_scale < 0:
        raise ParameterError("squeeze_scale must be nonnegative")

    def gUV():
        U = haar_unitary(rng, p)
        V = haar_unitary(rng, q)
        V[:, 0] /= np.linalg.det(U) * np.linalg.det(V)
        return block_unitary(U, V)

    g1 = gUV()
    R = np.minimum(rng.uniform(0.0, squeeze_scale, size=min(p, q)), MAX_SQUEEZE)
    g2 = gUV()
    return g2 @ squeeze_element(R, p, q) @ g1


def random_disc_point(rng, p, q, max_norm=0.6):
    """Point of ``D_{p,q}`` with singular values uniform on ``[0, max_norm]``."""
    U = haar_unitary(rng, p)
    V = haar_unitary(rng, q)
    r = min(p, q)
    S = np.zeros((p, q))
    S[range(r), range(r)] = rng.uniform(0.0, max_norm, size=r)
    return U @ S @ V


@dataclass(frozen=True)
class InvariantMeasureSpec:
    """Measure ``mu_{p,q,n}`` with density ``C_n det(1 - L L^+)^{-(p+q)}``."""

    p: int
    q: int
    n: int
    C_n: object = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "C_n", normalization_constant(self.p, self.q, self.n))


def _det_defect(L):
    p = L.shape[0]
    return float(np.real(np.linalg.det(np.eye(p) - L @ L.conj().T)))


def invariant_density(spec, L):
    """Density of ``mu_{p,q,n}`` against Lebesgue measure on ``D_{p,q}``."""
    L = as_disc_point(L, spec.p, spec.q)
    return float(spec.C_n) * _det_defect(L) ** (-(spec.p + spec.q))


def haar_corner(rng, M, p, q, size=None):
    """Upper-left ``p x q`` block of a Haar ``U(M)`` matrix (thin QR).

    With ``size`` a stack of ``size`` independent blocks is returned.
    """
    shape = (M, q) if size is None else (size, M, q)
    z = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)
    Q, R = np.linalg.qr(z)
    d = np.diagonal(R, axis1=-2, axis2=-1)
    Q = Q * (d.conj() / np.abs(d))[..., None, :]
    return Q[..., :p, :]


def sample_invariant(rng, spec, proposal_order=None, size=None):
    """Importance sample ``(L, w)`` with ``E[w f(L)] = int f dmu_{p,q,n}``.

    The proposal is the ``p x q`` corner of a Haar ``U(M)`` matrix,
    ``M = proposal_order >= p + q`` (default ``n``), whose law has density
    ``C_M det(1 - L L^+)^{M-p-q}`` on ``D_{p,q}``. The weight is therefore
    ``(C_n / C_M) det(1 - L L^+)^{-M}``: unbounded towards the boundary, but
    exactly cancelled by the ``det^n`` carried by coherent-state integrands
    when ``M = n``.

    Parameters
    ----------
    rng : numpy.random.Generator
    spec : InvariantMeasureSpec
    proposal_order : int, optional
    size : int, optional
        Number of samples; ``None`` returns a single ``(L, w)``.
    """
    p, q = spec.p, spec.q
    M = spec.n if proposal_order is None else int(proposal_order)
    if M < p + q:
        raise ParameterError(f"proposal_order must be >= p+q = {p + q}")
    ratio = float(spec.C_n / normalization_constant(p, q, M))
    Ls = haar_corner(rng, M, p, q, size=1 if size is None else size)
    det = np.real(np.linalg.det(np.eye(p) - Ls @ np.conj(np.swapaxes(Ls, -1, -2))))
    ws = ratio * det ** (-M)
    if size is None:
        return Ls[0], float(ws[0])
    return Ls, ws
