"""Local correlation matrices on finite families of solutions.

On an orthonormal family ``w_1..w_n`` the local correlation operator at ``x``
is the Hermitian matrix

``M_ij = (w_i | F(x) w_j) = -bar(R w_i(x)) R w_j(x)``,

with ``bar(v) = v^dagger gamma^0``.  With ``V`` the ``4 x n`` matrix of
regularized values this is ``M = -V^dagger gamma^0 V``; its nonzero spectrum
coincides with that of the ``4 x 4`` matrix ``-gamma^0 V V^dagger``, which is
how very large (lattice) families are handled.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import dirac, kernels
from .errors import InvalidArgument
from .packets import SolutionFamily
from .regularization import CutoffProfile

RANK_TOL = 1e-8


@dataclass(frozen=True)
class SpinSpaceReport:
    """Rank, signature and spectrum of a correlation matrix."""

    rank: int
    signature: tuple
    eigenvalues: np.ndarray
    range_basis: np.ndarray

    @property
    def regular(self) -> bool:
        return self.rank == 4

    def as_dict(self) -> dict:
        return {
            "rank": self.rank,
            "signature": list(self.signature),
            "regular": self.regular,
            "eigenvalues": self.eigenvalues.tolist(),
        }


def correlation_from_values(V) -> np.ndarray:
    """``M = -V^dagger gamma^0 V`` from values of shape ``(n, 4)``."""
    V = np.asarray(V, dtype=complex)
    M = -np.conj(V) @ dirac.GAMMA0 @ V.T
    return (M + M.conj().T) / 2


def correlation_matrix(family: SolutionFamily, x, g: CutoffProfile | None = None) -> np.ndarray:
    """Correlation matrix of ``family`` at the point ``x`` (``n x n``, Hermitian)."""
    return correlation_from_values(family.values(x, g))


def spin_space_report(M, tol: float = RANK_TOL) -> SpinSpaceReport:
    """Rank and signature from eigenvalues above ``tol * max |eigenvalue|``."""
    M = np.asarray(M, dtype=complex)
    if M.size == 0:
        return SpinSpaceReport(0, (0, 0), np.zeros(0), np.zeros((0, 0)))
    ev, vec = np.linalg.eigh((M + M.conj().T) / 2)
    scale = np.max(np.abs(ev))
    keep = np.abs(ev) > tol * scale if scale > 0 else np.zeros(len(ev), dtype=bool)
    pos = int(np.sum(ev[keep] > 0))
    neg = int(np.sum(ev[keep] < 0))
    return SpinSpaceReport(pos + neg, (pos, neg), ev, vec[:, keep])


def compressed_spectrum(V) -> np.ndarray:
    """Nonzero spectrum of ``-V^dagger gamma^0 V`` via the ``4 x 4`` matrix ``-gamma^0 V V^dagger``.

    ``V`` has shape ``(4, n)`` (columns are member values).
    """
    V = np.asarray(V, dtype=complex)
    ev = np.linalg.eigvals(-dirac.GAMMA0 @ (V @ V.conj().T))
    return np.sort(ev.real)


def isometry_check(family: SolutionFamily, x, g=None) -> float:
    """Largest difference between ``-(w_i|F(x) w_j)`` and ``bar(R w_i(x)) R w_j(x)`` computed pointwise."""
    M = correlation_matrix(family, x, g)
    V = family.values(x, g)
    direct = np.array([[dirac.spin_product(a, b) for b in V] for a in V])
    return float(np.max(np.abs(-M - direct))) if len(V) else 0.0


def image_dimension(family: SolutionFamily, x, g=None, tol: float = RANK_TOL) -> int:
    """Dimension of ``span{R w_i(x)}`` in C^4 (the image of the spin-space map)."""
    V = family.values(x, g)
    if len(V) == 0:
        return 0
    s = np.linalg.svd(V, compute_uv=False)
    return int(np.sum(s > tol * s[0])) if s[0] > 0 else 0


def subfamily_compression(M, coefficients) -> np.ndarray:
    """``Pi_0 M Pi_0`` expressed on the subfamily with orthonormal coefficient rows."""
    C = np.asarray(coefficients, dtype=complex)
    return np.conj(C) @ M @ C.T


def current_density(family: SolutionFamily, x, mu: int, g=None) -> float:
    """``sum_i bar(R w_i(x)) gamma^mu R w_i(x)`` (equals ``-tr F^mu(x)``)."""
    if len(family) == 0:
        return 0.0
    V = family.values(x, g)
    G = dirac.GAMMA0 @ dirac.gamma(mu)
    return float(np.real(np.einsum("ni,ij,nj->", np.conj(V), G, V)))


def current_from_values(V, mu: int) -> float:
    """Current density from values of shape ``(n, 4)``."""
    V = np.asarray(V, dtype=complex).reshape(-1, 4)
    return float(np.real(np.einsum("ni,ij,nj->", np.conj(V), dirac.GAMMA0 @ dirac.gamma(mu), V)))


def translation_covariance_check(family: SolutionFamily, x, a, g=None) -> dict:
    """Spectra of ``F(x + a)`` on ``family`` and of ``F(x)`` on the translated family."""
    x = np.asarray(x, dtype=float)
    a = np.asarray(a, dtype=float)
    e1 = np.linalg.eigvalsh(correlation_matrix(family, x + a, g))
    e2 = np.linalg.eigvalsh(correlation_matrix(family.translated(a), x, g))
    return {
        "deviation": float(np.max(np.abs(e1 - e2))) if len(e1) else 0.0,
        "scale": float(np.max(np.abs(e1))) if len(e1) else 0.0,
        "norm_x_plus_a": float(np.max(np.abs(e1))) if len(e1) else 0.0,
        "norm_translated": float(np.max(np.abs(e2))) if len(e2) else 0.0,
    }


def injectivity_probe(family: SolutionFamily, points, g=None, threshold: float = 1e-6) -> dict:
    """Pairwise ``||F(x) - F(y)||_2`` over a grid of points.

    A pair counts as not separated when its distance is below
    ``threshold * max_x ||F(x)||_2``.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if len(points) < 2:
        raise InvalidArgument("injectivity probe needs at least two points")
    vals = family.values(points, g)
    Ms = [correlation_from_values(v) for v in vals]
    norms = [np.linalg.norm(M, 2) for M in Ms]
    n = len(points)
    D = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            D[i, j] = D[j, i] = np.linalg.norm(Ms[i] - Ms[j], 2)
    iu = np.triu_indices(n, 1)
    k = int(np.argmin(D[iu]))
    scale = max(norms)
    below = [(int(i), int(j)) for i, j in zip(*iu) if D[i, j] <= threshold * scale]
    return {
        "distances": D,
        "min_distance": float(D[iu][k]),
        "argmin": (int(iu[0][k]), int(iu[1][k])),
        "max_norm": float(scale),
        "threshold": float(threshold * scale),
        "separated": not below,
        "non_separated_pairs": below,
    }


# ---------------------------------------------------------------------------
# lattice sea


@dataclass(frozen=True)
class LatticeSea:
    """All negative-energy box modes of a momentum lattice, regularized by ``g``."""

    lattice: kernels.MomentumLattice
    g: CutoffProfile
    m: float = 1.0

    def modes(self):
        return kernels.lattice_modes(self.lattice, self.g, -1, self.m)

    def values(self, x, modes=None):
        """Regularized mode values at ``x`` with shape ``(4, n_modes)``."""
        return kernels.lattice_values(self.lattice, self.g, -1, x, self.m, modes)

    def raw_values(self, x, modes=None):
        """Unregularized mode values (the cutoff weight divided out)."""
        k, spins, spinors, w = self.modes() if modes is None else modes
        gk = self.g(np.linalg.norm(k, axis=1))
        V = self.values(x, (k, spins, spinors, w))
        return V / gk


def eigenbasis_at_point(sea: LatticeSea, x, modes=None):
    """Coefficients of ``e_{x,mu} = P_eps(., x) e_mu`` in the lattice mode basis and their eigenvalue residuals.

    In mode coordinates ``e_{x,mu}`` is proportional to ``c_mu = V^dagger gamma^0 e_mu``
    with ``V`` the regularized values at ``x``, and ``F(x) c = -V^dagger gamma^0 V c``.
    Returns a dict with ``coefficients`` (``n_modes x 4``), ``eigenvalues`` (Rayleigh
    quotients), ``residuals`` (relative) and the lattice ``lambdas``.
    """
    modes = sea.modes() if modes is None else modes
    V = sea.values(x, modes)
    C = V.conj().T @ dirac.GAMMA0  # columns c_mu
    FC = -V.conj().T @ (dirac.GAMMA0 @ (V @ C))
    rq = np.einsum("ni,ni->i", C.conj(), FC) / np.einsum("ni,ni->i", C.conj(), C)
    res = np.linalg.norm(FC - C * rq, axis=0) / np.linalg.norm(FC, axis=0)
    P = (V @ V.conj().T) @ dirac.GAMMA0 / (-2 * np.pi)  # lattice P_{-,eps^2}(x,x)
    return {"coefficients": C, "eigenvalues": rq.real, "residuals": res, "lattice_diagonal": P}


def translate_lattice_coefficients(sea: LatticeSea, coefficients, a, modes=None):
    """Coefficients of ``U_a w`` for ``w`` given in lattice mode coordinates.

    ``U_a w = w(. + a)`` multiplies mode ``k`` by ``exp(-i eta(a, k))``.
    """
    k, _, _, _ = sea.modes() if modes is None else modes
    a = np.asarray(a, dtype=float)
    om = np.sqrt(np.einsum("ij,ij->i", k, k) + sea.m**2)
    phase = np.exp(-1j * (-om * a[0] - k @ a[1:]))
    return coefficients * phase[:, None]


def lattice_current_difference(sea: LatticeSea, x, mu: int, added=(), removed=(), modes=None):
    """``tr(F_vac^mu - F^mu)`` versus ``sum J(added) - sum J(removed)`` on the lattice sea.

    ``added`` are values (shape ``(4,)``) of extra positive-energy states and
    ``removed`` are indices of sea modes turned into holes.  Both sides are
    returned; they agree by construction of the currents.
    """
    modes = sea.modes() if modes is None else modes
    V = sea.values(x, modes)
    keep = np.ones(V.shape[1], dtype=bool)
    keep[list(removed)] = False
    Vmod = V[:, keep]
    if len(added):
        Vmod = np.concatenate([Vmod, np.asarray(added, dtype=complex).reshape(-1, 4).T], axis=1)
    # tr F^mu = -sum bar(v) gamma^mu v
    tr_vac = -current_from_values(V.T, mu)
    tr_mod = -current_from_values(Vmod.T, mu)
    lhs = tr_vac - tr_mod
    rhs = current_from_values(np.asarray(added, dtype=complex).reshape(-1, 4), mu) - current_from_values(
        V[:, list(removed)].T, mu
    )
    return {"lhs": float(lhs), "rhs": float(rhs)}
