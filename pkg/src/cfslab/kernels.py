"""Regularized kernels of the fermionic projector.

``P_{sign}(xi) = sign * int d^3k/(2 pi)^4 g(k)^power p_sign(k) gamma^0 exp(-i eta(xi, k))``

with ``eta(xi, k) = sign * omega(k) xi_t - k.xi_x``.  Writing
``p_sign gamma^0 = (gamma^0 - sign k.gamma/omega + sign m/omega)/2`` the
kernel reduces to three radial integrals: the coefficients of ``gamma^0``,
of the identity and of ``xi_hat.gamma``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import dirac
from .errors import InvalidArgument
from .quadrature import radial_integral, sph_j0, sph_j1
from .regularization import CutoffProfile, cutoff_l1_norms

PREFACTOR = 1.0 / (2 * (2 * np.pi) ** 4)


@dataclass(frozen=True)
class KernelMatrix:
    """A 4x4 kernel value together with its arguments."""

    value: np.ndarray
    xi: tuple
    sign: int
    power: int


def _power(power) -> int:
    p = {"single": 1, "double": 2, 1: 1, 2: 2}.get(power)
    if p is None:
        raise InvalidArgument(f"power must be 'single' or 'double', got {power!r}")
    return p


def kernel(xi, g: CutoffProfile, sign, power="double", m: float = 1.0, rtol: float = 1e-12) -> KernelMatrix:
    """Kernel ``P_{sign, eps}`` (``power='single'``) or ``P_{sign, eps^2}`` (``'double'``) at ``xi = x - y``.

    Examples
    --------
    >>> from cfslab.regularization import sharp_cutoff
    >>> K = kernel([0, 0, 0, 0], sharp_cutoff(0.1), -1)
    >>> np.round(np.linalg.eigvalsh(K.value), 5)
    array([-1.14728, -1.14728,  1.54035,  1.54035])
    """
    s = dirac.check_sign(sign)
    p = _power(power)
    m = dirac.check_mass(m)
    xi = np.asarray(xi, dtype=float)
    if xi.shape != (4,) or not np.all(np.isfinite(xi)):
        raise InvalidArgument("xi must be a finite four-vector")
    tau, rv = xi[0], xi[1:]
    r = float(np.linalg.norm(rv))
    rhat = rv / r if r > 0 else np.zeros(3)
    upper = g.upper(power=2)

    def integrand(k):
        w = np.sqrt(k * k + m * m)
        F = g(k) ** p * np.exp(-1j * s * w * tau)
        kr = k * r
        j0 = sph_j0(kr)
        return 4 * np.pi * np.stack([k**2 * F * j0, k**2 * F * j0 / w, k**3 * F * sph_j1(kr) / w], axis=-1)

    J0, J0w, K1 = radial_integral(
        integrand, upper, breakpoints=g.breakpoints, wavenumber=r + abs(tau), scale=1.0 / g.epsilon, rtol=rtol
    )
    # int g^p k_j/omega e^{ik.r} = i rhat_j K1
    kg = 1j * K1 * np.einsum("i,ijk->jk", rhat, dirac.GAMMA[1:])
    value = s * PREFACTOR * (J0 * dirac.GAMMA0 + s * m * J0w * dirac.IDENTITY - s * kg)
    return KernelMatrix(value, tuple(xi), s, p)


def causal_kernel(xi, g: CutoffProfile, power="double", m: float = 1.0) -> np.ndarray:
    """``P_- - P_+`` at ``xi``."""
    return kernel(xi, g, -1, power, m).value - kernel(xi, g, +1, power, m).value


def diagonal_closed_form(g: CutoffProfile, sign, m: float = 1.0, norms=None) -> np.ndarray:
    """``P_{sign, eps^2}(x, x) = (m ||g^2/omega|| I + sign ||g^2|| gamma^0) / (2 (2 pi)^4)``."""
    s = dirac.check_sign(sign)
    norm_a, norm_b = cutoff_l1_norms(g, m) if norms is None else norms
    return PREFACTOR * (m * norm_b * dirac.IDENTITY + s * norm_a * dirac.GAMMA0)


def diagonal_spectrum(g: CutoffProfile, m: float = 1.0, norms=None):
    """``(lambda_plus, lambda_minus) = (m ||g^2/omega|| +- ||g^2||) / (2 (2 pi)^4)``."""
    norm_a, norm_b = cutoff_l1_norms(g, m) if norms is None else norms
    return PREFACTOR * (m * norm_b + norm_a), PREFACTOR * (m * norm_b - norm_a)


def sharp_leading_order(epsilon: float, m: float = 1.0):
    """Leading small-``epsilon`` terms ``(m/eps^2 +- 2/(3 eps^3)) / (2 (2 pi)^3)``."""
    c = 1 / (2 * (2 * np.pi) ** 3)
    return c * (m / epsilon**2 + 2 / (3 * epsilon**3)), c * (m / epsilon**2 - 2 / (3 * epsilon**3))


# ---------------------------------------------------------------------------
# momentum lattice surrogate of the Dirac sea


@dataclass(frozen=True)
class MomentumLattice:
    """Cell-centred cubic lattice of ``n^3`` momenta on ``[-kmax, kmax]^3``."""

    n: int
    kmax: float

    @property
    def spacing(self) -> float:
        return 2 * self.kmax / self.n

    @property
    def cell_volume(self) -> float:
        return self.spacing**3

    def momenta(self):
        c = -self.kmax + self.spacing * (np.arange(self.n) + 0.5)
        return np.stack(np.meshgrid(c, c, c, indexing="ij"), axis=-1).reshape(-1, 3)


def lattice_for(g: CutoffProfile, n: int) -> MomentumLattice:
    """Lattice covering the effective support of ``g^2`` (support edge or tail cut)."""
    return MomentumLattice(n, g.upper(power=2))


def lattice_modes(lattice: MomentumLattice, g: CutoffProfile | None, sign, m: float = 1.0, drop_zero: bool = True):
    """Momenta, spins and regularization weights of the box modes of one energy sign.

    Mode ``(k, s)`` is ``u(x) = sqrt(dk^3) (2 pi)^{-3/2} chihat_s(k) exp(-i eta(x, k))``
    with unit spinor ``chihat``; ``g`` multiplies the amplitude.
    Returns ``(k, spins, spinors, weights)`` with one row per mode.
    """
    s = dirac.check_sign(sign)
    k = lattice.momenta()
    gk = np.ones(len(k)) if g is None else g(np.linalg.norm(k, axis=1))
    if drop_zero:
        keep = gk > 0
        k, gk = k[keep], gk[keep]
    chis = [dirac.normalized_spinor(k, s, spin, m) for spin in ("up", "down")]
    spinors = np.concatenate(chis)
    kk = np.concatenate([k, k])
    spins = np.repeat(["up", "down"], len(k))
    weights = np.concatenate([gk, gk]) * np.sqrt(lattice.cell_volume) / (2 * np.pi) ** 1.5
    return kk, spins, spinors, weights


def lattice_values(lattice: MomentumLattice, g, sign, x, m: float = 1.0, modes=None):
    """Values ``R u_n(x)`` of all lattice modes at ``x``; shape ``(4, n_modes)``."""
    s = dirac.check_sign(sign)
    k, _, spinors, weights = modes if modes is not None else lattice_modes(lattice, g, s, m)
    x = np.asarray(x, dtype=float)
    om = np.sqrt(np.einsum("ij,ij->i", k, k) + m * m)
    eta = s * om * x[0] - k @ x[1:]
    return (spinors * (weights * np.exp(-1j * eta))[:, None]).T


def kernel_from_lattice_sum(x, y, lattice: MomentumLattice, g: CutoffProfile, sign, m: float = 1.0) -> KernelMatrix:
    """``sign (2 pi)^{-1} sum_n R u_n(x) bar(R u_n(y))`` over lattice modes.

    Sums over the spin-resolved plane-wave modes ``u_n`` of one energy sign;
    ``bar(v) = v^dagger gamma^0``.  This is the Riemann-sum surrogate of the
    basis-sum representation of the doubly-regularized kernel.
    """
    s = dirac.check_sign(sign)
    modes = lattice_modes(lattice, g, s, m)
    Vx = lattice_values(lattice, g, s, x, m, modes)
    Vy = lattice_values(lattice, g, s, y, m, modes)
    value = s / (2 * np.pi) * (Vx @ Vy.conj().T) @ dirac.GAMMA0
    xi = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
    return KernelMatrix(value, tuple(xi), s, 2)


def lattice_convergence(g: CutoffProfile, sizes=(16, 32, 64), xi=(0, 0, 0, 0), sign=-1, m: float = 1.0):
    """Relative error of the lattice sum against the radial kernel for each lattice size."""
    exact = kernel(xi, g, sign, "double", m).value
    x = np.asarray(xi, dtype=float)
    rows = []
    for n in sizes:
        approx = kernel_from_lattice_sum(x, np.zeros(4), lattice_for(g, n), g, sign, m).value
        err = np.linalg.norm(approx - exact, 2) / np.linalg.norm(exact, 2)
        rows.append({"n": int(n), "relative_error": float(err)})
    return rows


# ---------------------------------------------------------------------------
# perturbations of the diagonal


@dataclass(frozen=True)
class PerturbedDiagonal:
    """``P_{-,eps^2}(x,x) + Delta P`` and its Bauer-Fike certificate."""

    matrix: np.ndarray
    delta: np.ndarray
    eigenvalues: np.ndarray
    lambdas: tuple
    distances: np.ndarray
    bauer_fike_bound: float

    @property
    def holds(self) -> bool:
        return bool(np.all(self.distances <= self.bauer_fike_bound * (1 + 1e-12) + 1e-15))


def delta_kernel(states, sign_of_states) -> np.ndarray:
    """``Delta P = -(2pi)^-1 sum_+ v bar(v) + (2pi)^-1 sum_- v bar(v)``.

    ``states`` are regularized values ``R e_i(x)`` (shape ``(n, 4)``);
    positive-energy states enter with ``-``, negative-energy states with ``+``.
    """
    states = np.asarray(states, dtype=complex).reshape(-1, 4)
    signs = np.asarray([dirac.check_sign(s) for s in sign_of_states], dtype=float)
    if len(signs) != len(states):
        raise InvalidArgument("one energy sign per state is required")
    return -np.einsum("n,ni,nj->ij", signs, states, states.conj()) @ dirac.GAMMA0 / (2 * np.pi)


def perturbed_diagonal(g: CutoffProfile, states, signs, m: float = 1.0, norms=None) -> PerturbedDiagonal:
    """Eigenvalues of ``P_{-,eps^2}(x,x) + Delta P`` against the Bauer-Fike radius ``||Delta P||_2``.

    ``P_{-,eps^2}(x,x)`` is diagonal, so its eigenvector matrix has condition
    number one and every perturbed eigenvalue lies within ``||Delta P||_2`` of
    ``lambda_plus`` or ``lambda_minus``.
    """
    norms = cutoff_l1_norms(g, m) if norms is None else norms
    P = diagonal_closed_form(g, -1, m, norms)
    lp, lm = diagonal_spectrum(g, m, norms)
    dP = delta_kernel(states, signs) if len(signs) else np.zeros((4, 4), dtype=complex)
    A = P + dP
    ev = np.linalg.eigvals(A)
    ev = ev[np.lexsort((ev.imag, ev.real))]
    dist = np.minimum(np.abs(ev - lp), np.abs(ev - lm))
    bound = float(np.linalg.norm(dP, 2))
    return PerturbedDiagonal(A, dP, ev, (lp, lm), dist, bound)
