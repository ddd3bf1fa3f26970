"""Dirac algebra in the standard (Dirac) representation.

Conventions
-----------
Metric signature is ``(+, -, -, -)``.  Momenta ``k`` are arrays whose last
axis has length 3; every function broadcasts over the leading axes.  Energy
signs are passed as ``+1`` or ``-1`` and spins as ``"up"`` / ``"down"``.
"""

from __future__ import annotations

import numpy as np

from .errors import InvalidArgument

PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)

IDENTITY = np.eye(4, dtype=complex)


def _build_gammas():
    g = np.zeros((4, 4, 4), dtype=complex)
    g[0] = np.diag([1, 1, -1, -1])
    for i in range(3):
        g[i + 1, :2, 2:] = PAULI[i]
        g[i + 1, 2:, :2] = -PAULI[i]
    return g


GAMMA = _build_gammas()
GAMMA.setflags(write=False)
GAMMA0 = GAMMA[0]
METRIC = np.diag([1.0, -1.0, -1.0, -1.0])

SPIN_STATES = {"up": np.array([1, 0], dtype=complex), "down": np.array([0, 1], dtype=complex)}


def check_sign(sign) -> int:
    """Normalize an energy sign given as ``+1``, ``-1``, ``"+"`` or ``"-"``."""
    if sign in (1, "+", "plus", "positive"):
        return 1
    if sign in (-1, "-", "minus", "negative"):
        return -1
    raise InvalidArgument(f"energy sign must be +1 or -1, got {sign!r}")


def check_spin(spin) -> str:
    key = {"up": "up", "down": "down", "↑": "up", "↓": "down"}.get(spin)
    if key is None:
        raise InvalidArgument(f"spin must be 'up' or 'down', got {spin!r}")
    return key


def check_mass(m) -> float:
    m = float(m)
    if not np.isfinite(m) or m <= 0:
        raise InvalidArgument(f"mass must be positive and finite, got {m}")
    return m


def _as_momentum(k):
    k = np.asarray(k, dtype=float)
    if k.shape[-1:] != (3,):
        raise InvalidArgument(f"momentum must have a trailing axis of length 3, got shape {k.shape}")
    if not np.all(np.isfinite(k)):
        raise InvalidArgument("momentum has non-finite components")
    return k


def omega(k, m: float = 1.0):
    """Relativistic energy ``sqrt(|k|^2 + m^2)`` on the mass shell."""
    k = _as_momentum(k)
    m = check_mass(m)
    return np.sqrt(np.einsum("...i,...i->...", k, k) + m * m)


def gamma(mu: int) -> np.ndarray:
    """Return a copy of the Dirac matrix ``gamma^mu``."""
    if mu not in (0, 1, 2, 3):
        raise InvalidArgument(f"gamma index must be in 0..3, got {mu!r}")
    return GAMMA[mu].copy()


def dirac_adjoint(a):
    """Row spinor ``a^dagger gamma^0`` (the bar operation)."""
    a = np.asarray(a, dtype=complex)
    return np.conj(a) @ GAMMA0


def spin_product(a, b):
    """Indefinite spin inner product ``a^dagger gamma^0 b``.

    Antilinear in ``a``; broadcasts over leading axes.
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    return np.einsum("...i,ij,...j->...", np.conj(a), GAMMA0, b)


def k_dot_gamma(k):
    """Euclidean contraction ``sum_i k^i gamma^i`` with shape ``(..., 4, 4)``."""
    k = _as_momentum(k)
    return np.einsum("...i,ijk->...jk", k, GAMMA[1:])


def slash(p):
    """Feynman slash ``gamma^mu p_mu`` of a four-vector with contravariant components."""
    p = np.asarray(p, dtype=float)
    return np.einsum("...m,mjk->...jk", p * np.diag(METRIC), GAMMA)


def hamiltonian_symbol(k, m: float = 1.0):
    """Momentum-space Dirac Hamiltonian ``h(k) = gamma^0 (k.gamma + m)``."""
    m = check_mass(m)
    return GAMMA0 @ (k_dot_gamma(k) + m * IDENTITY)


def energy_projector(k, sign, m: float = 1.0):
    """Orthogonal projector onto the ``sign * omega(k)`` eigenspace of ``h(k)``.

    ``p_sign = (1/2)(I - sign (k.gamma) gamma^0 / omega + sign m gamma^0 / omega)``
    """
    s = check_sign(sign)
    w = omega(k, m)[..., None, None]
    kg = k_dot_gamma(k)
    return 0.5 * (IDENTITY - s * (kg @ GAMMA0) / w + s * m * GAMMA0 / w)


def projector_gamma0(k, sign, m: float = 1.0):
    """``p_sign(k) gamma^0 = (1/2)(gamma^0 - sign k.gamma/omega + sign m/omega)``."""
    s = check_sign(sign)
    w = omega(k, m)[..., None, None]
    return 0.5 * (GAMMA0 - s * k_dot_gamma(k) / w + s * m * IDENTITY / w)


def sigma_dot(k):
    k = _as_momentum(k)
    return np.einsum("...i,ijk->...jk", k, PAULI)


def fundamental_spinor(k, sign, spin, m: float = 1.0):
    """Unnormalized basis spinor of the energy eigenspace ``W_k^sign``.

    Positive energy: ``(e_s, sigma.k/(omega+m) e_s)``; negative energy:
    ``(-sigma.k/(omega+m) e_s, e_s)``.  The squared Euclidean norm is
    ``2 omega / (omega + m)``.
    """
    s = check_sign(sign)
    spin = check_spin(spin)
    e = SPIN_STATES[spin]
    k = _as_momentum(k)
    w = omega(k, m)
    k1, k2, k3 = k[..., 0], k[..., 1], k[..., 2]
    # sigma.k e_up = (k3, k1 + i k2), sigma.k e_down = (k1 - i k2, -k3)
    if spin == "up":
        sk = np.stack([k3 + 0j, k1 + 1j * k2], axis=-1)
    else:
        sk = np.stack([k1 - 1j * k2, -k3 + 0j], axis=-1)
    small = sk / (w + m)[..., None]
    large = np.broadcast_to(e, small.shape)
    if s > 0:
        return np.concatenate([large, small], axis=-1)
    return np.concatenate([-small, large], axis=-1)


def normalized_spinor(k, sign, spin, m: float = 1.0):
    """Fundamental spinor scaled to unit Euclidean norm."""
    chi = fundamental_spinor(k, sign, spin, m)
    return chi / np.linalg.norm(chi, axis=-1, keepdims=True)
