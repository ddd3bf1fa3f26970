"""Momentum cutoffs, their L1 norms, and the mollifier construction.

A cutoff acts on solutions by multiplying the three-momentum distribution by
a nonnegative radial profile ``g_eps(|k|)``.  Four kinds are provided:

``sharp``
    Indicator of ``|k| <= 1/eps``.
``gaussian``
    ``amplitude * exp(-(eps k)^2 / (2 width^2))``.
``mollifier``
    On-shell restriction of the Fourier transform of a mollifier
    ``h = h1 * h1`` on R^4.  For a Euclidean-radial ``h`` the restriction is
    ``H(eps * sqrt(2 k^2 + m^2))`` with ``H`` the radial transform of ``h``.
``custom_radial``
    Linear interpolation of a sampled table of ``g_1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Mapping

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.signal import fftconvolve
from scipy.special import j1

from .dirac import check_mass
from .errors import InvalidArgument
from .quadrature import TAIL_TOL, panel_nodes, radial_integral, truncation_radius

# Beyond this radius in R^4 the transform of the standard bump is below 1e-14.
BUMP_RHO_MAX = 1000.0


def standard_bump(r):
    """``exp(-1/(1 - 4 r^2))`` on ``r < 1/2``, zero outside (unnormalized)."""
    r = np.asarray(r, dtype=float)
    out = np.zeros_like(r)
    inside = r < 0.5
    out[inside] = np.exp(-1.0 / (1.0 - 4.0 * r[inside] ** 2))
    return out


def _bump_nodes():
    return panel_nodes(np.linspace(0.0, 0.5, 65), 16)


def _bump_l1(bump):
    r, w = _bump_nodes()
    return 2 * np.pi**2 * np.sum(w * r**3 * bump(r))


@lru_cache(maxsize=8)
def _bump_transform_table(bump: Callable):
    """Spline of the normalized radial Fourier transform of ``bump`` on R^4."""
    r, w = _bump_nodes()
    hr = w * r**2 * bump(r)
    norm = _bump_l1(bump)
    rho = np.linspace(0.0, BUMP_RHO_MAX, 20001)
    vals = np.empty_like(rho)
    vals[0] = 1.0
    for lo in range(1, len(rho), 2000):
        chunk = rho[lo : lo + 2000]
        vals[lo : lo + 2000] = 4 * np.pi**2 / chunk * (j1(np.outer(chunk, r)) @ hr) / norm
    return CubicSpline(rho, vals)


def bump_transform(rho, bump: Callable = standard_bump):
    """Normalized transform ``int h1(x) e^{i k.x} d^4x / int h1`` at ``|k| = rho``."""
    rho = np.abs(np.asarray(rho, dtype=float))
    out = _bump_transform_table(bump)(np.minimum(rho, BUMP_RHO_MAX))
    return np.where(rho < BUMP_RHO_MAX, out, 0.0)


def mollifier_transform(rho, bump: Callable = standard_bump):
    """Transform of ``h = h1 * h1 / (int h1)^2``; equals ``bump_transform**2 >= 0``."""
    return bump_transform(rho, bump) ** 2


def mollifier_peak(epsilon: float, bump: Callable = standard_bump) -> float:
    """``sup h_eps = h_eps(0) = eps^-4 int h1^2 / (int h1)^2``."""
    r, w = _bump_nodes()
    return 2 * np.pi**2 * np.sum(w * r**3 * bump(r) ** 2) / _bump_l1(bump) ** 2 / epsilon**4


@dataclass(frozen=True)
class CutoffProfile:
    """Radial momentum cutoff ``g_eps``.

    Instances are callables on ``|k|`` (any array shape).  Use the factory
    functions :func:`sharp_cutoff`, :func:`gaussian_cutoff`,
    :func:`mollifier_cutoff`, :func:`custom_cutoff` and :func:`cutoff_on_shell`.
    """

    kind: str
    epsilon: float
    radial: Callable = field(repr=False, compare=False)
    params: Mapping = field(default_factory=dict, compare=False)
    support: float = np.inf
    sup: float = 1.0

    def __call__(self, k):
        return self.radial(np.abs(np.asarray(k, dtype=float)))

    @property
    def breakpoints(self):
        return (self.support,) if np.isfinite(self.support) else ()

    def upper(self, power: int = 2, weight: Callable | None = None) -> float:
        """Integration limit for ``k**power * g(k)**2 * weight(k)``.

        Compact support wins; otherwise the tail is cut where the integrand
        drops below ``1e-16`` of its peak.
        """
        if np.isfinite(self.support):
            return self.support
        w = (lambda k: self(k) ** 2) if weight is None else (lambda k: self(k) ** 2 * weight(k))
        return truncation_radius(w, 1.0 / self.epsilon, power=power, tol=TAIL_TOL)

    def describe(self) -> dict:
        return {"kind": self.kind, "epsilon": self.epsilon, "params": dict(self.params)}


def _check_epsilon(epsilon):
    epsilon = float(epsilon)
    if not np.isfinite(epsilon) or epsilon <= 0:
        raise InvalidArgument(f"epsilon must be positive and finite, got {epsilon}")
    return epsilon


def sharp_cutoff(epsilon: float) -> CutoffProfile:
    """Indicator of the ball ``|k| <= 1/epsilon``."""
    epsilon = _check_epsilon(epsilon)
    kmax = 1.0 / epsilon
    return CutoffProfile("sharp", epsilon, lambda k: (k <= kmax).astype(float), {}, support=kmax)


def gaussian_cutoff(epsilon: float, width: float = 1.0, amplitude: float = 1.0) -> CutoffProfile:
    """``amplitude * exp(-(epsilon k)^2 / (2 width^2))``."""
    epsilon = _check_epsilon(epsilon)
    if width <= 0 or amplitude <= 0:
        raise InvalidArgument("gaussian cutoff needs positive width and amplitude")
    a = (epsilon / width) ** 2 / 2
    return CutoffProfile(
        "gaussian",
        epsilon,
        lambda k: amplitude * np.exp(-a * k * k),
        {"width": width, "amplitude": amplitude},
        sup=amplitude,
    )


def mollifier_cutoff(epsilon: float, m: float = 1.0, bump: Callable = standard_bump) -> CutoffProfile:
    """On-shell cutoff generated by the mollifier ``h_eps`` built from ``bump``."""
    epsilon = _check_epsilon(epsilon)
    m = check_mass(m)
    support = np.sqrt(max((BUMP_RHO_MAX / epsilon) ** 2 - m * m, 0.0) / 2)

    def radial(k):
        return mollifier_transform(epsilon * np.sqrt(2 * k * k + m * m), bump)

    return CutoffProfile("mollifier", epsilon, radial, {"m": m}, support=support)


def custom_cutoff(epsilon: float, k_table, g_table) -> CutoffProfile:
    """Cutoff ``g_eps(k) = g_1(epsilon k)`` from a sampled table of ``g_1``."""
    epsilon = _check_epsilon(epsilon)
    k_table = np.asarray(k_table, dtype=float)
    g_table = np.asarray(g_table, dtype=float)
    if k_table.ndim != 1 or k_table.shape != g_table.shape or len(k_table) < 2:
        raise InvalidArgument("custom cutoff needs matching 1-D tables of length >= 2")
    if np.any(np.diff(k_table) <= 0) or k_table[0] < 0:
        raise InvalidArgument("custom cutoff momenta must be increasing and nonnegative")
    if np.any(g_table < 0) or not np.any(g_table > 0):
        raise InvalidArgument("custom cutoff must be nonnegative and not identically zero")
    kmax = k_table[-1] / epsilon

    def radial(k):
        return np.interp(epsilon * k, k_table, g_table, right=0.0)

    return CutoffProfile(
        "custom_radial",
        epsilon,
        radial,
        {"k": k_table.tolist(), "g": g_table.tolist()},
        support=kmax,
        sup=float(g_table.max()),
    )


def cutoff_on_shell(profile4d: Callable, m: float = 1.0, epsilon: float = 1.0, support: float = np.inf):
    """Restrict a four-momentum cutoff ``G(k0, |k|)`` to the negative/positive mass shell.

    ``profile4d`` must be even in ``k0``; it is evaluated at ``(omega(k), |k|)``.
    """
    m = check_mass(m)
    epsilon = _check_epsilon(epsilon)

    def radial(k):
        return np.asarray(profile4d(np.sqrt(k * k + m * m), k), dtype=float)

    return CutoffProfile("on_shell", epsilon, radial, {"m": m}, support=support)


def sharp_4d_on_shell(epsilon: float, m: float = 1.0) -> CutoffProfile:
    """Indicator of the Euclidean ball of radius ``1/epsilon`` in R^4, on shell.

    The support radius is ``sqrt((1/epsilon^2 - m^2)/2)``.
    """
    radius = np.sqrt(max(1.0 / epsilon**2 - m * m, 0.0) / 2)
    return cutoff_on_shell(lambda k0, k: (k0**2 + k**2 <= 1.0 / epsilon**2).astype(float), m, epsilon, radius)


def cutoff_l1_norms(g: CutoffProfile, m: float = 1.0, rtol: float = 1e-12):
    """``(||g^2||_{L1(R^3)}, ||g^2/omega||_{L1(R^3)})`` by radial quadrature."""
    m = check_mass(m)
    upper = g.upper(power=2)

    def integrand(k):
        g2 = g(k) ** 2
        return 4 * np.pi * (k**2 * g2)[:, None] * np.stack([np.ones_like(k), 1 / np.sqrt(k * k + m * m)], axis=-1)

    out = radial_integral(integrand, upper, breakpoints=g.breakpoints, scale=1.0 / g.epsilon, rtol=rtol)
    return float(out[0]), float(out[1])


def sharp_norms_closed_form(epsilon: float, m: float = 1.0):
    """Exact ``(||g^2||, ||g^2/omega||)`` for :func:`sharp_cutoff`."""
    me = m * epsilon
    norm_a = 4 * np.pi * m**3 / (3 * me**3)
    norm_b = 2 * np.pi * m**2 * (np.sqrt(1 / me**4 + 1 / me**2) - np.arcsinh(1 / me))
    return norm_a, norm_b


def regularize_profile(profile: Callable, g: CutoffProfile) -> Callable:
    """Momentum profile ``k -> g(|k|) * profile(k)`` (``k`` has a trailing axis of 3)."""

    def regularized(k):
        k = np.asarray(k, dtype=float)
        return g(np.linalg.norm(k, axis=-1)) * profile(k)

    return regularized


@dataclass(frozen=True)
class MollifierSample:
    """Samples of ``h_eps`` on a uniform grid of ``R^4`` centred at the origin."""

    spacing: float
    values: np.ndarray = field(repr=False)
    epsilon: float

    @property
    def coords(self):
        n = self.values.shape[0]
        return (np.arange(n) - (n - 1) / 2) * self.spacing

    def integral(self) -> float:
        return float(self.values.sum() * self.spacing**4)

    def support_radius(self, rel: float = 1e-12) -> float:
        c = self.coords
        grids = np.meshgrid(c, c, c, c, indexing="ij", sparse=True)
        r = np.sqrt(sum(x * x for x in grids))
        mask = self.values > rel * self.values.max()
        return float(r[mask].max())

    def transform(self):
        """Discrete Fourier transform with the grid centre moved to index 0."""
        return np.fft.fftn(np.fft.ifftshift(self.values)) * self.spacing**4


def build_mollifier(bump: Callable = standard_bump, epsilon: float = 1.0, points: int = 32) -> MollifierSample:
    """Sample ``h1``, form ``h = h1 * h1`` by FFT convolution and rescale to ``h_eps``.

    Parameters
    ----------
    bump : callable
        Radial profile of ``h1``; must be nonnegative and vanish for ``r >= 1/2``.
    epsilon : float
        Target support radius.
    points : int
        Samples per axis of ``h1`` on ``[-1/2, 1/2]``.
    """
    epsilon = _check_epsilon(epsilon)
    if points < 4:
        raise InvalidArgument("mollifier grid needs at least 4 points per axis")
    probe = np.linspace(0, 1, 201)
    vals = np.asarray(bump(probe), dtype=float)
    if np.any(vals < 0) or np.any(vals[probe >= 0.5] != 0) or not np.any(vals > 0):
        raise InvalidArgument("bump must be nonnegative, nonzero, and supported in r < 1/2")
    c = np.linspace(-0.5, 0.5, points)
    d = c[1] - c[0]
    grids = np.meshgrid(c, c, c, c, indexing="ij", sparse=True)
    h1 = bump(np.sqrt(sum(x * x for x in grids)))
    h = fftconvolve(h1, h1, mode="full") * d**4
    # FFT round-off leaves ~1e-17 ripples where the exact convolution vanishes.
    h[h < 1e-13 * h.max()] = 0.0
    h /= h.sum() * d**4
    return MollifierSample(spacing=d * epsilon, values=h / epsilon**4, epsilon=epsilon)
