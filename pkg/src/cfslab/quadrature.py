"""Composite Gauss-Legendre quadrature for oscillatory radial integrals.

The integrals met in this package have the form ``int_0^K f(k) dk`` where
``f`` carries spherical Bessel factors ``j_n(k r)`` and phases
``exp(i omega(k) t)``.  Both oscillate with wavenumber at most ``r + |t|``,
so the interval is cut into panels no wider than a fixed fraction of the
period, each integrated with a fixed Gauss-Legendre rule, and the panel count
is doubled until two successive levels agree.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.special import spherical_jn

from .errors import NumericalFailure

TAIL_TOL = 1e-16


@lru_cache(maxsize=None)
def gauss_legendre(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    return x, w


def panel_nodes(edges, order: int = 16):
    """Nodes and weights of the composite rule on consecutive panels ``edges``."""
    x, w = gauss_legendre(order)
    edges = np.asarray(edges, dtype=float)
    a, b = edges[:-1, None], edges[1:, None]
    half = 0.5 * (b - a)
    nodes = (a + b) / 2 + half * x
    weights = half * w
    return nodes.ravel(), weights.ravel()


def _segment_edges(breakpoints, panels_per_unit: float, level: int):
    edges = []
    for a, b in zip(breakpoints[:-1], breakpoints[1:]):
        n = max(1, int(np.ceil((b - a) * panels_per_unit))) * 2**level
        edges.append(np.linspace(a, b, n + 1)[:-1])
    edges.append([breakpoints[-1]])
    return np.concatenate(edges)


def radial_integral(
    integrand,
    upper: float,
    *,
    breakpoints=(),
    wavenumber: float = 0.0,
    scale: float | None = None,
    rtol: float = 1e-12,
    order: int = 16,
    max_level: int = 10,
):
    """Integrate ``integrand(k)`` over ``[0, upper]``.

    Parameters
    ----------
    integrand : callable
        Maps a 1-D array of nodes of length ``N`` to an array with leading
        axis ``N``; trailing axes are integrated independently.
    upper : float
        Right end point (a support edge or a tail truncation radius).
    breakpoints : sequence of float
        Interior points where the integrand is not smooth.
    wavenumber : float
        Largest oscillation frequency in ``k``.
    scale : float, optional
        Characteristic width of the non-oscillatory part, defaults to
        ``upper / 8``.
    rtol : float
        Relative agreement required between two refinement levels, measured
        against the largest entry of the result.

    Returns
    -------
    ndarray
        The integrals, shape equal to the trailing shape of ``integrand``.
    """
    if not np.isfinite(upper) or upper <= 0:
        raise NumericalFailure("radial integral needs a finite positive upper limit", {"upper": upper})
    pts = sorted({0.0, float(upper), *[float(b) for b in breakpoints if 0 < b < upper]})
    scale = upper / 8 if scale is None else min(scale, upper / 2)
    width = min(scale, np.pi / max(wavenumber, 1e-300))
    panels_per_unit = 1.0 / width

    prev = None
    for level in range(max_level + 1):
        nodes, weights = panel_nodes(_segment_edges(pts, panels_per_unit, level), order)
        vals = np.asarray(integrand(nodes))
        cur = np.tensordot(weights, vals, axes=(0, 0))
        if prev is not None:
            err = np.max(np.abs(cur - prev))
            ref = np.max(np.abs(cur))
            if err <= rtol * ref or ref == 0.0:
                return cur
        prev = cur
    raise NumericalFailure(
        "radial quadrature did not converge",
        {"upper": upper, "wavenumber": wavenumber, "levels": max_level, "error": float(err), "ref": float(ref)},
    )


def truncation_radius(weight, scale: float, power: int = 2, tol: float = TAIL_TOL):
    """Radius beyond which ``k**power * |weight(k)|`` stays below ``tol`` of its peak.

    ``weight`` is sampled on a logarithmic grid spanning ``scale * [1e-4, 1e4]``.
    """
    k = scale * np.logspace(-4, 4, 8001)
    w = k**power * np.abs(weight(k))
    peak = w.max()
    if peak == 0:
        raise NumericalFailure("weight vanishes identically on the sampled range", {"scale": scale})
    above = np.nonzero(w >= tol * peak)[0]
    last = above[-1]
    if last == len(k) - 1:
        raise NumericalFailure("weight does not decay within the sampled range", {"scale": scale})
    return float(k[last + 1])


def sph_j0(z):
    return spherical_jn(0, z)


def sph_j1(z):
    z = np.asarray(z, dtype=float)
    # scipy loses j1 below ~1e-300; the leading series term is exact there
    return np.where(np.abs(z) < 1e-100, z / 3, spherical_jn(1, z))


def sph_j2(z):
    z = np.asarray(z, dtype=float)
    return np.where(np.abs(z) < 1e-100, z * z / 15, spherical_jn(2, z))


def j1_over_z(z):
    """``j_1(z)/z`` with its limit ``1/3`` at the origin."""
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    small = np.abs(z) < 1e-3
    zs = z[small]
    out[small] = 1 / 3 - zs**2 / 30 + zs**4 / 840
    zb = z[~small]
    out[~small] = spherical_jn(1, zb) / zb
    return out
