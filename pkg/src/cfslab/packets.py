"""Wave-packet solutions of the free Dirac equation.

A packet is ``u(x) = (2 pi)^{-3/2} int d^3k lambda(k) chi(k) exp(-i eta(x, k))``
with ``eta(x, k) = sign * omega(k) t - k.x`` and a scalar profile

``lambda(k) = amplitude * envelope(k) * exp(i eta(center, k))``,

so that ``center`` is the point around which the packet is concentrated.
Envelopes:

``gaussian``
    ``exp(-|k - p|^2 / (4 sigma^2))``
``k3_gaussian``
    ``exp(-|k|^2 / (4 sigma^2)) (omega + m) k_3``
``custom_radial``
    linear interpolation of a table in ``|k|``.

Packets with ``p = 0`` are evaluated by reduction to one-dimensional radial
integrals with spherical Bessel kernels; momentum-shifted Gaussians use a
tensor Gauss-Hermite rule centred at ``p``.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import dirac
from .errors import DegenerateFamily, InvalidArgument, NumericalFailure
from .quadrature import (
    j1_over_z,
    panel_nodes,
    radial_integral,
    sph_j0,
    sph_j1,
    sph_j2,
    truncation_radius,
)

PROFILE_KINDS = ("gaussian", "k3_gaussian", "custom_radial")
TWO_PI_32 = (2 * np.pi) ** 1.5


def _vec(x, n, name):
    x = np.asarray(x, dtype=float)
    if x.shape != (n,) or not np.all(np.isfinite(x)):
        raise InvalidArgument(f"{name} must be a finite vector of length {n}")
    return tuple(float(v) for v in x)


@dataclass(frozen=True)
class WavePacket:
    """Single-spinor solution with a scalar momentum profile.

    Parameters
    ----------
    sign : int
        Energy sign, ``+1`` or ``-1``.
    spin : str
        ``"up"`` or ``"down"``.
    profile : str
        One of :data:`PROFILE_KINDS`.
    sigma : float
        Momentum width (mass units).
    center : tuple of 4 floats
        Phase centre ``(t0, x1, x2, x3)``.
    momentum : tuple of 3 floats
        Centre ``p`` of a ``gaussian`` envelope.
    amplitude : complex
        Overall scale of the profile.
    m : float
        Mass.
    table : tuple of two tuples, optional
        ``(k_values, envelope_values)`` for ``custom_radial``.
    """

    sign: int = -1
    spin: str = "up"
    profile: str = "gaussian"
    sigma: float = 1.0
    center: tuple = (0.0, 0.0, 0.0, 0.0)
    momentum: tuple = (0.0, 0.0, 0.0)
    amplitude: complex = 1.0
    m: float = 1.0
    table: tuple | None = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "sign", dirac.check_sign(self.sign))
        object.__setattr__(self, "spin", dirac.check_spin(self.spin))
        object.__setattr__(self, "m", dirac.check_mass(self.m))
        if self.profile not in PROFILE_KINDS:
            raise InvalidArgument(f"unknown profile kind {self.profile!r}")
        if not np.isfinite(self.sigma) or self.sigma <= 0:
            raise InvalidArgument("sigma must be positive and finite")
        object.__setattr__(self, "center", _vec(self.center, 4, "center"))
        object.__setattr__(self, "momentum", _vec(self.momentum, 3, "momentum"))
        object.__setattr__(self, "amplitude", complex(self.amplitude))
        if self.profile != "gaussian" and any(self.momentum):
            raise InvalidArgument("only gaussian envelopes may be centred at p != 0")
        if self.profile == "custom_radial":
            if self.table is None or len(self.table) != 2:
                raise InvalidArgument("custom_radial needs table=(k_values, envelope_values)")
            k, v = (tuple(float(a) for a in t) for t in self.table)
            if len(k) != len(v) or len(k) < 2 or np.any(np.diff(k) <= 0):
                raise InvalidArgument("custom_radial table must be increasing and of matching length")
            object.__setattr__(self, "table", (k, v))

    @property
    def shifted(self) -> bool:
        return any(self.momentum)

    @property
    def momentum_scale(self) -> float:
        """Typical momentum spread used to size grids and steps."""
        if self.profile == "custom_radial":
            return self.table[0][-1] / 4
        return 2 * self.sigma

    def envelope(self, k):
        """Envelope at momenta ``k`` with shape ``(..., 3)`` (no phase, no amplitude)."""
        k = np.asarray(k, dtype=float)
        kk = np.einsum("...i,...i->...", k, k)
        if self.profile == "gaussian":
            d = k - np.asarray(self.momentum)
            return np.exp(-np.einsum("...i,...i->...", d, d) / (4 * self.sigma**2))
        if self.profile == "k3_gaussian":
            w = np.sqrt(kk + self.m**2)
            return np.exp(-kk / (4 * self.sigma**2)) * (w + self.m) * k[..., 2]
        return self.radial_envelope(np.sqrt(kk))

    def radial_envelope(self, k):
        """Radial factor of the envelope (the ``k_3`` factor excluded)."""
        k = np.asarray(k, dtype=float)
        if self.profile == "gaussian":
            return np.exp(-k * k / (4 * self.sigma**2))
        if self.profile == "k3_gaussian":
            return np.exp(-k * k / (4 * self.sigma**2)) * (np.sqrt(k * k + self.m**2) + self.m)
        kt, vt = self.table
        return np.interp(k, kt, vt, right=0.0)

    def phase(self, k):
        """``exp(i eta(center, k))``."""
        k = np.asarray(k, dtype=float)
        c = np.asarray(self.center)
        eta = self.sign * dirac.omega(k, self.m) * c[0] - k @ c[1:]
        return np.exp(1j * eta)

    def profile_values(self, k):
        """Scalar momentum profile ``lambda(k)``."""
        return self.amplitude * self.envelope(k) * self.phase(k)

    def momentum_spinor(self, k, g=None):
        """``phi(k) = g(|k|) lambda(k) chi(k)`` with shape ``(..., 4)``."""
        k = np.asarray(k, dtype=float)
        lam = self.profile_values(k)
        if g is not None:
            lam = lam * g(np.linalg.norm(k, axis=-1))
        return lam[..., None] * dirac.fundamental_spinor(k, self.sign, self.spin, self.m)

    def breakpoints(self, g=None) -> tuple:
        """Radii where the radial integrand has kinks: table nodes and the cutoff edge."""
        pts = self.table[0][1:-1] if self.profile == "custom_radial" else ()
        return tuple(pts) + (g.breakpoints if g is not None else ())

    def radial_upper(self, g=None, power: int = 4) -> float:
        """Truncation radius for radial integrals of this packet (times ``g``)."""
        if self.profile == "custom_radial":
            upper = self.table[0][-1]
        else:
            upper = truncation_radius(lambda k: self.radial_envelope(k) * k, 2 * self.sigma, power=power)
        if g is not None and np.isfinite(g.support):
            upper = min(upper, g.support)
        return upper


def special_solution_a(spin: str, sigma: float = 1.0, x0=(0, 0, 0, 0), m: float = 1.0) -> WavePacket:
    """Negative-energy packet with ``lambda = (2 pi)^{3/2} A exp(-k^2/4sigma^2)`` phase-centred at ``x0``.

    With ``A = (2 sqrt(pi) sigma)^{-3}`` its value at ``x0`` is the unit
    vector ``e_2`` (spin up) or ``e_3`` (spin down).
    """
    a = (2 * np.sqrt(np.pi) * sigma) ** -3
    return WavePacket(-1, spin, "gaussian", sigma, tuple(x0), amplitude=TWO_PI_32 * a, m=m)


def special_solution_b(spin: str, sigma: float = 1.0, x0=(0, 0, 0, 0), m: float = 1.0) -> WavePacket:
    """Negative-energy packet with ``lambda = (2 pi)^{3/2} B exp(-k^2/4sigma^2)(omega+m)k_3``.

    With ``B = 2^-4 pi^{-3/2} sigma^-5`` its value at ``x0`` is ``-e_0``
    (spin up) or ``+e_1`` (spin down).
    """
    b = 2.0**-4 * np.pi**-1.5 * sigma**-5
    return WavePacket(-1, spin, "k3_gaussian", sigma, tuple(x0), amplitude=TWO_PI_32 * b, m=m)


def special_family(sigma: float = 1.0, x0=(0, 0, 0, 0), m: float = 1.0):
    """The four packets ``u_up^(a), u_down^(a), u_up^(b), u_down^(b)``."""
    return [
        special_solution_a("up", sigma, x0, m),
        special_solution_a("down", sigma, x0, m),
        special_solution_b("up", sigma, x0, m),
        special_solution_b("down", sigma, x0, m),
    ]


def delta_packet(p, sigma: float, x0=(0, 0, 0, 0), m: float = 1.0, spin="up") -> WavePacket:
    """Normalized Gaussian ``(sqrt(2 pi) s)^{-3} exp(-(k-p)^2 / 2 s^2)``, spin up, negative energy.

    Converges to ``delta(k - p)`` as ``s -> 0``.  In the ``exp(-k^2/4 sigma^2)``
    convention of :class:`WavePacket` this is ``sigma = s / sqrt(2)``.
    """
    return WavePacket(
        -1, spin, "gaussian", sigma / np.sqrt(2), tuple(x0), tuple(p), (np.sqrt(2 * np.pi) * sigma) ** -3, m
    )


def special_moments(sigma: float):
    """``(beta/A, gamma)`` where ``beta = A (2 sqrt(pi) sigma)^3`` and ``gamma = 2^4 pi^{3/2} sigma^5``.

    ``beta/A`` is the Gaussian integral ``int exp(-k^2/4sigma^2) d^3k`` and
    ``gamma`` the ``k_3^2`` moment of the same Gaussian.
    """
    return (2 * np.sqrt(np.pi) * sigma) ** 3, 2**4 * np.pi**1.5 * sigma**5


def gaussian_moments_quadrature(sigma: float, rtol: float = 1e-13):
    """Both moments of :func:`special_moments` by radial quadrature."""
    upper = truncation_radius(lambda k: np.exp(-k * k / (4 * sigma**2)), 2 * sigma, power=4)

    def integrand(k):
        e = np.exp(-k * k / (4 * sigma**2))
        return 4 * np.pi * np.stack([k**2 * e, k**4 * e / 3], axis=-1)

    out = radial_integral(integrand, upper, scale=sigma, rtol=rtol)
    return float(out[0]), float(out[1])


# ---------------------------------------------------------------------------
# evaluation


def _as_points(x):
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    x = np.atleast_2d(x)
    if x.shape[-1] != 4 or not np.all(np.isfinite(x)):
        raise InvalidArgument("spacetime points must be finite with a trailing axis of length 4")
    return x, single


def _assemble(u: WavePacket, large, small):
    """Stack the two 2-spinor slots according to the energy sign."""
    if u.sign > 0:
        return np.concatenate([large, small], axis=-1)
    return np.concatenate([-small, large], axis=-1)


def _evaluate_radial(u: WavePacket, xi, g, rtol):
    tau = xi[:, 0]
    rv = xi[:, 1:]
    r = np.linalg.norm(rv, axis=1)
    rhat = np.divide(rv, r[:, None], out=np.zeros_like(rv), where=r[:, None] > 0)
    m, s = u.m, u.sign
    upper = u.radial_upper(g)
    bps = u.breakpoints(g)
    wavenumber = float(np.max(r + np.abs(tau)))

    def time_weight(k):
        w = np.sqrt(k * k + m * m)
        base = u.radial_envelope(k) * (1.0 if g is None else g(k))
        return w, base[:, None] * np.exp(-1j * s * np.outer(w, tau))

    if u.profile in ("gaussian", "custom_radial"):

        def integrand(k):
            w, F = time_weight(k)
            kr = np.outer(k, r)
            i0 = (k**2)[:, None] * F * sph_j0(kr)
            i1 = (k**3 / (w + m))[:, None] * F * sph_j1(kr)
            return 4 * np.pi * np.stack([i0, i1], axis=-1)

        I = radial_integral(integrand, upper, breakpoints=bps, wavenumber=wavenumber, scale=u.momentum_scale, rtol=rtol)
        e = dirac.SPIN_STATES[u.spin]
        large = I[:, 0, None] * e
        vec = 1j * rhat * I[:, 1, None]
        small = dirac.sigma_dot(vec.real) @ e + 1j * (dirac.sigma_dot(vec.imag) @ e)
    else:
        # envelope radial part already contains (omega + m); k_3 is angular.
        def integrand(k):
            w, F = time_weight(k)
            kr = np.outer(k, r)
            l1 = (k**3)[:, None] * F * sph_j1(kr)
            a = (k**4)[:, None] * F * j1_over_z(kr) / (w + m)[:, None]
            b = (k**4)[:, None] * F * sph_j2(kr) / (w + m)[:, None]
            return 4 * np.pi * np.stack([l1, a, b], axis=-1)

        I = radial_integral(integrand, upper, breakpoints=bps, wavenumber=wavenumber, scale=u.momentum_scale, rtol=rtol)
        e = dirac.SPIN_STATES[u.spin]
        large = (1j * rhat[:, 2] * I[:, 0])[:, None] * e
        vec = -rhat * (rhat[:, 2] * I[:, 2])[:, None]
        vec[:, 2] += I[:, 1]
        small = np.einsum("pi,ijk,k->pj", vec, dirac.PAULI, e)
    return u.amplitude / TWO_PI_32 * _assemble(u, large, small)


def gauss_hermite_rule(center, width: float, n: int):
    """Tensor rule for ``int f(k) exp(-|k-center|^2 / width^2) d^3k``; returns nodes, weights."""
    z, w = np.polynomial.hermite.hermgauss(n)
    zz = np.stack(np.meshgrid(z, z, z, indexing="ij"), axis=-1).reshape(-1, 3)
    ww = np.einsum("i,j,k->ijk", w, w, w).ravel()
    return np.asarray(center) + width * zz, ww * width**3


def centered_rule(center, radius: float, panel: float, n_theta: int, n_phi: int, support: float = np.inf, order: int = 16):
    """Product rule on the ball ``|k - center| <= radius`` intersected with ``|k| <= support``.

    Every ray from ``center`` is cut where it leaves the support sphere, so a
    compact cutoff adds no kink inside the radial panels.  Returns nodes of
    shape ``(N, 3)`` and weights of shape ``(N,)``.
    """
    c = np.asarray(center, dtype=float)
    ct, wt = np.polynomial.legendre.leggauss(n_theta)
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    st = np.sqrt(1 - ct**2)
    dirs = np.stack(
        [np.outer(st, np.cos(phi)), np.outer(st, np.sin(phi)), np.repeat(ct[:, None], n_phi, axis=1)], axis=-1
    ).reshape(-1, 3)
    wd = np.repeat(wt, n_phi) * (2 * np.pi / n_phi)
    lo = np.zeros(len(dirs))
    hi = np.full(len(dirs), float(radius))
    if np.isfinite(support):
        b = dirs @ c
        disc = b * b - (c @ c - support**2)
        sq = np.sqrt(np.maximum(disc, 0.0))
        lo = np.maximum(-b - sq, 0.0)
        hi = np.minimum(hi, -b + sq)
        hi = np.where((disc > 0) & (hi > lo), hi, lo)
    s, ws = panel_nodes(np.linspace(0.0, 1.0, max(1, int(np.ceil(radius / panel))) + 1), order)
    span = hi - lo
    r = lo[None, :] + s[:, None] * span[None, :]
    w = ws[:, None] * span[None, :] * r**2 * wd[None, :]
    k = c + r[..., None] * dirs[None]
    return k.reshape(-1, 3), w.ravel()


def _gauss_reach(rtol: float) -> float:
    """Radius in units of the envelope width beyond which the Gaussian tail is below ``rtol``."""
    return float(np.sqrt(np.log(1 / rtol) + 3))


def _centered_integral(func, center, width, reach, m, support=np.inf, rtol=1e-11, max_level=6):
    """Refine :func:`centered_rule` until two levels agree to ``rtol`` (relative to the largest entry)."""
    radius = width * _gauss_reach(rtol)
    panel0 = min(width, 1.5 * m, 2 * np.pi / max(reach, 1e-300))
    n0 = int(np.ceil(radius * reach / 3)) + 10
    prev = None
    for level in range(max_level + 1):
        f = 1.25**level
        n_theta = int(np.ceil(n0 * f))
        k, w = centered_rule(center, radius, panel0 / f, n_theta, 2 * n_theta, support)
        cur = func(k, w)
        if prev is not None:
            err = np.max(np.abs(cur - prev))
            ref = np.max(np.abs(cur))
            if err <= rtol * ref or ref == 0.0:
                return cur
        prev = cur
    raise NumericalFailure(
        "centred cubature did not converge", {"width": width, "reach": reach, "error": float(err), "ref": float(ref)}
    )


def _evaluate_shifted(u: WavePacket, xi, g, rtol, derivative=False):
    """Packet values (or gradients) by cubature centred at the envelope peak ``p``."""
    reach = float(np.max(np.linalg.norm(xi[:, 1:], axis=1) + np.abs(xi[:, 0])))
    support = g.support if g is not None else np.inf
    x = xi + np.asarray(u.center)

    def func(k, w):
        phi = u.momentum_spinor(k, g) * w[:, None]
        om = np.sqrt(np.einsum("ij,ij->i", k, k) + u.m**2)
        deta = np.concatenate([u.sign * om[:, None], -k], axis=1)
        out = []
        # bound the size of the (points x nodes) phase matrix
        step = max(1, int(4e6 // len(k)))
        for i in range(0, len(x), step):
            xs = x[i : i + step]
            phase = np.exp(-1j * (u.sign * np.outer(xs[:, 0], om) - xs[:, 1:] @ k.T))
            if derivative:
                # d_nu exp(-i eta) = -i (d_nu eta) exp(-i eta), d_t eta = sign * omega, d_j eta = -k_j
                dphi = (deta[:, :, None] * phi[:, None, :]).reshape(len(k), 16)
                out.append(-1j * (phase @ dphi).reshape(len(xs), 4, 4))
            else:
                out.append(phase @ phi)
        return np.concatenate(out) / TWO_PI_32

    return _centered_integral(func, u.momentum, 2 * u.sigma, reach, u.m, support, rtol)


def evaluate(u: WavePacket, x, g=None, rtol: float = 1e-11):
    """Value of the packet (or of its regularization by cutoff ``g``) at ``x``.

    ``x`` is a single point ``(t, x1, x2, x3)`` or an array of points with a
    trailing axis of length 4; the result has a matching trailing axis of 4
    spinor components.
    """
    pts, single = _as_points(x)
    xi = pts - np.asarray(u.center)
    out = _evaluate_shifted(u, xi, g, rtol) if u.shifted else _evaluate_radial(u, xi, g, rtol)
    return out[0] if single else out


def evaluate_regularized(u: WavePacket, x, g, rtol: float = 1e-11):
    """Alias for :func:`evaluate` with a mandatory cutoff."""
    return evaluate(u, x, g, rtol)


def spherical_rule(upper: float, n_r: int, n_theta: int, n_phi: int, breakpoints=()):
    """Product cubature on the ball ``|k| <= upper`` (GL radial, GL in cos theta, trapezoid in phi)."""
    pts = sorted({0.0, upper, *[b for b in breakpoints if 0 < b < upper]})
    edges = np.concatenate([np.linspace(a, b, max(2, int(np.ceil(n_r * (b - a) / upper)) + 1))[:-1] for a, b in zip(pts[:-1], pts[1:])] + [[upper]])
    r, wr = panel_nodes(edges, 16)
    ct, wt = np.polynomial.legendre.leggauss(n_theta)
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    st = np.sqrt(1 - ct**2)
    dirs = np.stack(
        [np.outer(st, np.cos(phi)), np.outer(st, np.sin(phi)), np.repeat(ct[:, None], n_phi, axis=1)], axis=-1
    ).reshape(-1, 3)
    wd = np.repeat(wt, n_phi) * (2 * np.pi / n_phi)
    k = (r[:, None, None] * dirs[None]).reshape(-1, 3)
    w = (wr[:, None] * r[:, None] ** 2 * wd[None]).ravel()
    return k, w


def evaluate_cubature(u: WavePacket, x, g=None, n_r: int = 48, n_theta: int = 48, n_phi: int = 48):
    """Direct three-dimensional quadrature of the packet integral (no radial reduction)."""
    pts, single = _as_points(x)
    xi = pts - np.asarray(u.center)
    upper = u.radial_upper(g)
    bps = u.breakpoints(g)
    k, w = spherical_rule(upper, n_r, n_theta, n_phi, bps)
    om = np.sqrt(np.einsum("ij,ij->i", k, k) + u.m**2)
    phi = u.momentum_spinor(k, g) * w[:, None]
    # remove the centre phase already contained in lambda; it is restored by using x itself
    eta = u.sign * np.outer(pts[:, 0], om) - pts[:, 1:] @ k.T
    out = np.exp(-1j * eta) @ phi / TWO_PI_32
    return out[0] if single else out


# ---------------------------------------------------------------------------
# norms and inner products


def _radial_kind(u: WavePacket) -> str:
    return "K" if u.profile == "k3_gaussian" else "I"


def inner_product(u: WavePacket, v: WavePacket, g=None, rtol: float = 1e-12) -> complex:
    """Hilbert-space product ``(u|v) = int phi_u(k)^dagger phi_v(k) d^3k``.

    With ``g`` both momentum spinors are multiplied by the cutoff, giving the
    product of the regularized solutions.
    """
    if u.sign != v.sign or u.spin != v.spin or u.m != v.m:
        return 0.0j
    if u.shifted or v.shifted:
        return _inner_centered(u, v, g, rtol)
    m, s = u.m, u.sign
    dt = v.center[0] - u.center[0]
    dx = np.asarray(v.center[1:]) - np.asarray(u.center[1:])
    D = float(np.linalg.norm(dx))
    d3 = dx[2] / D if D > 0 else 0.0
    upper = min(u.radial_upper(g), v.radial_upper(g))
    bps = u.breakpoints(g) + v.breakpoints()
    kinds = _radial_kind(u) + _radial_kind(v)

    def integrand(k):
        w = np.sqrt(k * k + m * m)
        F = u.radial_envelope(k) * v.radial_envelope(k) * 2 * w / (w + m) * np.exp(1j * s * w * dt)
        if g is not None:
            F = F * g(k) ** 2
        kD = k * D
        if kinds == "II":
            val = k**2 * F * sph_j0(kD)
        elif kinds == "KK":
            val = k**4 * F * (j1_over_z(kD) - d3 * d3 * sph_j2(kD))
        else:
            val = -1j * d3 * k**3 * F * sph_j1(kD)
        return 4 * np.pi * val

    val = radial_integral(integrand, upper, breakpoints=bps, wavenumber=D + abs(dt), scale=min(u.momentum_scale, v.momentum_scale), rtol=rtol)
    return complex(np.conj(u.amplitude) * v.amplitude * val)


def _inner_centered(u: WavePacket, v: WavePacket, g=None, rtol: float = 1e-12) -> complex:
    # the product of the two envelopes peaks between p_u and p_v
    su2, sv2 = u.sigma**2, v.sigma**2
    pu, pv = np.asarray(u.momentum), np.asarray(v.momentum)
    center = (sv2 * pu + su2 * pv) / (su2 + sv2)
    width = 2 * np.sqrt(su2 * sv2 / (su2 + sv2))
    reach = float(np.linalg.norm(np.asarray(u.center) - np.asarray(v.center)))
    support = g.support if g is not None else np.inf

    def func(k, w):
        a, b = u.momentum_spinor(k, g), v.momentum_spinor(k, g)
        # the squared norms bound |(u|v)| and set the convergence scale when the product vanishes
        na, nb = np.sum(w * np.sum(np.abs(a) ** 2, axis=1)), np.sum(w * np.sum(np.abs(b) ** 2, axis=1))
        return np.array([np.sum(w * np.einsum("ij,ij->i", np.conj(a), b)), na, nb])

    return complex(_centered_integral(func, center, width, reach, u.m, support, rtol)[0])


def packet_l2_norm(u: WavePacket, g=None) -> float:
    """``||u|| = ||lambda chi||_{L2}`` (time independent)."""
    return float(np.sqrt(inner_product(u, u, g).real))


def profile_l2_norm(u: WavePacket) -> float:
    """``||lambda||_{L2(R^3)}`` of the scalar profile."""
    if u.shifted:
        k, w = gauss_hermite_rule(u.momentum, np.sqrt(2) * u.sigma, 40)
        gauss = np.exp(-np.einsum("ij,ij->i", k - u.momentum, k - u.momentum) / (2 * u.sigma**2))
        return float(np.sqrt(np.sum(w / gauss * np.abs(u.profile_values(k)) ** 2)))
    ang = 1 / 3 if u.profile == "k3_gaussian" else 1.0
    upper = u.radial_upper()

    def integrand(k):
        p = 2 if u.profile == "k3_gaussian" else 0
        return 4 * np.pi * ang * k ** (2 + p) * u.radial_envelope(k) ** 2

    val = radial_integral(integrand, upper, scale=u.momentum_scale, rtol=1e-13)
    return float(abs(u.amplitude) * np.sqrt(val))


def position_norm(u: WavePacket, t: float, g=None, n_r: int = 160, n_theta: int = 16) -> float:
    """``||u(t, .)||_{L2(R^3)}`` by quadrature of the evaluated packet in position space.

    Only unshifted packets are supported; they are symmetric about the
    ``x_3`` axis through the centre, so an ``(r, theta)`` product rule is used.
    """
    if u.shifted:
        raise InvalidArgument("position_norm supports packets centred at p = 0 only")
    tau = t - u.center[0]
    reach = abs(tau) + 20.0 / u.momentum_scale + 10.0 / u.m
    r, wr = panel_nodes(np.linspace(0, reach, n_r // 16 + 1), 16)
    ct, wt = np.polynomial.legendre.leggauss(n_theta)
    if u.profile != "k3_gaussian":
        ct, wt = np.array([1.0]), np.array([2.0])
    st = np.sqrt(1 - ct**2)
    rel = np.stack([np.outer(r, st), np.zeros((len(r), len(ct))), np.outer(r, ct)], axis=-1).reshape(-1, 3)
    pts = np.concatenate([np.full((len(rel), 1), t), rel + np.asarray(u.center[1:])], axis=1)
    vals = evaluate(u, pts, g)
    dens = np.sum(np.abs(vals) ** 2, axis=-1).reshape(len(r), len(ct))
    return float(np.sqrt(2 * np.pi * np.sum(wr[:, None] * r[:, None] ** 2 * wt[None] * dens)))


def translate(u: WavePacket, a) -> WavePacket:
    """Packet ``x -> u(x + a)``: the phase centre moves by ``-a``."""
    a = np.asarray(_vec(a, 4, "translation"))
    return replace(u, center=tuple(np.asarray(u.center) - a))


# ---------------------------------------------------------------------------
# derivative bounds


@dataclass(frozen=True)
class JacobianSup:
    """Estimate of ``sup_{z in B(x, eps)} sum_mu |grad Re u_mu| + |grad Im u_mu|``.

    ``sampled`` is the maximum over sample points (a lower estimate of the
    supremum); ``bound`` is the analytic majorant obtained from
    ``|d_nu u| <= sqrt(2) (2 pi)^{-3/2} ||k_nu lambda||_{L1}``.
    """

    sampled: float
    bound: float
    argmax: tuple


# Accuracy of the gradients behind sampled sup-norm estimates.
SAMPLE_RTOL = 1e-6


def ball_samples(x, radius: float, n_random: int = 16, seed: int = 0):
    """Centre, the 8 axis points and ``n_random`` seeded interior points of ``B(x, radius)``."""
    x = np.asarray(x, dtype=float)
    rng = np.random.default_rng(seed)
    axis = np.concatenate([np.eye(4), -np.eye(4)]) * radius * (1 - 1e-9)
    d = rng.normal(size=(n_random, 4))
    d /= np.linalg.norm(d, axis=1, keepdims=True)
    d *= radius * rng.uniform(size=(n_random, 1)) ** 0.25
    return x + np.concatenate([np.zeros((1, 4)), axis, d])


def gradients(u: WavePacket, points, g=None, step: float | None = None, rtol: float = 1e-10):
    """Gradients ``d_nu u_c`` with shape ``(P, 4 nu, 4 c)``.

    Packets centred at ``p != 0`` are differentiated under the integral sign;
    the others use central differences with all shifted points evaluated in
    one call.
    """
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if u.shifted and step is None:
        return _evaluate_shifted(u, points - np.asarray(u.center), g, rtol, derivative=True)
    h = step if step is not None else 1e-4 / max(u.momentum_scale, u.m)
    shifts = np.concatenate([np.eye(4), -np.eye(4)]) * h
    allp = (points[:, None, :] + shifts[None]).reshape(-1, 4)
    vals = evaluate(u, allp, g).reshape(len(points), 8, 4)
    return (vals[:, :4] - vals[:, 4:]) / (2 * h)


def jacobian_norm(grad):
    """Summed real/imaginary gradient norms from gradients of shape ``(..., 4, 4)``."""
    return np.sum(np.linalg.norm(grad.real, axis=-2) + np.linalg.norm(grad.imag, axis=-2), axis=-1)


def derivative_l1_bound(u: WavePacket, g=None) -> float:
    """Majorant of the Jacobian norm from the ``L1`` norms of ``k_nu lambda``.

    Uses ``J <= 4 sum_nu |d_nu u| <= 4 sqrt(2) (2 pi)^{-3/2} sum_nu ||k_nu lambda||_{L1}``.
    """
    k, w = _l1_rule(u, g)
    lam = np.abs(u.profile_values(k)) * w
    if g is not None:
        lam = lam * g(np.linalg.norm(k, axis=1))
    om = np.sqrt(np.einsum("ij,ij->i", k, k) + u.m**2)
    l1 = np.sum(lam * om) + np.sum(lam[:, None] * np.abs(k))
    return float(4 * np.sqrt(2) / TWO_PI_32 * l1)


def _l1_rule(u, g):
    if u.shifted:
        width = 2 * u.sigma
        support = g.support if g is not None else np.inf
        return centered_rule(u.momentum, width * _gauss_reach(1e-12), min(width / 2, u.m), 24, 48, support)
    return spherical_rule(u.radial_upper(g, power=5), 64, 64, 32, u.breakpoints(g))


def jacobian_sup(u: WavePacket, x, epsilon: float, g=None, n_random: int = 16, seed: int = 0) -> JacobianSup:
    """Sampled and analytic estimates of the local Jacobian norm of ``u`` on ``B(x, epsilon)``."""
    pts = ball_samples(x, epsilon, n_random, seed)
    J = jacobian_norm(gradients(u, pts, g, rtol=SAMPLE_RTOL))
    i = int(np.argmax(J))
    return JacobianSup(float(J[i]), derivative_l1_bound(u, g), tuple(pts[i]))


# ---------------------------------------------------------------------------
# decay


def decay_probe(u: WavePacket, direction, radii, g=None):
    """``|u(center + rho * direction)|`` for each ``rho`` in ``radii``.

    Returns a dict with the radii, the values, and, for timelike or lightlike
    directions, the smallest constant ``C`` for which
    ``|u| <= C (1 + (t^2 - |x|^2)_+)^{1/4} / (|t| + |x|)^2`` holds at the samples.
    """
    direction = np.asarray(_vec(direction, 4, "direction"))
    radii = np.asarray(radii, dtype=float)
    pts = np.asarray(u.center) + radii[:, None] * direction
    vals = np.linalg.norm(evaluate(u, pts, g), axis=-1)
    rel = pts - np.asarray(u.center)
    t, xn = np.abs(rel[:, 0]), np.linalg.norm(rel[:, 1:], axis=1)
    shape = (1 + np.maximum(t**2 - xn**2, 0)) ** 0.25 / np.maximum(t + xn, 1e-300) ** 2
    mask = radii > 0
    fitted = float(np.max(vals[mask] / shape[mask])) if np.any(mask) else float("nan")
    return {"radii": radii, "values": vals, "bound_shape": shape, "fitted_constant": fitted}


# ---------------------------------------------------------------------------
# families


@dataclass(frozen=True)
class SolutionFamily:
    """Finite family of solutions ``w_i = sum_j C_ij u_j`` of packets ``u_j``."""

    packets: tuple
    coefficients: np.ndarray = field(repr=False)

    @classmethod
    def from_packets(cls, packets):
        packets = tuple(packets)
        return cls(packets, np.eye(len(packets), dtype=complex))

    def __post_init__(self):
        c = np.asarray(self.coefficients, dtype=complex)
        if c.ndim != 2 or c.shape[1] != len(self.packets):
            raise InvalidArgument("coefficient matrix must have one column per packet")
        object.__setattr__(self, "coefficients", c)

    def __len__(self):
        return self.coefficients.shape[0]

    def packet_gram(self, g=None):
        """Gram matrix ``G_jl = (u_j|u_l)`` of the underlying packets."""
        n = len(self.packets)
        G = np.zeros((n, n), dtype=complex)
        for j in range(n):
            for l in range(j, n):
                G[j, l] = inner_product(self.packets[j], self.packets[l], g)
                G[l, j] = np.conj(G[j, l])
        return G

    def gram(self, g=None, packet_gram=None):
        """Gram matrix ``(w_i|w_j)`` of the family members."""
        G = self.packet_gram(g) if packet_gram is None else packet_gram
        C = self.coefficients
        return np.conj(C) @ G @ C.T

    def values(self, x, g=None):
        """Member values with shape ``(n, 4)`` at one point or ``(P, n, 4)`` at ``P`` points."""
        pts, single = _as_points(x)
        pv = np.stack([evaluate(u, pts, g) for u in self.packets], axis=1)  # (P, p, 4)
        out = np.einsum("ij,pjc->pic", self.coefficients, pv)
        return out[0] if single else out

    def translated(self, a):
        return SolutionFamily(tuple(translate(u, a) for u in self.packets), self.coefficients)

    def combine(self, coefficients):
        """Family whose members are ``coefficients @ members``."""
        return SolutionFamily(self.packets, np.asarray(coefficients) @ self.coefficients)

    def extend(self, other: "SolutionFamily"):
        """Members of ``self`` followed by members of ``other`` over the joint packet list."""
        C = np.zeros((len(self) + len(other), len(self.packets) + len(other.packets)), dtype=complex)
        C[: len(self), : len(self.packets)] = self.coefficients
        C[len(self) :, len(self.packets) :] = other.coefficients
        return SolutionFamily(self.packets + other.packets, C)


def orthonormalize_family(family: SolutionFamily, g=None, max_condition: float = 1e12) -> SolutionFamily:
    """Gram-Schmidt in momentum space via the Cholesky factor of the Gram matrix.

    Raises
    ------
    DegenerateFamily
        If the Gram matrix has condition number above ``max_condition``.
    """
    G = family.gram(g)
    ev = np.linalg.eigvalsh(G)
    if ev[0] <= 0 or ev[-1] / ev[0] > max_condition:
        raise DegenerateFamily("family is numerically linearly dependent", {"gram_eigenvalues": ev.tolist()})
    L = np.linalg.cholesky(G.conj())  # G^* = L L^dagger
    T = np.linalg.solve(L, np.eye(len(G)))
    return family.combine(T)
