"""Holes and particles in the Dirac sea.

Removing a finite-dimensional subspace ``U`` of negative-energy solutions
(holes) is handled through an approximating set ``psi`` of smooth packets
close to an orthonormal basis ``u`` of ``U``: every solution ``phi`` is
replaced by ``Psi[phi] = phi - sum_i lambda_i psi_i`` with the coefficients
fixed by ``(u_j | Psi[phi]) = 0``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import correlation, kernels
from .errors import DegenerateFamily, InvalidArgument, NonApproximatingSet
from .packets import SAMPLE_RTOL, SolutionFamily, WavePacket, ball_samples, gradients, jacobian_norm, special_moments
from .regularization import CutoffProfile


# ---------------------------------------------------------------------------
# orthogonalization


def gram_matrix(vectors, inner=None) -> np.ndarray:
    """``G[j, k] = (v_j | v_k)``; ``inner`` defaults to the Euclidean product antilinear in the first slot."""
    if inner is None:
        V = np.asarray(vectors, dtype=complex)
        return np.conj(V) @ V.T
    n = len(vectors)
    return np.array([[inner(vectors[j], vectors[k]) for k in range(n)] for j in range(n)], dtype=complex)


def gram_determinant_coefficients(G) -> np.ndarray:
    """Lower-triangular ``C`` with ``phi_i^perp = sum_k C[i, k] phi_k`` from cofactors of ``G``.

    ``C[i, k] = (-1)^{i+k} det G_{i,k^} / det G_{i,i^}`` where ``G_i`` holds
    the rows ``(phi_j | phi_1..phi_i)`` for ``j < i`` and ``G_{i,k^}`` drops
    column ``k``; ``det G_{1,1^} = 1``.  The diagonal of ``C`` is one, so the
    output equals classical Gram-Schmidt without normalization.
    """
    G = np.asarray(G, dtype=complex)
    n = len(G)
    C = np.zeros((n, n), dtype=complex)
    C[0, 0] = 1.0
    for i in range(1, n):
        Gi = G[:i, : i + 1]
        minors = np.array([np.linalg.det(np.delete(Gi, k, axis=1)) for k in range(i + 1)])
        if abs(minors[i]) < 1e-300:
            raise DegenerateFamily("singular Gram minor in determinant orthogonalization", {"index": i})
        signs = (-1.0) ** (i + np.arange(i + 1))
        C[i, : i + 1] = signs * minors / minors[i]
    return C


def gram_determinant_minors(G):
    """``(det G_{i,i^}, max_{k != i} |det G_{i,k^}|)`` for ``i = 1..n``."""
    G = np.asarray(G, dtype=complex)
    diag, off = [1.0], [0.0]
    for i in range(1, len(G)):
        Gi = G[:i, : i + 1]
        minors = [np.linalg.det(np.delete(Gi, k, axis=1)) for k in range(i + 1)]
        diag.append(abs(minors[i]))
        off.append(max(abs(v) for v in minors[:i]))
    return np.array(diag), np.array(off)


def gram_determinant_orthogonalize(vectors, inner=None):
    """Orthogonalize ``vectors`` with the non-recursive cofactor formula.

    ``vectors`` is either an array of shape ``(n, N)`` (Euclidean product) or
    a :class:`SolutionFamily` (Hilbert-space product of solutions).
    """
    if isinstance(vectors, SolutionFamily):
        C = gram_determinant_coefficients(vectors.gram())
        return vectors.combine(C)
    V = np.asarray(vectors, dtype=complex)
    return gram_determinant_coefficients(gram_matrix(V, inner)) @ V


def recursive_gram_schmidt(vectors) -> np.ndarray:
    """Classical Gram-Schmidt with unit leading coefficient (no normalization)."""
    V = np.asarray(vectors, dtype=complex)
    out = []
    for v in V:
        w = v.copy()
        for q in out:
            w = w - (np.vdot(q, v) / np.vdot(q, q)) * q
        out.append(w)
    return np.array(out)


def independence_margin(e, v) -> dict:
    """Check that ``max ||e_i - v_i|| < 1/n`` for orthonormal ``e`` leaves ``v`` linearly independent."""
    e = np.asarray(e, dtype=complex)
    v = np.asarray(v, dtype=complex)
    n = len(e)
    dev = float(np.max(np.linalg.norm(e - v, axis=1)))
    s = np.linalg.svd(v, compute_uv=False)
    return {"max_deviation": dev, "threshold": 1.0 / n, "smallest_singular_value": float(s[-1])}


# ---------------------------------------------------------------------------
# approximating sets and projection


@dataclass(frozen=True)
class ApproximatingSet:
    """Orthonormal smooth family ``psi`` approximating an orthonormal hole basis ``target``."""

    psi: SolutionFamily
    target: SolutionFamily
    epsilon_tol: float = 0.1

    def overlap(self) -> np.ndarray:
        """``M[j, i] = (u_j | psi_i)``."""
        joint = self.target.extend(self.psi)
        G = joint.gram()
        n = len(self.target)
        return G[:n, n:]

    def closeness(self) -> dict:
        M = self.overlap()
        n = len(M)
        joint = self.target.extend(self.psi)
        G = joint.gram()
        d2 = np.diag(G[:n, :n]).real + np.diag(G[n:, n:]).real - 2 * np.diag(G[:n, n:]).real
        return {
            "max_distance": float(np.sqrt(np.max(np.maximum(d2, 0)))),
            "max_overlap_error": float(np.max(np.abs(M - np.eye(n)))),
            "inverse_norm": float(np.linalg.norm(np.linalg.inv(M), 2)),
        }


def approximating_set(target: SolutionFamily, perturbation: SolutionFamily, scale: float) -> ApproximatingSet:
    """``psi = orthonormalize(u + scale * perturbation)`` via the cofactor formula."""
    if len(target) != len(perturbation):
        raise InvalidArgument("perturbation must have one member per target")
    raw = target.extend(perturbation)
    n = len(target)
    C = np.concatenate([np.eye(n), scale * np.eye(n)], axis=1)
    phi = raw.combine(C)
    orth = gram_determinant_orthogonalize(phi)
    norms = np.sqrt(np.diag(orth.gram()).real)
    psi = orth.combine(np.diag(1 / norms))
    return ApproximatingSet(psi, target, float(scale))


@dataclass(frozen=True)
class Projection:
    """``Psi[phi] = phi - sum lambda_i psi_i`` and its certificates."""

    coefficients: np.ndarray
    residual_overlaps: np.ndarray
    inverse_norm: float
    phi_norms: np.ndarray
    family: SolutionFamily

    @property
    def lambda_bound_applies(self) -> bool:
        return self.inverse_norm < 2

    def lambda_bound(self) -> dict:
        """``|lambda(phi)|`` against ``2 ||phi||`` for each member; only asserted when ``||M^-1||_2 < 2``."""
        return {
            "lhs": np.linalg.norm(self.coefficients, axis=1),
            "rhs": 2 * self.phi_norms,
            "applies": self.lambda_bound_applies,
        }


def project_out(phi: SolutionFamily, aset: ApproximatingSet, cond_max: float = 1e12) -> Projection:
    """Remove the hole subspace from each member of ``phi``.

    Solves ``M lambda = D`` with ``M[j, i] = (u_j | psi_i)`` and
    ``D[j] = (u_j | phi)``; one row of ``coefficients`` per member of ``phi``.
    """
    n = len(aset.target)
    joint = aset.target.extend(aset.psi).extend(phi)
    G = joint.gram()
    M = G[:n, n : 2 * n]
    D = G[:n, 2 * n :]
    if np.linalg.cond(M) > cond_max:
        raise NonApproximatingSet("overlap matrix between holes and approximants is singular")
    lam = np.linalg.solve(M, D).T  # (n_phi, n)
    # Psi = phi - lam @ psi, expressed over the joint packet list
    k = len(phi)
    C = np.zeros((k, 2 * n + k), dtype=complex)
    C[:, n : 2 * n] = -lam
    C[:, 2 * n :] = np.eye(k)
    Psi = joint.combine(C)
    res = np.conj(np.eye(n, 2 * n + k)) @ G @ C.T  # (u_j | Psi_l)
    phin = np.sqrt(np.diag(G[2 * n :, 2 * n :]).real)
    return Projection(lam, res, float(np.linalg.norm(np.linalg.inv(M), 2)), phin, Psi)


# ---------------------------------------------------------------------------
# microscopic behaviour


@dataclass(frozen=True)
class MicroBehaviour:
    """``E = |psi(x)| + eps * sum_i ||J psi_i||``."""

    density: float
    gradient: float

    @property
    def value(self) -> float:
        return self.density + self.gradient

    def macroscopic(self, m: float = 1.0) -> bool:
        return self.value < 1e9 * m**1.5


def micro_behaviour(family: SolutionFamily, x, epsilon: float, g=None) -> MicroBehaviour:
    """Microscopic behaviour of the (raw) members of ``family`` at ``x``.

    ``|psi(x)|`` is the norm in ``C^{4n}`` of all member values; the gradient
    term uses the sampled Jacobian norm of each member on ``B(x, epsilon)``.
    """
    V = family.values(x, g)
    density = float(np.linalg.norm(V))
    grad = 0.0
    for row in family.coefficients:
        grad += _member_jacobian(family, row, x, epsilon, g)
    return MicroBehaviour(density, epsilon * grad)


def _member_jacobian(family, row, x, epsilon, g):
    pts = ball_samples(x, epsilon)
    grads = sum(c * gradients(u, pts, g, rtol=SAMPLE_RTOL) for c, u in zip(row, family.packets) if c != 0)
    return float(np.max(jacobian_norm(np.asarray(grads))))


# ---------------------------------------------------------------------------
# regularity with holes


def special_solution_bounds(sigma: float, m: float = 1.0) -> dict:
    """Closed-form data of the special solutions at width ``sigma``.

    Point values (``beta = 1`` and ``gamma B = 1`` with the normalizations
    ``A = (2 sqrt(pi) sigma)^-3``, ``B = 2^-4 pi^{-3/2} sigma^-5``), profile
    ``L2`` norms and the derivative majorants.
    """
    A = (2 * np.sqrt(np.pi) * sigma) ** -3
    B = 2.0**-4 * np.pi**-1.5 * sigma**-5
    beta_over_a, gam = special_moments(sigma)
    la = A * (np.sqrt(2 * np.pi) * sigma) ** 1.5
    lb_lo = m * B * (2 * np.pi) ** 0.75 * sigma**2.5
    lb_hi = 2 * (2 * np.pi) ** 0.75 * B * np.sqrt(15 * sigma**7 + 3 * m**2 * sigma**5)
    da = np.sqrt(2) * np.pi * A * (32 * sigma**4 + 8 * m * np.sqrt(np.pi) * sigma**3)
    db = 2**6 * np.sqrt(2) * np.pi * B * (4 * sigma**6 + 2 * m**2 * sigma**4 + 3 * m * np.sqrt(np.pi) * sigma**5)
    return {
        "A": A,
        "B": B,
        "beta": A * beta_over_a,
        "gamma_B": B * gam,
        "profile_l2_a": la,
        "profile_l2_b_bounds": (lb_lo, lb_hi),
        "derivative_bound_a": da,
        "derivative_bound_b": db,
    }


def analytic_hole_bounds(epsilon: float, micro: float, sigma_over_m: float, m: float = 1.0) -> dict:
    """Right-hand sides of the estimate chain for ``A^(a)`` and ``A^(b)`` at ``sigma = lambda m``.

    Regularity survives the holes whenever both values are below ``1/4``.
    """
    lam = sigma_over_m
    me = m * epsilon
    a = 2**7 * (1 + lam) * me + (2 * np.pi) ** 0.75 / (lam**1.5 * m**1.5) * micro
    b = 2**11 * (lam + 1 / lam + 1) * me + 4 * (2 * np.pi) ** 0.75 / m**1.5 * (lam**-1.5 + lam**-2.5) * micro
    return {"A_a": float(a), "A_b": float(b), "threshold": 0.25, "holds": bool(a < 0.25 and b < 0.25)}


def hole_regularity_experiment(
    probes: SolutionFamily, aset: ApproximatingSet | None, x0, g: CutoffProfile, epsilon: float, m: float = 1.0
) -> dict:
    """Rank of ``{R Psi[u_alpha](x0)}`` for the probe solutions ``u_alpha``.

    Returns the numerical verdict (rank, signature of the correlation matrix
    on the projected probes) and, separately, the analytic estimate chain.
    """
    if aset is None:
        vals = probes.values(x0, g)
        micro = MicroBehaviour(0.0, 0.0)
        lam = np.zeros((len(probes), 0))
    else:
        proj = project_out(probes, aset)
        vals = proj.family.values(x0, g)
        micro = micro_behaviour(aset.psi, x0, epsilon)
        lam = proj.coefficients
    s = np.linalg.svd(vals, compute_uv=False)
    rank = int(np.sum(s > correlation.RANK_TOL * s[0])) if s[0] > 0 else 0
    report = correlation.spin_space_report(correlation.correlation_from_values(vals))
    sigma = probes.packets[0].sigma
    return {
        "rank": rank,
        "regular": rank == 4,
        "singular_values": s.tolist(),
        "correlation": report.as_dict(),
        "lambda": lam,
        "micro": micro,
        "analytic": analytic_hole_bounds(epsilon, micro.value, sigma / m, m),
    }


def hole_at_point_family(sea: correlation.LatticeSea, x0, modes=None):
    """Sea modes after removing the four eigenvectors ``e_{x0, mu}``.

    Returns the ``4 x n`` regularized values at ``x0`` of the vacuum and of the
    orthogonal complement of ``span{e_{x0,mu}}`` (expressed by projecting the
    mode basis), together with ``||F_0(x0)||_2``.
    """
    modes = sea.modes() if modes is None else modes
    V = sea.values(x0, modes)
    C = V.conj().T @ np.diag([1, 1, -1, -1])  # columns span range F(x0)
    Q, _ = np.linalg.qr(C)
    # F_0 = Pi_0 F Pi_0; its nonzero spectrum is that of -gamma0 W W^dagger with W = V Pi_0
    W = V - (V @ Q) @ Q.conj().T
    ev = correlation.compressed_spectrum(W)
    return {"vacuum_spectrum": correlation.compressed_spectrum(V), "hole_spectrum": ev, "norm": float(np.max(np.abs(ev)))}


def hole_at_point(family: SolutionFamily, x0, g=None) -> dict:
    """Project ``family`` onto the orthogonal complement of ``range F(x0)`` and report ``||F_0(x0)||_2``."""
    M = correlation.correlation_matrix(family, x0, g)
    rep = correlation.spin_space_report(M)
    R = rep.range_basis
    Pi0 = np.eye(len(M)) - R @ R.conj().T
    F0 = Pi0 @ M @ Pi0
    return {"rank_before": rep.rank, "norm_before": float(np.linalg.norm(M, 2)), "norm_after": float(np.linalg.norm(F0, 2))}


# ---------------------------------------------------------------------------
# eigenvalue perturbation with particles and antiparticles


def eigenvalue_perturbation_experiment(states: SolutionFamily, x, g: CutoffProfile, epsilon: float, m: float = 1.0, norms=None):
    """Lifted spectrum ``2 pi (P_{-,eps^2}(x,x) + Delta P)`` against ``{2 pi lambda_+-}``.

    ``states`` holds particle (positive energy) and antiparticle (negative
    energy) packets; each member must be a single packet so that its energy
    sign is defined.
    """
    signs = []
    for row in states.coefficients:
        used = {states.packets[j].sign for j in np.nonzero(row)[0]}
        if len(used) != 1:
            raise InvalidArgument("each state must have a definite energy sign")
        signs.append(used.pop())
    V = states.values(x, g) if len(states) else np.zeros((0, 4))
    pd = kernels.perturbed_diagonal(g, V, signs, m, norms)
    micro = micro_behaviour(states, x, epsilon) if len(states) else MicroBehaviour(0.0, 0.0)
    lifted_dist = 2 * np.pi * pd.distances
    reg_sq = float(np.sum(np.abs(V) ** 2))
    return {
        "eigenvalues": pd.eigenvalues,
        "lambdas": pd.lambdas,
        "distances": pd.distances,
        "bauer_fike": {"lhs": float(np.max(pd.distances, initial=0.0)), "rhs": pd.bauer_fike_bound},
        "lifted": {"lhs": float(np.max(lifted_dist, initial=0.0)), "rhs": 2 * micro.value**2},
        "chain": {"two_pi_delta_norm": 2 * np.pi * pd.bauer_fike_bound, "sum_regularized_sq": reg_sq},
        "micro": micro,
    }


def random_states(rng: np.random.Generator, count: int, m: float = 1.0) -> SolutionFamily:
    """``count`` single-packet particle/antiparticle states with random shapes, positions and amplitudes."""
    packets = []
    for _ in range(count):
        sign = int(rng.choice([-1, 1]))
        spin = str(rng.choice(["up", "down"]))
        sigma = float(rng.uniform(0.3, 1.5)) * m
        center = (0.0, *rng.uniform(-1, 1, 3) / m)
        momentum = tuple(rng.normal(scale=0.5 * m, size=3))
        amp = float(rng.uniform(0.1, 1.0)) * np.exp(2j * np.pi * rng.uniform())
        packets.append(WavePacket(sign, spin, "gaussian", sigma, center, momentum, amp, m))
    return SolutionFamily.from_packets(packets)
