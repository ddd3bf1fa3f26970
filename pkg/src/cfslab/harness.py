"""Experiment harness: JSON configs in, deterministic JSON/CSV reports out."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__, correlation, holes, kernels, packets, regularization
from .errors import InvalidArgument

EXPERIMENTS = (
    "kernel-diag",
    "kernel-grid",
    "correlation",
    "regularity",
    "holes",
    "perturbation",
    "injectivity",
    "decay",
    "representation-sum",
)

REPORT_SCHEMA = {
    "type": "object",
    "required": ["experiment", "version", "seed", "config_digest", "parameters", "results", "assertions", "passed"],
    "properties": {
        "experiment": {"enum": list(EXPERIMENTS)},
        "version": {"type": "string"},
        "seed": {"type": "integer"},
        "config_digest": {"type": "string", "pattern": "^[0-9a-f]{64}$"},
        "parameters": {"type": "object"},
        "results": {"type": "object"},
        "assertions": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "lhs", "relation", "rhs", "passed", "anchor"],
                "properties": {
                    "name": {"type": "string"},
                    "relation": {"enum": ["<", "<=", "==", ">"]},
                    "passed": {"type": "boolean"},
                    "anchor": {"type": "string"},
                },
            },
        },
        "passed": {"type": "boolean"},
    },
}

_COMMON_KEYS = {"m", "cutoff", "rtol"}
_KEYS = {
    "kernel-diag": {"expected_eigenvalues", "eigenvalue_tol"},
    "kernel-grid": {"sign", "power", "xi"},
    "correlation": {"family", "points", "orthonormalize", "expect"},
    "regularity": {"epsilons", "sigma", "x0"},
    "holes": {"x0", "epsilon", "target", "perturbation", "scale", "phi", "probes"},
    "perturbation": {"x", "states", "random_sets", "states_per_set"},
    "injectivity": {"family", "points", "threshold", "expect_separated"},
    "decay": {"packet", "direction", "radii"},
    "representation-sum": {"sizes", "xi", "sign", "tolerance"},
}


# ---------------------------------------------------------------------------
# reports


@dataclass
class ExperimentReport:
    """Results plus checked inequalities of one experiment run."""

    experiment: str
    seed: int
    config_digest: str
    parameters: dict
    results: dict = field(default_factory=dict)
    assertions: list = field(default_factory=list)
    tables: dict = field(default_factory=dict)

    def check(self, name: str, lhs, relation: str, rhs, anchor: str) -> bool:
        ops = {"<": np.less, "<=": np.less_equal, "==": np.equal, ">": np.greater}
        ok = bool(np.all(ops[relation](lhs, rhs)))
        self.assertions.append(
            {"name": name, "lhs": lhs, "relation": relation, "rhs": rhs, "passed": ok, "anchor": anchor}
        )
        return ok

    @property
    def passed(self) -> bool:
        return all(a["passed"] for a in self.assertions)

    def as_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "version": __version__,
            "seed": self.seed,
            "config_digest": self.config_digest,
            "parameters": self.parameters,
            "results": self.results,
            "assertions": self.assertions,
            "passed": self.passed,
        }


def _format_float(x: float, digits: int) -> str:
    if not math.isfinite(x):
        return "null"
    return format(x + 0.0, f".{digits}g")


def _plain(obj):
    """Recursively convert numpy types and complex numbers to JSON-ready Python values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj, indent: int = 2, digits: int = 17) -> str:
    """JSON text with floats at ``digits`` significant digits, non-finite floats as ``null``."""

    def enc(v, level):
        pad = " " * (indent * (level + 1))
        end = " " * (indent * level)
        if isinstance(v, dict):
            if not v:
                return "{}"
            items = [f"{pad}{json.dumps(k)}: {enc(x, level + 1)}" for k, x in v.items()]
            return "{\n" + ",\n".join(items) + "\n" + end + "}"
        if isinstance(v, list):
            if not v:
                return "[]"
            if all(not isinstance(x, (dict, list)) for x in v):
                return "[" + ", ".join(enc(x, level + 1) for x in v) + "]"
            return "[\n" + ",\n".join(pad + enc(x, level + 1) for x in v) + "\n" + end + "]"
        if isinstance(v, bool) or v is None:
            return json.dumps(v)
        if isinstance(v, float):
            return _format_float(v, digits)
        return json.dumps(v)

    return enc(_plain(obj), 0) + "\n"


def csv_text(header, rows, digits: int = 12) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_format_float(float(v), digits) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def emit(report: ExperimentReport, out_dir=None, fmt: str = "json") -> dict:
    """Serialize ``report``; returns ``{filename: text}`` and writes the files when ``out_dir`` is given."""
    if fmt not in ("json", "csv"):
        raise InvalidArgument(f"unknown output format {fmt!r}")
    files = {"report.json": dumps(report.as_dict())}
    if fmt == "csv" or report.tables:
        for name, (header, rows) in report.tables.items():
            files[f"{name}.csv"] = csv_text(header, rows)
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        for name, text in files.items():
            with open(os.path.join(out_dir, name), "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
    return files


# ---------------------------------------------------------------------------
# config parsing


def _positive(value, name):
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise InvalidArgument(f"{name} must be a number") from None
    if not math.isfinite(v) or v <= 0:
        raise InvalidArgument(f"{name} must be positive and finite")
    return v


def _vector(value, n, name):
    try:
        v = np.asarray(value, dtype=float)
    except (TypeError, ValueError):
        raise InvalidArgument(f"{name} must be a list of {n} numbers") from None
    if v.shape != (n,) or not np.all(np.isfinite(v)):
        raise InvalidArgument(f"{name} must be a list of {n} finite numbers")
    return v


def _grid(value, name):
    if not isinstance(value, list) or not value:
        raise InvalidArgument(f"{name} must be a nonempty list of four-vectors")
    return np.array([_vector(p, 4, f"{name}[{i}]") for i, p in enumerate(value)])


def parse_cutoff(spec, m: float) -> regularization.CutoffProfile:
    """Cutoff from ``{"kind": ..., "epsilon": ..., "params": {...}}``."""
    if not isinstance(spec, dict) or "kind" not in spec or "epsilon" not in spec:
        raise InvalidArgument("cutoff must be an object with 'kind' and 'epsilon'")
    eps = _positive(spec["epsilon"], "cutoff.epsilon")
    params = spec.get("params", {}) or {}
    if not isinstance(params, dict):
        raise InvalidArgument("cutoff.params must be an object")
    kind = spec["kind"]
    if kind == "sharp":
        return regularization.sharp_cutoff(eps)
    if kind == "gaussian":
        width = _positive(params.get("width", 1.0), "cutoff.params.width")
        return regularization.gaussian_cutoff(eps, width, _positive(params.get("amplitude", 1.0), "cutoff.params.amplitude"))
    if kind == "mollifier":
        return regularization.mollifier_cutoff(eps, m)
    if kind == "custom_radial":
        return regularization.custom_cutoff(eps, params.get("k"), params.get("g"))
    raise InvalidArgument(f"unknown cutoff kind {kind!r}")


def _amplitude(value):
    if isinstance(value, dict):
        return complex(float(value.get("re", 0.0)), float(value.get("im", 0.0)))
    if isinstance(value, list) and len(value) == 2:
        return complex(float(value[0]), float(value[1]))
    return complex(float(value))


def parse_packet(spec, m: float) -> packets.WavePacket:
    if not isinstance(spec, dict):
        raise InvalidArgument("packet must be an object")
    allowed = {"sign", "spin", "profile", "sigma", "center", "momentum", "amplitude", "table"}
    extra = set(spec) - allowed
    if extra:
        raise InvalidArgument(f"unknown packet keys {sorted(extra)}")
    table = spec.get("table")
    return packets.WavePacket(
        sign=spec.get("sign", -1),
        spin=spec.get("spin", "up"),
        profile=spec.get("profile", "gaussian"),
        sigma=_positive(spec.get("sigma", 1.0), "sigma"),
        center=tuple(_vector(spec.get("center", [0, 0, 0, 0]), 4, "center")),
        momentum=tuple(_vector(spec.get("momentum", [0, 0, 0]), 3, "momentum")),
        amplitude=_amplitude(spec.get("amplitude", 1.0)),
        m=m,
        table=tuple(tuple(t) for t in table) if table is not None else None,
    )


def parse_family(spec, m: float) -> packets.SolutionFamily:
    """Family from a list of packet objects or ``{"special": {"sigma": s, "x0": [...]}}``."""
    if isinstance(spec, dict) and set(spec) == {"special"}:
        sp = spec["special"] or {}
        sigma = _positive(sp.get("sigma", m), "special.sigma")
        x0 = _vector(sp.get("x0", [0, 0, 0, 0]), 4, "special.x0")
        return packets.SolutionFamily.from_packets(packets.special_family(sigma, tuple(x0), m))
    if not isinstance(spec, list) or not spec:
        raise InvalidArgument("family must be a nonempty list of packets or a 'special' object")
    return packets.SolutionFamily.from_packets([parse_packet(p, m) for p in spec])


def config_digest(config: dict, seed: int) -> str:
    text = json.dumps({"config": config, "seed": seed}, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def thread_count() -> int:
    """Worker threads for per-point loops, capped by ``CFSLAB_THREADS`` (default 1)."""
    raw = os.environ.get("CFSLAB_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise InvalidArgument(f"CFSLAB_THREADS must be an integer, got {raw!r}") from None
    return max(1, n)


def _map(fn, items):
    items = list(items)
    n = thread_count()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------------------
# experiments


def _kernel_diag(cfg, rep, m, g, rng):
    rtol = cfg.get("rtol", 1e-12)
    norms = regularization.cutoff_l1_norms(g, m)
    K = kernels.kernel([0, 0, 0, 0], g, -1, "double", m, rtol=rtol).value
    closed = kernels.diagonal_closed_form(g, -1, m, norms)
    lp, lm = kernels.diagonal_spectrum(g, m, norms)
    ev = np.linalg.eigvalsh((K + K.conj().T) / 2)
    rel = float(np.linalg.norm(K - closed, 2) / np.linalg.norm(closed, 2))
    rep.results.update(
        {
            "norm_g2": norms[0],
            "norm_g2_over_omega": norms[1],
            "lambda_plus": lp,
            "lambda_minus": lm,
            "eigenvalues": ev,
            "diagonal": np.diag(K).real,
            "relative_error": rel,
        }
    )
    rep.check("diagonal matches closed form", rel, "<=", 1e-6, "diagonal-kernel-closed-form")
    rep.check("lambda_minus negative", lm, "<", 0.0, "diagonal-kernel-spectrum")
    if g.kind == "sharp":
        exact = regularization.sharp_norms_closed_form(g.epsilon, m)
        err = max(abs(a - b) / abs(b) for a, b in zip(norms, exact))
        rep.results["closed_form_norms"] = list(exact)
        rep.check("sharp norms match closed form", err, "<=", 1e-8, "sharp-cutoff-norms")
    if "expected_eigenvalues" in cfg:
        exp = np.asarray(cfg["expected_eigenvalues"], dtype=float)
        tol = float(cfg.get("eigenvalue_tol", 1e-4))
        dev = float(np.max(np.abs(np.array([lp, lm]) - exp)))
        rep.check("eigenvalues match expectation", dev, "<=", tol, "diagonal-kernel-spectrum")


def _kernel_grid(cfg, rep, m, g, rng):
    xi = _grid(cfg.get("xi"), "xi")
    sign = cfg.get("sign", -1)
    power = cfg.get("power", "double")
    rtol = cfg.get("rtol", 1e-12)
    mats = _map(lambda p: kernels.kernel(p, g, sign, power, m, rtol=rtol).value, xi)
    header = ["xi_t", "xi_x1", "xi_x2", "xi_x3", "sign", "power"]
    header += [f"{part}_{i}{j}" for i in range(4) for j in range(4) for part in ("re", "im")]
    rows = []
    pw = kernels._power(power)
    for p, K in zip(xi, mats):
        flat = [v for z in K.ravel() for v in (float(z.real), float(z.imag))]
        rows.append([*map(float, p), int(kernels.dirac.check_sign(sign)), pw, *flat])
    rep.tables["kernel_grid"] = (header, rows)
    rep.results["points"] = len(rows)
    rep.results["max_abs_entry"] = float(max(np.max(np.abs(K)) for K in mats))


def _correlation(cfg, rep, m, g, rng):
    fam = parse_family(cfg.get("family", {"special": {}}), m)
    if cfg.get("orthonormalize", True):
        fam = packets.orthonormalize_family(fam)
    pts = _grid(cfg.get("points", [[0, 0, 0, 0]]), "points")

    def one(x):
        M = correlation.correlation_matrix(fam, x, g)
        return correlation.spin_space_report(M), correlation.isometry_check(fam, x, g), float(np.max(np.abs(M)))

    out = _map(one, pts)
    rep.results["points"] = [
        {"x": x, **r.as_dict(), "isometry_deviation": dev} for x, (r, dev, _) in zip(pts, out)
    ]
    worst = max(dev / max(s, 1e-300) for _, dev, s in out)
    rep.check("isometry relation", worst, "<=", 1e-12, "correlation-isometry")
    expect = cfg.get("expect")
    if expect:
        for x, (r, _, _) in zip(pts, out):
            if "rank" in expect:
                rep.check(f"rank at {list(x)}", r.rank, "==", int(expect["rank"]), "vacuum-regularity")
            if "signature" in expect:
                rep.check(f"signature at {list(x)}", list(r.signature), "==", list(expect["signature"]), "spin-space-signature")


def _regularity(cfg, rep, m, g, rng):
    sigma = _positive(cfg.get("sigma", m), "sigma")
    x0 = _vector(cfg.get("x0", [0, 0, 0, 0]), 4, "x0")
    epsilons = cfg.get("epsilons", [g.epsilon])
    fam = packets.orthonormalize_family(packets.SolutionFamily.from_packets(packets.special_family(sigma, tuple(x0), m)))
    kind = cfg.get("cutoff", {}).get("kind", "gaussian")
    params = cfg.get("cutoff", {}).get("params", {})
    rows = []
    for eps in epsilons:
        ge = parse_cutoff({"kind": kind, "epsilon": eps, "params": params}, m)
        r = correlation.spin_space_report(correlation.correlation_matrix(fam, x0, ge))
        hole = holes.hole_at_point(fam, x0, ge)
        rows.append({"epsilon": float(eps), **r.as_dict(), "hole_norm": hole["norm_after"]})
        rep.check(f"rank at eps={eps}", r.rank, "==", 4, "vacuum-regularity")
        rep.check(f"signature at eps={eps}", list(r.signature), "==", [2, 2], "spin-space-signature")
        rep.check(f"hole degeneracy at eps={eps}", hole["norm_after"], "<", 1e-10, "hole-critical-defect")
    rep.results["epsilons"] = rows


def _holes(cfg, rep, m, g, rng):
    x0 = _vector(cfg.get("x0", [0, 0, 0, 0]), 4, "x0")
    eps = _positive(cfg.get("epsilon", g.epsilon), "epsilon")
    if "target" not in cfg or "perturbation" not in cfg:
        raise InvalidArgument("holes needs 'target' and 'perturbation' families")
    target = packets.orthonormalize_family(parse_family(cfg["target"], m))
    pert = parse_family(cfg["perturbation"], m)
    scale = _positive(cfg.get("scale", 1e-2), "scale")
    aset = holes.approximating_set(target, pert, scale)
    close = aset.closeness()
    rep.results["closeness"] = close
    n = len(target)
    diag, off = holes.gram_determinant_minors(aset.overlap())
    bound = math.factorial(n) * close["max_overlap_error"]
    rep.results["gram_minors"] = {"diagonal": diag, "off_diagonal": off, "n_factorial_eps": bound}
    if bound < 1:
        rep.check("diagonal minors", float(np.min(diag)), ">", 1 - bound - 1e-12, "gram-minor-bounds")
        rep.check("off-diagonal minors", float(np.max(off)), "<=", bound + 1e-12, "gram-minor-bounds")
    phi = parse_family(cfg.get("phi", cfg["perturbation"]), m)
    proj = holes.project_out(phi, aset)
    orth = float(np.max(np.abs(proj.residual_overlaps)))
    lb = proj.lambda_bound()
    rep.results["projection"] = {
        "lambda": proj.coefficients,
        "inverse_overlap_norm": proj.inverse_norm,
        "residual_overlap": orth,
        "lambda_bound": {"lhs": lb["lhs"], "rhs": lb["rhs"], "applies": lb["applies"]},
    }
    rep.check("projection orthogonal to holes", orth, "<", 1e-10, "hole-projection")
    if lb["applies"]:
        rep.check("lambda bound", lb["lhs"], "<=", lb["rhs"], "lambda-coefficient-bound")
    probes = parse_family(cfg.get("probes", {"special": {"sigma": m, "x0": x0.tolist()}}), m)
    exp = holes.hole_regularity_experiment(probes, aset, x0, g, eps, m)
    micro = exp["micro"]
    rep.results["micro_behaviour"] = {
        "density": micro.density,
        "gradient": micro.gradient,
        "value": micro.value,
        "macroscopic": micro.macroscopic(m),
    }
    rep.results["regularity"] = {
        "rank": exp["rank"],
        "regular": exp["regular"],
        "singular_values": exp["singular_values"],
        "correlation": exp["correlation"],
        "analytic_bounds": exp["analytic"],
        "desk_scale_bounds": holes.analytic_hole_bounds(1e-16 * eps, micro.value, 1e8, m),
    }


def _perturbation(cfg, rep, m, g, rng):
    x = _vector(cfg.get("x", [0, 0, 0, 0]), 4, "x")
    norms = regularization.cutoff_l1_norms(g, m)
    if "states" in cfg:
        sets = [parse_family(cfg["states"], m)]
    else:
        count = int(cfg.get("random_sets", 20))
        lo, hi = cfg.get("states_per_set", [1, 4])
        if count < 1 or lo < 1 or hi < lo:
            raise InvalidArgument("random_sets and states_per_set must describe a nonempty range")
        sets = [holes.random_states(rng, int(rng.integers(lo, hi + 1)), m) for _ in range(count)]
    out = []
    for i, st in enumerate(sets):
        r = holes.eigenvalue_perturbation_experiment(st, x, g, g.epsilon, m, norms)
        out.append(
            {
                "states": len(st),
                "eigenvalues": r["eigenvalues"],
                "distances": r["distances"],
                "bauer_fike": r["bauer_fike"],
                "lifted": r["lifted"],
                "micro_behaviour": r["micro"].value,
            }
        )
        bf, lf = r["bauer_fike"], r["lifted"]
        rep.check(f"set {i} Bauer-Fike", bf["lhs"], "<=", bf["rhs"] * (1 + 1e-10) + 1e-15, "bauer-fike-diagonal")
        rep.check(f"set {i} lifted bound", lf["lhs"], "<=", lf["rhs"] * (1 + 1e-10) + 1e-15, "eigenvalue-shift-micro")
    rep.results["lambdas"] = list(kernels.diagonal_spectrum(g, m, norms))
    rep.results["sets"] = out


def _injectivity(cfg, rep, m, g, rng):
    fam = parse_family(cfg.get("family"), m)
    pts = _grid(cfg.get("points"), "points")
    thr = float(cfg.get("threshold", 1e-6))
    r = correlation.injectivity_probe(fam, pts, g, thr)
    rep.results.update(
        {
            "min_distance": r["min_distance"],
            "argmin": list(r["argmin"]),
            "max_norm": r["max_norm"],
            "threshold": r["threshold"],
            "separated": r["separated"],
            "non_separated_pairs": [list(p) for p in r["non_separated_pairs"]],
        }
    )
    if "expect_separated" in cfg:
        if cfg["expect_separated"]:
            rep.check("min distance above threshold", r["min_distance"], ">", r["threshold"], "injectivity")
        else:
            rep.check("degenerate family not separated", r["min_distance"], "<=", r["threshold"], "injectivity")


def _decay(cfg, rep, m, g, rng):
    u = parse_packet(cfg.get("packet", {}), m)
    direction = _vector(cfg.get("direction", [1, 0, 0, 0]), 4, "direction")
    radii = np.asarray(cfg.get("radii", [1, 2, 4, 8, 16]), dtype=float)
    if radii.ndim != 1 or radii.size == 0 or np.any(radii < 0):
        raise InvalidArgument("radii must be a nonempty list of nonnegative numbers")
    r = packets.decay_probe(u, direction, radii, g if "cutoff" in cfg else None)
    rep.results.update({"radii": radii, "values": r["values"], "bound_shape": r["bound_shape"], "fitted_constant": r["fitted_constant"]})
    rep.tables["decay"] = (["radius", "value", "bound_shape"], [[float(a), float(b), float(c)] for a, b, c in zip(radii, r["values"], r["bound_shape"])])


def _representation_sum(cfg, rep, m, g, rng):
    sizes = [int(n) for n in cfg.get("sizes", [16, 32, 64])]
    if not sizes or min(sizes) < 2:
        raise InvalidArgument("sizes must be a nonempty list of lattice sizes >= 2")
    xi = _vector(cfg.get("xi", [0, 0, 0, 0]), 4, "xi")
    rows = kernels.lattice_convergence(g, sizes, xi, cfg.get("sign", -1), m)
    rep.results["convergence"] = rows
    errs = [r["relative_error"] for r in rows]
    for a, b, n in zip(errs[:-1], errs[1:], sizes[1:]):
        rep.check(f"error decreases at n={n}", b, "<", a, "basis-sum-representation")
    rep.check("final relative error", errs[-1], "<", float(cfg.get("tolerance", 1e-2)), "basis-sum-representation")


_RUNNERS = {
    "kernel-diag": _kernel_diag,
    "kernel-grid": _kernel_grid,
    "correlation": _correlation,
    "regularity": _regularity,
    "holes": _holes,
    "perturbation": _perturbation,
    "injectivity": _injectivity,
    "decay": _decay,
    "representation-sum": _representation_sum,
}


def run(experiment: str, config: dict, seed: int = 0) -> ExperimentReport:
    """Validate ``config`` and run ``experiment``; deterministic given ``(config, seed)``."""
    if experiment not in _RUNNERS:
        raise InvalidArgument(f"unknown experiment {experiment!r}; choose from {', '.join(EXPERIMENTS)}")
    if not isinstance(config, dict):
        raise InvalidArgument("config must be a JSON object")
    extra = set(config) - _COMMON_KEYS - _KEYS[experiment]
    if extra:
        raise InvalidArgument(f"unknown config keys for {experiment}: {sorted(extra)}")
    thread_count()
    m = _positive(config.get("m", 1.0), "m")
    g = parse_cutoff(config.get("cutoff", {"kind": "sharp", "epsilon": 0.1}), m)
    rep = ExperimentReport(
        experiment,
        int(seed),
        config_digest(config, seed),
        {"m": m, "cutoff": g.describe(), "rtol": _positive(config.get("rtol", 1e-12), "rtol")},
    )
    try:
        _RUNNERS[experiment](config, rep, m, g, np.random.default_rng(seed))
    except InvalidArgument:
        raise
    except (TypeError, ValueError) as exc:
        # config values of the wrong type surface here as conversion errors
        raise InvalidArgument(f"bad value in {experiment} config: {exc}") from exc
    return rep
