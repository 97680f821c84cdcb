"""Derivative-free search for near-extremal maps.

Objectives
----------
``smale_max``
    maximize S(p, 0) over p(z) = z + a_2 z^2 + ... + a_n z^n.
``thm1_best_min``
    minimize the best thm1 candidate over maps with R(0) = 0, R(inf) = inf,
    R'(0) = 1, probing x = 0, y = inf.
``thm2_best_min``
    minimize the best thm2 candidate over maps with R(0) = 0, R'(0) = 1,
    probing x = 0.

The normalizations use the Moebius (resp. affine) invariance of the
functionals, so no generality is lost.  Degenerate parameter values
(degree drop, common factors, precondition failures) score ``PENALTY``.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np
from scipy.optimize import minimize

from .complexpoly import Polynomial, RootFindingError
from .ratmap import RationalMap
from .serialize import decode_map, decode_point, decode_poly, encode_map, encode_point, \
    encode_poly
from .smale import PreconditionError, smale_quantity, thm1_report, thm2_report
from .sphere import INF

OBJECTIVES = ("thm1_best_min", "thm2_best_min", "smale_max")
PENALTY = 1e6
BOUNDS = {"thm1_best_min": 0.25, "thm2_best_min": 0.5}
ARCHIVE_TOL = 1e-8
#: maps whose zeros and poles come chordally closer than this are penalized
MIN_SEPARATION = 1e-4


class ArchiveError(RuntimeError):
    pass


@dataclass
class SearchConfig:
    degree: int
    objective: str
    restarts: int = 10
    max_evals: int = 2000
    seed: int = 0
    simplex_tol: float = 1e-10
    init_scale: float = 0.7

    def __post_init__(self):
        if self.objective not in OBJECTIVES:
            raise ValueError(f"objective must be one of {OBJECTIVES}")
        if self.degree < 2:
            raise ValueError("degree must be >= 2")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_evals < 1:
            raise ValueError("max_evals must be >= 1")


def target(objective: str, n: int) -> float:
    return 1 - 1 / n if objective == "smale_max" else n / (n - 1)


def dimension(objective: str, n: int) -> int:
    if objective == "smale_max":
        return 2 * (n - 1)
    if objective == "thm1_best_min":
        return 4 * (n - 1)
    return 2 * (n - 1) + 2 * n


def _complex(params: np.ndarray) -> np.ndarray:
    return params[0::2] + 1j * params[1::2]


def build(objective: str, n: int, params: np.ndarray):
    """Map parameters to (poly or map, x, y)."""
    c = _complex(np.asarray(params, dtype=float))
    num = np.concatenate([[0, 1], c[: n - 1]])
    if objective == "smale_max":
        return Polynomial(num), 0j, None
    rest = c[n - 1:]
    den = np.concatenate([[1], rest])
    R = RationalMap(num, den)
    return R, 0j, (INF if objective == "thm1_best_min" else None)


def evaluate(objective: str, obj, x, y) -> float:
    """The raw functional value (S for smale_max, best multiplier otherwise)."""
    if objective == "smale_max":
        return smale_quantity(obj, x)
    if objective == "thm1_best_min":
        return thm1_report(obj, x, y).best
    return thm2_report(obj, x).best


def objective_value(objective: str, n: int, params: np.ndarray) -> float:
    """Value to minimize; PENALTY on degenerate configurations."""
    if not np.all(np.isfinite(params)):
        return PENALTY
    try:
        obj, x, y = build(objective, n, params)
        if obj.degree != n:
            return PENALTY
        if objective != "smale_max" and (obj.removed_factor.degree > 0
                                          or obj.zero_pole_separation() < MIN_SEPARATION):
            return PENALTY
        v = evaluate(objective, obj, x, y)
    except (PreconditionError, RootFindingError, ValueError, ZeroDivisionError,
            FloatingPointError):
        return PENALTY
    if not math.isfinite(v):
        return PENALTY
    return -v if objective == "smale_max" else v


@dataclass
class RestartTrace:
    restart: int
    start: list[float]
    params: list[float]
    value: float
    nfev: int
    best_so_far: list[float]


@dataclass
class SearchResult:
    config: SearchConfig
    best_value: float
    params: list[float]
    target: float
    gap: float
    traces: list[RestartTrace]
    max_evaluated: float = float("nan")
    min_evaluated: float = float("nan")

    def witness(self):
        obj, x, y = build(self.config.objective, self.config.degree, np.array(self.params))
        return obj, x, y


def _run_restart(cfg: SearchConfig, i: int, seed: np.random.SeedSequence) -> tuple:
    rng = np.random.default_rng(seed)
    n = cfg.degree
    dim = dimension(cfg.objective, n)
    x0 = rng.normal(scale=cfg.init_scale, size=dim)
    best = [math.inf]
    trace: list[float] = []
    raw: list[float] = []

    def f(p):
        v = objective_value(cfg.objective, n, p)
        if v < PENALTY:
            raw.append(-v if cfg.objective == "smale_max" else v)
        best[0] = min(best[0], v)
        trace.append(best[0])
        return v

    res = minimize(f, x0, method="Nelder-Mead",
                   options={"maxfev": cfg.max_evals, "xatol": cfg.simplex_tol,
                            "fatol": cfg.simplex_tol, "adaptive": True})
    sign = -1 if cfg.objective == "smale_max" else 1
    value = sign * float(res.fun)
    t = RestartTrace(i, x0.tolist(), [float(v) for v in res.x], value, int(res.nfev),
                     [sign * v for v in trace])
    return t, (max(raw) if raw else math.nan), (min(raw) if raw else math.nan)


def run_search(cfg: SearchConfig, jobs: int = 1) -> SearchResult:
    """Nelder-Mead with random restarts; deterministic in ``cfg.seed``."""
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
    args = [(cfg, i, s) for i, s in enumerate(seeds)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            outs = list(ex.map(_run_restart, *zip(*args)))
    else:
        outs = [_run_restart(*a) for a in args]
    traces = [o[0] for o in outs]
    maximize = cfg.objective == "smale_max"
    pick = max if maximize else min
    best = pick(traces, key=lambda t: t.value)
    tgt = target(cfg.objective, cfg.degree)
    gap = tgt - best.value if maximize else best.value - tgt
    return SearchResult(cfg, best.value, best.params, tgt, gap, traces,
                        max_evaluated=max((o[1] for o in outs), default=math.nan),
                        min_evaluated=min((o[2] for o in outs), default=math.nan))


# ---------------------------------------------------------------------------
# witness archive


def witness_payload(result: SearchResult) -> dict:
    cfg = result.config
    obj, x, y = result.witness()
    payload = {
        "objective": cfg.objective,
        "degree": cfg.degree,
        "value": result.best_value,
        "target": result.target,
        "gap": result.gap,
        "seed": cfg.seed,
        "config": asdict(cfg),
        "params": result.params,
        "x": encode_point(x),
        "y": None if y is None else encode_point(y),
    }
    if isinstance(obj, Polynomial):
        payload["poly"] = encode_poly(obj)
    else:
        payload["map"] = encode_map(obj)
    return payload


def reevaluate(payload: dict) -> float:
    """Recompute the objective from a witness payload, independently of the
    search parameterization."""
    try:
        objective = payload["objective"]
        x = decode_point(payload["x"])
        y = None if payload.get("y") is None else decode_point(payload["y"])
        if objective == "smale_max":
            obj = decode_poly(payload["poly"])
        else:
            obj = decode_map(payload["map"])
    except (KeyError, TypeError) as exc:
        raise ArchiveError(f"malformed witness: {exc!r}") from exc
    return evaluate(objective, obj, x, y)


def witness_archive(result: SearchResult, path) -> dict:
    """Write the best witness after re-verifying it from its serialized form."""
    payload = json.loads(json.dumps(witness_payload(result)))
    recomputed = reevaluate(payload)
    if not abs(recomputed - result.best_value) <= ARCHIVE_TOL * max(1.0, abs(recomputed)):
        raise ArchiveError(
            f"re-evaluation mismatch: search {result.best_value!r} vs {recomputed!r}")
    payload["recomputed"] = recomputed
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True))
    return payload


def load_witness(path) -> dict:
    try:
        payload = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ArchiveError(f"cannot read witness {path}: {exc}") from exc
    required = {"objective", "degree", "value", "x"}
    if not isinstance(payload, dict) or not required <= payload.keys():
        raise ArchiveError(f"witness {path} is missing fields")
    if payload["objective"] not in OBJECTIVES:
        raise ArchiveError(f"unknown objective {payload['objective']!r}")
    return payload
