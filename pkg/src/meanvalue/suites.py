"""Randomized verification suites shared by the CLI and the acceptance tests.

Every trial draws from ``np.random.default_rng([seed, degree, trial])`` so a
single row can be reproduced in isolation.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import fixtures
from .index import forbidden_check, index_sum_check
from .ratmap import RationalMap, random_map
from .serialize import encode_map, encode_point
from .smale import PreconditionError, conjectured_constant, smale_quantity, \
    smale_best_known_bound, thm1_report, thm2_report
from .complexpoly import Polynomial
from .sphere import MoebiusMap, random_moebius

SUITES = ("thm1", "thm2", "index-sum", "forbidden", "smale")

INDEX_SUM_TOL = 1e-6
INDEX_FORMULA_TOL = 1e-8


def trial_rng(seed: int, degree: int, trial: int) -> np.random.Generator:
    return np.random.default_rng([seed, degree, trial])


def random_point(rng: np.random.Generator) -> complex:
    return complex(rng.uniform(-1, 1), rng.uniform(-1, 1))


def random_polynomial(n: int, rng: np.random.Generator) -> Polynomial:
    while True:
        p = Polynomial(rng.uniform(-1, 1, n + 1) + 1j * rng.uniform(-1, 1, n + 1))
        if p.degree == n:
            return p


def thm1_instance(n: int, rng: np.random.Generator, attempts: int = 100):
    R = random_map(n, rng)
    for _ in range(attempts):
        x, y = random_point(rng), random_point(rng)
        try:
            return R, x, y, thm1_report(R, x, y)
        except PreconditionError:
            continue
    raise RuntimeError("no valid (x, y) found")


def thm2_instance(n: int, rng: np.random.Generator, attempts: int = 100):
    R = random_map(n, rng)
    for _ in range(attempts):
        x = random_point(rng)
        try:
            return R, x, thm2_report(R, x)
        except PreconditionError:
            continue
    raise RuntimeError("no valid x found")


def _thm1_trial(seed: int, degree: int, trial: int) -> dict:
    R, x, y, rep = thm1_instance(degree, trial_rng(seed, degree, trial))
    return {"degree": degree, "trial": trial, "value": rep.best, "ok": rep.holds,
            "candidates": len(rep.candidates),
            "witness": {"map": encode_map(R), "x": encode_point(x), "y": encode_point(y)}}


def _thm2_trial(seed: int, degree: int, trial: int) -> dict:
    R, x, rep = thm2_instance(degree, trial_rng(seed, degree, trial))
    return {"degree": degree, "trial": trial, "value": rep.best, "ok": rep.holds,
            "candidates": len(rep.candidates),
            "witness": {"map": encode_map(R), "x": encode_point(x)}}


def index_corpus_map(degree: int, rng: np.random.Generator, trial: int) -> RationalMap:
    """Random map; every third trial fixes infinity, every third puts a fixed
    point near infinity (|z| ~ 1e5) by Moebius conjugation."""
    kind = trial % 3
    if kind == 1:
        return random_map(degree, rng, fix_infinity=True)
    R = random_map(degree, rng)
    if kind == 2:
        p = R.fixed_points()[0].location
        M = MoebiusMap(0, 1, 1, -(p + 1e-5))
        R = R.compose_moebius(M.inverse(), "pre").compose_moebius(M, "post")
    return R


def _index_trial(seed: int, degree: int, trial: int) -> dict:
    R = index_corpus_map(degree, trial_rng(seed, degree, trial), trial)
    s = index_sum_check(R)
    gaps = [abs(fp.index - 1 / (1 - fp.multiplier)) / max(1.0, abs(fp.index))
            for fp in s.records if fp.multiplicity == 1 and abs(fp.multiplier - 1) > 1e-6]
    formula_gap = max(gaps, default=0.0)
    return {"degree": degree, "trial": trial, "value": s.deviation,
            "formula_gap": formula_gap,
            "ok": s.deviation <= INDEX_SUM_TOL and formula_gap <= INDEX_FORMULA_TOL,
            "witness": {"map": encode_map(R)}}


def _smale_trial(seed: int, degree: int, trial: int) -> dict:
    rng = trial_rng(seed, degree, trial)
    p = random_polynomial(degree, rng)
    while True:
        x = random_point(rng)
        try:
            s = smale_quantity(p, x)
            break
        except PreconditionError:
            continue
    return {"degree": degree, "trial": trial, "value": s, "ok": s <= 4.0,
            "within_best_known": s <= smale_best_known_bound(degree) + 1e-12,
            "witness": {"poly": [[c.real, c.imag] for c in p.coeffs], "x": [x.real, x.imag]}}


_TRIALS = {"thm1": _thm1_trial, "thm2": _thm2_trial, "index-sum": _index_trial,
           "smale": _smale_trial}


@dataclass
class SuiteReport:
    suite: str
    degree: int | None
    trials: int
    seed: int
    rows: list[dict]
    summary: dict = field(default_factory=dict)

    @property
    def violations(self) -> list[dict]:
        return [r for r in self.rows if not r["ok"]]

    @property
    def ok(self) -> bool:
        return not self.violations

    def csv_rows(self) -> list[tuple]:
        return [(r.get("name", r.get("degree")), r.get("trial", 0), r["value"]) for r in self.rows]


def _forbidden_rows(trials: int, seed: int, max_iterate: int) -> list[dict]:
    rows = []
    fx = fixtures.critical_fixed_fixtures()
    jobs = [(name, R) for name, R in fx]
    rng = np.random.default_rng([seed, 0, 0])
    for t in range(trials):
        name, R = fx[int(rng.integers(len(fx)))]
        M = random_moebius(rng, max_cond=5.0)
        Rc = R.compose_moebius(M.inverse(), "pre").compose_moebius(M, "post")
        jobs.append((f"{name}~conj{t}", Rc))
    for i, (name, R) in enumerate(jobs):
        # expanded iterates of conjugated maps lose too many digits to be checked
        rep = forbidden_check(R, max_iterate if "~" not in name else 1)
        noncrit = [fp.multiplier for fp in rep.fixed_points if not fp.is_critical]
        rows.append({"name": name, "trial": i, "degree": rep.degree,
                     "m": rep.distinct_critical, "value": min(abs(l) for l in noncrit),
                     "boundary": len(rep.boundary) > 0, "ok": rep.ok,
                     "violations": rep.violations,
                     "witness": {"map": encode_map(R)}})
    return rows


def run_suite(suite: str, degree: int | None = None, trials: int = 100, seed: int = 0,
              jobs: int = 1, max_iterate: int = 2) -> SuiteReport:
    if suite not in SUITES:
        raise ValueError(f"suite must be one of {SUITES}")
    if suite == "forbidden":
        rows = _forbidden_rows(trials, seed, max_iterate)
        rep = SuiteReport(suite, degree, trials, seed, rows)
        rep.summary = {"fixtures": len(rows), "violations": len(rep.violations),
                       "boundary_cases": [r["name"] for r in rows if r["boundary"]]}
        return rep
    if degree is None or degree < 2:
        raise ValueError("degree must be >= 2")
    fn = _TRIALS[suite]
    args = [(seed, degree, t) for t in range(trials)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(fn, *zip(*args), chunksize=max(1, trials // (4 * jobs))))
    else:
        rows = [fn(*a) for a in args]
    rep = SuiteReport(suite, degree, trials, seed, rows)
    values = [r["value"] for r in rows if not math.isnan(r["value"])]
    rep.summary = {"violations": len(rep.violations),
                   "min": min(values, default=math.nan),
                   "max": max(values, default=math.nan)}
    if suite in ("thm1", "thm2"):
        c = conjectured_constant(degree)
        rep.summary["conjectured"] = c
        rep.summary["min_at_least_conjectured"] = rep.summary["min"] >= c - 1e-6
        rep.summary["empty_candidate_trials"] = sum(1 for r in rows if r["candidates"] == 0)
    if suite == "index-sum":
        rep.summary["max_formula_gap"] = max(r["formula_gap"] for r in rows)
    if suite == "smale":
        rep.summary["best_known_bound"] = smale_best_known_bound(degree)
        rep.summary["all_within_best_known"] = all(r["within_best_known"] for r in rows)
    return rep
