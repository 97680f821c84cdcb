"""Newton-Raphson maps z - g/g' of rational functions g = P/Q, and the
inverse problem: decide whether a rational map is such a map and rebuild g
from its fixed points."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .complexpoly import Polynomial, gcd, root_clusters
from .ratmap import RationalMap
from .sphere import INF, SpherePoint, chordal

INTEGER_TOL = 1e-6
PARABOLIC_TOL = 1e-9
MATCH_TOL = 1e-8


def newton_map(g_num: Polynomial, g_den: Polynomial | None = None) -> RationalMap:
    """R_g = z - g/g' for g = g_num / g_den, in lowest terms.

    The common factor removed by the reduction is available as
    ``R.removed_factor``; it is nontrivial when g has repeated roots or
    poles, in which case deg R_g < deg g is possible.
    """
    P = g_num
    Q = Polynomial([1]) if g_den is None else g_den
    if max(P.degree, Q.degree) < 1 or P.is_zero():
        raise ValueError("g must be nonconstant")
    z = Polynomial([0, 1])
    dg = P.deriv() * Q - P * Q.deriv()
    return RationalMap(z * dg - P * Q, dg)


def newton_derivative_check(g: Polynomial, rng: np.random.Generator | None = None,
                            samples: int = 50) -> float:
    """Max relative gap between R_g' and g g'' / g'^2 at random points."""
    rng = np.random.default_rng(0) if rng is None else rng
    R = newton_map(g)
    dR = R.derivative_map()
    g1, g2 = g.deriv(), g.deriv(2)
    z = rng.uniform(-2, 2, samples) + 1j * rng.uniform(-2, 2, samples)
    lhs = dR(z)
    rhs = g(z) * g2(z) / g1(z) ** 2
    scale = np.maximum(np.abs(rhs), 1e-300)
    return float(np.max(np.abs(lhs - rhs) / np.maximum(scale, np.abs(lhs))))


def multiplier_from_order(m: int) -> float:
    """Multiplier of R_g at a finite point where g has order m (m < 0: pole)."""
    if m == 0:
        raise ValueError("order must be nonzero")
    return 1 - 1 / m


def multiplier_at_infinity(d: int) -> float:
    """Multiplier of R_g at infinity when deg P - deg Q = d, d not in (0, 1).

    Here g has a pole of order d at infinity and the residue index there is
    1 - d.
    """
    if d == 1:
        raise ValueError("infinity is not fixed when deg P - deg Q = 1")
    return d / (d - 1)


@dataclass
class HCondition:
    holds: bool
    squarefree: bool
    matched: list[tuple[complex, complex]]
    unmatched: list[complex]


def h_condition_check(h: Polynomial, tol: float = MATCH_TOL) -> HCondition:
    """h squarefree and every root of h'' is (chordally) a root of h."""
    if h.degree < 2:
        raise ValueError("need deg h >= 2")
    squarefree = gcd(h, h.deriv()).degree == 0
    h2 = h.deriv(2)
    hroots = [r for r, _ in root_clusters(h)]
    matched, unmatched = [], []
    if h2.degree >= 1:
        for r, _ in root_clusters(h2):
            near = min(hroots, key=lambda s: chordal(r, s))
            if chordal(r, near) <= tol:
                matched.append((r, near))
            else:
                unmatched.append(r)
    return HCondition(squarefree and not unmatched, squarefree, matched, unmatched)


@dataclass
class CriticalFixedCheck:
    holds: bool
    residuals: list[tuple[SpherePoint, float]]


def all_critical_fixed(R: RationalMap, tol: float = MATCH_TOL) -> CriticalFixedCheck:
    res = [(c.location, chordal(c.critical_value, c.location)) for c in R.critical_points()]
    return CriticalFixedCheck(all(r <= tol for _, r in res), res)


@dataclass
class FixedDatum:
    location: SpherePoint
    multiplier: complex
    index: complex
    order: int | None


@dataclass
class NewtonCharacterization:
    is_newton: bool
    fixed_data: list[FixedDatum]
    factors: list[tuple[complex, int]]
    residual: float
    reason: str = ""
    g_num: Polynomial | None = None
    g_den: Polynomial | None = None
    roundtrip_error: float | None = None

    @property
    def is_polynomial_case(self) -> bool:
        return self.is_newton and all(m > 0 for _, m in self.factors)


def characterize(R: RationalMap, tol: float = INTEGER_TOL,
                 rng: np.random.Generator | None = None) -> NewtonCharacterization:
    """Decide whether R = z - g/g' and, if so, rebuild g = prod (z - c_i)**m_i.

    R is a Newton map iff all fixed points are simple and each index
    1/(1 - multiplier) is an integer; the integers are the orders of g.
    The reconstructed g is monic (the overall scalar does not affect R_g).
    """
    fps = R.fixed_points()
    data: list[FixedDatum] = []
    residual = 0.0
    reason = ""
    for fp in fps:
        lam = fp.multiplier
        if fp.multiplicity > 1 or abs(1 - lam) < PARABOLIC_TOL:
            data.append(FixedDatum(fp.location, lam, complex("nan"), None))
            reason = reason or f"multiple fixed point at {fp.location!r}"
            continue
        idx = 1 / (1 - lam)
        m = int(round(idx.real))
        gap = abs(idx - m)
        if fp.location is not INF:
            residual = max(residual, gap)
        ok = gap <= tol and m != 0
        data.append(FixedDatum(fp.location, lam, idx, m if ok else None))
        if not ok and fp.location is not INF:
            reason = reason or f"index {idx!r} at {fp.location!r} is not a nonzero integer"
    factors = [(d.location, d.order) for d in data if d.location is not INF and d.order is not None]
    if reason:
        return NewtonCharacterization(False, data, factors, residual, reason)
    P = Polynomial([1])
    Q = Polynomial([1])
    for loc, m in factors:
        lin = Polynomial([-loc, 1])
        if m > 0:
            P = P * lin ** m
        else:
            Q = Q * lin ** (-m)
    out = NewtonCharacterization(True, data, factors, residual, "", P, Q)
    rng = np.random.default_rng(0) if rng is None else rng
    back = newton_map(P, Q)
    pts = rng.uniform(-2, 2, 20) + 1j * rng.uniform(-2, 2, 20)
    out.roundtrip_error = max(chordal(back(z), R(z)) for z in pts)
    if out.roundtrip_error > 1e-7:
        out.is_newton = False
        out.reason = f"reconstructed g does not reproduce R (error {out.roundtrip_error:.3g})"
    return out
