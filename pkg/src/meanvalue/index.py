"""Residue fixed-point indices and the forbidden-multiplier disc.

The index of an isolated fixed point z0 of f is (1/2 pi i) times the
integral of dz / (z - f(z)) around a small circle about z0.  It is computed
here with the periodic trapezoid rule, which converges geometrically for
integrands analytic in an annulus around the circle.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ratmap import COMPOSE_CAP, FixedPointRecord, RationalMap
from .sphere import INF, SpherePoint, as_point, chordal
from .newton import all_critical_fixed

NODES = 256
MAX_RADIUS = 0.1
RICHARDSON_TOL = 1e-8
MAX_SHRINK = 4
NEAR_PARABOLIC = 1e-6
BOUNDARY_TOL = 1e-9


class QuadratureError(RuntimeError):
    pass


def _chart(R: RationalMap, z0: SpherePoint, others):
    """Integrand of the index in a chart where z0 is finite and |z0| <= 1."""
    if z0 is not INF and abs(z0) <= 1:
        num, den = R.num, R.den
        center = complex(z0)
        pts = [complex(p) for p in others if p is not INF]

        def f(z):
            d = den(z)
            return d / (z * d - num(z))
    else:
        # conjugate by w = 1/z: 1/R(1/w) = D(w)/N(w)
        N, D = R.flipped
        center = 0j if z0 is INF else 1 / complex(z0)
        pts = [0j if p is INF else 1 / complex(p) for p in others if p is INF or p != 0]

        def f(w):
            n = N(w)
            return n / (w * n - D(w))
    return f, center, pts


def trapezoid_index(f, center: complex, r: float, nodes: int) -> complex:
    theta = 2 * np.pi * np.arange(nodes) / nodes
    e = np.exp(1j * theta)
    return complex(r * np.mean(f(center + r * e) * e))


def fixed_point_index(R: RationalMap, z0, others=None, nodes: int = NODES) -> complex:
    """Residue index of R at the fixed point z0.

    ``others`` are the remaining fixed points (computed when omitted); they
    bound the contour radius.  The rule is run at ``nodes`` and ``2*nodes``;
    on disagreement above 1e-8 the radius is halved, up to four times.
    """
    z0 = as_point(z0)
    if R.fixed_polynomial().is_zero():
        raise ValueError("identity map: fixed points are not isolated")
    if others is None:
        others = [fp.location for fp in R.fixed_points()
                  if chordal(fp.location, z0) > 1e-12]
    f, center, pts = _chart(R, z0, others)
    dist = min((abs(p - center) for p in pts), default=np.inf)
    r = min(0.5 * dist, MAX_RADIUS)
    for _ in range(MAX_SHRINK + 1):
        coarse = trapezoid_index(f, center, r, nodes)
        fine = trapezoid_index(f, center, r, 2 * nodes)
        if abs(coarse - fine) <= RICHARDSON_TOL * max(1.0, abs(fine)):
            return fine
        r *= 0.5
    raise QuadratureError(f"index quadrature did not converge at {z0!r}")


def index_from_multiplier(lam: complex) -> complex:
    """1/(1 - lam); valid for simple fixed points only."""
    return 1 / (1 - lam)


@dataclass
class IndexSum:
    total: complex
    deviation: float
    records: list[FixedPointRecord]


def index_sum_check(R: RationalMap) -> IndexSum:
    """Sum of residue indices over all fixed points; should equal 1."""
    fps = R.fixed_points()
    locs = [fp.location for fp in fps]
    total = 0j
    for i, fp in enumerate(fps):
        fp.index = fixed_point_index(R, fp.location, locs[:i] + locs[i + 1:])
        total += fp.index
    return IndexSum(total, abs(total - 1), fps)


def index_table(summary: IndexSum) -> list[dict]:
    """Per fixed point: quadrature index next to 1/(1 - multiplier).

    The multiplier formula is reported only for simple fixed points whose
    multiplier is not within NEAR_PARABOLIC of 1; those are flagged.
    """
    rows = []
    for fp in summary.records:
        near = abs(fp.multiplier - 1) < NEAR_PARABOLIC
        formula = None if near or fp.multiplicity > 1 else index_from_multiplier(fp.multiplier)
        rows.append({
            "location": fp.location,
            "multiplier": fp.multiplier,
            "multiplicity": fp.multiplicity,
            "critical": fp.is_critical,
            "near_parabolic": near,
            "index": fp.index,
            "formula_index": formula,
            "gap": None if formula is None else abs(fp.index - formula),
        })
    return rows


@dataclass(frozen=True)
class Disc:
    center: complex
    radius: float
    closed: bool = True

    def contains(self, z: complex, tol: float = 0.0) -> bool:
        d = abs(z - self.center)
        return d <= self.radius + tol if self.closed else d < self.radius - tol


def forbidden_disc(n: int, m: int) -> Disc:
    """Closed disc with diameter [1, 1 + 2/(n+m-2)]."""
    if n + m < 3:
        raise ValueError("need n + m >= 3")
    r = 1 / (n + m - 2)
    return Disc(1 + r, r, True)


@dataclass
class ForbiddenReport:
    degree: int
    distinct_critical: int
    disc: Disc
    fixed_points: list[FixedPointRecord]
    boundary: list[SpherePoint] = field(default_factory=list)
    violations: list[str] = field(default_factory=list)
    iterates: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def forbidden_check(R: RationalMap, max_iterate: int = 1, cap: int = COMPOSE_CAP) -> ForbiddenReport:
    """Check the excluded-multiplier statements for a map whose critical
    points are all fixed.

    For every non-critical fixed point: |multiplier| > 1, Re(index) < 1/2,
    and the multiplier avoids the closed disc for (n, m), except that when
    m = n the remaining fixed point has multiplier n/(n-1) on its boundary.

    With ``max_iterate = K > 1`` the iterates R^k (k <= K, n^k <= cap) are
    checked too: the multiplier of R^k at each such point, lambda^k, must
    avoid the closed disc for (n^k, m).  This holds because all periodic
    points off the critical set are repelling and R^k has exactly m
    superattracting fixed points.
    """
    crit_check = all_critical_fixed(R)
    if not crit_check.holds:
        raise ValueError("not every critical point is fixed")
    n = R.degree
    m = len(crit_check.residuals)
    disc = forbidden_disc(n, m)
    summary = index_sum_check(R)
    fps = summary.records
    report = ForbiddenReport(n, m, disc, fps)
    if len(fps) != n + 1 or any(fp.multiplicity != 1 for fp in fps):
        report.violations.append(f"expected {n + 1} distinct fixed points, got {len(fps)}")
    noncrit = [fp for fp in fps if not fp.is_critical]
    if len(noncrit) != n + 1 - m:
        report.violations.append(
            f"expected {n + 1 - m} non-critical fixed points, got {len(noncrit)}")
    extremal = n / (n - 1)
    for fp in noncrit:
        lam = fp.multiplier
        if not abs(lam) > 1:
            report.violations.append(f"|multiplier| <= 1 at {fp.location!r}: {lam!r}")
        if not index_from_multiplier(lam).real < 0.5:
            report.violations.append(f"Re(index) >= 1/2 at {fp.location!r}")
        if disc.contains(lam, BOUNDARY_TOL):
            if m == n and abs(lam - extremal) <= BOUNDARY_TOL:
                report.boundary.append(fp.location)
            else:
                report.violations.append(f"multiplier {lam!r} at {fp.location!r} in forbidden disc")
    if m == n and len(report.boundary) != 1:
        report.violations.append("m = n but no fixed point with multiplier n/(n-1)")
    if m != n and report.boundary:
        report.violations.append("boundary multiplier with m != n")
    for k in range(2, max_iterate + 1):
        if n ** k > cap:
            break
        Rk = R.self_compose(k, cap)
        kdisc = forbidden_disc(n ** k, m)
        for fp in noncrit:
            mu = Rk.multiplier(fp.location, tol=1e-6)
            entry = {
                "k": k,
                "location": fp.location,
                "multiplier": mu,
                "expected": fp.multiplier ** k,
                "disc": kdisc,
                "margin": abs(mu - kdisc.center) - kdisc.radius,
            }
            report.iterates.append(entry)
            if abs(mu - fp.multiplier ** k) > 1e-6 * max(1.0, abs(mu)):
                report.violations.append(f"R^{k} multiplier mismatch at {fp.location!r}")
            if kdisc.contains(mu):
                report.violations.append(f"R^{k} multiplier {mu!r} in forbidden disc")
    return report
