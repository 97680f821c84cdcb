"""Mean-value functionals for polynomials and rational maps.

* :func:`smale_quantity` - the classical chord/derivative ratio S(p, x).
* :func:`thm1_report` - for points x, y and each critical point c, the
  multiplier at x of M o R where M is the Moebius map making x, y and c
  fixed.  At least one candidate always exceeds 1/4.
* :func:`thm2_report` - the same with one point x and a pair of critical
  points; at least one candidate is >= 1/2.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

import numpy as np

from .complexpoly import Polynomial, root_clusters
from .ratmap import RationalMap
from .sphere import INF, POINT_TOL, MoebiusMap, SpherePoint, as_point, chordal, \
    deriv_in_charts, from_three_points

log = logging.getLogger(__name__)

THM1_BOUND = 0.25
THM2_BOUND = 0.5
SMALE_BOUND = 4.0


class PreconditionError(ValueError):
    pass


def conjectured_constant(n: int) -> float:
    return n / (n - 1)


# ---------------------------------------------------------------------------
# polynomials


def smale_ratios(p: Polynomial, x: complex) -> list[tuple[complex, float]]:
    """(critical point, |(p(c) - p(x)) / ((c - x) p'(x))|) per distinct critical point."""
    if p.degree < 2:
        raise PreconditionError("smale quantity needs degree >= 2")
    x = complex(x)
    dp = p.deriv()
    dpx = dp(x)
    crit = [c for c, _ in root_clusters(dp)]
    scale = max(1.0, abs(x))
    if dpx == 0 or any(abs(c - x) <= 1e-12 * scale for c in crit):
        raise PreconditionError(f"x = {x!r} is a critical point")
    px = p(x)
    return [(c, abs((p(c) - px) / ((c - x) * dpx))) for c in crit]


def smale_quantity(p: Polynomial, x: complex) -> float:
    """S(p, x) = min over critical points c of |(p(c)-p(x)) / ((c-x) p'(x))|."""
    return min(r for _, r in smale_ratios(p, x))


def smale_best_known_bound(n: int) -> float:
    """4**(1 - 1/(n-1)), the best bound known for general degree n."""
    return 4.0 ** (1 - 1 / (n - 1))


# ---------------------------------------------------------------------------
# rational maps


@dataclass
class Candidate:
    points: tuple
    moebius: MoebiusMap
    value: float


@dataclass
class TheoremReport:
    theorem: str
    candidates: list[Candidate]
    bound: float
    conjectured: float
    strict: bool
    skipped: list[tuple[tuple, str]] = field(default_factory=list)

    @property
    def best(self) -> float:
        if not self.candidates:
            return float("nan")
        return max(c.value for c in self.candidates)

    @property
    def best_candidate(self) -> Candidate | None:
        if not self.candidates:
            return None
        return max(self.candidates, key=lambda c: c.value)

    @property
    def holds(self) -> bool:
        """The theorem's bound; vacuous when every candidate was degenerate."""
        if not self.candidates:
            return True
        return self.best > self.bound if self.strict else self.best >= self.bound


def _fixing_multiplier(R: RationalMap, x: SpherePoint, src, dst) -> tuple[MoebiusMap, float]:
    M = from_three_points(src, dst)
    value = abs(deriv_in_charts(M, src[0]) * R.chart_derivative(x))
    return M, value


def thm1_report(R: RationalMap, x, y, tol: float = POINT_TOL) -> TheoremReport:
    """Candidates |(M o R)#(x)| over critical points c, M fixing x, y, c."""
    x, y = as_point(x), as_point(y)
    n = R.degree
    if n < 2:
        raise PreconditionError("degree must be at least 2")
    Rx, Ry = R(x), R(y)
    if chordal(Rx, Ry) <= tol:
        raise PreconditionError("R(x) and R(y) coincide")
    crit = R.critical_points()
    if any(chordal(c.location, x) <= tol for c in crit) or R.chart_derivative(x) == 0:
        raise PreconditionError("x is a critical point")
    report = TheoremReport("thm1", [], THM1_BOUND, conjectured_constant(n), strict=True)
    for c in crit:
        z, Rz = c.location, c.critical_value
        if chordal(z, y) <= tol:
            report.skipped.append(((z,), "critical point coincides with y"))
            continue
        if chordal(Rz, Rx) <= tol or chordal(Rz, Ry) <= tol:
            report.skipped.append(((z,), "critical value coincides with R(x) or R(y)"))
            continue
        M, value = _fixing_multiplier(R, x, (Rx, Ry, Rz), (x, y, z))
        report.candidates.append(Candidate((z,), M, value))
    if not report.candidates:
        log.info("thm1: every critical point was degenerate for x=%r y=%r", x, y)
    return report


def thm1_chord_terms(R: RationalMap, x: complex, y: complex, z: complex):
    """(lhs, middle, rightmost) of the all-finite chord formulation.

    lhs = |R'(x)(y-x) / (R(y)-R(x))| and the two equal cross-ratio factors
    |(R(x)-R(z))/(R(y)-R(z)) * (y-z)/(x-z)| and
    |(R(x)-R(z))/(x-z) * (y-z)/(R(y)-R(z))|.
    """
    pts = [as_point(p) for p in (x, y, z)]
    imgs = [R(p) for p in pts]
    if any(p is INF for p in pts + imgs):
        raise PreconditionError("chord formulation needs finite points and images")
    x, y, z = pts
    Rx, Ry, Rz = imgs
    lhs = abs(R.chart_derivative(x) * (y - x) / (Ry - Rx))
    middle = abs((Rx - Rz) / (Ry - Rz) * (y - z) / (x - z))
    rightmost = abs((Rx - Rz) / (x - z) * (y - z) / (Ry - Rz))
    return lhs, middle, rightmost


def thm1_chord_value(R: RationalMap, x: complex, y: complex, z: complex) -> float:
    """The thm1 candidate for critical point z, from chord ratios alone."""
    lhs, middle, _ = thm1_chord_terms(R, x, y, z)
    return lhs / middle


def thm2_report(R: RationalMap, x, tol: float = POINT_TOL) -> TheoremReport:
    """Candidates |(M o R)#(x)| over pairs of critical points c, k, M fixing x, c, k."""
    x = as_point(x)
    n = R.degree
    if n < 2:
        raise PreconditionError("degree must be at least 2")
    Rx = R(x)
    crit = R.critical_points()
    if any(chordal(c.critical_value, Rx) <= tol for c in crit):
        raise PreconditionError("R(x) is a critical value")
    report = TheoremReport("thm2", [], THM2_BOUND, conjectured_constant(n), strict=False)
    for c, k in itertools.combinations(crit, 2):
        if chordal(c.critical_value, k.critical_value) <= tol:
            report.skipped.append(((c.location, k.location), "equal critical values"))
            continue
        M, value = _fixing_multiplier(
            R, x, (Rx, c.critical_value, k.critical_value), (x, c.location, k.location))
        report.candidates.append(Candidate((c.location, k.location), M, value))
    return report
