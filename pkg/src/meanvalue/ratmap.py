"""Rational self-maps of the Riemann sphere."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional

import numpy as np

from .complexpoly import GCD_TOL, Polynomial, gcd, root_clusters
from .sphere import INF, MoebiusMap, SpherePoint, as_point, chordal

log = logging.getLogger(__name__)

#: |multiplier| below this marks a fixed point as critical
CRIT_TOL = 1e-8
#: chordal tolerance for "R(p) = p"
FIXED_TOL = 1e-8
#: largest degree allowed for self-composition
COMPOSE_CAP = 64


def wronskian(p: Polynomial, q: Polynomial) -> Polynomial:
    """p' q - p q', with coefficients sum_{i+j=k+1} (i-j) p_i q_j.

    Pairing terms this way makes the structural cancellation of the top
    coefficient (when deg p == deg q) exact in floating point.
    """
    if p.is_zero() or q.is_zero():
        return (p.deriv() * q - p * q.deriv())
    a, b = p.coeffs, q.coeffs
    i = np.arange(len(a))[:, None]
    j = np.arange(len(b))[None, :]
    terms = (i - j) * np.outer(a, b)
    k = (i + j - 1).ravel()
    keep = k >= 0
    out = np.zeros(len(a) + len(b) - 2 if len(a) + len(b) >= 2 else 1, dtype=complex)
    np.add.at(out, k[keep], terms.ravel()[keep])
    return Polynomial(out)


def sphere_roots(P: Polynomial, formal_degree: int) -> list[tuple[SpherePoint, int]]:
    """Zeros on the sphere of P viewed as a form of degree ``formal_degree``.

    Roots with |z| <= 1 come from P, the rest from the reversed polynomial in
    w = 1/z, where they are better conditioned.  The deficit
    formal_degree - deg P is the multiplicity at infinity.  If the two charts
    disagree on the total count (roots straddling |z| = 1) all finite roots
    are taken from P.
    """
    k_inf = formal_degree - max(P.degree, 0)
    full = root_clusters(P) if P.degree >= 1 else []
    inner = [(z, k) for z, k in full if abs(z) <= 1]
    outer = []
    if any(abs(z) > 1 for z, _ in full):
        for w, k in root_clusters(P.reversed(formal_degree)):
            if w == 0:
                continue
            z = complex(1 / w)
            if abs(w) < 1 and all(abs(z - zi) > 1e-6 for zi, _ in inner):
                outer.append((z, k))
    out = inner + outer
    if sum(k for _, k in out) != max(P.degree, 0):
        out = list(full)
    if k_inf > 0:
        out.append((INF, k_inf))
    return out


@dataclass
class CriticalPointRecord:
    location: SpherePoint
    valency: int
    critical_value: SpherePoint


@dataclass
class FixedPointRecord:
    location: SpherePoint
    multiplier: complex
    multiplicity: int
    is_critical: bool
    index: Optional[complex] = None


@dataclass
class DerivativeQuotient:
    """R' = W / den**2, left unreduced."""

    wronskian: Polynomial
    den_squared: Polynomial

    def __call__(self, z):
        return self.wronskian(z) / self.den_squared(z)


class RationalMap:
    """R = num / den in lowest terms, degree = max(deg num, deg den) >= 1.

    The approximate common factor divided out at construction is kept in
    ``removed_factor`` (the constant 1 when the inputs were coprime).
    """

    def __init__(self, num, den=None, tol: float = GCD_TOL, reduce: bool = True):
        num = num if isinstance(num, Polynomial) else Polynomial(num)
        den = Polynomial([1]) if den is None else (
            den if isinstance(den, Polynomial) else Polynomial(den))
        if den.is_zero():
            raise ValueError("denominator is the zero polynomial")
        g = Polynomial([1])
        if reduce and not num.is_zero() and max(num.degree, den.degree) >= 1:
            g = gcd(num, den, tol)
            if g.degree > 0:
                num = num // g
                den = den // g
        self.num = num
        self.den = den
        self.removed_factor = g
        if self.degree < 1:
            raise ValueError("rational map must have degree >= 1")

    @classmethod
    def from_polynomial(cls, p: Polynomial) -> "RationalMap":
        return cls(p, Polynomial([1]), reduce=False)

    @property
    def degree(self) -> int:
        return max(self.num.degree, self.den.degree)

    def __repr__(self):
        return f"RationalMap(num={self.num.coeffs!r}, den={self.den.coeffs!r})"

    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    # charts -----------------------------------------------------------------
    @cached_property
    def flipped(self) -> tuple[Polynomial, Polynomial]:
        """(N, D) with R(1/w) = N(w) / D(w)."""
        n = self.degree
        return self.num.reversed(n), self.den.reversed(n)

    @cached_property
    def wronskian(self) -> Polynomial:
        return wronskian(self.num, self.den)

    @cached_property
    def _flipped_wronskian(self) -> Polynomial:
        return wronskian(*self.flipped)

    def derivative_map(self) -> DerivativeQuotient:
        return DerivativeQuotient(self.wronskian, self.den * self.den)

    # evaluation -------------------------------------------------------------
    def _ratio(self, p: Polynomial, q: Polynomial, t: complex) -> SpherePoint:
        n, d = p(t), q(t)
        if d == 0 or abs(d) <= 1e-300 * abs(n):
            return INF
        return complex(n / d)

    def eval(self, z: SpherePoint) -> SpherePoint:
        z = as_point(z)
        if z is INF:
            if self.num.degree > self.den.degree:
                return INF
            if self.num.degree == self.den.degree:
                return self.num.lead / self.den.lead
            return 0j
        if abs(z) <= 1:
            return self._ratio(self.num, self.den, z)
        return self._ratio(*self.flipped, 1 / z)

    __call__ = eval

    def eval_array(self, z: np.ndarray) -> np.ndarray:
        """Vectorized finite evaluation (poles give complex inf)."""
        z = np.asarray(z, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.num(z) / self.den(z)

    def chart_derivative(self, z: SpherePoint) -> complex:
        """Derivative at z from the chart at z to the chart at R(z)."""
        z = as_point(z)
        u = self.eval(z)
        dom_w = z is INF or abs(z) > 1
        rng_w = u is INF or abs(u) > 1
        if dom_w:
            p, q = self.flipped
            w = self._flipped_wronskian
            t = 0j if z is INF else 1 / z
        else:
            p, q, w, t = self.num, self.den, self.wronskian, z
        if rng_w:
            local = -w(t) / p(t) ** 2
        else:
            local = w(t) / q(t) ** 2
        if dom_w and z is not INF:
            local *= -t * t
        if rng_w and u is not INF:
            local *= -u * u
        return complex(local)

    # critical points --------------------------------------------------------
    def critical_points(self) -> list[CriticalPointRecord]:
        n = self.degree
        if n < 2:
            raise ValueError("critical points need degree >= 2")
        return [CriticalPointRecord(z, k + 1, self.eval(z))
                for z, k in sphere_roots(self.wronskian, 2 * n - 2)]

    # fixed points -----------------------------------------------------------
    def fixed_polynomial(self) -> Polynomial:
        return self.num - Polynomial([0, 1]) * self.den

    def fixed_points(self) -> list[FixedPointRecord]:
        F = self.fixed_polynomial()
        if F.is_zero():
            raise ValueError("identity map has no isolated fixed points")
        out = []
        for z, k in sphere_roots(F, self.degree + 1):
            lam = self.chart_derivative(z)
            if k >= 2 and abs(lam - 1) > 1e-4:
                log.warning("fixed point %r has multiplicity %d but multiplier %r", z, k, lam)
            out.append(FixedPointRecord(z, lam, k, abs(lam) <= CRIT_TOL))
        return out

    def multiplier(self, p: SpherePoint, tol: float = FIXED_TOL) -> complex:
        p = as_point(p)
        if chordal(self.eval(p), p) > tol:
            raise ValueError(f"{p!r} is not a fixed point")
        return self.chart_derivative(p)

    # composition ------------------------------------------------------------
    def compose_moebius(self, M: MoebiusMap, side: str = "post") -> "RationalMap":
        """M o R (side="post") or R o M (side="pre")."""
        if side == "post":
            return RationalMap(self.num * M.a + self.den * M.b,
                               self.num * M.c + self.den * M.d)
        if side != "pre":
            raise ValueError("side must be 'pre' or 'post'")
        top = Polynomial([M.b, M.a])
        bot = Polynomial([M.d, M.c])
        return RationalMap(*_homogeneous_substitute(self, top, bot))

    def compose(self, other: "RationalMap") -> "RationalMap":
        """self o other."""
        return RationalMap(*_homogeneous_substitute(self, other.num, other.den))

    def self_compose(self, k: int, cap: int = COMPOSE_CAP) -> "RationalMap":
        if k < 1:
            raise ValueError("k must be >= 1")
        if self.degree ** k > cap:
            raise ValueError(f"degree {self.degree}**{k} exceeds cap {cap}")
        out = self
        for _ in range(k - 1):
            out = RationalMap(*_homogeneous_substitute(self, out.num, out.den),
                              reduce=False)
        if k > 1:
            out = RationalMap(out.num, out.den)
        return out

    def zero_pole_separation(self) -> float:
        """Smallest chordal distance between a zero and a pole of R.

        Small values mean R is close to a map of lower degree, where critical
        values are computed as ratios of tiny numbers.
        """
        n = self.degree

        def locs(p):
            out = [z for z, _ in root_clusters(p)] if p.degree >= 1 else []
            if p.degree < n:
                out.append(INF)
            return out

        zeros, poles = locs(self.num), locs(self.den)
        return min((chordal(a, b) for a in zeros for b in poles), default=2.0)

    def allclose_pointwise(self, other: "RationalMap", points, tol: float = 1e-9) -> bool:
        return all(chordal(self.eval(z), other.eval(z)) <= tol for z in points)


def _homogeneous_substitute(R: RationalMap, top: Polynomial, bot: Polynomial):
    """num(top/bot) * bot**n and den(top/bot) * bot**n with n = deg R."""
    n = R.degree
    tp = [Polynomial([1])]
    bp = [Polynomial([1])]
    for _ in range(n):
        tp.append(tp[-1] * top)
        bp.append(bp[-1] * bot)
    a = R.num.padded(n + 1)
    b = R.den.padded(n + 1)
    num = Polynomial()
    den = Polynomial()
    for i in range(n + 1):
        term = tp[i] * bp[n - i]
        if a[i] != 0:
            num = num + term * a[i]
        if b[i] != 0:
            den = den + term * b[i]
    return num, den


def moebius_as_map(M: MoebiusMap) -> RationalMap:
    return RationalMap(Polynomial([M.b, M.a]), Polynomial([M.d, M.c]))


def random_map(n: int, rng: np.random.Generator, fix_infinity: bool = False) -> RationalMap:
    """Random degree-n map, numerator and denominator coefficients i.i.d.
    uniform on [-1, 1]^2.  Resampled on degree drop or a common factor.

    With ``fix_infinity`` the denominator has degree n-1, so infinity is a
    fixed point.
    """
    while True:
        num = rng.uniform(-1, 1, n + 1) + 1j * rng.uniform(-1, 1, n + 1)
        dlen = n if fix_infinity else n + 1
        den = rng.uniform(-1, 1, dlen) + 1j * rng.uniform(-1, 1, dlen)
        R = RationalMap(num, den)
        if R.degree == n and R.removed_factor.degree == 0:
            return R
