"""Riemann sphere points, chordal metric and Moebius maps.

A sphere point is either a Python ``complex`` or the singleton :data:`INF`.
Derivatives of maps between sphere points use one global chart convention:
the identity chart at finite points and ``w = 1/z`` at infinity, on both the
source and target side.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

#: chordal distance below which two points count as equal
POINT_TOL = 1e-10
DET_TOL = 1e-14


class _Infinity:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()

SpherePoint = Union[complex, _Infinity]


def is_inf(z) -> bool:
    return z is INF


def as_point(z) -> SpherePoint:
    """Coerce ``z`` to a sphere point; "inf", None-free inputs and
    non-finite complex values map to :data:`INF`."""
    if z is INF:
        return INF
    if isinstance(z, str):
        if z.strip().lower() in ("inf", "infinity", "∞"):
            return INF
        return complex(z.replace(" ", ""))
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        return INF
    return z


def homogeneous(z: SpherePoint) -> tuple[complex, complex]:
    """Normalized homogeneous coordinates [z1 : z2]."""
    if z is INF:
        return 1 + 0j, 0j
    z = complex(z)
    if abs(z) <= 1:
        return z, 1 + 0j
    return 1 + 0j, 1 / z


def chordal(a: SpherePoint, b: SpherePoint) -> float:
    """Chordal distance 2|a-b| / sqrt((1+|a|^2)(1+|b|^2)), in [0, 2]."""
    a1, a2 = homogeneous(a)
    b1, b2 = homogeneous(b)
    num = abs(a1 * b2 - a2 * b1)
    den = math.sqrt((abs(a1) ** 2 + abs(a2) ** 2) * (abs(b1) ** 2 + abs(b2) ** 2))
    return 2 * num / den


def same_point(a: SpherePoint, b: SpherePoint, tol: float = POINT_TOL) -> bool:
    return chordal(a, b) <= tol


def cross_ratio(a, b, c, d) -> complex:
    """(a, b; c, d) = (a-c)(b-d) / ((a-d)(b-c)), with limits at infinity."""
    def D(p, q):
        p1, p2 = homogeneous(p)
        q1, q2 = homogeneous(q)
        return p1 * q2 - p2 * q1

    num = D(a, c) * D(b, d)
    den = D(a, d) * D(b, c)
    if den == 0:
        if num == 0:
            raise ValueError("cross ratio undefined for this configuration")
        return INF
    return num / den


def _normalize(a, b, c, d):
    det = a * d - b * c
    scale = max(abs(a), abs(b), abs(c), abs(d))
    if scale == 0 or abs(det) <= DET_TOL * scale * scale:
        raise ValueError("singular Moebius matrix")
    s = cmath.sqrt(det)
    a, b, c, d = a / s, b / s, c / s, d / s
    big = max((a, b, c, d), key=abs)
    if big.real < 0 or (big.real == 0 and big.imag < 0):
        a, b, c, d = -a, -b, -c, -d
    return complex(a), complex(b), complex(c), complex(d)


@dataclass(frozen=True)
class MoebiusMap:
    """z -> (a z + b) / (c z + d), stored with determinant 1."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        a, b, c, d = _normalize(complex(self.a), complex(self.b),
                                complex(self.c), complex(self.d))
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "d", d)

    @classmethod
    def identity(cls) -> "MoebiusMap":
        return cls(1, 0, 0, 1)

    @classmethod
    def from_matrix(cls, m) -> "MoebiusMap":
        m = np.asarray(m, dtype=complex)
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)

    def __call__(self, z: SpherePoint) -> SpherePoint:
        z1, z2 = homogeneous(z)
        w1 = self.a * z1 + self.b * z2
        w2 = self.c * z1 + self.d * z2
        if w2 == 0 or abs(w2) <= 1e-300 * abs(w1):
            return INF
        return w1 / w2

    def compose(self, other: "MoebiusMap") -> "MoebiusMap":
        """self after other."""
        return MoebiusMap.from_matrix(self.matrix @ other.matrix)

    __matmul__ = compose

    def inverse(self) -> "MoebiusMap":
        return MoebiusMap(self.d, -self.b, -self.c, self.a)

    def is_affine(self, tol: float = 1e-14) -> bool:
        return abs(self.c) <= tol * max(abs(self.a), abs(self.d))

    def deriv(self, z: SpherePoint) -> complex:
        return deriv_in_charts(self, z)

    def allclose(self, other: "MoebiusMap", tol: float = 1e-9) -> bool:
        m, n = self.matrix, other.matrix
        return bool(min(np.max(np.abs(m - n)), np.max(np.abs(m + n))) <= tol)


def apply(M: MoebiusMap, z: SpherePoint) -> SpherePoint:
    return M(z)


def deriv_in_charts(M: MoebiusMap, z: SpherePoint) -> complex:
    """Derivative of M at z in the global chart convention."""
    a, b, c, d = M.a, M.b, M.c, M.d
    w = M(z)
    if z is not INF:
        if w is not INF:
            return 1 / (c * z + d) ** 2
        # target chart 1/u: (cz+d)/(az+b)
        return -1 / (a * z + b) ** 2
    if w is not INF:
        # source chart: M(1/t) = (a + b t)/(c + d t)
        return -1 / c ** 2
    # both charts: t -> (c + d t)/(a + b t) with c = 0
    return d / a


def _to_standard(z1, z2, z3) -> MoebiusMap:
    """Moebius map sending z1, z2, z3 to 0, 1, INF."""
    if z1 is INF:
        return MoebiusMap(0, z2 - z3, 1, -z3)
    if z2 is INF:
        return MoebiusMap(1, -z1, 1, -z3)
    if z3 is INF:
        return MoebiusMap(1, -z1, 0, z2 - z1)
    return MoebiusMap(z2 - z3, -z1 * (z2 - z3), z2 - z1, -z3 * (z2 - z1))


def _check_distinct(pts, tol):
    for i in range(3):
        for j in range(i + 1, 3):
            if chordal(pts[i], pts[j]) <= tol:
                raise ValueError(f"coincident points {pts[i]!r} and {pts[j]!r}")


def from_three_points(src, dst, tol: float = POINT_TOL) -> MoebiusMap:
    """The unique Moebius map with M(src[i]) = dst[i]."""
    src = [as_point(p) for p in src]
    dst = [as_point(p) for p in dst]
    _check_distinct(src, tol)
    _check_distinct(dst, tol)
    A = _to_standard(*src)
    B = _to_standard(*dst)
    return B.inverse() @ A


def random_moebius(rng: np.random.Generator, max_cond: float = 20.0) -> MoebiusMap:
    """Random well-conditioned Moebius map (entries uniform in the unit square)."""
    while True:
        m = rng.uniform(-1, 1, (2, 2)) + 1j * rng.uniform(-1, 1, (2, 2))
        if np.linalg.cond(m) <= max_cond:
            return MoebiusMap.from_matrix(m)
