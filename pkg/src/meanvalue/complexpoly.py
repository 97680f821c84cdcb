"""Complex polynomials in ascending coefficient order, with simultaneous
root-finding (Aberth-Ehrlich), Newton polishing and cluster handling."""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

EPS = np.finfo(float).eps

#: relative zero threshold for approximate GCD remainders
GCD_TOL = 1e-10
#: roots closer than this (relative to max(1, |z|)) are one multiple root
CLUSTER_TOL = 1e-6
#: wider linkage radii tried after the first pass, merged only if validated
WIDEN_STEPS = (1e-5, 1e-4, 1e-3, 1e-2)


class RootFindingError(RuntimeError):
    """Raised when the root finder fails to converge; carries the residuals."""

    def __init__(self, message: str, roots=None, residuals=None):
        super().__init__(message)
        self.roots = roots
        self.residuals = residuals


class Polynomial:
    """Polynomial with complex coefficients, ``coeffs[k]`` multiplies ``z**k``.

    Exact trailing zeros are stripped, so the zero polynomial has an empty
    coefficient array and degree -1.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[complex] | np.ndarray = ()):
        c = np.array(list(coeffs) if not isinstance(coeffs, np.ndarray) else coeffs,
                     dtype=complex).ravel()
        nz = np.flatnonzero(c)
        self.coeffs = c[: nz[-1] + 1] if nz.size else c[:0]

    # construction -----------------------------------------------------------
    @classmethod
    def constant(cls, c: complex) -> "Polynomial":
        return cls([c])

    @classmethod
    def z(cls) -> "Polynomial":
        return cls([0, 1])

    @classmethod
    def from_roots(cls, roots: Sequence[complex], leading: complex = 1.0) -> "Polynomial":
        if leading == 0:
            raise ValueError("leading coefficient must be nonzero")
        c = np.array([1.0 + 0j])
        for r in roots:
            c = np.convolve(c, [-complex(r), 1.0])
        return cls(c * leading)

    # basic properties -------------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def lead(self) -> complex:
        if not len(self.coeffs):
            return 0j
        return complex(self.coeffs[-1])

    def is_zero(self) -> bool:
        return len(self.coeffs) == 0

    def norm(self) -> float:
        """Max-abs coefficient norm."""
        return float(np.max(np.abs(self.coeffs))) if len(self.coeffs) else 0.0

    def __len__(self) -> int:
        return len(self.coeffs)

    def __repr__(self) -> str:
        return f"Polynomial({np.array2string(self.coeffs, precision=6, separator=', ')})"

    # evaluation -------------------------------------------------------------
    def __call__(self, z):
        """Horner evaluation; works elementwise on numpy arrays."""
        z = np.asarray(z, dtype=complex)
        acc = np.zeros_like(z)
        for c in self.coeffs[::-1]:
            acc = acc * z + c
        return acc if acc.ndim else complex(acc)

    def error_bound(self, z):
        """Running-error style bound sum |c_k| |z|^k used for stopping tests."""
        a = np.abs(np.asarray(z, dtype=complex))
        acc = np.zeros_like(a)
        for c in np.abs(self.coeffs[::-1]):
            acc = acc * a + c
        return acc if acc.ndim else float(acc)

    # arithmetic -------------------------------------------------------------
    def _binary(self, other):
        if isinstance(other, Polynomial):
            return other.coeffs
        return np.array([complex(other)])

    def __add__(self, other) -> "Polynomial":
        a, b = self.coeffs, self._binary(other)
        n = max(len(a), len(b))
        out = np.zeros(n, dtype=complex)
        out[: len(a)] += a
        out[: len(b)] += b
        return Polynomial(out)

    __radd__ = __add__

    def __neg__(self) -> "Polynomial":
        return Polynomial(-self.coeffs)

    def __sub__(self, other) -> "Polynomial":
        return self + (-other if isinstance(other, Polynomial) else -complex(other))

    def __rsub__(self, other) -> "Polynomial":
        return (-self) + other

    def __mul__(self, other) -> "Polynomial":
        if not isinstance(other, Polynomial):
            return Polynomial(self.coeffs * complex(other))
        if self.is_zero() or other.is_zero():
            return Polynomial()
        return Polynomial(np.convolve(self.coeffs, other.coeffs))

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "Polynomial":
        out = Polynomial([1])
        for _ in range(k):
            out = out * self
        return out

    def scale(self, c: complex) -> "Polynomial":
        return Polynomial(self.coeffs * c)

    def divrem(self, other: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        """Long division: returns (quot, rem) with self = quot*other + rem."""
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero polynomial")
        rem = self.coeffs.copy()
        dq = other.degree
        if self.degree < dq:
            return Polynomial(), Polynomial(rem)
        quot = np.zeros(self.degree - dq + 1, dtype=complex)
        lead = other.coeffs[-1]
        for k in range(self.degree - dq, -1, -1):
            q = rem[k + dq] / lead
            quot[k] = q
            rem[k: k + dq + 1] -= q * other.coeffs
            rem[k + dq] = 0
        return Polynomial(quot), Polynomial(rem[:dq])

    __divmod__ = divrem

    def __floordiv__(self, other):
        return self.divrem(other)[0]

    def __mod__(self, other):
        return self.divrem(other)[1]

    def deriv(self, k: int = 1) -> "Polynomial":
        c = self.coeffs
        for _ in range(k):
            if len(c) <= 1:
                return Polynomial()
            c = c[1:] * np.arange(1, len(c))
        return Polynomial(c)

    def monic(self) -> "Polynomial":
        if self.is_zero():
            raise ValueError("zero polynomial has no monic form")
        return Polynomial(self.coeffs / self.coeffs[-1])

    def trim(self, tol: float) -> "Polynomial":
        """Drop leading coefficients below ``tol`` times the coefficient norm."""
        c = self.coeffs
        if not len(c):
            return self
        cut = tol * np.max(np.abs(c))
        k = len(c)
        while k > 0 and abs(c[k - 1]) <= cut:
            k -= 1
        return Polynomial(c[:k])

    def padded(self, length: int) -> np.ndarray:
        out = np.zeros(length, dtype=complex)
        out[: len(self.coeffs)] = self.coeffs
        return out

    def reversed(self, formal_degree: int) -> "Polynomial":
        """``w**d * p(1/w)`` for formal degree ``d >= degree``."""
        if formal_degree < self.degree:
            raise ValueError("formal degree below actual degree")
        return Polynomial(self.padded(formal_degree + 1)[::-1])

    def allclose(self, other: "Polynomial", rtol: float = 1e-9, atol: float = 0.0) -> bool:
        n = max(len(self), len(other))
        a, b = self.padded(n), other.padded(n)
        scale = max(np.max(np.abs(a), initial=0.0), np.max(np.abs(b), initial=0.0))
        return bool(np.all(np.abs(a - b) <= atol + rtol * scale))

    def roots(self) -> np.ndarray:
        return roots(self)


# ---------------------------------------------------------------------------
# approximate GCD


def gcd(p: Polynomial, q: Polynomial, tol: float = GCD_TOL) -> Polynomial:
    """Monic approximate GCD by the Euclidean algorithm.

    Remainders whose coefficients all fall below ``tol`` relative to the
    current dividend are treated as zero.  A candidate of positive degree is
    accepted only if it divides both inputs to ``sqrt(tol)`` relative
    accuracy; otherwise the inputs are declared coprime.
    """
    if p.is_zero() and q.is_zero():
        raise ValueError("gcd of two zero polynomials")
    if q.is_zero():
        return p.monic()
    if p.is_zero():
        return q.monic()
    a, b = (p, q) if p.degree >= q.degree else (q, p)
    a = a.scale(1 / a.norm())
    b = b.scale(1 / b.norm())
    while True:
        if b.degree == 0:
            return Polynomial([1])
        _, r = a.divrem(b)
        scale = max(a.norm(), b.norm())
        if r.is_zero() or r.norm() <= tol * scale:
            g = b.monic()
            break
        a, b = b, r.trim(tol).scale(1 / r.norm())
    if g.degree > 0:
        check = math.sqrt(tol)
        for f in (p, q):
            _, rem = f.divrem(g)
            if rem.norm() > check * f.norm():
                return Polynomial([1])
    return g


# ---------------------------------------------------------------------------
# root finding


def cauchy_bound(p: Polynomial) -> float:
    """Unique positive root of |a_n| x^n - sum_{k<n} |a_k| x^k."""
    a = np.abs(p.coeffs)
    n = p.degree
    lo, hi = 0.0, 1.0 + float(np.max(a[:-1]) / a[-1])

    def f(x):
        return a[-1] * x ** n - sum(a[k] * x ** k for k in range(n))

    for _ in range(100):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            hi = mid
        else:
            lo = mid
    return hi


def _aberth(p: Polynomial, maxiter: int = 500) -> tuple[np.ndarray, np.ndarray]:
    n = p.degree
    dp = p.deriv()
    radius = cauchy_bound(p)
    if radius == 0:
        return np.zeros(n, dtype=complex), np.ones(n, dtype=bool)
    angles = 2 * np.pi * np.arange(n) / n + 0.4
    z = radius * np.exp(1j * angles)
    active = np.ones(n, dtype=bool)
    tol = 4 * (n + 1) * EPS
    for _ in range(maxiter):
        pz = p(z)
        bound = p.error_bound(z)
        active = np.abs(pz) > tol * bound
        if not active.any():
            break
        dpz = dp(z)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        inv = 1.0 / diff
        np.fill_diagonal(inv, 0.0)
        s = inv.sum(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = pz / dpz
            step = ratio / (1.0 - ratio * s)
        bad = ~np.isfinite(step)
        step[bad] = 1e-3 * (1 + np.abs(z[bad]))
        z = np.where(active, z - step, z)
    return z, active


def _newton_polish(p: Polynomial, z: complex, steps: int = 60) -> complex:
    dp = p.deriv()
    best, best_res = z, abs(p(z))
    for _ in range(steps):
        # nothing left to gain below the rounding level of the evaluation
        if best_res <= 2 * EPS * p.error_bound(best):
            break
        d = dp(best)
        if d == 0:
            break
        cand = best - p(best) / d
        res = abs(p(cand))
        if not res < best_res:
            break
        best, best_res = cand, res
    return best


def _clusters(z: np.ndarray, radius: float) -> list[list[int]]:
    """Single-linkage clusters of indices with |zi - zj| <= radius*max(1,|z|)."""
    n = len(z)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            scale = max(1.0, abs(z[i]), abs(z[j]))
            if abs(z[i] - z[j]) <= radius * scale:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    return list(groups.values())


def _polish_cluster(p: Polynomial, z: np.ndarray) -> complex:
    k = len(z)
    c = complex(np.mean(z))
    if k == 1:
        return _newton_polish(p, c)
    return _newton_polish(p.deriv(k - 1), c)


def _validates(p: Polynomial, c: complex, k: int, tol: float = 1e-9) -> bool:
    """True if p and its first k-1 derivatives all vanish at c to ``tol``."""
    q = p
    for _ in range(k):
        if abs(q(c)) > tol * max(q.error_bound(c), 1e-300):
            return False
        q = q.deriv()
    return True


def root_clusters(p: Polynomial, cluster_tol: float = CLUSTER_TOL,
                  maxiter: int = 500) -> list[tuple[complex, int]]:
    """Distinct roots of ``p`` with multiplicities.

    Exact zero low-order coefficients are deflated as exact roots at 0.
    Remaining roots come from Aberth-Ehrlich iteration started on a circle of
    the Cauchy-bound radius, then polished.  Roots within ``cluster_tol``
    merge into one multiple root, which is re-polished as a simple root of
    the appropriate derivative.  Wider clusters (up to 1e-2) are merged only
    if the multiplicity validates.
    """
    if p.degree < 1:
        raise ValueError("roots need degree >= 1")
    c = p.coeffs
    nzero = int(np.argmax(c != 0))
    out: list[tuple[complex, int]] = []
    if nzero:
        out.append((0j, nzero))
    q = Polynomial(c[nzero:])
    if q.degree == 0:
        return out
    if q.degree == 1:
        out.append((complex(-q.coeffs[0] / q.coeffs[1]), 1))
        return out
    q = q.scale(1 / q.lead)
    z, active = _aberth(q, maxiter)
    z = np.array([_newton_polish(q, zi) for zi in z])
    groups = _clusters(z, cluster_tol)
    pieces = [(_polish_cluster(q, z[g]), g) for g in groups]
    for wide in WIDEN_STEPS:
        if len(pieces) < 2:
            break
        centers = np.array([c for c, _ in pieces])
        merged_pieces = []
        for links in _clusters(centers, wide):
            if len(links) == 1:
                merged_pieces.append(pieces[links[0]])
                continue
            g = [i for k in links for i in pieces[k][1]]
            cand = _polish_cluster(q, z[g])
            if _validates(q, cand, len(g)):
                merged_pieces.append((cand, g))
            else:
                merged_pieces.extend(pieces[k] for k in links)
        pieces = merged_pieces
    residuals = []
    for center, g in pieces:
        res = abs(q(center)) / max(q.error_bound(center), 1e-300)
        residuals.append(res)
    residuals = np.array(residuals)
    if np.any(residuals > 1e-6):
        raise RootFindingError(
            "root finder did not converge", roots=z, residuals=residuals)
    out.extend((center, len(g)) for center, g in pieces)
    return out


def roots(p: Polynomial, cluster_tol: float = CLUSTER_TOL) -> np.ndarray:
    """All ``deg p`` roots, repeated according to multiplicity."""
    out = []
    for r, k in root_clusters(p, cluster_tol):
        out.extend([r] * k)
    return np.array(out, dtype=complex)


def derivative(p: Polynomial) -> Polynomial:
    return p.deriv()


def from_roots(rs: Sequence[complex], leading: complex = 1.0) -> Polynomial:
    return Polynomial.from_roots(rs, leading)
