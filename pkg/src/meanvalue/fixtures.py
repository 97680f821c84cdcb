"""Named example maps: the extremal polynomial family, the quartic Newton
map and the power maps."""

from __future__ import annotations

import numpy as np

from .complexpoly import Polynomial
from .newton import newton_map
from .ratmap import RationalMap


def p0_polynomial(n: int) -> Polynomial:
    """(z^n - n z) / (1 - n): critical points are the (n-1)-th roots of unity, all fixed."""
    if n < 2:
        raise ValueError("n must be >= 2")
    c = np.zeros(n + 1, dtype=complex)
    c[n] = 1
    c[1] = -n
    return Polynomial(c / (1 - n))


def p0_map(n: int) -> RationalMap:
    return RationalMap.from_polynomial(p0_polynomial(n))


def quartic_h() -> Polynomial:
    """z^4 + 2z^3 + 6z^2 + 5z + 4 = (z^2 + z + 4)(z^2 + z + 1)."""
    return Polynomial([4, 5, 6, 2, 1])


def quartic_newton() -> RationalMap:
    return newton_map(quartic_h())


def zpow(n: int) -> RationalMap:
    c = np.zeros(n + 1)
    c[n] = 1
    return RationalMap.from_polynomial(Polynomial(c))


_REGISTRY = {
    "p0": p0_polynomial,
    "quartic": lambda: quartic_h(),
    "rh": lambda: quartic_newton(),
    "zpow": zpow,
}


def names() -> list[str]:
    return ["p0:<n>", "quartic", "rh", "zpow:<n>"]


def fixture(name: str):
    """Look up ``p0:4``, ``quartic``, ``rh`` or ``zpow:3``.

    ``p0`` and ``quartic`` are polynomials; ``rh`` and ``zpow`` are maps.
    """
    key, _, arg = name.partition(":")
    if key not in _REGISTRY:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(names())}")
    if key in ("p0", "zpow"):
        if not arg:
            raise KeyError(f"fixture {key!r} needs a degree, e.g. {key}:3")
        return _REGISTRY[key](int(arg))
    return _REGISTRY[key]()


def fixture_map(name: str) -> RationalMap:
    obj = fixture(name)
    return RationalMap.from_polynomial(obj) if isinstance(obj, Polynomial) else obj


def critical_fixed_fixtures() -> list[tuple[str, RationalMap]]:
    """Maps with every critical point fixed: p0 (n=2..6), rh, z^n (n=3..6)."""
    out = [(f"p0:{n}", p0_map(n)) for n in range(2, 7)]
    out.append(("rh", quartic_newton()))
    out.extend((f"zpow:{n}", zpow(n)) for n in range(3, 7))
    return out
