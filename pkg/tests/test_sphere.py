import math
import pickle

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from meanvalue.sphere import INF, MoebiusMap, apply, as_point, chordal, cross_ratio, \
    deriv_in_charts, from_three_points, random_moebius, same_point

cnum = st.complex_numbers(max_magnitude=5.0, allow_nan=False, allow_infinity=False)
points = st.one_of(cnum, st.just(INF))


@st.composite
def moebius(draw):
    a, b, c, d = (draw(st.complex_numbers(max_magnitude=2.0, allow_nan=False,
                                          allow_infinity=False)) for _ in range(4))
    m = np.array([[a, b], [c, d]])
    assume(np.linalg.cond(m) < 50)
    return MoebiusMap(a, b, c, d)


def stereo(z):
    """Unit-sphere embedding; chordal distance is Euclidean distance there."""
    if z is INF:
        return np.array([0.0, 0.0, 1.0])
    r2 = abs(z) ** 2
    return np.array([2 * z.real, 2 * z.imag, r2 - 1]) / (r2 + 1)


def test_chordal_examples():
    assert chordal(0, INF) == 2
    assert chordal(1 + 2j, 1 + 2j) == 0
    assert chordal(INF, INF) == 0
    assert math.isclose(chordal(1, -1), 2.0)


@given(points, points)
def test_chordal_matches_stereographic(a, b):
    ref = np.linalg.norm(stereo(a) - stereo(b))
    assert abs(chordal(a, b) - ref) <= 1e-12
    assert chordal(a, b) == chordal(b, a)
    assert 0 <= chordal(a, b) <= 2


def test_as_point_parsing():
    assert as_point("inf") is INF
    assert as_point(complex("inf")) is INF
    assert as_point("1+2j") == 1 + 2j
    assert pickle.loads(pickle.dumps(INF)) is INF


def test_apply_examples():
    assert apply(MoebiusMap.identity(), 3 - 1j) == 3 - 1j
    inv = MoebiusMap(0, 1, 1, 0)
    assert apply(inv, 0) is INF
    assert apply(inv, INF) == 0
    assert apply(MoebiusMap(1, 1, 0, 1), INF) is INF
    M = MoebiusMap(1, 2, 3, 4)
    assert apply(M, -4 / 3) is INF
    assert abs(apply(M, INF) - 1 / 3) < 1e-15


def test_singular_rejected():
    with pytest.raises(ValueError):
        MoebiusMap(1, 2, 2, 4)
    with pytest.raises(ValueError):
        MoebiusMap(0, 0, 0, 0)


@given(moebius())
def test_normalization(M):
    assert abs(M.a * M.d - M.b * M.c - 1) <= 1e-12
    big = max((M.a, M.b, M.c, M.d), key=abs)
    assert big.real >= 0


def test_from_three_points_examples():
    assert from_three_points((0, 1, INF), (0, 1, INF)).allclose(MoebiusMap.identity())
    M = from_three_points((0, 1, INF), (INF, 1, 0))
    assert M.allclose(MoebiusMap(0, 1, 1, 0))
    with pytest.raises(ValueError):
        from_three_points((0, 0, 1), (0, 1, 2))
    with pytest.raises(ValueError):
        from_three_points((0, 1, 2), (1, 1e-12 + 1, 3))


@given(points, points, points, points, points, points)
def test_from_three_points_interpolates(a, b, c, x, y, z):
    src, dst = (a, b, c), (x, y, z)
    for tri in (src, dst):
        assume(all(chordal(tri[i], tri[j]) > 1e-2 for i in range(3) for j in range(i + 1, 3)))
    M = from_three_points(src, dst)
    for s, d in zip(src, dst):
        assert chordal(M(s), d) <= 1e-9
    back = from_three_points(dst, src)
    assert (back @ M).allclose(MoebiusMap.identity(), 1e-8)


def test_cross_ratio_examples():
    lam = 0.3 + 0.7j
    # the formula's limit at c = inf gives (lam - 1)/lam
    assert abs(cross_ratio(0, 1, INF, lam) - (lam - 1) / lam) < 1e-14
    assert cross_ratio(2, 5, 2, 7) == 0


@given(moebius(), cnum, cnum, cnum, cnum)
def test_cross_ratio_invariant(M, a, b, c, d):
    pts = [a, b, c, d]
    assume(all(abs(p - q) > 1e-2 for i, p in enumerate(pts) for q in pts[i + 1:]))
    before = cross_ratio(a, b, c, d)
    after = cross_ratio(*(M(p) for p in pts))
    assert abs(before - after) <= 1e-10 * max(1.0, abs(before)) * 1e2


def test_deriv_examples():
    assert deriv_in_charts(MoebiusMap(2, 5, 0, 1), 1.5 + 1j) == pytest.approx(2)
    a = 3 - 1j
    assert deriv_in_charts(MoebiusMap(a, 0, 0, 1), INF) == pytest.approx(1 / a)
    assert deriv_in_charts(MoebiusMap(0, 1, 1, 0), 1) == pytest.approx(-1)


@given(moebius(), cnum)
def test_deriv_matches_finite_difference(M, z):
    w = M(z)
    assume(w is not INF and abs(w) < 1e3 and abs(z) < 4)
    h = 1e-6
    fd = (M(z + h) - M(z - h)) / (2 * h)
    assert abs(deriv_in_charts(M, z) - fd) <= 1e-5 * max(1.0, abs(fd))


@given(moebius(), moebius(), points)
def test_chain_rule(M, N, z):
    lhs = deriv_in_charts(M @ N, z)
    rhs = deriv_in_charts(M, N(z)) * deriv_in_charts(N, z)
    assume(math.isfinite(abs(rhs)) and abs(rhs) < 1e6)
    assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(rhs)) * 1e3


def test_chain_rule_through_infinity():
    N = MoebiusMap(0, 1, 1, -2)  # sends 2 to INF
    M = MoebiusMap(1, 3, 1, 1)
    for z in (2, INF, 0.5j):
        lhs = deriv_in_charts(M @ N, z)
        rhs = deriv_in_charts(M, N(z)) * deriv_in_charts(N, z)
        assert abs(lhs - rhs) <= 1e-12


@given(moebius(), moebius(), moebius())
def test_group_laws(A, B, C):
    assert (A @ A.inverse()).allclose(MoebiusMap.identity(), 1e-12 * 1e2)
    assert ((A @ B) @ C).allclose(A @ (B @ C), 1e-9)


def test_random_moebius_conditioning():
    rng = np.random.default_rng(0)
    for _ in range(20):
        M = random_moebius(rng, max_cond=5)
        assert np.linalg.cond(M.matrix) <= 5 + 1e-9


def test_same_point_tolerance():
    assert same_point(1e12, INF, 1e-10)
    assert not same_point(1.0, 1.0 + 1e-6)
