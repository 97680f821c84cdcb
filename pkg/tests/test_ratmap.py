import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from meanvalue.complexpoly import Polynomial
from meanvalue.fixtures import p0_map, quartic_h, quartic_newton, zpow
from meanvalue.newton import newton_map
from meanvalue.ratmap import RationalMap, moebius_as_map, random_map, sphere_roots, wronskian
from meanvalue.serialize import decode_map, encode_map
from meanvalue.sphere import INF, MoebiusMap, chordal, random_moebius

Z2 = zpow(2)


def locs(records):
    return [r.location for r in records]


def has_point(pts, p, tol=1e-9):
    return any(chordal(q, p) <= tol for q in pts)


def test_eval_examples():
    assert Z2(INF) is INF
    assert quartic_newton()(0) == pytest.approx(-4 / 5)
    assert RationalMap([1, 0, 1], [0, 2])(0) is INF
    R = RationalMap([1, 2], [3, 4])
    assert R(INF) == pytest.approx(0.5)
    assert RationalMap([1], [0, 1])(INF) == 0


def test_eval_far_points_use_flipped_chart():
    R = RationalMap([1, 0, 0, 2], [1, 1, 1])
    for z in (1e8 + 1e8j, -3e4j, 1e150):
        direct = (1 + 2 * z ** 3) / (1 + z + z * z) if abs(z) < 1e100 else 2 * z
        assert abs(R(z) - direct) <= 1e-12 * abs(direct)


def test_reduction_reports_removed_factor():
    R = RationalMap(Polynomial.from_roots([1, -2]), Polynomial.from_roots([1, -3]))
    assert R.degree == 1
    assert R.removed_factor.monic().allclose(Polynomial([-1, 1]))


def test_invalid_maps_rejected():
    with pytest.raises(ValueError):
        RationalMap([1, 2], [0])
    with pytest.raises(ValueError):
        RationalMap([3], [2])


def test_derivative_map_examples():
    assert Z2.wronskian.allclose(Polynomial([0, 2]))
    dq = Z2.derivative_map()
    assert dq(1.5) == pytest.approx(3)
    inv = RationalMap([1], [0, 1])
    assert inv.derivative_map()(2.0) == pytest.approx(-1 / 4)


def test_wronskian_structured_matches_naive(rng):
    for _ in range(20):
        p = Polynomial(rng.normal(size=5) + 1j * rng.normal(size=5))
        q = Polynomial(rng.normal(size=5) + 1j * rng.normal(size=5))
        naive = p.deriv() * q - p * q.deriv()
        assert wronskian(p, q).allclose(naive, rtol=1e-12, atol=1e-12)


def test_newton_derivative_identity(rng):
    g = quartic_h()
    R = newton_map(g)
    dq = R.derivative_map()
    for z in rng.uniform(-2, 2, 20) + 1j * rng.uniform(-2, 2, 20):
        ref = g(z) * g.deriv(2)(z) / g.deriv()(z) ** 2
        assert abs(dq(z) - ref) <= 1e-9 * max(1.0, abs(ref))


def test_critical_points_examples():
    for n in range(2, 7):
        cps = zpow(n).critical_points()
        assert sorted((str(c.location), c.valency) for c in cps) == [("0j", n), ("INF", n)]
    cps = p0_map(3).critical_points()
    val = {("INF" if c.location is INF else round(c.location.real)): c.valency for c in cps}
    assert val == {1: 2, -1: 2, "INF": 3}
    cps = quartic_newton().critical_points()
    assert sorted(c.valency for c in cps) == [2, 2, 3, 3]
    assert all(c.location is not INF for c in cps)
    # valency-3 points are the roots of z^2 + z + 1
    for c in cps:
        if c.valency == 3:
            assert abs(c.location ** 2 + c.location + 1) < 1e-9


def test_critical_needs_degree_two():
    with pytest.raises(ValueError):
        RationalMap([1, 2], [3, 1]).critical_points()


def test_fixed_points_examples():
    fp = Z2.fixed_points()
    assert len(fp) == 3
    for p in (0, 1, INF):
        assert has_point(locs(fp), p)
    fp = p0_map(3).fixed_points()
    for p in (0, 1, -1, INF):
        assert has_point(locs(fp), p)
    fp = quartic_newton().fixed_points()
    roots_h = [r for r in np.roots(quartic_h().coeffs[::-1])]
    for r in roots_h:
        assert has_point(locs(fp), complex(r), 1e-9)
    assert has_point(locs(fp), INF)


def test_identity_has_no_isolated_fixed_points():
    with pytest.raises(ValueError):
        RationalMap([0, 1], [1]).fixed_points()


def test_multiplier_examples():
    for n in range(2, 6):
        assert p0_map(n).multiplier(INF) == 0
        assert p0_map(n).multiplier(0) == pytest.approx(n / (n - 1))
    assert quartic_newton().multiplier(INF) == pytest.approx(4 / 3)
    with pytest.raises(ValueError):
        Z2.multiplier(2)


def test_multiplier_at_infinity_is_reciprocal_slope():
    # R(z) ~ a z at infinity gives multiplier 1/a
    R = RationalMap([1, 0, 3 + 1j], [2, 1])
    assert R.multiplier(INF) == pytest.approx(1 / (3 + 1j))


def test_compose_moebius_examples(rng):
    R = random_map(3, rng)
    same = R.compose_moebius(MoebiusMap.identity(), "post")
    assert same.allclose_pointwise(R, [0.3, 1j, -2, INF])
    shifted = Z2.compose_moebius(MoebiusMap(1, 1, 0, 1), "post")
    assert shifted.num.allclose(Polynomial([1, 0, 1]))
    with pytest.raises(ValueError):
        Z2.compose_moebius(MoebiusMap.identity(), "side")


def test_compose_moebius_pointwise(rng):
    for _ in range(20):
        R = random_map(int(rng.integers(2, 5)), rng)
        M = random_moebius(rng)
        post = R.compose_moebius(M, "post")
        pre = R.compose_moebius(M, "pre")
        assert post.degree == pre.degree == R.degree
        for z in rng.uniform(-2, 2, 20) + 1j * rng.uniform(-2, 2, 20):
            assert chordal(post(z), M(R(z))) <= 1e-9
            assert chordal(pre(z), R(M(z))) <= 1e-9


def test_newton_of_cubic_conjugate_to_p0():
    # g = z^3 + z; conjugating R_g by 1/z gives (z^3 + 3z)/2 = -i p0(iz)
    J = MoebiusMap(0, 1, 1, 0)
    C = newton_map(Polynomial([0, 1, 0, 1])).compose_moebius(J, "pre").compose_moebius(J, "post")
    p0 = p0_map(3)
    for z in (0.3, 1 + 1j, -0.7j, 2.5):
        assert abs(C(z) - (-1j) * p0(1j * z)) <= 1e-12 * max(1, abs(C(z)))


def test_self_compose_examples():
    R8 = Z2.self_compose(3)
    assert R8.degree == 8 and R8.num.allclose(Polynomial([0] * 8 + [1]))
    with pytest.raises(ValueError):
        Z2.self_compose(7)
    with pytest.raises(ValueError):
        Z2.self_compose(0)


def test_self_compose_squares_multipliers(rng):
    R = random_map(3, rng)
    R2 = R.self_compose(2)
    for fp in R.fixed_points():
        mu = R2.multiplier(fp.location, tol=1e-7)
        assert abs(mu - fp.multiplier ** 2) <= 1e-6 * max(1.0, abs(mu))


def test_self_compose_keeps_critical_points():
    for R in (quartic_newton(), p0_map(3), zpow(3), zpow(4)):
        R2 = R.self_compose(2)
        assert R2.degree == R.degree ** 2
        for c in R.critical_points():
            assert abs(R2.chart_derivative(c.location)) <= 1e-8
    # for z^n the critical set does not grow
    for n in (3, 4):
        R2 = zpow(n).self_compose(2)
        assert sorted(str(c.location) for c in R2.critical_points()) == ["0j", "INF"]


def test_self_compose_critical_set_grows_for_p0():
    # preimages of fixed critical points are new critical points of the iterate
    R2 = p0_map(3).self_compose(2)
    pts = locs(R2.critical_points())
    for p in (1, -1, INF, 2, -2):
        assert has_point(pts, p, 1e-8)


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_count_invariants(n):
    rng = np.random.default_rng(100 + n)
    for _ in range(200):
        R = random_map(n, rng)
        assert sum(c.valency - 1 for c in R.critical_points()) == 2 * n - 2
        assert sum(f.multiplicity for f in R.fixed_points()) == n + 1


def test_multiple_fixed_point_has_multiplier_one():
    R = RationalMap([0, 1, 1])  # z + z^2: double fixed point at 0
    fps = {str(f.location): f for f in R.fixed_points()}
    assert fps["0j"].multiplicity == 2
    assert abs(fps["0j"].multiplier - 1) < 1e-12
    assert fps["INF"].multiplicity == 1


def test_multiplier_conjugation_invariant(rng):
    for _ in range(30):
        R = random_map(int(rng.integers(2, 5)), rng)
        M = random_moebius(rng)
        C = R.compose_moebius(M.inverse(), "pre").compose_moebius(M, "post")
        for fp in R.fixed_points():
            lam = C.multiplier(M(fp.location), tol=1e-7)
            assert abs(lam - fp.multiplier) <= 1e-8 * max(1.0, abs(lam))


def test_multiplier_finite_difference(rng):
    for _ in range(30):
        R = random_map(3, rng)
        for fp in R.fixed_points():
            p = fp.location
            if p is INF or abs(p) > 5:
                continue
            eps = 1e-6
            slope = (R(p + eps) - R(p - eps)) / (2 * eps)
            assert abs(slope - fp.multiplier) <= 1e-4 * max(1.0, abs(slope))


def test_sphere_roots_counts_infinity():
    P = Polynomial([1, 0, 1])
    out = sphere_roots(P, 4)
    assert (INF, 2) in out
    assert sum(k for _, k in out) == 4


def test_moebius_as_map():
    M = MoebiusMap(1, 2, 3, 5)
    R = moebius_as_map(M)
    assert R.degree == 1 and chordal(R(0.4j), M(0.4j)) < 1e-14


@settings(max_examples=30)
@given(st.integers(1, 5), st.integers(0, 2**32 - 1))
def test_json_round_trip(n, seed):
    R = random_map(n, np.random.default_rng(seed))
    back = decode_map(encode_map(R))
    assert back.allclose_pointwise(R, [0, 1j, -3, INF], 1e-12)


def test_zero_pole_separation():
    near = RationalMap([1, 1], [1 + 1e-6, 1, 0])
    assert near.zero_pole_separation() < 1e-5
    assert Z2.zero_pole_separation() == 2.0
