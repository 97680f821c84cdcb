import json

import numpy as np
import pytest
from hypothesis import given, strategies as st

from meanvalue.complexpoly import Polynomial
from meanvalue.fixtures import p0_map
from meanvalue.serialize import decode_complex, decode_map, decode_moebius, decode_point, \
    decode_poly, dumps, encode_complex, encode_map, encode_moebius, encode_point, encode_poly, \
    to_jsonable
from meanvalue.smale import thm1_report
from meanvalue.sphere import INF, MoebiusMap

cnum = st.complex_numbers(max_magnitude=1e6, allow_nan=False, allow_infinity=False)


@given(cnum)
def test_complex_round_trip(z):
    assert decode_complex(json.loads(json.dumps(encode_complex(z)))) == z


def test_point_encoding():
    assert encode_point(INF) == "inf"
    assert decode_point("inf") is INF and decode_point(" INF ") is INF
    assert decode_point([1, -2]) == 1 - 2j
    assert decode_point("1-2j") == 1 - 2j
    assert decode_point(3) == 3


def test_bad_encodings_rejected():
    with pytest.raises(ValueError):
        decode_complex([1, 2, 3])
    with pytest.raises(ValueError):
        decode_poly("z^2")
    with pytest.raises(ValueError):
        decode_map({"num": [[1, 0]]})
    with pytest.raises(ValueError):
        decode_moebius({"a": [1, 0]})


@given(st.lists(cnum, min_size=1, max_size=8))
def test_poly_round_trip(cs):
    p = Polynomial(cs)
    back = decode_poly(json.loads(json.dumps(encode_poly(p))))
    assert np.array_equal(back.coeffs, p.coeffs)


def test_moebius_round_trip():
    M = MoebiusMap(1 + 1j, 2, -0.5j, 3)
    assert decode_moebius(json.loads(json.dumps(encode_moebius(M)))).allclose(M, 1e-15)


def test_map_round_trip_exact():
    R = p0_map(4)
    back = decode_map(encode_map(R))
    assert np.array_equal(back.num.coeffs, R.num.coeffs)
    assert np.array_equal(back.den.coeffs, R.den.coeffs)


def test_to_jsonable_reports():
    rep = thm1_report(p0_map(3), 0, INF)
    out = json.loads(dumps(rep))
    assert out["best"] == pytest.approx(1.5)
    assert out["holds"] is True
    assert out["skipped"][0][0] == ["inf"]
    assert to_jsonable(float("nan")) == "nan"
    assert to_jsonable(np.array([1j, 2])) == [[0.0, 1.0], [2.0, 0.0]]
    assert to_jsonable({1: np.int64(3), "b": np.bool_(True)}) == {"1": 3, "b": True}
