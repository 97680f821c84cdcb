"""JSON encodings.

* complex number: ``[re, im]``
* sphere point: ``[re, im]`` or ``"inf"``
* polynomial: list of complex numbers, ascending powers
* Moebius map: ``{"a": [re, im], "b": ..., "c": ..., "d": ...}``
* rational map: ``{"num": poly, "den": poly}``
"""

from __future__ import annotations

import dataclasses
import json
import math
from typing import Any

import numpy as np

from .complexpoly import Polynomial
from .ratmap import RationalMap
from .sphere import INF, MoebiusMap, as_point


def encode_complex(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def decode_complex(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, str):
        return complex(v.replace(" ", ""))
    if not (isinstance(v, (list, tuple)) and len(v) == 2):
        raise ValueError(f"expected [re, im], got {v!r}")
    return complex(float(v[0]), float(v[1]))


def encode_point(z):
    return "inf" if z is INF else encode_complex(z)


def decode_point(v):
    if isinstance(v, str) and v.strip().lower() == "inf":
        return INF
    return as_point(decode_complex(v))


def encode_poly(p: Polynomial) -> list[list[float]]:
    return [encode_complex(c) for c in p.coeffs]


def decode_poly(v) -> Polynomial:
    if not isinstance(v, list):
        raise ValueError("polynomial must be a list of [re, im] pairs")
    return Polynomial([decode_complex(c) for c in v])


def encode_moebius(M: MoebiusMap) -> dict:
    return {k: encode_complex(getattr(M, k)) for k in "abcd"}


def decode_moebius(v) -> MoebiusMap:
    try:
        return MoebiusMap(*(decode_complex(v[k]) for k in "abcd"))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"bad Moebius encoding: {exc}") from exc


def encode_map(R: RationalMap) -> dict:
    return {"num": encode_poly(R.num), "den": encode_poly(R.den)}


def decode_map(v, reduce: bool = True) -> RationalMap:
    if not isinstance(v, dict) or "num" not in v or "den" not in v:
        raise ValueError('rational map must be {"num": [...], "den": [...]}')
    return RationalMap(decode_poly(v["num"]), decode_poly(v["den"]), reduce=reduce)


def to_jsonable(obj: Any) -> Any:
    """Recursively convert results (dataclasses, complex, INF, numpy) to JSON types."""
    if obj is INF:
        return "inf"
    if isinstance(obj, Polynomial):
        return encode_poly(obj)
    if isinstance(obj, RationalMap):
        return encode_map(obj)
    if isinstance(obj, MoebiusMap):
        return encode_moebius(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return encode_complex(obj)
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else str(f)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return [to_jsonable(x) for x in obj.tolist()]
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        out = {f.name: to_jsonable(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
        for name in ("best", "holds", "ok", "is_polynomial_case"):
            attr = getattr(type(obj), name, None)
            if isinstance(attr, property):
                out[name] = to_jsonable(getattr(obj, name))
        return out
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(x) for x in obj]
    return obj


def dumps(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True)
