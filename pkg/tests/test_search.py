import json

import numpy as np
import pytest

from meanvalue.fixtures import p0_map, p0_polynomial
from meanvalue.search import PENALTY, ArchiveError, SearchConfig, build, dimension, \
    load_witness, objective_value, reevaluate, run_search, target, witness_archive
from meanvalue.serialize import encode_map, encode_point, encode_poly
from meanvalue.sphere import INF
from meanvalue.smale import smale_quantity, thm1_report


def test_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(3, "nope")
    with pytest.raises(ValueError):
        SearchConfig(1, "smale_max")
    with pytest.raises(ValueError):
        SearchConfig(3, "smale_max", restarts=0)
    with pytest.raises(ValueError):
        SearchConfig(3, "smale_max", max_evals=0)


def test_targets_and_dimensions():
    assert target("smale_max", 3) == pytest.approx(2 / 3)
    assert target("thm1_best_min", 2) == 2
    assert dimension("smale_max", 4) == 6
    assert dimension("thm1_best_min", 3) == 8
    assert dimension("thm2_best_min", 3) == 10


def test_build_normalization(rng):
    for objective in ("thm1_best_min", "thm2_best_min"):
        R, x, y = build(objective, 3, rng.normal(size=dimension(objective, 3)))
        assert x == 0 and R(0) == 0
        assert R.chart_derivative(0) == pytest.approx(1)
        if objective == "thm1_best_min":
            assert y is INF and R(INF) is INF
    p, x, y = build("smale_max", 3, rng.normal(size=4))
    assert p(0) == 0 and p.deriv()(0) == 1 and y is None


def test_objective_matches_direct_evaluation(rng):
    params = rng.normal(size=4)
    p, _, _ = build("smale_max", 3, params)
    assert objective_value("smale_max", 3, params) == pytest.approx(-smale_quantity(p, 0))
    params = rng.normal(size=8)
    R, x, y = build("thm1_best_min", 3, params)
    assert objective_value("thm1_best_min", 3, params) == pytest.approx(thm1_report(R, x, y).best)


def test_degenerate_params_penalized():
    # leading coefficient zero drops the degree
    assert objective_value("smale_max", 3, np.zeros(4)) == PENALTY
    # numerator z (1 + z) over (1 + z)^2 shares a factor
    params = np.array([1, 0, 2, 0, 1, 0])
    assert objective_value("thm2_best_min", 2, params) == PENALTY
    assert objective_value("thm1_best_min", 2, np.array([np.nan, 0, 1, 0])) == PENALTY


def test_search_deterministic_and_traces_monotone():
    cfg = SearchConfig(3, "smale_max", restarts=3, max_evals=200, seed=4)
    a, b = run_search(cfg), run_search(cfg)
    assert a.best_value == b.best_value and a.params == b.params
    for t in a.traces:
        diffs = np.diff(t.best_so_far)
        assert np.all(diffs >= 0)  # maximization: best-so-far never decreases
        assert t.nfev <= 200 + 10


def test_smale_search_stays_below_conjecture():
    res = run_search(SearchConfig(3, "smale_max", restarts=4, max_evals=600, seed=2))
    assert res.max_evaluated <= 2 / 3 + 1e-6
    assert res.best_value >= 0.6


def test_thm1_search_respects_bound(tmp_path):
    cfg = SearchConfig(3, "thm1_best_min", restarts=6, max_evals=250, seed=7)
    res = run_search(cfg)
    assert res.min_evaluated > 0.25
    # the functional dips below n/(n-1); keep the witness on file
    payload = witness_archive(res, tmp_path / "thm1.witness.json")
    assert payload["recomputed"] >= 0.25
    assert abs(payload["recomputed"] - res.best_value) <= 1e-8 * max(1, res.best_value)


def test_archive_round_trip(tmp_path):
    res = run_search(SearchConfig(2, "thm2_best_min", restarts=2, max_evals=150, seed=1))
    path = tmp_path / "w.json"
    written = witness_archive(res, path)
    back = load_witness(path)
    assert back == json.loads(json.dumps(written))
    assert abs(reevaluate(back) - res.best_value) <= 1e-10 * max(1, abs(res.best_value))


def test_reevaluate_known_witnesses():
    payload = {"objective": "smale_max", "degree": 3, "value": 2 / 3,
               "x": encode_point(0), "poly": encode_poly(p0_polynomial(3))}
    assert reevaluate(payload) == pytest.approx(2 / 3, abs=1e-12)
    payload = {"objective": "thm1_best_min", "degree": 3, "value": 1.5,
               "x": encode_point(0), "y": "inf", "map": encode_map(p0_map(3))}
    assert reevaluate(payload) == pytest.approx(1.5, abs=1e-10)
    with pytest.raises(ArchiveError):
        reevaluate({"objective": "smale_max", "x": [0, 0]})


def test_corrupt_witness_rejected(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(ArchiveError):
        load_witness(bad)
    bad.write_text(json.dumps({"objective": "smale_max"}))
    with pytest.raises(ArchiveError):
        load_witness(bad)
    bad.write_text(json.dumps({"objective": "x", "degree": 2, "value": 1, "x": [0, 0]}))
    with pytest.raises(ArchiveError):
        load_witness(bad)
    with pytest.raises(ArchiveError):
        load_witness(tmp_path / "missing.json")
