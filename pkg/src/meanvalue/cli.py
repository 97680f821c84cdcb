"""Command-line entry point.

Exit codes: 0 all checks passed, 1 a checked inequality or identity was
violated (a witness file is written), 2 bad usage or input.
"""

from __future__ import annotations

import argparse
import csv
import datetime as dt
import hashlib
import json
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__, fixtures
from .complexpoly import Polynomial, RootFindingError
from .index import QuadratureError, forbidden_check, index_sum_check, index_table
from .newton import all_critical_fixed, characterize, h_condition_check, \
    newton_derivative_check, newton_map
from .ratmap import RationalMap
from .search import OBJECTIVES, ArchiveError, SearchConfig, run_search, witness_archive
from .serialize import decode_map, decode_poly, dumps, to_jsonable
from .smale import SMALE_BOUND, PreconditionError, smale_best_known_bound, smale_ratios
from .sphere import INF, as_point
from .suites import SUITES, run_suite

EXIT_OK, EXIT_VIOLATION, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass
class RunManifest:
    command: str
    config: dict
    seed: int
    version: str = __version__
    timestamp: str = ""
    inputs: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.timestamp:
            self.timestamp = dt.datetime.now(dt.timezone.utc).isoformat(timespec="seconds")


# ---------------------------------------------------------------------------
# input helpers


def parse_point(text: str):
    t = text.strip().lower().replace(" ", "")
    if t in ("inf", "infinity", "oo"):
        return INF
    try:
        return as_point(complex(t.replace("i", "j")))
    except ValueError as exc:
        raise UsageError(f"cannot parse point {text!r}") from exc


def _load_json(spec: str, inputs: dict):
    """``spec`` is a path to a JSON file or an inline JSON document."""
    path = Path(spec)
    if path.is_file():
        raw = path.read_bytes()
        inputs[str(path)] = hashlib.sha256(raw).hexdigest()
    else:
        raw = spec.encode()
        inputs["<inline>"] = hashlib.sha256(raw).hexdigest()
    try:
        return json.loads(raw)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{spec!r} is neither a readable file nor valid JSON: {exc}") from exc


def _fixture(name: str):
    try:
        return fixtures.fixture(name)
    except (KeyError, ValueError) as exc:
        raise UsageError(str(exc).strip('"')) from exc


def load_poly(args, inputs) -> Polynomial:
    if args.fixture:
        obj = _fixture(args.fixture)
        if isinstance(obj, RationalMap):
            if not obj.is_polynomial():
                raise UsageError(f"fixture {args.fixture!r} is not a polynomial")
            return obj.num.scale(1 / obj.den.coeffs[0])
        return obj
    if not args.input:
        raise UsageError("give an input file/JSON or --fixture")
    try:
        return decode_poly(_load_json(args.input, inputs))
    except ValueError as exc:
        raise UsageError(f"bad polynomial: {exc}") from exc


def load_map(args, inputs) -> RationalMap:
    if args.fixture:
        obj = _fixture(args.fixture)
        return RationalMap.from_polynomial(obj) if isinstance(obj, Polynomial) else obj
    if not args.input:
        raise UsageError("give an input file/JSON or --fixture")
    data = _load_json(args.input, inputs)
    try:
        if isinstance(data, list):
            return RationalMap.from_polynomial(decode_poly(data))
        return decode_map(data)
    except ValueError as exc:
        raise UsageError(f"bad rational map: {exc}") from exc


# ---------------------------------------------------------------------------
# output helpers


def _default_out(args, stem: str) -> Path:
    return Path(args.out) if args.out else Path(f"{stem}.json")


def emit(args, manifest: RunManifest, result, path: Path | None = None) -> dict:
    doc = {"manifest": asdict(manifest), "result": to_jsonable(result)}
    text = dumps(doc)
    path = path or (Path(args.out) if args.out else None)
    if path is not None:
        path.write_text(text + "\n")
    if not args.quiet:
        print(text)
    return doc


def write_csv(path: Path, header, rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow(["" if v is None else (repr(v) if isinstance(v, float) else v) for v in row])


def save_witness(path: Path, manifest: RunManifest, payload) -> Path:
    path.write_text(dumps({"manifest": asdict(manifest), "witness": payload}) + "\n")
    print(f"violation: witness written to {path}", file=sys.stderr)
    return path


def _config(args, *skip) -> dict:
    drop = {"func", "quiet", *skip}
    return {k: v for k, v in vars(args).items() if k not in drop}


# ---------------------------------------------------------------------------
# commands


def cmd_smale(args) -> int:
    inputs: dict = {}
    p = load_poly(args, inputs)
    x = parse_point(args.x)
    if x is INF:
        raise UsageError("x must be finite")
    try:
        ratios = smale_ratios(p, x)
    except PreconditionError as exc:
        raise UsageError(str(exc)) from exc
    S = min(r for _, r in ratios)
    n = p.degree
    result = {
        "degree": n,
        "x": x,
        "S": S,
        "ratios": [{"critical_point": c, "ratio": r} for c, r in ratios],
        "bound": SMALE_BOUND,
        "margin": SMALE_BOUND - S,
        "within_bound": S <= SMALE_BOUND,
        "conjectured_max": 1 - 1 / n,
        "best_known_bound": smale_best_known_bound(n),
    }
    manifest = RunManifest("smale", _config(args), args.seed, inputs=inputs)
    emit(args, manifest, result)
    if not result["within_bound"]:
        path = Path(args.out).with_suffix(".witness.json") if args.out else Path("smale-witness.json")
        save_witness(path, manifest, {"poly": p, "x": x, "S": S})
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.suite != "forbidden" and args.degree is None:
        raise UsageError(f"suite {args.suite!r} needs --degree")
    if args.trials < 0 or (args.degree is not None and args.degree < 2):
        raise UsageError("need --trials >= 0 and --degree >= 2")
    rep = run_suite(args.suite, args.degree, args.trials, args.seed, args.jobs, args.max_iterate)
    stem = f"verify-{args.suite}" + (f"-n{args.degree}" if args.degree else "") + f"-s{args.seed}"
    out = _default_out(args, stem)
    manifest = RunManifest("verify", _config(args), args.seed)
    result = {"suite": rep.suite, "degree": rep.degree, "trials": rep.trials,
              "ok": rep.ok, "summary": rep.summary,
              "violations": [{k: v for k, v in r.items() if k != "witness"}
                             for r in rep.violations]}
    emit(args, manifest, result, out)
    write_csv(out.with_suffix(".csv"), ("case", "trial", "value"), rep.csv_rows())
    if not rep.ok:
        save_witness(out.with_suffix(".witness.json"), manifest, rep.violations)
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_newton(args) -> int:
    inputs: dict = {}
    if args.action == "build":
        if args.fixture:
            g_num, g_den = load_poly(args, inputs), None
        else:
            if not args.input:
                raise UsageError("give an input file/JSON or --fixture")
            data = _load_json(args.input, inputs)
            try:
                if isinstance(data, dict):
                    g_num, g_den = decode_poly(data["num"]), decode_poly(data["den"])
                else:
                    g_num, g_den = decode_poly(data), None
            except (KeyError, ValueError) as exc:
                raise UsageError(f"bad input for g: {exc}") from exc
        try:
            R = newton_map(g_num, g_den)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        result = {"map": R, "degree": R.degree,
                  "critical_fixed": all_critical_fixed(R).holds}
        if g_den is None or g_den.degree == 0:
            g = g_num if g_den is None else g_num.scale(1 / g_den.coeffs[0])
            kw = {} if args.tol is None else {"tol": args.tol}
            result["h_condition"] = h_condition_check(g, **kw)
            result["derivative_identity_gap"] = newton_derivative_check(g)
    else:
        R = load_map(args, inputs)
        kw = {} if args.tol is None else {"tol": args.tol}
        result = characterize(R, **kw)
    emit(args, RunManifest(f"newton {args.action}", _config(args), args.seed, inputs=inputs),
         result)
    return EXIT_OK


def cmd_index(args) -> int:
    inputs: dict = {}
    R = load_map(args, inputs)
    try:
        summary = index_sum_check(R)
    except (QuadratureError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    tol = 1e-6 if args.tol is None else args.tol
    result = {"map": R, "total": summary.total, "deviation": summary.deviation,
              "sum_ok": summary.deviation <= tol, "fixed_points": index_table(summary)}
    ok = result["sum_ok"]
    if args.forbidden:
        try:
            rep = forbidden_check(R, args.max_iterate)
        except ValueError as exc:
            raise UsageError(str(exc)) from exc
        result["forbidden"] = rep
        ok = ok and rep.ok
    manifest = RunManifest("index", _config(args), args.seed, inputs=inputs)
    emit(args, manifest, result)
    if not ok:
        save_witness(Path(args.out).with_suffix(".witness.json") if args.out
                     else Path("index-witness.json"), manifest, result)
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_search(args) -> int:
    inputs: dict = {}
    cfg = _load_json(args.config, inputs) if args.config else {}
    if not isinstance(cfg, dict):
        raise UsageError("search config must be a JSON object")
    for key in ("degree", "objective", "restarts", "max_evals"):
        if getattr(args, key) is not None:
            cfg[key] = getattr(args, key)
    cfg.setdefault("seed", args.seed)
    try:
        config = SearchConfig(**cfg)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid search config: {exc}") from exc
    result = run_search(config, jobs=args.jobs)
    out = _default_out(args, f"search-{config.objective}-n{config.degree}-s{config.seed}")
    manifest = RunManifest("search", asdict(config), config.seed, inputs=inputs)
    try:
        witness = witness_archive(result, out.with_suffix(".witness.json"))
    except ArchiveError as exc:
        print(f"archive rejected: {exc}", file=sys.stderr)
        emit(args, manifest, result, out)
        return EXIT_VIOLATION
    emit(args, manifest, {"search": result, "witness": witness}, out)
    rows = [(t.restart, i, v) for t in result.traces for i, v in enumerate(t.best_so_far)]
    write_csv(out.with_suffix(".csv"), ("restart", "evaluation", "best_so_far"), rows)
    return EXIT_OK


def cmd_fixtures(args) -> int:
    if not args.name:
        print("\n".join(fixtures.names()))
        return EXIT_OK
    obj = _fixture(args.name)
    manifest = RunManifest("fixtures", _config(args), args.seed)
    emit(args, manifest, {"name": args.name, "kind": type(obj).__name__, "value": obj})
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def _globals(parser: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--seed", type=int, default=d(0), help="master seed (default 0)")
    parser.add_argument("--tol", type=float, default=d(None),
                        help="override the command's checking tolerance")
    parser.add_argument("--jobs", type=int, default=d(1), help="worker processes")
    parser.add_argument("--out", default=d(None), help="JSON output path")
    parser.add_argument("--quiet", action="store_true", default=d(False),
                        help="do not echo the JSON report")


def _input_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", nargs="?", help="JSON file or inline JSON")
    p.add_argument("--fixture", help="built-in example, e.g. p0:4, quartic, rh, zpow:3")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="meanvalue", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    _globals(parser, suppress=False)
    common = argparse.ArgumentParser(add_help=False)
    _globals(common, suppress=True)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("smale", parents=[common], help="S(p, x) for a polynomial")
    _input_args(p)
    p.add_argument("--x", required=True, help="base point, e.g. 0, 1+2j, 0.5-1i")
    p.set_defaults(func=cmd_smale)

    p = sub.add_parser("verify", parents=[common], help="randomized verification suites")
    p.add_argument("suite", choices=SUITES)
    p.add_argument("--degree", type=int)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--max-iterate", type=int, default=2, dest="max_iterate",
                   help="forbidden suite: also check iterates up to this order")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("newton", parents=[common], help="Newton maps")
    p.add_argument("action", choices=("build", "characterize"))
    _input_args(p)
    p.set_defaults(func=cmd_newton)

    p = sub.add_parser("index", parents=[common], help="fixed point indices")
    _input_args(p)
    p.add_argument("--forbidden", action="store_true",
                   help="also run the forbidden-disc check (all critical points fixed)")
    p.add_argument("--max-iterate", type=int, default=1, dest="max_iterate")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("search", parents=[common], help="Nelder-Mead extremal search")
    p.add_argument("config", nargs="?", help="SearchConfig JSON (file or inline)")
    p.add_argument("--degree", type=int)
    p.add_argument("--objective", choices=OBJECTIVES)
    p.add_argument("--restarts", type=int)
    p.add_argument("--max-evals", type=int, dest="max_evals")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("fixtures", parents=[common], help="list or print built-in examples")
    p.add_argument("name", nargs="?")
    p.set_defaults(func=cmd_fixtures)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except RootFindingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
