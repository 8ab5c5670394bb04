"""Command-line front end.

Exit codes: 0 ok, 2 malformed input, 3 invalid state, 4 size mismatch,
5 file I/O failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from . import bounds, correlation, optimizer, states, svetlichny
from .states import SchemaError, StateError
from .svetlichny import DimensionError

EXIT_OK = 0
EXIT_SCHEMA = 2
EXIT_STATE = 3
EXIT_DIMENSION = 4
EXIT_IO = 5

SCAN_HEADER = ["theta", "p", "bound", "classical_bound", "tight", "violates", "optimized_value"]


class CLIError(Exception):
    def __init__(self, code: int, message: str, payload: dict | None = None):
        super().__init__(message)
        self.code = code
        self.payload = payload


def _fmt(x: float) -> str:
    return format(float(x) + 0.0, ".17g")


def _read_json(path: str) -> dict:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise CLIError(EXIT_IO, f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise CLIError(EXIT_SCHEMA, f"{path}: malformed JSON ({exc.msg})") from None


def _load_state(path: str):
    doc = _read_json(path)
    if not isinstance(doc, dict):
        raise CLIError(EXIT_SCHEMA, f"{path}: state must be a JSON object")
    return doc, states.state_from_dict(doc)


def _load_settings(path: str):
    doc = _read_json(path)
    if not isinstance(doc, dict):
        raise CLIError(EXIT_SCHEMA, f"{path}: settings must be a JSON object")
    return svetlichny.settings_from_dict(doc)


def _ghz_params(doc: dict):
    if doc.get("type") == "ghz":
        return doc["n"], math.pi / 4, 1.0
    if doc.get("type") == "noisy_ghz":
        return doc["n"], float(doc["theta"]), float(doc["p"])
    return None


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise CLIError(EXIT_IO, f"cannot write {out}: {exc.strerror}") from None


def _dump(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


# -- subcommands -------------------------------------------------------------


def cmd_bound(args) -> int:
    doc, state = _load_state(args.state)
    report = bounds.state_bound(state)
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["n_qubits", "parity", *[f"sigma{i}" for i in range(1, 10)],
                    "bound", "classical_bound", "violation_possible"])
        w.writerow([report.n_qubits, report.parity, *[_fmt(s) for s in report.singular_values],
                    _fmt(report.bound), _fmt(report.classical_bound), int(report.violation_possible)])
        _emit(buf.getvalue(), args.out)
        return EXIT_OK
    out = report.to_dict()
    ghz = _ghz_params(doc)
    if ghz is not None:
        out["ghz_closed_form"] = bounds.corollary_ghz_report(*ghz)
    _emit(_dump(out), args.out)
    return EXIT_OK


def cmd_expectation(args) -> int:
    _, state = _load_state(args.state)
    settings = _load_settings(args.settings)
    if settings.n != state.n_qubits:
        raise CLIError(EXIT_DIMENSION,
                       f"state has {state.n_qubits} qubits but settings have {settings.n} parties")
    m = correlation.correlation_matrix(state)
    via = svetlichny.expectation_via_decomposition(m, settings, args.variant)
    out = {"variant": args.variant, "decomposition": via, "direct": None, "difference": None}
    if state.n_qubits <= states.dense_cap():
        rho = states.density_from_pure(state) if isinstance(state, states.PureState) else state
        direct = svetlichny.expectation_direct(rho, settings, args.variant)
        out["direct"] = direct
        out["difference"] = abs(direct - via)
    out["classical_bound"] = bounds.classical_bound(state.n_qubits)
    _emit(_dump(out), args.out)
    return EXIT_OK


def cmd_optimize(args) -> int:
    _, state = _load_state(args.state)
    res = optimizer.maximize_expectation(state, restarts=args.restarts, seed=args.seed, tol=args.tol,
                                         variant=args.variant)
    _emit(_dump(res.to_dict()), args.out)
    return EXIT_OK


def cmd_tightness(args) -> int:
    doc, state = _load_state(args.state)
    m = correlation.correlation_matrix(state)
    ghz = _ghz_params(doc)
    if args.settings is not None:
        settings, source = _load_settings(args.settings), "file"
        if settings.n != state.n_qubits:
            raise CLIError(EXIT_DIMENSION,
                           f"state has {state.n_qubits} qubits but settings have {settings.n} parties")
    elif ghz is not None:
        settings, source = bounds.corollary_optimal_settings(state.n_qubits), "ghz_xy_plane"
    else:
        res = optimizer.maximize_expectation(state, restarts=args.restarts, seed=args.seed)
        settings, source = res.best_settings, "seesaw"
    cert = bounds.tightness_certificate(m, settings)
    report = bounds.gs_upper_bound(m)
    out = cert.to_dict()
    out["settings_source"] = source
    out["settings"] = settings.to_dict()
    out["classical_bound"] = report.classical_bound
    if not report.violation_possible:
        out["notes"].append("bound does not exceed the classical bound; no violation is possible")
    if ghz is not None:
        out["ghz_closed_form"] = bounds.corollary_ghz_report(*ghz)
    _emit(_dump(out), args.out)
    return EXIT_OK


def cmd_dump_correlation(args) -> int:
    _, state = _load_state(args.state)
    _emit(correlation.matrix_to_csv(correlation.correlation_matrix(state)), args.out)
    return EXIT_OK


def scan_ghz(n: int, thetas, ps, optimize: bool = False, restarts: int = 16, seed: int = 0):
    """Rows over a (theta, p) grid for the noisy generalized GHZ family.

    The correlation tensor of p|psi><psi| + (1-p) I/2^N is exactly p times that
    of |psi>, so singular values, bounds, achievable values and the optimal
    settings are computed once per theta and scaled by p.
    """
    classical = bounds.classical_bound(n)
    xy = bounds.corollary_optimal_settings(n)
    rows = []
    for theta in thetas:
        tensor = correlation.correlation_tensor(states.generalized_ghz(n, float(theta)))
        m = correlation.matrix_from_tensor(tensor)
        s = bounds.gs_upper_bound(m).singular_values
        unit_bound = bounds.bound_from_singular_values(n, s)
        degenerate = s[0] == 0 or (s[0] - s[1]) / s[0] <= bounds.DEGENERACY_TOL
        unit_xy = abs(svetlichny.expectation_via_decomposition(m, xy))
        unit_opt = None
        if optimize:
            unit_opt = optimizer.maximize_expectation(tensor, restarts=restarts, seed=seed).best_value
        for p in ps:
            p = float(p)
            bound = p * unit_bound
            tight = bool(degenerate or p == 0.0)
            achieved = p * unit_xy if tight else 0.0
            violates = bound > classical + bounds.CLASSICAL_SLACK and achieved > classical + bounds.VIOLATION_MARGIN
            rows.append({
                "theta": float(theta),
                "p": p,
                "bound": bound,
                "classical_bound": classical,
                "tight": int(tight),
                "violates": int(violates),
                "optimized_value": None if unit_opt is None else p * unit_opt,
            })
    return rows


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(SCAN_HEADER)
    for r in rows:
        w.writerow([
            _fmt(r["theta"]), _fmt(r["p"]), _fmt(r["bound"]), _fmt(r["classical_bound"]),
            r["tight"], r["violates"],
            "" if r["optimized_value"] is None else _fmt(r["optimized_value"]),
        ])
    return buf.getvalue()


def cmd_scan_ghz(args) -> int:
    if args.theta_steps < 2 or args.p_steps < 2:
        raise CLIError(EXIT_SCHEMA, "step counts must be >= 2")
    if not 0.0 <= args.p_min <= args.p_max <= 1.0:
        raise CLIError(EXIT_SCHEMA, "p range must lie inside [0, 1]")
    if args.n < 3 or args.n > states.pure_cap():
        raise CLIError(EXIT_STATE, f"n must be in 3..{states.pure_cap()}")
    thetas = np.linspace(args.theta_min, args.theta_max, args.theta_steps)
    ps = np.linspace(args.p_min, args.p_max, args.p_steps)
    rows = scan_ghz(args.n, thetas, ps, optimize=args.optimize, restarts=args.restarts, seed=args.seed)
    _emit(rows_to_csv(rows), args.out)
    return EXIT_OK


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gsbound",
        description="Upper bounds, tightness checks and see-saw optimization for "
                    "generalized Svetlichny operators on N-qubit states.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_out(p):
        p.add_argument("--out", "-o", default=None, help="write output to this file instead of stdout")

    p = sub.add_parser("bound", help="singular values and the upper bound for a state")
    p.add_argument("state", help="state JSON file")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    add_out(p)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("expectation", help="<S> for given settings, direct and via the decomposition")
    p.add_argument("state")
    p.add_argument("settings", help="settings JSON file")
    p.add_argument("--variant", choices=svetlichny.VARIANTS, default="minus")
    add_out(p)
    p.set_defaults(func=cmd_expectation)

    p = sub.add_parser("optimize", help="see-saw maximization over measurement directions")
    p.add_argument("state")
    p.add_argument("--restarts", type=int, default=optimizer.DEFAULT_RESTARTS)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=optimizer.DEFAULT_TOL)
    p.add_argument("--variant", choices=svetlichny.VARIANTS, default="minus")
    add_out(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("tightness", help="check whether settings attain the bound")
    p.add_argument("state")
    p.add_argument("settings", nargs="?", default=None)
    p.add_argument("--restarts", type=int, default=optimizer.DEFAULT_RESTARTS)
    p.add_argument("--seed", type=int, default=0)
    add_out(p)
    p.set_defaults(func=cmd_tightness)

    p = sub.add_parser("scan-ghz", help="(theta, p) grid for noisy generalized GHZ states, as CSV")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--theta-min", type=float, default=0.0)
    p.add_argument("--theta-max", type=float, default=math.pi / 4)
    p.add_argument("--theta-steps", type=int, default=101)
    p.add_argument("--p-min", type=float, default=0.0)
    p.add_argument("--p-max", type=float, default=1.0)
    p.add_argument("--p-steps", type=int, default=101)
    p.add_argument("--optimize", action="store_true", help="also run the see-saw optimizer per theta")
    p.add_argument("--restarts", type=int, default=16)
    p.add_argument("--seed", type=int, default=0)
    add_out(p)
    p.set_defaults(func=cmd_scan_ghz)

    p = sub.add_parser("dump-correlation", help="correlation matrix as CSV (columns c11..c33)")
    p.add_argument("state")
    add_out(p)
    p.set_defaults(func=cmd_dump_correlation)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CLIError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except SchemaError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SCHEMA
    except StateError as exc:
        print(_dump(exc.report()), file=sys.stderr, end="")
        return EXIT_STATE
    except DimensionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIMENSION


if __name__ == "__main__":
    sys.exit(main())
