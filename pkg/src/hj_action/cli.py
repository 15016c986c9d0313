"""Command-line front end.

Subcommands
-----------
trajectory   integrate an initial state and write ``t,y,p,E,phase`` samples
extremal     solve the endpoint boundary-value problem, report its constants
action       closed-form action next to the Lagrangian quadrature oracle
verify-hj    Hamilton-Jacobi residuals, one record per configuration
verify-map   linearization map invariants per hierarchy index
sweep        closed form vs oracle over seeded random configurations

Settings come from built-in defaults, then ``--config`` (a JSON object whose
keys are the long flag names with ``_`` for ``-``), then explicit flags.

Exit codes: 0 success, 1 usage error, 2 verification threshold violated,
3 numerical or solver failure (including any non-finite output value).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .action import action_closed_form, action_harmonic_feynman, action_harmonic_new, action_numeric_oracle, action_quartic
from .errors import HJActionError
from .extremals import (
    BVP_TOL,
    EndpointData,
    _phase_value,
    extremal_through,
    momentum_endpoint_a,
    momentum_endpoint_b,
    solve_endpoint_bvp,
)
from .hj_verify import hj_residuals
from .linearization import QUAD_TOL, coord_forward, coord_inverse, dt_dthat, dthat_dt, harmonic_extremal, newton_residual, time_reparam
from .oscillator import DEFAULT_TOL, OscillatorParams, State, hamiltonian, integrate
from .sampling import config_rng, random_configuration, random_params

EXIT_OK, EXIT_USAGE, EXIT_THRESHOLD, EXIT_SOLVER = 0, 1, 2, 3

COMMANDS = ("trajectory", "extremal", "action", "verify-hj", "verify-map", "sweep")

DEFAULTS = {
    "n": None,
    "mass": 1.0,
    "k2n": 1.0,
    "omega": 1.0,
    "ta": None,
    "ya": None,
    "tb": None,
    "yb": None,
    "pa": 0.0,
    "branch": 0,
    "tol_ivp": DEFAULT_TOL,
    "tol_quad": DEFAULT_TOL,
    "fd_step": None,
    "seed": 0,
    "count": None,
    "samples": 1001,
    "threshold": None,
    "random_params": False,
    "out": None,
    "format": None,
}

# per-command fallbacks for settings left unset above
COMMAND_DEFAULTS = {
    "trajectory": {"n": "2", "ta": 0.0, "ya": 1.0, "tb": 10.0, "format": "csv"},
    "extremal": {"n": "2", "ta": 0.0, "ya": 0.2, "tb": 1.0, "yb": 0.5, "format": "json"},
    "action": {"n": "2", "ta": 0.0, "ya": 0.2, "tb": 1.0, "yb": 0.5, "format": "json"},
    "verify-hj": {"n": "1,2,3", "count": 25, "threshold": 1e-5, "format": "json"},
    "verify-map": {"n": "1,2,3", "threshold": 1e-6, "format": "json"},
    "sweep": {"n": "1,2,3", "count": 100, "threshold": 1e-6, "format": "json"},
}

ROUND_TRIP_TOL = 1e-12
CHAIN_RULE_TOL = 1e-10


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hj-action", description="Closed-form action of even-power oscillators and its verification.")
    parser.add_argument("command", choices=COMMANDS)
    S = argparse.SUPPRESS
    parser.add_argument("--n", type=str, default=S, help="hierarchy index, or a comma list for suites")
    parser.add_argument("--mass", type=float, default=S)
    parser.add_argument("--k2n", type=float, default=S)
    parser.add_argument("--omega", type=float, default=S, help="auxiliary harmonic frequency")
    parser.add_argument("--ta", type=float, default=S)
    parser.add_argument("--ya", type=float, default=S)
    parser.add_argument("--tb", type=float, default=S)
    parser.add_argument("--yb", type=float, default=S)
    parser.add_argument("--pa", type=float, default=S, help="initial momentum (trajectory)")
    parser.add_argument("--branch", type=int, default=S, help="interior turning points of the extremal")
    parser.add_argument("--tol-ivp", dest="tol_ivp", type=float, default=S)
    parser.add_argument("--tol-quad", dest="tol_quad", type=float, default=S)
    parser.add_argument("--fd-step", dest="fd_step", type=float, default=S, help="relative finite-difference step")
    parser.add_argument("--seed", type=int, default=S)
    parser.add_argument("--count", type=int, default=S, help="configurations per n in suites")
    parser.add_argument("--samples", type=int, default=S, help="rows written by trajectory")
    parser.add_argument("--threshold", type=float, default=S)
    parser.add_argument("--random-params", dest="random_params", action="store_true", default=S)
    parser.add_argument("--out", type=str, default=S, help="output path (default stdout)")
    parser.add_argument("--format", choices=("csv", "json"), default=S)
    parser.add_argument("--config", type=str, default=None, help="JSON file of settings")
    return parser


def resolve_settings(args: argparse.Namespace) -> dict:
    settings = dict(DEFAULTS)
    if args.config is not None:
        try:
            with open(args.config) as fh:
                from_file = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(from_file, dict):
            raise UsageError("config must be a JSON object")
        unknown = set(from_file) - set(DEFAULTS)
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        settings.update(from_file)
    for key, value in vars(args).items():
        if key not in ("command", "config"):
            settings[key] = value
    for key, value in COMMAND_DEFAULTS[args.command].items():
        if settings[key] is None:
            settings[key] = value
    settings["n"] = _parse_n(settings["n"])
    if settings["format"] not in ("csv", "json"):
        raise UsageError(f"format must be csv or json, got {settings['format']!r}")
    return settings


def _parse_n(value) -> list[int]:
    items = value if isinstance(value, list) else str(value).split(",")
    try:
        ns = [int(v) for v in items]
    except ValueError as exc:
        raise UsageError(f"bad --n {value!r}") from exc
    if not ns or min(ns) < 1:
        raise UsageError("--n must be positive integers")
    return ns


def _single_n(settings) -> int:
    if len(settings["n"]) != 1:
        raise UsageError("this command takes a single --n")
    return settings["n"][0]


def _params(settings, n) -> OscillatorParams:
    try:
        return OscillatorParams(n=n, mass=settings["mass"], k2n=settings["k2n"], omega=settings["omega"])
    except (TypeError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def _endpoints(settings) -> EndpointData:
    try:
        return EndpointData(settings["ta"], settings["ya"], settings["tb"], settings["yb"])
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad endpoints: {exc}") from exc


def _error_name(exc: BaseException) -> str:
    # ConjugatePoints -> "ConjugatePoints (PhaseSingularity)"
    names = [k.__name__ for k in type(exc).__mro__ if issubclass(k, HJActionError) and k is not HJActionError]
    return names[0] if len(names) == 1 else f"{names[0]} ({', '.join(names[1:])})"


def _workers() -> int:
    raw = os.environ.get("HJ_ACTION_THREADS")
    if raw is None:
        return os.cpu_count() or 1
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _map_ordered(fn, tasks):
    """``[fn(t) for t in tasks]`` on a worker pool; results keep task order."""
    workers = min(_workers(), len(tasks))
    if workers <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks, chunksize=1))


# --- commands ----------------------------------------------------------------


def cmd_trajectory(settings) -> tuple[list[dict], bool]:
    params = _params(settings, _single_n(settings))
    t_a, t_b = settings["ta"], settings["tb"]
    state = State(t_a, settings["ya"], settings["pa"])
    rows = 1 if t_a == t_b else settings["samples"]
    if rows < 1:
        raise UsageError("--samples must be >= 1")
    lo, hi = min(t_a, t_b), max(t_a, t_b)
    ext = extremal_through(params, state, lo, hi, tol=settings["tol_ivp"])
    ts = np.linspace(lo, hi, rows)
    ys, ps = ext.traj(ts)
    records = [
        {
            "t": float(t),
            "y": float(y),
            "p": float(p),
            "E": float(hamiltonian(params, y, p)),
            "phase": _phase_value(ext, ext.t_max, float(t)),
        }
        for t, y, p in zip(ts, np.atleast_1d(ys), np.atleast_1d(ps))
    ]
    return records, True


def cmd_extremal(settings) -> tuple[list[dict], bool]:
    params = _params(settings, _single_n(settings))
    ep = _endpoints(settings)
    ext = solve_endpoint_bvp(params, ep, settings["branch"])
    record = {
        "n": params.n,
        "branch": settings["branch"],
        **_ep_fields(ep),
        "y_max": ext.y_max,
        "t_max": ext.t_max,
        "E": ext.E,
        "period": ext.period,
        "p_a": ext.p_a,
        "p_b": float(ext.p(ep.t_b)),
        "mismatch_a": abs(float(ext.y(ep.t_a)) - ep.y_a),
        "mismatch_b": abs(float(ext.y(ep.t_b)) - ep.y_b),
        "p_a_formula": momentum_endpoint_a(ext, ep.t_a),
        "p_b_formula": momentum_endpoint_b(ext, ep.t_b),
    }
    return [record], True


def _ep_fields(ep: EndpointData) -> dict:
    return {"t_a": ep.t_a, "y_a": ep.y_a, "t_b": ep.t_b, "y_b": ep.y_b}


def _action_record(params, ep, ext) -> dict:
    closed = action_closed_form(ext, ep).value
    oracle = action_numeric_oracle(ext, ep).value
    record = {
        "n": params.n,
        **_ep_fields(ep),
        "y_max": ext.y_max,
        "t_max": ext.t_max,
        "E": ext.E,
        "closed_form": closed,
        "oracle": oracle,
        "gap": abs(closed - oracle) / (1.0 + abs(oracle)),
    }
    if params.n == 2:
        record["quartic"] = action_quartic(ext, ep).value
    if params.n == 1:
        record["harmonic_new"] = action_harmonic_new(ext, ep).value
        omega_eff = math.sqrt(params.k2n / params.mass)
        record["harmonic_feynman"] = action_harmonic_feynman(ep, params.mass, omega_eff).value
    return record


def cmd_action(settings) -> tuple[list[dict], bool]:
    params = _params(settings, _single_n(settings))
    ep = _endpoints(settings)
    ext = solve_endpoint_bvp(params, ep, settings["branch"])
    return [_action_record(params, ep, ext)], True


def _suite_params(settings, n, rng):
    if settings["random_params"]:
        return random_params(rng, n, harmonic=(n == 1))
    return OscillatorParams(n=n, mass=settings["mass"], k2n=settings["k2n"], omega=settings["omega"])


def _failure(n, index, exc) -> dict:
    return {"n": n, "index": index, "error": _error_name(exc), "message": str(exc)}


def _hj_task(task) -> dict:
    n, index, settings = task
    try:
        if index is None:
            params = _params(settings, n)
            ep, branch = _endpoints(settings), settings["branch"]
        else:
            rng = config_rng(settings["seed"], n, index)
            params = _suite_params(settings, n, rng)
            config = random_configuration(rng, params, recoverable=True, tol=settings["tol_ivp"])
            ep, branch = config.ep, config.branch
        report = hj_residuals(params, ep, fd_step=settings["fd_step"], branch=branch)
    except HJActionError as exc:
        return _failure(n, index, exc)
    record = {"index": index, **report.to_dict()}
    record["passed"] = report.max_residual <= settings["threshold"]
    return record


def cmd_verify_hj(settings) -> tuple[list[dict], bool]:
    single = any(settings[k] is not None for k in ("ta", "ya", "tb", "yb"))
    if single:
        _endpoints(settings)
        tasks = [(n, None, settings) for n in settings["n"]]
    else:
        tasks = [(n, i, settings) for n in settings["n"] for i in range(settings["count"])]
    records = _map_ordered(_hj_task, tasks)
    return records, all(r.get("passed", False) for r in records if "error" not in r)


def _map_task(task) -> dict:
    n, settings = task
    params = _params(settings, n)
    x_max, omega = 1.0, params.omega
    T_hat = 2.0 * math.pi / omega
    x = harmonic_extremal(x_max, 0.0, omega)
    record = {"n": n}
    try:
        ys = np.linspace(-3.0, 3.0, 601)
        record["round_trip"] = float(np.max(np.abs(coord_inverse(params, coord_forward(params, ys)) - ys)))
        tm = time_reparam(params, x, (-0.25 * T_hat, 1.25 * T_hat), tol=min(settings["tol_quad"], QUAD_TOL))
        grid = np.linspace(-0.2 * T_hat, 1.2 * T_hat, 141)
        # the five-point stencil needs |x| bounded away from zero, where y(t_hat) ~ |x|^(1/n) has a cusp
        away = grid[np.abs(x(grid)) > 0.1 * x_max]
        record["transport_residual"] = max(abs(newton_residual(params, tm, s)) for s in away)
        xs = x(away)
        record["chain_rule"] = float(np.max(np.abs(dt_dthat(params, xs) * dthat_dt(params, coord_inverse(params, xs)) - 1.0)))
        ts = tm(grid)
        record["monotone"] = bool(np.all(np.diff(ts) > 0.0))
        if n == 1:
            record["identity_residual"] = float(np.max(np.abs(ts - grid))) if params.k2n == params.k2 else None
    except HJActionError as exc:
        return _failure(n, None, exc)
    record["passed"] = bool(
        record["transport_residual"] <= settings["threshold"]
        and record["round_trip"] <= ROUND_TRIP_TOL
        and record["chain_rule"] <= CHAIN_RULE_TOL
        and record["monotone"]
    )
    return record


def cmd_verify_map(settings) -> tuple[list[dict], bool]:
    records = _map_ordered(_map_task, [(n, settings) for n in settings["n"]])
    return records, all(r.get("passed", False) for r in records if "error" not in r)


def _sweep_task(task) -> dict:
    n, index, settings = task
    try:
        rng = config_rng(settings["seed"], n, index)
        params = _suite_params(settings, n, rng)
        config = random_configuration(rng, params, tol=settings["tol_ivp"])
        record = {"index": index, "branch": config.branch, **_action_record(params, config.ep, config.ext)}
    except HJActionError as exc:
        return _failure(n, index, exc)
    record["passed"] = record["gap"] <= settings["threshold"]
    return record


def cmd_sweep(settings) -> tuple[list[dict], bool]:
    tasks = [(n, i, settings) for n in settings["n"] for i in range(settings["count"])]
    records = _map_ordered(_sweep_task, tasks)
    return records, all(r.get("passed", False) for r in records if "error" not in r)


HANDLERS = {
    "trajectory": cmd_trajectory,
    "extremal": cmd_extremal,
    "action": cmd_action,
    "verify-hj": cmd_verify_hj,
    "verify-map": cmd_verify_map,
    "sweep": cmd_sweep,
}


# --- output ------------------------------------------------------------------


def _flatten(record: dict, prefix: str = "") -> dict:
    flat = {}
    for key, value in record.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, name + "."))
        else:
            flat[name] = value
    return flat


def _finite(value) -> bool:
    if isinstance(value, dict):
        return all(_finite(v) for v in value.values())
    if isinstance(value, (list, tuple)):
        return all(_finite(v) for v in value)
    if isinstance(value, float):
        return math.isfinite(value)
    return True


def _plain(value):
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    if isinstance(value, np.generic):
        return value.item()
    return value


def _csv_cell(value) -> str:
    if isinstance(value, float):
        return f"{value:.17g}"
    if value is None:
        return ""
    return str(value)


def render(records: list[dict], fmt: str) -> str:
    records = [_plain(r) for r in records]
    if fmt == "json":
        return "".join(json.dumps(r, allow_nan=False) + "\n" for r in records)
    flat = [_flatten(r) for r in records]
    header: list[str] = []
    for row in flat:
        header.extend(k for k in row if k not in header)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\r\n")
    writer.writerow(header)
    for row in flat:
        writer.writerow([_csv_cell(row.get(k)) for k in header])
    return buf.getvalue()


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = resolve_settings(args)
        records, passed = HANDLERS[args.command](settings)
    except UsageError as exc:
        print(f"hj-action: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except HJActionError as exc:
        print(f"hj-action: solver failure: {_error_name(exc)}: {exc}", file=sys.stderr)
        return EXIT_SOLVER

    if not _finite([_plain(r) for r in records]):
        print("hj-action: solver failure: non-finite value in output; nothing written", file=sys.stderr)
        return EXIT_SOLVER
    text = render(records, settings["format"])
    if settings["out"] is None:
        try:
            sys.stdout.write(text)
            sys.stdout.flush()
        except BrokenPipeError:
            # reader closed early (e.g. `| head`); keep the status code, drop the rest
            sys.stdout = open(os.devnull, "w")
    else:
        with open(settings["out"], "w", newline="") as fh:
            fh.write(text)

    failures = [r for r in records if "error" in r]
    for r in failures:
        print(f"hj-action: solver failure: n={r['n']} index={r['index']}: {r['error']}: {r['message']}", file=sys.stderr)
    if failures:
        return EXIT_SOLVER
    if not passed:
        print("hj-action: verification threshold violated", file=sys.stderr)
        return EXIT_THRESHOLD
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
