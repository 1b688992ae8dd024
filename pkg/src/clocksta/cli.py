"""Command-line entry point.

    clocksta [--config c.json] [--out DIR] [--workers N] [--seedless] <command> ...

Commands write CSV/JSON into ``--out`` (created if missing) or to stdout
when no directory is given.  Values in the ``--config`` file fill any
option not given on the command line; keys are the option names with
dashes replaced by underscores.  Exit codes: 0 ok, 1 failed validation,
2 configuration error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

from . import __version__
from .averages import ClockSpec, closed_form_report, vacuum_closed_forms
from .errors import ClockSTAError, InvalidParameterError
from .figures import FIGURES, FigureDefaults, figure_tables, profile_rows, with_overrides
from .gaussian import GaussianState, coherent_state
from .integrate import ODETolerances
from .oracle import DEFAULT_NODES, mixture_observables_oracle
from .perturbation import expand_map, linear_response
from .protocols import STASchedule, make_finite_protocol, make_infinite_protocol, protocol_from_dict, with_tau
from .sweep import (
    OBSERVABLE_COLUMNS,
    PERTURB_COLUMNS,
    SWEEP_COLUMNS,
    RunManifest,
    SweepSpec,
    csv_text,
    install_seedless_guard,
    parse_grid,
    parse_mu,
    run_perturb,
    run_sweep,
)
from .symplectic import bogoliubov_from_symplectic, propagate

EXIT_OK, EXIT_FAILED, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3

# closed form vs oracle tolerances used by `validate` (relative)
VALIDATE_TOL = {"F_HS": 1e-3, "P_mix": 1e-3, "delta_E_bar": 1e-2, "sigma_E2_bar": 5e-2, "R_E": 1e-2}


class ConfigError(Exception):
    pass


# ---------------------------------------------------------------- helpers

def _read_json(path) -> dict:
    text = Path(path).read_text()  # OSError propagates as an I/O failure
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc


def _protocol_desc(value) -> dict:
    if value is None:
        raise ConfigError("a protocol is required (--protocol FILE|finite|infinite or config 'protocol')")
    if isinstance(value, dict):
        return value
    if value in ("finite", "infinite"):
        return (make_finite_protocol(1.0, 2.0, 1.0) if value == "finite"
                else make_infinite_protocol(1.0, 2.0, 1.0)).to_dict()
    return _read_json(value)


def _input_state(value):
    if value is None:
        return None
    return value if isinstance(value, dict) else _read_json(value)


def _emit(args, name: str, text: str):
    if args.out is None:
        sys.stdout.write(text)
        return
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / name).write_text(text)


def _header(command: str, **kw) -> dict:
    h = {"command": command, "version": __version__}
    h.update({k: v for k, v in kw.items() if v is not None})
    return h


def _write_table(args, name, columns, results, spec_dict, header):
    rows = [r.row for r in results if r.row is not None]
    _emit(args, f"{name}.csv", csv_text(columns, rows, header))
    manifest = RunManifest.build(spec_dict, results, len(results))
    if args.out is not None:
        _emit(args, f"{name}.manifest.json", manifest.to_json() + "\n")
    bad = manifest.totals["error"]
    if bad:
        print(f"{name}: {bad} of {len(results)} points failed (see manifest)", file=sys.stderr)


def _tolerances(args) -> ODETolerances:
    return ODETolerances(args.rtol, args.atol)


# ---------------------------------------------------------------- commands

def cmd_protocol(args) -> int:
    proto = protocol_from_dict(_protocol_desc(args.protocol))
    if args.tau is not None:
        proto = with_tau(proto, args.tau)
    rows = profile_rows(STASchedule(proto), args.n_t)
    header = _header("protocol", protocol=proto.to_dict())
    _emit(args, "protocol.csv", csv_text(["t", "omega2", "sta_omega2", "delta_omega2"], rows, header))
    return EXIT_OK


def cmd_trajectory(args) -> int:
    proto = protocol_from_dict(_protocol_desc(args.protocol))
    if args.tau is not None:
        proto = with_tau(proto, args.tau)
    S, sol = propagate(STASchedule(proto), args.v, _tolerances(args))
    pair = bogoliubov_from_symplectic(S)
    doc = {
        "protocol": proto.to_dict(), "v": args.v, "S": S.matrix.tolist(),
        "alpha": [pair.alpha.real, pair.alpha.imag], "beta": [pair.beta.real, pair.beta.imag],
        "wronskian_drift": sol.wronskian_drift, "steps": sol.steps,
        "min_omega2": sol.min_omega2, "omega_in": S.omega_in, "omega_out": S.omega_out,
    }
    _emit(args, "trajectory.json", json.dumps(doc, indent=2) + "\n")
    return EXIT_OK


def _sweep_spec(args, **kw) -> SweepSpec:
    return SweepSpec(_protocol_desc(args.protocol), rtol=args.rtol, atol=args.atol, **kw)


def cmd_perturb(args) -> int:
    spec = _sweep_spec(args, taus=parse_grid(args.tau_grid))
    results = run_perturb(spec, args.workers, args.seedless)
    header = _header("perturb", protocol=spec.protocol, tau_grid=str(args.tau_grid))
    _write_table(args, "perturb", PERTURB_COLUMNS + ["status"], results, spec.to_dict(), header)
    return EXIT_OK


def cmd_observables(args) -> int:
    mu = parse_mu(args.mu)
    spec = _sweep_spec(
        args, taus=parse_grid(args.tau_grid), sigmas=(args.sigma_v,), mu_abs=(abs(mu),),
        mu_phase=(math.atan2(mu.imag, mu.real),), method=args.method, n_nodes=args.n,
        input_state=_input_state(args.input_state),
    )
    results = run_sweep(spec, args.workers, args.seedless)
    header = _header("observables", protocol=spec.protocol, tau_grid=str(args.tau_grid),
                     sigma_v=args.sigma_v, mu=str(args.mu), method=args.method)
    _write_table(args, "observables", OBSERVABLE_COLUMNS + ["status"], results, spec.to_dict(), header)
    return EXIT_OK


def cmd_sweep(args) -> int:
    spec = _sweep_spec(
        args, taus=parse_grid(args.tau_grid), sigmas=parse_grid(args.sigma_grid),
        mu_abs=parse_grid(args.mu_abs_grid), mu_phase=parse_grid(args.mu_phase_grid),
        method=args.method, n_nodes=args.n, input_state=_input_state(args.input_state),
    )
    results = run_sweep(spec, args.workers, args.seedless)
    header = _header("sweep", config_hash=spec.config_hash(), protocol=spec.protocol)
    _write_table(args, "sweep", SWEEP_COLUMNS, results, spec.to_dict(), header)
    return EXIT_OK


def validation_table(schedule, state, clock, n, tolerances, vacuum: bool):
    """Rows (quantity, closed, oracle, rel_err, tol, passed) comparing closed forms to quadrature."""
    pmap = expand_map(schedule, tolerances=tolerances)
    cf = closed_form_report(pmap, state, clock)
    orc = mixture_observables_oracle(schedule, state, clock, n, tolerances=tolerances)
    rows = []

    def add(name, a, b, tol):
        if a is None or b is None:
            rows.append((name, a, b, None, tol, False))
            return
        err = abs(a - b) / max(abs(b), 1e-300)
        rows.append((name, a, b, err, tol, err <= tol))

    add("F_HS", cf.F_HS, orc.F_HS, VALIDATE_TOL["F_HS"])
    add("P_mix", cf.P_mix, orc.P_mix, VALIDATE_TOL["P_mix"])
    if clock.sigma_v > 0:
        add("delta_E_bar", cf.delta_E_bar, orc.delta_E_bar, VALIDATE_TOL["delta_E_bar"])
        add("sigma_E2_bar", cf.sigma_E2_bar, orc.sigma_E2_bar, VALIDATE_TOL["sigma_E2_bar"])
        add("R_E", cf.R_E, orc.R_E, VALIDATE_TOL["R_E"])
    if vacuum:
        b1 = abs(linear_response(pmap, None).beta1)
        F, P = vacuum_closed_forms(b1, clock)
        add("vacuum F_HS", F, orc.F_HS, VALIDATE_TOL["F_HS"])
        add("vacuum P/P0", P, orc.P_mix / orc.P0, VALIDATE_TOL["P_mix"])
    for rep in (cf, orc):
        slack = rep.tur_slack
        rows.append((f"-2lnF - dS2 ({rep.method})", slack, 0.0, None, -1e-10, slack >= -1e-10))
    return rows


def cmd_validate(args) -> int:
    proto = protocol_from_dict(_protocol_desc(args.protocol))
    if args.tau is not None:
        proto = with_tau(proto, args.tau)
    schedule = STASchedule(proto)
    state = _input_state(args.input_state)
    mu = parse_mu(args.mu)
    if state is not None:
        state = GaussianState.from_dict(state)
        vacuum = False
    else:
        state = coherent_state(mu, 1.0, schedule.omega_in)
        vacuum = mu == 0
    rows = validation_table(schedule, state, ClockSpec(args.sigma_v), args.n, _tolerances(args), vacuum)
    lines = [f"{'quantity':<28}{'closed':>16}{'oracle':>16}{'rel_err':>12}{'tol':>10}  result"]
    for name, a, b, err, tol, ok in rows:
        fa = "" if a is None else f"{a:.9g}"
        fb = "" if b is None else f"{b:.9g}"
        fe = "" if err is None else f"{err:.2e}"
        lines.append(f"{name:<28}{fa:>16}{fb:>16}{fe:>12}{tol:>10.0e}  {'PASS' if ok else 'FAIL'}")
    _emit(args, "validate.txt", "\n".join(lines) + "\n")
    return EXIT_OK if all(r[5] for r in rows) else EXIT_FAILED


def cmd_figures(args) -> int:
    overrides = {}
    for item in args.set or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        k, v = item.split("=", 1)
        try:
            overrides[k] = json.loads(v)
        except json.JSONDecodeError:
            overrides[k] = v
    defaults = with_overrides(FigureDefaults(), overrides)
    ids = FIGURES if args.id == "all" else (args.id,)
    for fig in ids:
        for name, (cols, rows, results) in figure_tables(fig, defaults, args.workers, args.seedless).items():
            header = _header("figures", figure=name)
            if results:
                _write_table(args, name, cols, results, {"figure": name, **defaults.__dict__}, header)
            else:
                _emit(args, f"{name}.csv", csv_text(cols, rows, header))
    return EXIT_OK


# ---------------------------------------------------------------- parser

def _globals_parent(suppress: bool) -> argparse.ArgumentParser:
    d = argparse.SUPPRESS if suppress else None
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", default=d, help="JSON file with default option values")
    p.add_argument("--out", default=d, help="output directory (stdout if omitted)")
    p.add_argument("--workers", type=int, default=d, help="worker processes for sweeps")
    p.add_argument("--seedless", action="store_true", default=d,
                   help="fail if any random number generator is called")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="clocksta", description=__doc__.split("\n\n")[0],
                                     parents=[_globals_parent(False)])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    g = [_globals_parent(True)]

    def common(p, tau_grid=False):
        p.add_argument("--protocol", help="protocol JSON file, or 'finite'/'infinite' for the defaults")
        p.add_argument("--rtol", type=float)
        p.add_argument("--atol", type=float)
        if tau_grid:
            p.add_argument("--tau-grid", help="'log:a:b:n', 'lin:a:b:n' or a comma list")

    p = sub.add_parser("protocol", parents=g, help="schedule, STA frequency and deviation profile")
    common(p)
    p.add_argument("--tau", type=float)
    p.add_argument("--n-t", type=int)
    p.set_defaults(func=cmd_protocol)

    p = sub.add_parser("trajectory", parents=g, help="single-realization map S_v and (alpha, beta)")
    common(p)
    p.add_argument("--v", type=float)
    p.add_argument("--tau", type=float)
    p.set_defaults(func=cmd_trajectory)

    p = sub.add_parser("perturb", parents=g, help="alpha1, beta1 over a tau grid")
    common(p, tau_grid=True)
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("observables", parents=g, help="clock-averaged figures of merit over tau")
    common(p, tau_grid=True)
    p.add_argument("--sigma-v", type=float)
    p.add_argument("--mu", help="'re,im' or 'abs+phase'")
    p.add_argument("--method", choices=("closed", "oracle", "both"))
    p.add_argument("--input-state", help="Gaussian state JSON {d, V}; overrides --mu")
    p.add_argument("--n", type=int, help="quadrature nodes for the oracle")
    p.set_defaults(func=cmd_observables)

    p = sub.add_parser("validate", parents=g, help="closed forms against the quadrature oracle")
    common(p)
    p.add_argument("--tau", type=float)
    p.add_argument("--sigma-v", type=float)
    p.add_argument("--mu")
    p.add_argument("--input-state")
    p.add_argument("--n", type=int)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("figures", parents=g, help="data tables for fig1-fig4")
    p.add_argument("--id", choices=FIGURES + ("all",))
    p.add_argument("--set", action="append", metavar="KEY=VALUE",
                   help="override a figure default (JSON value), repeatable")
    p.set_defaults(func=cmd_figures)

    p = sub.add_parser("sweep", parents=g, help="Cartesian sweep over tau, sigma_v and mu")
    common(p, tau_grid=True)
    p.add_argument("--sigma-grid")
    p.add_argument("--mu-abs-grid")
    p.add_argument("--mu-phase-grid")
    p.add_argument("--method", choices=("closed", "oracle", "both"))
    p.add_argument("--input-state")
    p.add_argument("--n", type=int)
    p.set_defaults(func=cmd_sweep)
    return parser


DEFAULTS = {
    "workers": 1, "seedless": False, "rtol": 1e-10, "atol": 1e-12, "n_t": 401, "v": 0.0,
    "tau_grid": "log:0.001:10:41", "sigma_v": 0.05, "mu": "0,0", "method": "closed",
    "n": DEFAULT_NODES, "id": "all", "sigma_grid": "0.05", "mu_abs_grid": "0",
    "mu_phase_grid": "0",
}


def _resolve(args):
    """Fill unset options from --config, then from DEFAULTS."""
    config = {}
    if getattr(args, "config", None):
        config = _read_json(args.config)
        if not isinstance(config, dict):
            raise ConfigError("--config must hold a JSON object")
    for key in list(vars(args)):
        if key in ("func", "command"):
            continue
        if getattr(args, key) is None:
            setattr(args, key, config.get(key, DEFAULTS.get(key)))
    for key in ("workers", "seedless", "out"):
        if not hasattr(args, key) or getattr(args, key) is None:
            setattr(args, key, config.get(key, DEFAULTS.get(key)))
    unknown = set(config) - set(vars(args)) - {"config"}
    if unknown:
        raise ConfigError(f"unknown config keys for '{args.command}': {sorted(unknown)}")
    if args.workers < 1:
        raise ConfigError("--workers must be >= 1")
    return args


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        args = _resolve(args)
        if args.seedless:
            install_seedless_guard()
        return args.func(args)
    except (ConfigError, InvalidParameterError, KeyError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ClockSTAError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILED


if __name__ == "__main__":
    sys.exit(main())
