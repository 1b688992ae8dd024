"""Grid sweeps, deterministic CSV output and run manifests.

A sweep is the Cartesian product tau x sigma_v x |mu| x arg(mu).  Work is
grouped by tau because the perturbative map depends only on the schedule;
every other grid axis reuses it.  Groups are farmed out with
``Executor.map`` so rows come back in grid order regardless of the worker
count.
"""

from __future__ import annotations

import cmath
import csv
import hashlib
import io
import itertools
import json
import math
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from . import __version__
from .averages import ClockSpec, closed_form_report
from .errors import ClockSTAError, InvalidParameterError, OutOfRegimeError
from .gaussian import GaussianState, coherent_state
from .integrate import ODETolerances
from .oracle import DEFAULT_NODES, mixture_observables_oracle
from .perturbation import expand_map, linear_response
from .protocols import STASchedule, protocol_from_dict, with_tau

PERTURB_COLUMNS = ["tau", "re_beta1", "im_beta1", "abs_beta1", "re_alpha1", "im_alpha1",
                   "abs_alpha1", "abs_beta0"]
OBSERVABLE_COLUMNS = ["tau", "sigma_v", "mu_abs", "mu_phase", "F_HS", "P_mix", "delta_S2", "S_L",
                      "delta_E_bar", "sigma_E2_bar", "R_E", "method"]
SWEEP_COLUMNS = OBSERVABLE_COLUMNS + PERTURB_COLUMNS[1:] + ["status"]
METHODS = ("closed", "oracle", "both")


def parse_grid(spec) -> list[float]:
    """'lin:a:b:n', 'log:a:b:n', a comma list, a number or a list of numbers."""
    if isinstance(spec, (int, float)):
        return [float(spec)]
    if isinstance(spec, (list, tuple)):
        vals = [float(x) for x in spec]
    else:
        s = str(spec).strip()
        try:
            if s.startswith(("lin:", "log:")):
                kind, a, b, n = s.split(":")
                a, b, n = float(a), float(b), int(n)
                if n < 1:
                    raise ValueError
                if kind == "log":
                    if a <= 0 or b <= 0:
                        raise InvalidParameterError(f"log grid needs positive bounds: {s!r}")
                    vals = np.logspace(math.log10(a), math.log10(b), n).tolist()
                else:
                    vals = np.linspace(a, b, n).tolist()
            else:
                vals = [float(x) for x in s.split(",") if x.strip()]
        except ValueError as exc:
            raise InvalidParameterError(f"bad grid spec {s!r}") from exc
    if not vals or not all(math.isfinite(v) for v in vals):
        raise InvalidParameterError(f"grid {spec!r} is empty or non-finite")
    return vals


def parse_mu(text) -> complex:
    """'re,im' or 'abs+phase' (phase in radians); a bare number is real."""
    if isinstance(text, (int, float, complex)):
        return complex(text)
    s = str(text).strip()
    try:
        if "," in s:
            re_, im_ = s.split(",")
            return complex(float(re_), float(im_))
        if "+" in s[1:]:
            i = s.index("+", 1)
            return cmath.rect(float(s[:i]), float(s[i + 1:]))
        return complex(float(s), 0.0)
    except ValueError as exc:
        raise InvalidParameterError(f"bad mu {s!r}; use 're,im' or 'abs+phase'") from exc


@dataclass(frozen=True)
class SweepSpec:
    protocol: dict
    taus: tuple[float, ...]
    sigmas: tuple[float, ...] = (0.0,)
    mu_abs: tuple[float, ...] = (0.0,)
    mu_phase: tuple[float, ...] = (0.0,)
    method: str = "closed"
    n_nodes: int = DEFAULT_NODES
    rtol: float = 1e-10
    atol: float = 1e-12
    input_state: dict | None = None
    m: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        for name in ("taus", "sigmas", "mu_abs", "mu_phase"):
            vals = tuple(float(x) for x in getattr(self, name))
            if not vals:
                raise InvalidParameterError(f"{name} grid is empty")
            object.__setattr__(self, name, vals)
        if any(t <= 0 for t in self.taus):
            raise InvalidParameterError("tau values must be positive")
        if any(s < 0 for s in self.sigmas):
            raise InvalidParameterError("sigma_v values must be >= 0")
        if any(a < 0 for a in self.mu_abs):
            raise InvalidParameterError("|mu| values must be >= 0")
        if self.method not in METHODS:
            raise InvalidParameterError(f"method must be one of {METHODS}")
        if self.n_nodes < 8:
            raise InvalidParameterError("need n >= 8 quadrature nodes")
        protocol_from_dict(self.protocol)  # validates the descriptor
        if self.input_state is not None:
            GaussianState.from_dict(self.input_state, self.hbar)

    @property
    def tolerances(self) -> ODETolerances:
        return ODETolerances(self.rtol, self.atol)

    @property
    def methods(self) -> tuple[str, ...]:
        return ("closed", "oracle") if self.method == "both" else (self.method,)

    @property
    def size(self) -> int:
        mus = 1 if self.input_state is not None else len(self.mu_abs) * len(self.mu_phase)
        return len(self.taus) * len(self.sigmas) * mus * len(self.methods)

    def to_dict(self) -> dict:
        return asdict(self)

    def config_hash(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


@dataclass
class PointResult:
    params: dict
    row: dict | None
    status: str
    message: str = ""


def _schedule(spec: SweepSpec, tau: float) -> STASchedule:
    proto = protocol_from_dict(spec.protocol)
    if proto.kind != "tabulated":
        proto = with_tau(proto, tau)
    return STASchedule(proto, spec.m, spec.hbar)


def _mu_points(spec: SweepSpec):
    if spec.input_state is not None:
        return [(None, None)]
    return list(itertools.product(spec.mu_abs, spec.mu_phase))


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    return repr(float(x) + 0.0)  # + 0.0 folds -0.0 into 0.0


def perturb_row(schedule: STASchedule, tolerances: ODETolerances) -> dict:
    pmap = expand_map(schedule, tolerances=tolerances)
    lr = linear_response(pmap, None)
    return {
        "tau": schedule.protocol.tau,
        "re_beta1": lr.beta1.real, "im_beta1": lr.beta1.imag, "abs_beta1": abs(lr.beta1),
        "re_alpha1": lr.alpha1.real, "im_alpha1": lr.alpha1.imag, "abs_alpha1": abs(lr.alpha1),
        "abs_beta0": abs(lr.beta0),
    }, pmap


def _tau_group(args) -> list[PointResult]:
    spec, tau = args
    out = []
    combos = [(s, ma, mp, meth) for s in spec.sigmas for (ma, mp) in _mu_points(spec)
              for meth in spec.methods]
    try:
        schedule = _schedule(spec, tau)
        prow, pmap = perturb_row(schedule, spec.tolerances)
    except ClockSTAError as exc:
        for s, ma, mp, meth in combos:
            params = dict(tau=tau, sigma_v=s, mu_abs=ma, mu_phase=mp, method=meth)
            out.append(PointResult(params, None, "error", f"{type(exc).__name__}: {exc}"))
        return out
    for s, ma, mp, meth in combos:
        params = dict(tau=tau, sigma_v=s, mu_abs=ma, mu_phase=mp, method=meth)
        if spec.input_state is not None:
            state = GaussianState.from_dict(spec.input_state, spec.hbar)
            mu = 0j
        else:
            mu = cmath.rect(ma, mp)
            state = coherent_state(mu, spec.m, schedule.omega_in, spec.hbar)
        row = {k: None for k in SWEEP_COLUMNS}
        row.update(prow)
        row.update(params)
        row["method"] = "closed_form" if meth == "closed" else "oracle"
        clock = ClockSpec(s)
        try:
            if meth == "closed":
                rep = closed_form_report(pmap, state, clock, mu=mu)
            else:
                rep = mixture_observables_oracle(schedule, state, clock, spec.n_nodes,
                                                 tolerances=spec.tolerances, mu=mu)
        except OutOfRegimeError as exc:
            row["status"] = "out-of-regime"
            out.append(PointResult(params, row, "out-of-regime", str(exc)))
            continue
        except ClockSTAError as exc:
            out.append(PointResult(params, None, "error", f"{type(exc).__name__}: {exc}"))
            continue
        row.update(F_HS=rep.F_HS, P_mix=rep.P_mix, delta_S2=rep.delta_S2, S_L=rep.S_L,
                   delta_E_bar=rep.delta_E_bar, sigma_E2_bar=rep.sigma_E2_bar, R_E=rep.R_E,
                   status="ok")
        out.append(PointResult(params, row, "ok"))
    return out


def _perturb_group(args) -> list[PointResult]:
    spec, tau = args
    params = dict(tau=tau)
    try:
        row, _ = perturb_row(_schedule(spec, tau), spec.tolerances)
    except ClockSTAError as exc:
        return [PointResult(params, None, "error", f"{type(exc).__name__}: {exc}")]
    row["status"] = "ok"
    return [PointResult(params, row, "ok")]


def _forbid_rng(*_a, **_k):
    raise RuntimeError("random number generation is disabled (--seedless)")


def install_seedless_guard():
    """Replace the stdlib and numpy RNG entry points with functions that raise."""
    for name in ("random", "uniform", "gauss", "normalvariate", "randint", "choice",
                 "shuffle", "sample", "seed"):
        setattr(random, name, _forbid_rng)
    for name in ("seed", "rand", "randn", "random", "normal", "uniform", "randint",
                 "default_rng", "RandomState", "choice", "shuffle", "permutation"):
        setattr(np.random, name, _forbid_rng)


def _init_worker(seedless: bool):
    if seedless:
        install_seedless_guard()


def run_groups(func, spec: SweepSpec, workers: int = 1, seedless: bool = False) -> list[PointResult]:
    jobs = [(spec, tau) for tau in spec.taus]
    if workers <= 1:
        groups = list(map(func, jobs))
    else:
        with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker,
                                 initargs=(seedless,)) as pool:
            groups = list(pool.map(func, jobs))
    return [r for g in groups for r in g]


def run_sweep(spec: SweepSpec, workers: int = 1, seedless: bool = False) -> list[PointResult]:
    """Evaluate every grid point; rows come back in grid order."""
    return run_groups(_tau_group, spec, workers, seedless)


def run_perturb(spec: SweepSpec, workers: int = 1, seedless: bool = False) -> list[PointResult]:
    return run_groups(_perturb_group, spec, workers, seedless)


def csv_text(columns, rows, header: dict | None = None) -> str:
    """CSV with a leading '# key=value' block; floats written with repr for round-tripping."""
    buf = io.StringIO()
    for k, v in (header or {}).items():
        buf.write(f"# {k}={v if isinstance(v, str) else json.dumps(v, sort_keys=True)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r.get(c)) for c in columns])
    return buf.getvalue()


@dataclass
class RunManifest:
    config_hash: str
    version: str
    timestamp: str
    points: list = field(default_factory=list)
    totals: dict = field(default_factory=dict)

    @classmethod
    def build(cls, spec_dict: dict, results: list[PointResult], requested: int) -> "RunManifest":
        blob = json.dumps(spec_dict, sort_keys=True, separators=(",", ":"))
        totals = {"requested": requested, "ok": 0, "out-of-regime": 0, "error": 0}
        points = []
        for i, r in enumerate(results):
            totals[r.status] += 1
            points.append({"index": i, "params": r.params, "status": r.status, "message": r.message})
        totals["rows"] = sum(1 for r in results if r.row is not None)
        totals["failures"] = totals["error"]
        return cls(hashlib.sha256(blob.encode()).hexdigest(), __version__,
                   time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()), points, totals)

    def complete(self) -> bool:
        t = self.totals
        return t["rows"] + t["failures"] == t["requested"] == len(self.points)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)
