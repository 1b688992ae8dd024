"""Figure data presets with omega_i = 1, omega_f = 2.

fig1/fig3 are schedule profiles; fig2/fig4 bundle the Bogoliubov slopes,
the tau scans of the mixture figures of merit and the phase-averaged TUR
ratio for the finite and infinite protocols respectively.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .averages import ClockSpec, phase_averaged_tur
from .errors import ClockSTAError, InvalidParameterError
from .perturbation import expand_map
from .protocols import STASchedule, make_finite_protocol, make_infinite_protocol
from .sweep import OBSERVABLE_COLUMNS, PERTURB_COLUMNS, SweepSpec, parse_grid, run_perturb, run_sweep

FIGURES = ("fig1", "fig2", "fig3", "fig4")
PROFILE_COLUMNS = ["t", "omega2", "sta_omega2", "delta_omega2"]
PHASE_COLUMNS = ["tau", "sigma_v", "mu_abs", "R_E_phase_avg", "n_phase", "n_excluded", "status"]


@dataclass(frozen=True)
class FigureDefaults:
    omega_i: float = 1.0
    omega_f: float = 2.0
    tau: float = 1.0
    n_t: int = 401
    # a looser truncation keeps the plotted arctan window readable
    profile_eps: float = 1e-2
    sweep_eps: float = 1e-3
    tau_grid: str = "log:0.001:10:41"
    obs_tau_grid: str = "log:0.01:10:31"
    sigma_v: float = 0.05
    mu_abs: tuple = (0.0, 0.5, 1.0, 2.0)
    mu_phase: float = 0.0
    phase_tau: float = 1.0
    phase_mu_abs: tuple = (0.0, 0.5, 1.0, 2.0, 4.0)
    n_phase: int = 32


def _protocol(fig: str, d: FigureDefaults, tau: float, eps: float):
    if fig in ("fig1", "fig2"):
        return make_finite_protocol(d.omega_i, d.omega_f, tau)
    return make_infinite_protocol(d.omega_i, d.omega_f, tau, eps)


def profile_rows(schedule: STASchedule, n_t: int) -> list[dict]:
    t = np.linspace(schedule.t_start, schedule.t_end, n_t)
    p = schedule.protocol
    w = p.omega2(t)
    bar = schedule.sta_omega2(t)
    dev = schedule.delta_omega2(t)
    return [dict(t=a, omega2=b, sta_omega2=c, delta_omega2=e) for a, b, c, e in zip(t, w, bar, dev)]


def phase_rows(schedule: STASchedule, d: FigureDefaults) -> list[dict]:
    pmap = expand_map(schedule)
    rows = []
    for mu_abs in d.phase_mu_abs:
        row = dict(tau=schedule.protocol.tau, sigma_v=d.sigma_v, mu_abs=mu_abs, n_phase=d.n_phase)
        try:
            avg = phase_averaged_tur(pmap, ClockSpec(d.sigma_v), mu_abs, d.n_phase, schedule.hbar)
            row.update(R_E_phase_avg=avg.value, n_excluded=len(avg.excluded), status="ok")
        except ClockSTAError as exc:
            row.update(R_E_phase_avg=None, n_excluded=None, status=f"error: {exc}")
        rows.append(row)
    return rows


def figure_tables(fig: str, d: FigureDefaults | None = None, workers: int = 1,
                  seedless: bool = False) -> dict[str, tuple[list[str], list[dict], list]]:
    """Return {table_name: (columns, rows, point_results)} for one figure."""
    if fig not in FIGURES:
        raise InvalidParameterError(f"unknown figure id {fig!r}; expected one of {FIGURES}")
    d = d or FigureDefaults()
    if fig in ("fig1", "fig3"):
        sched = STASchedule(_protocol(fig, d, d.tau, d.profile_eps))
        return {fig: (PROFILE_COLUMNS, profile_rows(sched, d.n_t), [])}

    proto = _protocol(fig, d, d.tau, d.sweep_eps).to_dict()
    top = SweepSpec(proto, taus=_grid(d.tau_grid))
    top_res = run_perturb(top, workers, seedless)
    mid = SweepSpec(proto, taus=_grid(d.obs_tau_grid), sigmas=(d.sigma_v,), mu_abs=d.mu_abs,
                    mu_phase=(d.mu_phase,), method="closed")
    mid_res = run_sweep(mid, workers, seedless)
    phase = phase_rows(STASchedule(_protocol(fig, d, d.phase_tau, d.sweep_eps)), d)
    return {
        f"{fig}_bogoliubov": (PERTURB_COLUMNS + ["status"], [r.row for r in top_res if r.row], top_res),
        f"{fig}_observables": (OBSERVABLE_COLUMNS + ["status"], [r.row for r in mid_res if r.row], mid_res),
        f"{fig}_phase_average": (PHASE_COLUMNS, phase, []),
    }


def _grid(spec):
    return tuple(parse_grid(spec))


def with_overrides(d: FigureDefaults, overrides: dict) -> FigureDefaults:
    unknown = set(overrides) - set(FigureDefaults.__dataclass_fields__)
    if unknown:
        raise InvalidParameterError(f"unknown figure overrides: {sorted(unknown)}")
    fixed = {k: tuple(v) if isinstance(v, list) else v for k, v in overrides.items()}
    return replace(d, **fixed)
