"""Second-order expansion of S_v in the clock parameter and the linear response.

S_v = S0 + v S1 + (v^2/2) S2 + O(v^3), built either by co-integrating the
driven hierarchy (default) or from the Dyson series in the interaction
picture.  The two routes share nothing beyond the schedule: the hierarchy runs
on the adaptive Magnus integrator, the Dyson route on scipy's DOP853.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import AccuracyError, InvalidParameterError, TargetViolationError
from .integrate import HierarchyGenerator, ODETolerances, propagate_linear
from .protocols import STASchedule
from .symplectic import J, WRONSKIAN_FAIL, dictionary, propagate

BETA0_TOL = 1e-6


@dataclass(frozen=True)
class PerturbativeMap:
    S0: np.ndarray
    S1: np.ndarray
    S2: np.ndarray
    method: str
    m: float
    omega_in: float
    omega_out: float
    tau: float
    kind: str
    wronskian_drift: float = 0.0

    def at(self, v: float) -> np.ndarray:
        return self.S0 + v * self.S1 + 0.5 * v * v * self.S2

    def symplecticity_defects(self) -> tuple[float, float, float]:
        """Residuals of det S0 = 1 and of the first/second-order identities."""
        S0, S1, S2 = self.S0, self.S1, self.S2
        d0 = abs(np.linalg.det(S0) - 1.0)
        d1 = np.abs(S1.T @ J @ S0 + S0.T @ J @ S1).max()
        d2 = np.abs(S2.T @ J @ S0 + S0.T @ J @ S2 + 2 * S1.T @ J @ S1).max()
        return float(d0), float(d1), float(d2)


@dataclass(frozen=True)
class LinearResponse:
    """alpha1 = d alpha/dv at 0; beta1 = -i d beta/dv at 0 (so beta_v = i v beta1 + ...)."""

    alpha0: complex
    beta0: complex
    alpha1: complex
    beta1: complex


def _metadata(schedule: STASchedule):
    p = schedule.protocol
    return dict(m=schedule.m, omega_in=schedule.omega_in, omega_out=schedule.omega_out,
                tau=p.tau, kind=p.kind)


def _expand_hierarchy(schedule, tol):
    gen = HierarchyGenerator(schedule)
    Y, wr, _ = propagate_linear(gen, schedule.t_start, schedule.t_end, tol)
    drift = float(np.max(np.abs(np.asarray(wr) - 1.0)))
    return Y[0:2], Y[2:4], 2.0 * Y[4:6], drift


def _expand_dyson(schedule, tol):
    m = schedule.m

    def rhs(t, z):
        S0 = z[0:4].reshape(2, 2)
        I1 = z[4:8].reshape(2, 2)
        bar, delta = schedule.both(t)
        A0 = np.array([[0.0, 1.0 / m], [-m * bar, 0.0]])
        A1 = np.array([[0.0, 0.0], [-m * delta, 0.0]])
        # S0 is symplectic, so its inverse is -J S0^T J
        B = -J @ S0.T @ J @ A1 @ S0
        return np.concatenate([(A0 @ S0).ravel(), B.ravel(), (B @ I1).ravel()])

    z0 = np.concatenate([np.eye(2).ravel(), np.zeros(8)])
    t0, t1 = schedule.t_start, schedule.t_end
    if t1 == t0:
        return np.eye(2), np.zeros((2, 2)), np.zeros((2, 2)), 0.0
    checkpoints = np.linspace(t0, t1, tol.checkpoints + 1)
    sol = solve_ivp(rhs, (t0, t1), z0, method="DOP853", t_eval=checkpoints,
                    rtol=min(tol.rtol, 1e-11), atol=min(tol.atol, 1e-13))
    if not sol.success:
        raise AccuracyError(f"Dyson integration failed: {sol.message}")
    dets = [np.linalg.det(sol.y[0:4, k].reshape(2, 2)) for k in range(sol.y.shape[1])]
    drift = float(np.max(np.abs(np.asarray(dets) - 1.0)))
    S0 = sol.y[0:4, -1].reshape(2, 2)
    I1 = sol.y[4:8, -1].reshape(2, 2)
    I2 = sol.y[8:12, -1].reshape(2, 2)
    return S0, S0 @ I1, 2.0 * S0 @ I2, drift


def expand_map(schedule: STASchedule, method: str = "hierarchy",
               tolerances: ODETolerances | None = None) -> PerturbativeMap:
    tol = tolerances or ODETolerances()
    if method == "hierarchy":
        S0, S1, S2, drift = _expand_hierarchy(schedule, tol)
    elif method == "dyson":
        S0, S1, S2, drift = _expand_dyson(schedule, tol)
    else:
        raise InvalidParameterError(f"unknown expansion method {method!r}")
    if drift > WRONSKIAN_FAIL:
        raise AccuracyError(f"Wronskian drift {drift:.3g} exceeds {WRONSKIAN_FAIL}")
    return PerturbativeMap(S0, S1, S2, method, wronskian_drift=drift, **_metadata(schedule))


def linear_response(pmap: PerturbativeMap, beta0_tol: float | None = BETA0_TOL) -> LinearResponse:
    """Apply the (linear) Bogoliubov dictionary to S0 and S1.

    Raises :class:`TargetViolationError` when |beta0| exceeds ``beta0_tol``;
    pass ``None`` to skip the check for non-STA schedules.
    """
    ref = (pmap.m, pmap.omega_in, pmap.omega_out)
    alpha0, beta0 = dictionary(pmap.S0, *ref)
    dalpha, dbeta = dictionary(pmap.S1, *ref)
    if beta0_tol is not None and abs(beta0) > beta0_tol:
        raise TargetViolationError(f"|beta0| = {abs(beta0):.3g} > {beta0_tol}: not an STA target")
    return LinearResponse(alpha0, beta0, dalpha, -1j * dbeta)


@dataclass(frozen=True)
class ExpansionResidual:
    v_probe: float
    residual: float


def check_expansion(schedule: STASchedule, pmap: PerturbativeMap, v_probe: float,
                    tolerances: ODETolerances | None = None) -> ExpansionResidual:
    """max |S_v - (S0 + v S1 + v^2 S2/2)| over v = +-v_probe."""
    if v_probe == 0:
        return ExpansionResidual(0.0, 0.0)
    res = 0.0
    for v in (v_probe, -v_probe):
        S, _ = propagate(schedule, v, tolerances)
        res = max(res, float(np.abs(S.matrix - pmap.at(v)).max()))
    return ExpansionResidual(float(v_probe), res)


def beta_slope(taus, abs_beta1) -> float:
    """Least-squares slope of log|beta1| against log tau."""
    x = np.log(np.asarray(taus, dtype=float))
    y = np.log(np.asarray(abs_beta1, dtype=float))
    return float(np.polyfit(x, y, 1)[0])
