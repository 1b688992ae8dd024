"""Frequency schedules, the STA frequency and the clock-noise deviation profile.

All schedules are parametrised by ``W(t) = omega^2(t)``.  Derivatives up to
third order are available because the deviation profile ``t * dOmega^2/dt``
needs ``W'''``.  Built-in kinds use closed forms; tabulated schedules use a
cubic spline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DomainError, InvalidParameterError, SingularScheduleError

KINDS = ("finite", "infinite", "tabulated")

DEFAULT_TRUNCATION_EPS = 1e-6


@dataclass(frozen=True)
class FrequencyProtocol:
    """A driving schedule omega^2(t) on a finite window [t_start, t_end].

    Use :func:`make_finite_protocol`, :func:`make_infinite_protocol` or
    :func:`make_tabulated_protocol` rather than calling this directly.
    """

    kind: str
    omega_i: float
    omega_f: float
    tau: float
    t_start: float
    t_end: float
    truncation_eps: float | None = None
    samples: tuple[tuple[float, float], ...] | None = None
    _spline: Any = field(default=None, repr=False, compare=False)

    @property
    def window(self) -> tuple[float, float]:
        return (self.t_start, self.t_end)

    @property
    def duration(self) -> float:
        return self.t_end - self.t_start

    def check_domain(self, t):
        t = np.asarray(t, dtype=float)
        slack = 1e-12 * max(1.0, abs(self.t_start), abs(self.t_end))
        if np.any(t < self.t_start - slack) or np.any(t > self.t_end + slack):
            raise DomainError(
                f"t outside protocol window [{self.t_start}, {self.t_end}]"
            )
        return t

    def omega2(self, t, order: int = 0):
        """Return d^order(omega^2)/dt^order at ``t`` (no domain check)."""
        if self.kind == "finite":
            return _finite_w(self, t, order)
        if self.kind == "infinite":
            return _infinite_w(self, t, order)
        return self._spline(t, order)

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "omega_i": self.omega_i, "omega_f": self.omega_f, "tau": self.tau}
        if self.kind == "infinite":
            d["truncation_eps"] = self.truncation_eps
        if self.kind == "tabulated":
            d = {"kind": "tabulated", "samples": [list(p) for p in self.samples]}
        return d


def _finite_w(p: FrequencyProtocol, t, order):
    s = np.asarray(t, dtype=float) / p.tau
    dw = p.omega_f**2 - p.omega_i**2
    if order == 0:
        return p.omega_i**2 + dw * s**3 * (10.0 - 15.0 * s + 6.0 * s**2)
    if order == 1:
        return dw * 30.0 * s**2 * (1.0 - s) ** 2 / p.tau
    if order == 2:
        return dw * 60.0 * s * (1.0 - 3.0 * s + 2.0 * s**2) / p.tau**2
    if order == 3:
        return dw * 60.0 * (1.0 - 6.0 * s + 6.0 * s**2) / p.tau**3
    raise InvalidParameterError(f"derivative order {order} not supported")


def _infinite_w(p: FrequencyProtocol, t, order):
    s = np.asarray(t, dtype=float) / p.tau
    dw = (p.omega_f**2 - p.omega_i**2) / math.pi
    q = 1.0 + s * s
    if order == 0:
        return 0.5 * (p.omega_f**2 + p.omega_i**2) + dw * np.arctan(s)
    if order == 1:
        return dw / (p.tau * q)
    if order == 2:
        return dw * (-2.0 * s) / (p.tau**2 * q**2)
    if order == 3:
        return dw * (6.0 * s * s - 2.0) / (p.tau**3 * q**3)
    raise InvalidParameterError(f"derivative order {order} not supported")


def _positive(**kw):
    for name, val in kw.items():
        if not (val > 0 and math.isfinite(val)):
            raise InvalidParameterError(f"{name} must be positive and finite, got {val!r}")


def make_finite_protocol(omega_i: float, omega_f: float, tau: float) -> FrequencyProtocol:
    """Quintic smooth-step schedule on [0, tau] with vanishing end derivatives."""
    _positive(omega_i=omega_i, omega_f=omega_f, tau=tau)
    return FrequencyProtocol("finite", float(omega_i), float(omega_f), float(tau), 0.0, float(tau))


def infinite_half_window(tau: float, truncation_eps: float) -> float:
    """Smallest T with |omega^2(+-T) - asymptote| = eps * |omega_f^2 - omega_i^2|."""
    return tau / math.tan(math.pi * truncation_eps)


def make_infinite_protocol(
    omega_i: float, omega_f: float, tau: float, truncation_eps: float = DEFAULT_TRUNCATION_EPS
) -> FrequencyProtocol:
    """Arctan schedule truncated to the symmetric window [-T, T]."""
    _positive(omega_i=omega_i, omega_f=omega_f, tau=tau, truncation_eps=truncation_eps)
    # eps >= 1/2 already makes T <= 0, so the window is undefined well before eps = 1
    if truncation_eps >= 0.5:
        raise InvalidParameterError("truncation_eps must be < 0.5 for a nonempty window")
    half = infinite_half_window(tau, truncation_eps)
    return FrequencyProtocol(
        "infinite", float(omega_i), float(omega_f), float(tau), -half, half,
        truncation_eps=float(truncation_eps),
    )


def make_tabulated_protocol(samples: Sequence[Sequence[float]]) -> FrequencyProtocol:
    """Cubic-spline schedule through (t, omega^2) samples."""
    arr = np.asarray(samples, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 4:
        raise InvalidParameterError("need at least 4 (t, omega2) samples")
    if np.any(np.diff(arr[:, 0]) <= 0):
        raise InvalidParameterError("sample times must be strictly increasing")
    if np.any(arr[:, 1] <= 0):
        raise InvalidParameterError("tabulated omega2 must be positive")
    spline = CubicSpline(arr[:, 0], arr[:, 1])
    t0, t1 = float(arr[0, 0]), float(arr[-1, 0])
    return FrequencyProtocol(
        "tabulated", math.sqrt(arr[0, 1]), math.sqrt(arr[-1, 1]), t1 - t0, t0, t1,
        samples=tuple((float(a), float(b)) for a, b in arr), _spline=spline,
    )


def protocol_from_dict(desc: dict) -> FrequencyProtocol:
    """Build a protocol from its JSON descriptor."""
    kind = desc.get("kind")
    if kind == "finite":
        return make_finite_protocol(desc["omega_i"], desc["omega_f"], desc["tau"])
    if kind == "infinite":
        return make_infinite_protocol(
            desc["omega_i"], desc["omega_f"], desc["tau"],
            desc.get("truncation_eps", DEFAULT_TRUNCATION_EPS),
        )
    if kind == "tabulated":
        return make_tabulated_protocol(desc["samples"])
    raise InvalidParameterError(f"unknown protocol kind {kind!r}; expected one of {KINDS}")


def with_tau(protocol: FrequencyProtocol, tau: float) -> FrequencyProtocol:
    """Same built-in schedule at a different duration scale."""
    if protocol.kind == "finite":
        return make_finite_protocol(protocol.omega_i, protocol.omega_f, tau)
    if protocol.kind == "infinite":
        return make_infinite_protocol(protocol.omega_i, protocol.omega_f, tau, protocol.truncation_eps)
    raise InvalidParameterError("tabulated protocols have no tau parameter")


def eval_schedule(protocol: FrequencyProtocol, t, order: int = 0):
    """Evaluate omega^2 (order 0) or its time derivatives (orders 1-3)."""
    if order not in (0, 1, 2, 3):
        raise InvalidParameterError("order must be 0, 1, 2 or 3")
    t = protocol.check_domain(t)
    return protocol.omega2(t, order)


@dataclass(frozen=True)
class STASchedule:
    """STA frequency Omegabar^2(t) and deviation profile for a protocol.

    The mean clock trajectory is the unit-speed pointer, so the response
    ``V(t)`` is simply ``dOmegabar^2/dt`` and ``deltaOmega^2 = t V(t)``.
    """

    protocol: FrequencyProtocol
    m: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        _positive(m=self.m, hbar=self.hbar)

    @property
    def t_start(self) -> float:
        return self.protocol.t_start

    @property
    def t_end(self) -> float:
        return self.protocol.t_end

    @property
    def omega_in(self) -> float:
        """Instantaneous frequency at the window start."""
        return math.sqrt(float(self.protocol.omega2(self.t_start)))

    @property
    def omega_out(self) -> float:
        """Instantaneous frequency at the window end (reference for H_f)."""
        return math.sqrt(float(self.protocol.omega2(self.t_end)))

    def _derivs(self, t):
        p = self.protocol
        w = p.omega2(t, 0)
        if np.any(w <= 0):
            raise SingularScheduleError("omega^2(t) <= 0 inside the window")
        return w, p.omega2(t, 1), p.omega2(t, 2)

    def sta_omega2(self, t):
        w, w1, w2 = self._derivs(t)
        om = np.sqrt(w)
        om_dot = w1 / (2.0 * om)
        om_ddot = (w2 - 2.0 * om_dot**2) / (2.0 * om)
        return w + 0.5 * om_ddot / om - 0.75 * (om_dot / om) ** 2

    def response(self, t):
        """V(t) = dOmegabar^2/dt, in closed form from W..W'''."""
        w, w1, w2 = self._derivs(t)
        w3 = self.protocol.omega2(t, 3)
        return w1 + w3 / (4.0 * w) - 0.875 * w1 * w2 / w**2 + 0.625 * w1**3 / w**3

    def delta_omega2(self, t):
        return np.asarray(t, dtype=float) * self.response(t)

    def both(self, t):
        """(Omegabar^2, deltaOmega^2) sharing one pass over the derivatives."""
        p = self.protocol
        w = p.omega2(t, 0)
        w1 = p.omega2(t, 1)
        w2 = p.omega2(t, 2)
        w3 = p.omega2(t, 3)
        iw = 1.0 / w
        bar = w + 0.25 * w2 * iw - 0.3125 * (w1 * iw) ** 2
        rate = w1 + 0.25 * w3 * iw - 0.875 * w1 * w2 * iw**2 + 0.625 * (w1 * iw) ** 3
        return bar, t * rate

    def effective_omega2(self, t, v: float):
        return self.sta_omega2(t) + v * self.delta_omega2(t)


def sta_frequency_sq(schedule: STASchedule, t):
    """Omegabar^2(t) = w^2 + (1/2) w''/w - (3/4)(w'/w)^2 with w = omega(t)."""
    t = schedule.protocol.check_domain(t)
    return schedule.sta_omega2(t)


def sta_deviation_sq(schedule: STASchedule, t):
    t = schedule.protocol.check_domain(t)
    return schedule.delta_omega2(t)


class UnstableFrequencyWarning(RuntimeWarning):
    """Omega_v^2 < 0 somewhere: locally inverted oscillator."""


def effective_frequency_sq(schedule: STASchedule, t, v: float):
    """Omega_v^2(t) = Omegabar^2 + v deltaOmega^2.

    Negative values are allowed; a :class:`UnstableFrequencyWarning` is issued.
    """
    import warnings

    t = schedule.protocol.check_domain(t)
    out = schedule.effective_omega2(t, v)
    if np.any(out < 0):
        warnings.warn("Omega_v^2 < 0 at sampled times", UnstableFrequencyWarning, stacklevel=2)
    return out


@dataclass(frozen=True)
class EndpointReport:
    omega_dot: tuple[float, float]
    omega_ddot: tuple[float, float]
    tol: float
    passed: bool


def validate_endpoints(protocol: FrequencyProtocol, tol: float = 1e-8) -> EndpointReport:
    """|d omega/dt| and |d^2 omega/dt^2| at both window ends against ``tol``."""
    dots, ddots = [], []
    for t in protocol.window:
        w = float(protocol.omega2(t, 0))
        w1 = float(protocol.omega2(t, 1))
        w2 = float(protocol.omega2(t, 2))
        om = math.sqrt(w)
        od = w1 / (2 * om)
        dots.append(abs(od))
        ddots.append(abs((w2 - 2 * od * od) / (2 * om)))
    passed = max(dots + ddots) <= tol
    return EndpointReport(tuple(dots), tuple(ddots), tol, passed)


def infinite_tail_bounds(protocol: FrequencyProtocol) -> tuple[float, float]:
    """Analytic upper bounds on |omega_dot|, |omega_ddot| at the truncated ends.

    At s = T/tau the arctan derivatives are W' = D sin^2(pi eps)/(pi tau) and
    |W''| <= 2 D s / (pi tau^2 (1+s^2)^2), with D = |omega_f^2 - omega_i^2|.
    """
    if protocol.kind != "infinite":
        raise InvalidParameterError("tail bounds only apply to the infinite kind")
    d = abs(protocol.omega_f**2 - protocol.omega_i**2)
    s = protocol.t_end / protocol.tau
    w1 = d / (math.pi * protocol.tau * (1 + s * s))
    w2 = 2 * d * s / (math.pi * protocol.tau**2 * (1 + s * s) ** 2)
    om_min = math.sqrt(min(float(protocol.omega2(t)) for t in protocol.window))
    od = w1 / (2 * om_min)
    return od, (w2 + 2 * od * od) / (2 * om_min)
