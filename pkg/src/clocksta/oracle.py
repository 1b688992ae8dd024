"""Nonperturbative clock averages by Gauss-Hermite quadrature, and ladder-algebra energy moments.

Nothing here uses the v-expansion: every node is a full propagation of the
v-dependent equation of motion, and the mixture overlaps are exact Gaussian
overlaps.  This is the reference against which the closed forms are tested.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial.hermite_e import hermegauss

from .averages import ClockSpec, ObservableReport, tur_ratio
from .errors import ClockSTAError, InvalidParameterError, InvariantViolationError, PropagationError, UndefinedRatioError
from .gaussian import EnergyForm, GaussianState, apply_map, energy_variance, hs_overlap, mean_energy
from .integrate import ODETolerances
from .protocols import STASchedule
from .symplectic import propagate

DEFAULT_NODES = 40


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights for the Gaussian measure of width sigma_v."""

    nodes: np.ndarray
    weights: np.ndarray
    sigma_v: float

    @property
    def n(self) -> int:
        return len(self.nodes)

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, np.asarray(values, dtype=float)))


def gauss_hermite(clock: ClockSpec, n: int = DEFAULT_NODES) -> QuadratureRule:
    """Probabilists' Hermite rule scaled to N(0, sigma_v^2).

    For sigma_v = 0 the measure is a point mass and a single node at v = 0 is
    returned.
    """
    if n < 8:
        raise InvalidParameterError("quadrature needs n >= 8 nodes")
    if clock.sigma_v == 0.0:
        return QuadratureRule(np.zeros(1), np.ones(1), 0.0)
    x, w = hermegauss(n)
    return QuadratureRule(clock.sigma_v * x, w / math.sqrt(2.0 * math.pi), clock.sigma_v)


def clock_average(f: Callable[[float], float], clock: ClockSpec, n: int = DEFAULT_NODES) -> float:
    """Approximate the integral of f(v) P(v) dv."""
    rule = gauss_hermite(clock, n)
    vals = []
    for i, v in enumerate(rule.nodes):
        y = float(f(float(v)))
        if not math.isfinite(y):
            raise PropagationError(f"non-finite integrand at node {i} (v={v:.6g})", node=i, v=float(v))
        vals.append(y)
    return rule.integrate(vals)


@dataclass(frozen=True)
class NodeResult:
    v: float
    state: GaussianState
    energy: float
    variance: float


def _node_states(schedule, state, rule, energy, tolerances, mapper):
    def run(args):
        i, v = args
        try:
            S, _ = propagate(schedule, v, tolerances)
            out = apply_map(S, state)
        except ClockSTAError as exc:
            raise PropagationError(f"node {i} (v={v:.6g}): {exc}", node=i, v=v) from exc
        E, var = mean_energy(out, energy), energy_variance(out, energy)
        if not (math.isfinite(E) and math.isfinite(var)):
            raise PropagationError(f"non-finite energy at node {i} (v={v:.6g})", node=i, v=v)
        return NodeResult(v, out, E, var)

    return list(mapper(run, [(i, float(v)) for i, v in enumerate(rule.nodes)]))


def mixture_observables_oracle(
    schedule: STASchedule,
    state: GaussianState,
    clock: ClockSpec,
    n: int = DEFAULT_NODES,
    energy: EnergyForm | None = None,
    tolerances: ODETolerances | None = None,
    mapper=map,
    mu: complex = 0j,
) -> ObservableReport:
    """Quadrature estimates of every figure of merit.

    ``mapper`` lets callers distribute the node propagations; it must
    preserve order (``map`` or ``Executor.map``).
    """
    energy = energy or EnergyForm(schedule.omega_out, schedule.m, state.hbar)
    rule = gauss_hermite(clock, n)
    (target,) = _node_states(schedule, state, gauss_hermite(ClockSpec(0.0)), energy, tolerances, map)
    nodes = _node_states(schedule, state, rule, energy, tolerances, mapper)
    w = rule.weights

    P0 = hs_overlap(target.state, target.state)
    F = sum(wi * hs_overlap(target.state, nd.state) for wi, nd in zip(w, nodes)) / P0
    gram = np.empty((rule.n, rule.n))
    for i in range(rule.n):
        for j in range(i, rule.n):
            gram[i, j] = gram[j, i] = hs_overlap(nodes[i].state, nodes[j].state)
    P_mix = float(w @ gram @ w)

    E = np.array([nd.energy for nd in nodes])
    var = np.array([nd.variance for nd in nodes])
    mean_E = float(w @ E)
    dE = mean_E - target.energy
    sig = float(w @ var) - target.variance
    var_mean = float(w @ (E - mean_E) ** 2)

    ratio = P_mix / P0
    S_L = 1.0 - ratio
    try:
        R = tur_ratio(S_L, sig, dE)
    except UndefinedRatioError:
        R = None
    return ObservableReport(
        delta_E_bar=dE, sigma_E2_bar=sig, var_mean_E=var_mean,
        F_HS=float(F), P_mix=P_mix, P0=P0, delta_S2=-math.log(ratio), S_L=S_L, R_E=R,
        method="oracle", tau=schedule.protocol.tau, sigma_v=clock.sigma_v, mu=complex(mu),
    )


def ladder_energy_moments(alpha: complex, beta: complex, mu: complex, omega_f: float,
                          hbar: float = 1.0, tol: float = 1e-9) -> tuple[float, float]:
    """<H> and Var(H) for H = hbar w (b^dag b + 1/2), b = alpha a + beta a^dag, a|mu> = mu|mu>.

    Writing b = gamma + c with gamma = alpha mu + beta conj(mu), the fluctuation
    c = alpha a0 + beta a0^dag acts on the vacuum and the moments follow from
    Wick's theorem with <c^dag c> = |beta|^2 and <c c> = alpha beta:

        <n>    = |gamma|^2 + |beta|^2
        Var(n) = |gamma|^2 (|alpha|^2 + |beta|^2) + 2 Re(conj(gamma)^2 alpha beta)
                 + 2 |alpha|^2 |beta|^2
    """
    alpha, beta, mu = complex(alpha), complex(beta), complex(mu)
    if abs(abs(alpha) ** 2 - abs(beta) ** 2 - 1.0) > tol:
        raise InvariantViolationError("|alpha|^2 - |beta|^2 must equal 1")
    if not omega_f > 0:
        raise InvalidParameterError("omega_f must be positive")
    gamma = alpha * mu + beta * mu.conjugate()
    g2 = abs(gamma) ** 2
    a2, b2 = abs(alpha) ** 2, abs(beta) ** 2
    n_mean = g2 + b2
    n_var = g2 * (a2 + b2) + 2.0 * (gamma.conjugate() ** 2 * alpha * beta).real + 2.0 * a2 * b2
    e = hbar * omega_f
    return e * (n_mean + 0.5), e * e * n_var
