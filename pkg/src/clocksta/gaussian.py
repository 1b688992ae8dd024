"""Single-mode Gaussian states: construction, transport, energy statistics, overlaps.

Covariances use the symmetric convention V = <{dR, dR^T}>/2 with R = (x, p)
and [x, p] = i hbar, so the vacuum of frequency w has V = diag(hbar/(2 m w),
hbar m w / 2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateStateError, InvalidParameterError, InvariantViolationError

J = np.array([[0.0, 1.0], [-1.0, 0.0]])
STATE_TOL = 1e-10


@dataclass(frozen=True)
class GaussianState:
    d: np.ndarray
    V: np.ndarray
    hbar: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "d", np.array(self.d, dtype=float).reshape(2))
        object.__setattr__(self, "V", np.array(self.V, dtype=float).reshape(2, 2))

    def validate(self, tol: float = STATE_TOL) -> "GaussianState":
        V = self.V
        if not np.allclose(V, V.T, rtol=0, atol=tol * max(1.0, np.abs(V).max())):
            raise InvariantViolationError("covariance is not symmetric")
        if V[0, 0] <= 0 or np.linalg.det(V) < self.hbar**2 / 4 - tol:
            raise InvariantViolationError("covariance violates the uncertainty relation")
        return self

    def to_dict(self) -> dict:
        return {"d": self.d.tolist(), "V": self.V.tolist()}

    @classmethod
    def from_dict(cls, desc: dict, hbar: float = 1.0) -> "GaussianState":
        return cls(desc["d"], desc["V"], hbar).validate()


@dataclass(frozen=True)
class EnergyForm:
    """H = R^T G R / 2 with G = diag(m w^2, 1/m)."""

    omega: float
    m: float = 1.0
    hbar: float = 1.0

    def __post_init__(self):
        if not (self.omega > 0 and self.m > 0):
            raise InvalidParameterError("EnergyForm needs positive omega and m")

    @property
    def G(self) -> np.ndarray:
        return np.diag([self.m * self.omega**2, 1.0 / self.m])


def vacuum_state(m: float = 1.0, omega: float = 1.0, hbar: float = 1.0) -> GaussianState:
    if not (m > 0 and omega > 0):
        raise InvalidParameterError("vacuum needs positive m and omega")
    return GaussianState(np.zeros(2), np.diag([hbar / (2 * m * omega), hbar * m * omega / 2]), hbar)


def coherent_state(mu: complex, m: float = 1.0, omega: float = 1.0, hbar: float = 1.0) -> GaussianState:
    """Coherent state a|mu> = mu|mu> for a = sqrt(m w/2hbar) x + i p/sqrt(2 hbar m w)."""
    vac = vacuum_state(m, omega, hbar)
    mu = complex(mu)
    d = np.array([math.sqrt(2 * hbar / (m * omega)) * mu.real, math.sqrt(2 * hbar * m * omega) * mu.imag])
    return GaussianState(d, vac.V, hbar)


def _matrix(S) -> np.ndarray:
    return np.asarray(getattr(S, "matrix", S), dtype=float)


def apply_map(S, state: GaussianState, tol: float = 1e-9) -> GaussianState:
    """Transport moments: d -> S d, V -> S V S^T."""
    M = _matrix(S)
    if abs(np.linalg.det(M) - 1.0) > tol:
        raise InvariantViolationError("apply_map needs a symplectic matrix")
    return GaussianState(M @ state.d, M @ state.V @ M.T, state.hbar)


def mean_energy(state: GaussianState, energy: EnergyForm) -> float:
    G = energy.G
    return 0.5 * float(np.trace(G @ state.V)) + 0.5 * float(state.d @ G @ state.d)


def energy_variance(state: GaussianState, energy: EnergyForm) -> float:
    """Var(H) = Tr(GVGV)/2 + d^T GVG d + (hbar^2/8) Tr((GJ)^2).

    The last term is the ordering correction; for H = hbar w (n + 1/2) it is
    -hbar^2 w^2 / 4 and makes the matched vacuum an exact zero.
    """
    G, V, d = energy.G, state.V, state.d
    GV = G @ V
    GJ = G @ J
    return (
        0.5 * float(np.trace(GV @ GV))
        + float(d @ GV @ G @ d)
        + state.hbar**2 / 8.0 * float(np.trace(GJ @ GJ))
    )


def hs_overlap(s1: GaussianState, s2: GaussianState) -> float:
    """Tr(rho1 rho2) = hbar / sqrt(det(V1+V2)) exp(-dd^T (V1+V2)^-1 dd / 2)."""
    sigma = s1.V + s2.V
    det = float(np.linalg.det(sigma))
    if not det > 0:
        raise DegenerateStateError("V1 + V2 is singular")
    dd = s1.d - s2.d
    return s1.hbar / math.sqrt(det) * math.exp(-0.5 * float(dd @ np.linalg.solve(sigma, dd)))


def purity(state: GaussianState) -> float:
    return state.hbar / math.sqrt(float(np.linalg.det(2.0 * state.V)))
