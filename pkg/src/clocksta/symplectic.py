"""Per-realization symplectic evolution and the Bogoliubov dictionary.

A map ``S`` acts on quadratures ``(x, p)`` in the Heisenberg picture,
``R(t_f) = S R(t_i)``.  Its Bogoliubov form is taken with respect to ladder
operators at two reference frequencies: ``omega_in`` for the input quadratures
and ``omega_out`` for the output ones,

    a_out(t_f) = alpha a_in + beta a_in^dagger.

With ``omega_in == omega_out`` this is the usual single-frequency dictionary.
For a protocol going from omega_i to omega_f the STA map is a pure rotation
only when the input ladder sits at omega_i, which is why the propagated maps
carry both references.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AccuracyError, InvalidParameterError, InvariantViolationError
from .integrate import ODETolerances, OscillatorGenerator, propagate_linear
from .protocols import STASchedule

DET_TOL = 1e-9
WRONSKIAN_FAIL = 1e-6

J = np.array([[0.0, 1.0], [-1.0, 0.0]])


@dataclass(frozen=True)
class SymplecticMap:
    """Real 2x2 quadrature map [[a, b], [c, d]] with reference frequencies."""

    matrix: np.ndarray
    m: float = 1.0
    omega_in: float = 1.0
    omega_out: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "matrix", np.array(self.matrix, dtype=float).reshape(2, 2))

    a = property(lambda self: float(self.matrix[0, 0]))
    b = property(lambda self: float(self.matrix[0, 1]))
    c = property(lambda self: float(self.matrix[1, 0]))
    d = property(lambda self: float(self.matrix[1, 1]))

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.matrix))

    def is_symplectic(self, tol: float = DET_TOL) -> bool:
        return abs(self.det - 1.0) < tol

    def __matmul__(self, other: "SymplecticMap") -> "SymplecticMap":
        # (self after other): input reference from other, output from self
        return SymplecticMap(self.matrix @ other.matrix, self.m, other.omega_in, self.omega_out)


@dataclass(frozen=True)
class BogoliubovPair:
    alpha: complex
    beta: complex
    m: float = 1.0
    omega_in: float = 1.0
    omega_out: float = 1.0

    @property
    def norm_defect(self) -> float:
        return abs(self.alpha) ** 2 - abs(self.beta) ** 2 - 1.0


@dataclass(frozen=True)
class TrajectorySolution:
    u: float
    u_dot: float
    w: float
    w_dot: float
    wronskian_drift: float
    steps: int
    rejected_steps: int
    min_omega2: float
    checkpoints: int

    @property
    def inverted(self) -> bool:
        """True if Omega_v^2 < 0 was met somewhere along the trajectory."""
        return self.min_omega2 < 0


def _scales(m, omega_in, omega_out):
    return math.sqrt(omega_out / omega_in), m * math.sqrt(omega_in * omega_out)


def dictionary(matrix, m=1.0, omega_in=1.0, omega_out=1.0) -> tuple[complex, complex]:
    """Linear map (a, b, c, d) -> (alpha, beta), no invariant checks.

    Being linear, it also converts v-derivatives of S into derivatives of
    (alpha, beta).
    """
    (a, b), (c, d) = np.asarray(matrix, dtype=float)
    k, mw = _scales(m, omega_in, omega_out)
    alpha = 0.5 * complex(a * k + d / k, c / mw - b * mw)
    beta = 0.5 * complex(a * k - d / k, c / mw + b * mw)
    return alpha, beta


def bogoliubov_from_symplectic(S: SymplecticMap, tol: float = DET_TOL) -> BogoliubovPair:
    """alpha = [a + d + i(c/(m w) - m w b)]/2, beta = [a - d + i(c/(m w) + m w b)]/2.

    Written for equal references; with omega_in != omega_out the diagonal
    entries pick up sqrt(omega_out/omega_in) and m w becomes m sqrt(w_in w_out).
    """
    if not S.is_symplectic(tol):
        raise InvariantViolationError(f"map is not symplectic: det = {S.det!r}")
    alpha, beta = dictionary(S.matrix, S.m, S.omega_in, S.omega_out)
    return BogoliubovPair(alpha, beta, S.m, S.omega_in, S.omega_out)


def symplectic_from_bogoliubov(pair: BogoliubovPair, tol: float = DET_TOL) -> SymplecticMap:
    """Exact inverse of :func:`bogoliubov_from_symplectic`."""
    if abs(pair.norm_defect) > tol:
        raise InvariantViolationError(
            f"|alpha|^2 - |beta|^2 = {1 + pair.norm_defect!r}, expected 1"
        )
    k, mw = _scales(pair.m, pair.omega_in, pair.omega_out)
    s, r = pair.alpha + pair.beta, pair.alpha - pair.beta
    mat = np.array([[s.real / k, -r.imag / mw], [mw * s.imag, k * r.real]])
    return SymplecticMap(mat, pair.m, pair.omega_in, pair.omega_out)


def constant_frequency_map(omega0: float, duration: float, m: float = 1.0) -> SymplecticMap:
    """Exact rotation for a constant frequency."""
    if not omega0 > 0:
        raise InvalidParameterError("omega0 must be positive")
    c, s = math.cos(omega0 * duration), math.sin(omega0 * duration)
    mat = np.array([[c, s / (m * omega0)], [-m * omega0 * s, c]])
    return SymplecticMap(mat, m, omega0, omega0)


def propagate(
    schedule: STASchedule,
    v: float = 0.0,
    tolerances: ODETolerances | None = None,
    t_start: float | None = None,
    t_end: float | None = None,
) -> tuple[SymplecticMap, TrajectorySolution]:
    """Integrate y'' + Omega_v^2(t) y = 0 for both fundamental solutions.

    Returns the map S_v = [[u, w/m], [m u', w']] at ``t_end`` (default: the
    window end) and the trajectory diagnostics.
    """
    tol = tolerances or ODETolerances()
    p = schedule.protocol
    t0 = p.t_start if t_start is None else float(t_start)
    t1 = p.t_end if t_end is None else float(t_end)
    p.check_domain([t0, t1])
    gen = OscillatorGenerator(schedule, v)
    Y, wr, stats = propagate_linear(gen, t0, t1, tol)
    drift = float(np.max(np.abs(np.asarray(wr) - 1.0)))
    if drift > WRONSKIAN_FAIL:
        raise AccuracyError(f"Wronskian drift {drift:.3g} exceeds {WRONSKIAN_FAIL}")
    m = schedule.m
    w_in = math.sqrt(float(p.omega2(t0)))
    w_out = math.sqrt(float(p.omega2(t1)))
    sol = TrajectorySolution(
        u=float(Y[0, 0]), u_dot=float(Y[1, 0]) / m, w=float(Y[0, 1]) * m, w_dot=float(Y[1, 1]),
        wronskian_drift=drift, steps=stats.steps, rejected_steps=stats.rejected,
        min_omega2=stats.min_omega2, checkpoints=len(wr) - 1,
    )
    return SymplecticMap(Y, m, w_in, w_out), sol
