"""Clock-averaged figures of merit in the small-noise regime.

Everything here works from the perturbative map (S0, S1, S2) and the input
moments.  The quadratic log-overlap kernel

    -log K(v, v') = -log P0 + b (v + v') + a (v^2 + v'^2)/2 - c v v'

turns the v-averages of purity and target overlap into Gaussian integrals.
Energy quantities are expanded to the leading even order in sigma_v.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError, OutOfRegimeError, UndefinedRatioError
from .gaussian import EnergyForm, GaussianState, coherent_state, purity
from .perturbation import PerturbativeMap, linear_response


@dataclass(frozen=True)
class ClockSpec:
    """Gaussian clock parameter v with standard deviation sigma_v."""

    sigma_v: float

    def __post_init__(self):
        if not (self.sigma_v >= 0 and math.isfinite(self.sigma_v)):
            raise InvalidParameterError("sigma_v must be finite and >= 0")

    @classmethod
    def from_pointer(cls, M: float, p2: float) -> "ClockSpec":
        """sigma_v^2 = <P^2> / M^2 for a free pointer of mass M."""
        if not (M > 0 and p2 >= 0):
            raise InvalidParameterError("need M > 0 and <P^2> >= 0")
        return cls(math.sqrt(p2) / M)


@dataclass(frozen=True)
class KernelCoefficients:
    a: float
    b: float
    c: float
    P0: float
    source: str = ""


@dataclass(frozen=True)
class EnergySusceptibility:
    E1: float
    chi_E: float
    W2: float


@dataclass(frozen=True)
class ObservableReport:
    delta_E_bar: float
    sigma_E2_bar: float
    var_mean_E: float
    F_HS: float
    P_mix: float
    P0: float
    delta_S2: float
    S_L: float
    R_E: float | None
    method: str
    tau: float = math.nan
    sigma_v: float = math.nan
    mu: complex = 0j

    @property
    def tur_slack(self) -> float:
        """-2 ln F_HS - Delta S2; nonnegative for any mixture."""
        return -2.0 * math.log(self.F_HS) - self.delta_S2


@dataclass(frozen=True)
class ExpandedMoments:
    d0: np.ndarray
    d1: np.ndarray
    d2: np.ndarray
    V0: np.ndarray
    V1: np.ndarray
    V2: np.ndarray


def expanded_moments(pmap: PerturbativeMap, state: GaussianState) -> ExpandedMoments:
    """Output moments to second order in v: d_v = d0 + v d1 + v^2 d2/2, same for V."""
    S0, S1, S2 = pmap.S0, pmap.S1, pmap.S2
    d, Vi = state.d, state.V
    V1 = S1 @ Vi @ S0.T + S0 @ Vi @ S1.T
    V2 = S2 @ Vi @ S0.T + S0 @ Vi @ S2.T + 2.0 * S1 @ Vi @ S1.T
    return ExpandedMoments(S0 @ d, S1 @ d, S2 @ d, S0 @ Vi @ S0.T, V1, V2)


def kernel_coefficients(pmap: PerturbativeMap, state: GaussianState) -> KernelCoefficients:
    mom = expanded_moments(pmap, state)
    V0inv = np.linalg.inv(mom.V0)
    Q = V0inv @ mom.V1
    trQ2 = float(np.trace(Q @ Q))
    disp = 0.5 * float(mom.d1 @ V0inv @ mom.d1)
    b = 0.25 * float(np.trace(Q))
    a = 0.25 * float(np.trace(V0inv @ mom.V2)) - trQ2 / 8.0 + disp
    c = trQ2 / 8.0 + disp
    P0 = purity(GaussianState(mom.d0, mom.V0, state.hbar))
    return KernelCoefficients(a, b, c, P0, source=f"{pmap.kind}:tau={pmap.tau:g}")


@dataclass(frozen=True)
class MixtureFigures:
    P_mix: float
    F_HS: float
    delta_S2: float
    S_L: float


def closed_form_mixture(kc: KernelCoefficients, clock: ClockSpec) -> MixtureFigures:
    """Gaussian-kernel averages of purity and target overlap."""
    s2 = clock.sigma_v**2
    if s2 == 0.0:
        return MixtureFigures(kc.P0, 1.0, 0.0, 0.0)
    one_a = 1.0 + kc.a * s2
    den = one_a**2 - (kc.c * s2) ** 2
    if not (den > 0 and one_a > 0):
        raise OutOfRegimeError(
            f"(1 + a s^2)^2 - (c s^2)^2 = {den:.3g}: sigma_v too large for the quadratic kernel"
        )
    ratio = math.exp(kc.b**2 * s2 * (1.0 + (kc.a + kc.c) * s2) / den) / math.sqrt(den)
    F = math.exp(kc.b**2 * s2 / (2.0 * one_a)) / math.sqrt(one_a)
    return MixtureFigures(kc.P0 * ratio, F, -math.log(ratio), 1.0 - ratio)


def energy_susceptibility(pmap: PerturbativeMap, state: GaussianState,
                          energy: EnergyForm | None = None) -> EnergySusceptibility:
    """Linear energy response E1, chi_E = E2/2 and W2 = d^2 Var(H_f)/dv^2 at v = 0."""
    energy = energy or EnergyForm(pmap.omega_out, pmap.m, state.hbar)
    G = energy.G
    mom = expanded_moments(pmap, state)
    d0, d1, d2 = mom.d0, mom.d1, mom.d2
    V0, V1, V2 = mom.V0, mom.V1, mom.V2
    E1 = 0.5 * float(np.trace(G @ V1)) + float(d0 @ G @ d1)
    chi = 0.25 * float(np.trace(G @ V2)) + 0.5 * float(d1 @ G @ d1) + 0.5 * float(d0 @ G @ d2)
    # Var = Tr(G V G V)/2 + d^T (G V G) d + const, differentiated twice
    M0, M1, M2 = G @ V0 @ G, G @ V1 @ G, G @ V2 @ G
    W2 = (
        float(np.trace(G @ V1 @ G @ V1)) + float(np.trace(G @ V0 @ G @ V2))
        + 2.0 * float(d2 @ M0 @ d0) + 2.0 * float(d1 @ M0 @ d1)
        + 4.0 * float(d1 @ M1 @ d0) + float(d0 @ M2 @ d0)
    )
    return EnergySusceptibility(E1, chi, W2)


def averaged_energy_stats(susc: EnergySusceptibility, clock: ClockSpec) -> tuple[float, float, float]:
    """(Delta E bar, sigma_E^2 bar, Var_v <H_f>) at leading order in sigma_v^2."""
    s2 = clock.sigma_v**2
    return susc.chi_E * s2, 0.5 * susc.W2 * s2, susc.E1**2 * s2


def tur_ratio(S_L: float, sigma_E2_bar: float, delta_E_bar: float) -> float:
    """R_E = S_L sigma_E^2 bar / (Delta E bar)^2."""
    if delta_E_bar == 0.0:
        raise UndefinedRatioError("Delta E bar = 0: TUR ratio undefined")
    return S_L * sigma_E2_bar / delta_E_bar**2


def _ratio_or_none(S_L, sig, dE):
    try:
        return tur_ratio(S_L, sig, dE)
    except UndefinedRatioError:
        return None


def closed_form_report(pmap: PerturbativeMap, state: GaussianState, clock: ClockSpec,
                       energy: EnergyForm | None = None, mu: complex = 0j) -> ObservableReport:
    """All figures of merit from the closed forms and leading-order energy moments."""
    kc = kernel_coefficients(pmap, state)
    mix = closed_form_mixture(kc, clock)
    susc = energy_susceptibility(pmap, state, energy)
    dE, sig, var_mean = averaged_energy_stats(susc, clock)
    return ObservableReport(
        delta_E_bar=dE, sigma_E2_bar=sig, var_mean_E=var_mean,
        F_HS=mix.F_HS, P_mix=mix.P_mix, P0=kc.P0, delta_S2=mix.delta_S2, S_L=mix.S_L,
        R_E=_ratio_or_none(mix.S_L, sig, dE), method="closed_form",
        tau=pmap.tau, sigma_v=clock.sigma_v, mu=complex(mu),
    )


def coherent_tur_closed(mu_abs: float, cos_phi: float, r: float, X: float) -> float:
    """Closed-form coherent-state TUR ratio in terms of X = 2 sigma_v^2 |beta1|^2.

    With A = 1 + 2 r cos(phi) + r^2, B = 1 + r cos(phi), Y = 1 + 2|mu|^2 A:

        R_E = 4Y / (1 + XY + sqrt(1 + XY)) * (1 + 3X/2 + 2|mu|^2 (1 + 3XB)) / (1 + 2|mu|^2 B)^2
    """
    if X < 0:
        raise InvalidParameterError("X must be nonnegative")
    n = mu_abs**2
    A = 1.0 + 2.0 * r * cos_phi + r * r
    B = 1.0 + r * cos_phi
    Y = 1.0 + 2.0 * n * A
    XY = X * Y
    first = 4.0 * Y / (1.0 + XY + math.sqrt(1.0 + XY))
    return first * (1.0 + 1.5 * X + 2.0 * n * (1.0 + 3.0 * X * B)) / (1.0 + 2.0 * n * B) ** 2


@dataclass(frozen=True)
class PhaseAverage:
    value: float
    n_phase: int
    excluded: tuple[float, ...]


def phase_averaged_tur(pmap: PerturbativeMap, clock: ClockSpec, mu_abs: float,
                       n_phase: int = 32, hbar: float = 1.0) -> PhaseAverage:
    """Trapezoidal average of the closed-form R_E over arg(mu) in [0, 2 pi).

    The input is the coherent state of amplitude |mu| e^{i phi} at the
    protocol's initial frequency.  Phases where Delta E bar vanishes are
    dropped and listed in ``excluded``.
    """
    if n_phase < 8:
        raise InvalidParameterError("n_phase must be >= 8")
    vals, excluded = [], []
    for k in range(n_phase):
        phi = 2.0 * math.pi * k / n_phase
        mu = mu_abs * complex(math.cos(phi), math.sin(phi))
        state = coherent_state(mu, pmap.m, pmap.omega_in, hbar)
        rep = closed_form_report(pmap, state, clock, mu=mu)
        if rep.R_E is None:
            excluded.append(phi)
        else:
            vals.append(rep.R_E)
    if not vals:
        raise UndefinedRatioError("Delta E bar vanished at every phase")
    return PhaseAverage(float(np.mean(vals)), n_phase, tuple(excluded))


def vacuum_closed_forms(beta1_abs: float, clock: ClockSpec) -> tuple[float, float]:
    """(F_HS, P/P0) for vacuum input: 1/sqrt(1 + |b1|^2 s^2), 1/sqrt(1 + 2|b1|^2 s^2)."""
    x = (beta1_abs * clock.sigma_v) ** 2
    return 1.0 / math.sqrt(1.0 + x), 1.0 / math.sqrt(1.0 + 2.0 * x)


def sigma_for_target(pmap: PerturbativeMap, target: float) -> ClockSpec:
    """Clock width giving sigma_v |beta1| = target."""
    b1 = abs(linear_response(pmap, None).beta1)
    if b1 == 0:
        raise InvalidParameterError("|beta1| = 0: no clock sensitivity")
    return ClockSpec(target / b1)
