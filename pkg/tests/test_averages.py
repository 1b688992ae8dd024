import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from clocksta.averages import (
    ClockSpec,
    averaged_energy_stats,
    closed_form_mixture,
    closed_form_report,
    coherent_tur_closed,
    energy_susceptibility,
    kernel_coefficients,
    phase_averaged_tur,
    sigma_for_target,
    tur_ratio,
    vacuum_closed_forms,
)
from clocksta.errors import InvalidParameterError, OutOfRegimeError, UndefinedRatioError
from clocksta.gaussian import EnergyForm, apply_map, coherent_state, hs_overlap, mean_energy, vacuum_state
from clocksta.perturbation import linear_response
from clocksta.symplectic import propagate


def _beta1(pmap):
    return abs(linear_response(pmap, None).beta1)


def test_clock_spec():
    assert ClockSpec.from_pointer(2.0, 0.01).sigma_v == pytest.approx(0.05)
    with pytest.raises(InvalidParameterError):
        ClockSpec(-0.1)
    with pytest.raises(InvalidParameterError):
        ClockSpec.from_pointer(0.0, 1.0)


@pytest.mark.parametrize("fixture", ["finite_pmap", "infinite_pmap"])
def test_vacuum_kernel(fixture, request):
    pmap = request.getfixturevalue(fixture)
    kc = kernel_coefficients(pmap, vacuum_state(pmap.m, pmap.omega_in))
    b1sq = _beta1(pmap) ** 2
    # the truncated arctan window leaves beta0 ~ 1e-5, which enters at that order
    tol = 1e-7 if pmap.kind == "finite" else 1e-4
    assert kc.a == pytest.approx(b1sq, rel=tol)
    assert kc.c == pytest.approx(b1sq, rel=tol)
    assert abs(kc.b) < tol
    assert kc.P0 == pytest.approx(1.0)


@pytest.mark.parametrize("mu", [0j, 1.0 + 0j, 0.6 - 0.8j])
def test_kernel_against_finite_differences(finite_schedule, finite_pmap, mu):
    state = coherent_state(mu, 1.0, finite_schedule.omega_in)
    kc = kernel_coefficients(finite_pmap, state)
    h = 1e-3
    out = {v: apply_map(propagate(finite_schedule, v)[0], state) for v in (-h, 0.0, h)}
    L = {(x, y): -math.log(hs_overlap(out[x], out[y])) for x in out for y in out}
    b_fd = (L[(h, 0.0)] - L[(-h, 0.0)]) / (2 * h)
    a_fd = (L[(h, 0.0)] - 2 * L[(0.0, 0.0)] + L[(-h, 0.0)]) / h**2
    c_fd = -(L[(h, h)] - L[(h, -h)] - L[(-h, h)] + L[(-h, -h)]) / (4 * h * h)
    assert kc.b == pytest.approx(b_fd, abs=1e-4)
    assert kc.a == pytest.approx(a_fd, abs=1e-4)
    assert kc.c == pytest.approx(c_fd, abs=1e-4)


def test_constant_schedule_is_trivial(constant_schedule):
    from clocksta.perturbation import expand_map
    pmap = expand_map(constant_schedule)
    state = coherent_state(0.5j, 1.0, pmap.omega_in)
    kc = kernel_coefficients(pmap, state)
    assert kc.a == kc.b == kc.c == 0.0
    rep = closed_form_report(pmap, state, ClockSpec(0.3))
    assert rep.F_HS == 1.0 and rep.S_L == 0.0 and rep.delta_E_bar == 0.0
    assert rep.R_E is None


def test_zero_width_clock(finite_pmap):
    rep = closed_form_report(finite_pmap, vacuum_state(1.0, 1.0), ClockSpec(0.0))
    assert rep.F_HS == 1.0 and rep.S_L == 0.0 and rep.delta_S2 == 0.0
    assert rep.P_mix == pytest.approx(rep.P0)


def test_out_of_regime():
    from clocksta.averages import KernelCoefficients
    with pytest.raises(OutOfRegimeError):
        closed_form_mixture(KernelCoefficients(-1.0, 0.0, 0.5, 1.0), ClockSpec(2.0))


@pytest.mark.parametrize("fixture", ["finite_pmap", "infinite_pmap"])
def test_vacuum_energy_response(fixture, request):
    pmap = request.getfixturevalue(fixture)
    susc = energy_susceptibility(pmap, vacuum_state(pmap.m, pmap.omega_in))
    tol = 1e-8 if pmap.kind == "finite" else 1e-4
    assert abs(susc.E1) < tol
    assert susc.chi_E == pytest.approx(pmap.omega_out * _beta1(pmap) ** 2, rel=tol)


def test_energy_susceptibility_fd(finite_schedule, finite_pmap):
    state = coherent_state(0.7 + 0.3j, 1.0, finite_schedule.omega_in)
    E = EnergyForm(finite_schedule.omega_out)
    h = 1e-3
    e = {v: mean_energy(apply_map(propagate(finite_schedule, v)[0], state), E) for v in (-h, 0.0, h)}
    susc = energy_susceptibility(finite_pmap, state)
    assert susc.E1 == pytest.approx((e[h] - e[-h]) / (2 * h), abs=1e-5)
    assert susc.chi_E == pytest.approx((e[h] - 2 * e[0.0] + e[-h]) / (2 * h * h), abs=1e-4)


def test_vacuum_closed_forms(finite_pmap):
    clock = sigma_for_target(finite_pmap, 0.05)
    rep = closed_form_report(finite_pmap, vacuum_state(1.0, 1.0), clock)
    F, P = vacuum_closed_forms(0.05, ClockSpec(1.0))
    assert rep.F_HS == pytest.approx(F, rel=1e-9)
    assert rep.P_mix / rep.P0 == pytest.approx(P, rel=1e-9)
    # R_E = 2 S_L / x with x = (sigma |beta1|)^2
    assert rep.R_E == pytest.approx(2 * (1 - P) / 0.05**2, rel=1e-8)
    dE, sig, var_mean = averaged_energy_stats(energy_susceptibility(finite_pmap, vacuum_state(1.0, 1.0)), clock)
    assert var_mean < 1e-20 and sig > 0 and dE > 0


def test_tur_ratio():
    assert tur_ratio(0.1, 2.0, 0.5) == pytest.approx(0.8)
    with pytest.raises(UndefinedRatioError):
        tur_ratio(0.1, 1.0, 0.0)


@settings(max_examples=15)
@given(st.floats(0.005, 0.1), st.floats(1.05, 2.0))
def test_figures_monotone_in_sigma(s, k):
    from clocksta.averages import KernelCoefficients
    kc = KernelCoefficients(1.0, 0.0, 1.0, 1.0)
    lo, hi = closed_form_mixture(kc, ClockSpec(s)), closed_form_mixture(kc, ClockSpec(k * s))
    assert hi.F_HS < lo.F_HS and hi.S_L > lo.S_L and hi.delta_S2 > lo.delta_S2


def test_tur_slack_nonnegative(finite_pmap):
    for mu in (0j, 1.0, 2j):
        state = coherent_state(mu, 1.0, 1.0)
        for s in (0.01, 0.05, 0.1):
            rep = closed_form_report(finite_pmap, state, ClockSpec(s))
            assert rep.tur_slack >= -1e-10


def test_coherent_closed_limits():
    assert coherent_tur_closed(0.0, 0.3, 0.7, 0.0) == pytest.approx(2.0)
    assert coherent_tur_closed(0.0, 0.3, 0.7, 1e9) == pytest.approx(6.0, rel=1e-3)
    # r = 0 removes the phase dependence and pins X -> 0 at 2 for every |mu|
    for m in (0.5, 1.0, 3.0):
        assert coherent_tur_closed(m, 0.1, 0.0, 0.0) == pytest.approx(2.0)
    # small |mu| slope at X = 0 is 4 r^2 per unit |mu|^2
    r, n = 0.6, 1e-4
    assert (coherent_tur_closed(math.sqrt(n), -0.4, r, 0.0) - 2.0) / n == pytest.approx(4 * r * r, rel=1e-2)
    with pytest.raises(InvalidParameterError):
        coherent_tur_closed(1.0, 0.0, 0.5, -1.0)


def test_phase_average(finite_pmap):
    clock = ClockSpec(0.05)
    vac = closed_form_report(finite_pmap, vacuum_state(1.0, 1.0), clock).R_E
    assert phase_averaged_tur(finite_pmap, clock, 0.0).value == pytest.approx(vac, rel=1e-12)
    a32 = phase_averaged_tur(finite_pmap, clock, 1.0, 32).value
    a64 = phase_averaged_tur(finite_pmap, clock, 1.0, 64).value
    assert abs(a32 - a64) < 1e-4 * abs(a64)
    with pytest.raises(InvalidParameterError):
        phase_averaged_tur(finite_pmap, clock, 1.0, 4)
