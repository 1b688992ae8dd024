"""Closed-form vs quadrature TUR ratio across the small-noise regime.

Prints the vacuum R_E at sigma_v |beta1| in {0.01, 0.02, 0.05, 0.1} for
several protocols, then the phase-averaged coherent R_E over |mu|.
"""

import numpy as np

from clocksta import (
    ClockSpec,
    STASchedule,
    closed_form_report,
    expand_map,
    make_finite_protocol,
    make_infinite_protocol,
    mixture_observables_oracle,
    phase_averaged_tur,
    vacuum_state,
)
from clocksta.averages import sigma_for_target

RUNS = [
    ("finite tau=0.5", STASchedule(make_finite_protocol(1.0, 2.0, 0.5))),
    ("finite tau=1", STASchedule(make_finite_protocol(1.0, 2.0, 1.0))),
    ("finite tau=2", STASchedule(make_finite_protocol(1.0, 2.0, 2.0))),
    ("infinite tau=0.2", STASchedule(make_infinite_protocol(1.0, 2.0, 0.2, 1e-3))),
]

if __name__ == "__main__":
    print(f"{'protocol':<18}{'sigma|b1|':>10}{'sigma_v':>10}{'R_E closed':>12}{'R_E oracle':>12}")
    for name, sched in RUNS:
        pmap = expand_map(sched)
        for target in (0.01, 0.02, 0.05, 0.1):
            clock = sigma_for_target(pmap, target)
            cf = closed_form_report(pmap, vacuum_state(), clock).R_E
            orc = mixture_observables_oracle(sched, vacuum_state(), clock, 32).R_E
            print(f"{name:<18}{target:>10.3g}{clock.sigma_v:>10.4g}{cf:>12.5f}{orc:>12.5f}")
    print()
    pmap = expand_map(RUNS[1][1])
    for sigma in (0.02, 0.05, 0.1):
        vals = [phase_averaged_tur(pmap, ClockSpec(sigma), m).value for m in (0.0, 0.5, 1.0, 2.0, 4.0)]
        print(f"finite tau=1 sigma_v={sigma}: phase-averaged R_E over |mu|=0,0.5,1,2,4:",
              np.round(vals, 4).tolist())
