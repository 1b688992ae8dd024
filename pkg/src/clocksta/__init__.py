"""Clock-driven shortcuts to adiabaticity for a parametric oscillator.

Schedules and STA frequencies live in :mod:`protocols`, per-realization maps
in :mod:`symplectic`, the v-expansion in :mod:`perturbation`, Gaussian-state
algebra in :mod:`gaussian`, clock averages in :mod:`averages` and the
quadrature reference in :mod:`oracle`.
"""

from .averages import (
    ClockSpec,
    EnergySusceptibility,
    KernelCoefficients,
    ObservableReport,
    averaged_energy_stats,
    closed_form_mixture,
    closed_form_report,
    coherent_tur_closed,
    energy_susceptibility,
    kernel_coefficients,
    phase_averaged_tur,
    tur_ratio,
)
from .gaussian import (
    EnergyForm,
    GaussianState,
    apply_map,
    coherent_state,
    energy_variance,
    hs_overlap,
    mean_energy,
    purity,
    vacuum_state,
)
from .integrate import ODETolerances
from .oracle import QuadratureRule, clock_average, gauss_hermite, ladder_energy_moments, mixture_observables_oracle
from .perturbation import LinearResponse, PerturbativeMap, check_expansion, expand_map, linear_response
from .protocols import (
    FrequencyProtocol,
    STASchedule,
    eval_schedule,
    make_finite_protocol,
    make_infinite_protocol,
    make_tabulated_protocol,
    protocol_from_dict,
    validate_endpoints,
)
from .symplectic import (
    BogoliubovPair,
    SymplecticMap,
    bogoliubov_from_symplectic,
    propagate,
    symplectic_from_bogoliubov,
)

__version__ = "0.1.0"
