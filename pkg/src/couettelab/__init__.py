"""Spectral laboratory for inviscid damping of zero-mean Couette perturbations."""

from .grid import GridSpec, SpectralField, make_grid, zero_field
from .lineardyn import linear_damping_series, linear_velocity, orr_time
from .spectral import (
    convolve_fields,
    dyadic_project,
    gevrey_norm,
    paraproduct_split,
    product_fields,
)
from .toymodel import ToyParams, growth_envelope, max_growth, toy_integrate
from .weights import (
    LambdaProfile,
    ResonantInterval,
    WeightEvaluator,
    WeightParams,
    critical_interval,
)
from .lemmas import SweepSpec, inequality_toolbox_check, lemma_sweep, stability_check
from .simulation import (
    EchoSpec,
    SimConfig,
    biot_savart_moving,
    energy_report,
    nonlinear_rhs,
    run_simulation,
    step,
    triad_diagnostic,
)

__version__ = "0.1.0"

__all__ = [
    "GridSpec",
    "SpectralField",
    "make_grid",
    "zero_field",
    "gevrey_norm",
    "dyadic_project",
    "paraproduct_split",
    "convolve_fields",
    "product_fields",
    "WeightParams",
    "WeightEvaluator",
    "LambdaProfile",
    "ResonantInterval",
    "critical_interval",
    "SweepSpec",
    "lemma_sweep",
    "inequality_toolbox_check",
    "stability_check",
    "ToyParams",
    "toy_integrate",
    "growth_envelope",
    "max_growth",
    "orr_time",
    "linear_velocity",
    "linear_damping_series",
    "SimConfig",
    "EchoSpec",
    "biot_savart_moving",
    "nonlinear_rhs",
    "step",
    "energy_report",
    "triad_diagnostic",
    "run_simulation",
    "__version__",
]
