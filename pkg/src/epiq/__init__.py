"""epiq: a numerical laboratory for epistemic inference.

Small dense Hilbert-space machinery (states, effects, density operators,
squared-overlap probabilities), spin-1/2 experiments (CHSH, the two-detector
three-switch experiment), classical inference principles (sufficiency,
ancillarity, mixture experiments, error-contrast variance estimation,
confidence distributions, entropy correlation), finite group actions with
model reduction, and 1-d wave/diffusion dynamics with cross-checked
residuals.  Every stochastic entry point takes an explicit seed.
"""

from . import continuum, groups, hilbert, inference, linalg, spin
from .hilbert import (
    DensityOperator,
    Effect,
    GPMeasure,
    Observable,
    born_probability,
    busch_reconstruct,
    expectation,
    luders_collapse,
    outcome_distribution,
)
from .inference import DiscreteExperiment, Statistic, is_ancillary, is_sufficient, reml_estimate
from .linalg import hermitian_eig, outer, trace_product
from .spin import Direction, chsh_value, mermin_simulate, singlet, transition_probability

__version__ = "0.1.0"

__all__ = [
    "continuum",
    "groups",
    "hilbert",
    "inference",
    "linalg",
    "spin",
    "DensityOperator",
    "Effect",
    "GPMeasure",
    "Observable",
    "born_probability",
    "busch_reconstruct",
    "expectation",
    "luders_collapse",
    "outcome_distribution",
    "DiscreteExperiment",
    "Statistic",
    "is_ancillary",
    "is_sufficient",
    "reml_estimate",
    "Direction",
    "chsh_value",
    "mermin_simulate",
    "singlet",
    "transition_probability",
    "hermitian_eig",
    "outer",
    "trace_product",
    "__version__",
]
