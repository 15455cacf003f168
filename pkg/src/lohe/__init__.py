"""Coupled unitary-matrix oscillators, their mean-field limit, and the
diagnostics that certify synchronization behaviour numerically."""

__version__ = "0.1.0"

from .matcore import (
    Rng,
    coupling_kernel,
    expm_skew,
    frobenius_norm,
    operator_norm,
    retract_unitary,
    sample_gaussian_su,
    sample_haar,
)
from .model import Ensemble, Oscillator, lohe_generators

__all__ = [
    "Rng",
    "Ensemble",
    "Oscillator",
    "coupling_kernel",
    "expm_skew",
    "frobenius_norm",
    "lohe_generators",
    "operator_norm",
    "retract_unitary",
    "sample_gaussian_su",
    "sample_haar",
    "__version__",
]
