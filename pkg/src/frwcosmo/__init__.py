"""Closed-form and numeric solutions of barotropic FRW cosmologies."""

from .errors import FrwError
from .model import (
    CosmoParams,
    Family,
    Regime,
    classify,
    derived_state,
    reference_params,
    validate_params,
    z_of_a,
)

__version__ = "0.1.0"

__all__ = [
    "CosmoParams",
    "Family",
    "FrwError",
    "Regime",
    "__version__",
    "classify",
    "derived_state",
    "reference_params",
    "validate_params",
    "z_of_a",
]
