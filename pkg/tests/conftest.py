"""Shared fixtures.  The finite-difference residual helpers and per-family
parameter draws used across the test modules live in frwcosmo.validate, where
the validation suite consumes them at runtime too."""

import numpy as np
import pytest

from frwcosmo.validate import (  # noqa: F401  (re-exported for test modules)
    FAMILY_DRAWS,
    fd_residuals,
    representative_segment,
)


@pytest.fixture
def rng():
    # Fixed seed: failures must reproduce byte for byte.
    return np.random.default_rng(20260822)
