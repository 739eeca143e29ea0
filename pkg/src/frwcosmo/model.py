"""Parameter records, regime classification, and pointwise kinematics.

The model is a homogeneous isotropic universe with a linear barotropic fluid,
p = (gamma - 1) rho, spatial curvature kappa in {-1, 0, +1}, and a cosmological
constant, in units with 8 pi G / 3 = 1.  Everything downstream works with the
reduced index

    gamma_bar = (3/2) gamma - 1,

which is 1 for radiation, 1/2 for dust and -1 for a pure vacuum fluid, and with
the first integral of the expansion,

    adot^2 = z(a),
    z(a) = C a^(-2 gamma_bar) - kappa + (Lambda/3) a^2     (gamma_bar != -1),
    z(a) = C a^2 - kappa                                    (gamma_bar == -1).

For the vacuum index the cosmological constant is dynamically absorbed into C,
which is why z drops Lambda there.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import (
    BadCurvature,
    GammaBarZero,
    NegativeDensity,
    NonPositiveConstant,
)

# Degenerate reduced indices 1/(2n+1); n = 0 (radiation) is excluded because the
# explicit radiation families cover it.
DEGENERATE_GAMMA_TOL = 1e-12
DEGENERATE_N_RANGE = (-1, 50)


class Family(Enum):
    """Closed-form solution families and the two catch-all buckets."""

    RadiationLambdaLargeSinh = "RadiationLambdaLargeSinh"
    RadiationLambdaCritical = "RadiationLambdaCritical"
    RadiationLambdaSmallCosh = "RadiationLambdaSmallCosh"
    RadiationLambdaNegativeTrig = "RadiationLambdaNegativeTrig"
    FlatRadiationSinh = "FlatRadiationSinh"
    FlatRadiationTrig = "FlatRadiationTrig"
    ZeroLambdaFlatPowerLaw = "ZeroLambdaFlatPowerLaw"
    ZeroLambdaDeSitterFlat = "ZeroLambdaDeSitterFlat"
    ZeroLambdaCurvedRadiation = "ZeroLambdaCurvedRadiation"
    ZeroLambdaCurvedDust = "ZeroLambdaCurvedDust"
    ZeroLambdaCurvedVacuum = "ZeroLambdaCurvedVacuum"
    HypergeometricGeneral = "HypergeometricGeneral"
    LogarithmicDegenerate = "LogarithmicDegenerate"


@dataclass(frozen=True)
class CosmoParams:
    """Immutable model parameters.

    Parameters
    ----------
    gamma_bar : float
        Reduced barotropic index, nonzero.
    kappa : int
        Spatial curvature index, one of -1, 0, +1.
    lambda_cc : float
        Cosmological constant.  An exact 0.0 selects the zero-Lambda families.
    c_int : float
        Positive first-integral constant: the coefficient of a^(-2 gamma_bar)
        in z, or of a^2 when gamma_bar == -1.  In the 8 pi G / 3 = 1 convention
        it carries [length]^(2 gamma_bar + 2) / [time]^2 so that every term of
        z is a squared rate.
    a0 : float
        Positive reference scale factor anchoring the zero-Lambda families.
    t0 : float
        Reference time of each family's printed form (bang, bounce, or the
        passage through a0, depending on the family).
    """

    gamma_bar: float
    kappa: int
    lambda_cc: float
    c_int: float
    a0: float = 1.0
    t0: float = 0.0

    def __post_init__(self):
        for name in ("gamma_bar", "lambda_cc", "c_int", "a0", "t0"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite, got {v!r}")
        if self.gamma_bar == 0.0:
            raise GammaBarZero("gamma_bar = 0 is outside the model family")
        if self.kappa not in (-1, 0, 1):
            raise BadCurvature(f"kappa must be -1, 0 or +1, got {self.kappa!r}")
        if self.c_int <= 0.0:
            raise NonPositiveConstant(f"c_int must be positive, got {self.c_int}")
        if self.a0 <= 0.0:
            raise NonPositiveConstant(f"a0 must be positive, got {self.a0}")

    @property
    def is_vacuum(self) -> bool:
        return self.gamma_bar == -1.0


@dataclass(frozen=True)
class Regime:
    """Classification result: which solution family applies."""

    family: Family
    discriminant: float
    lambda_scale: float


@dataclass(frozen=True)
class DerivedState:
    """Pointwise fluid state recovered from (a, adot)."""

    hubble: float
    energy_density: float
    pressure: float


@dataclass
class Trajectory:
    """Sampled solution a(t) with its velocity and per-sample constraint residual.

    times must be strictly increasing; a must be positive except at the first or
    last sample, where zero marks a big-bang or big-crunch boundary.
    """

    times: np.ndarray
    a: np.ndarray
    adot: np.ndarray
    residual_friedmann: np.ndarray
    params: CosmoParams
    method: str = ""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times = np.asarray(self.times, dtype=float)
        self.a = np.asarray(self.a, dtype=float)
        self.adot = np.asarray(self.adot, dtype=float)
        self.residual_friedmann = np.asarray(self.residual_friedmann, dtype=float)
        n = self.times.size
        if not (self.a.size == self.adot.size == self.residual_friedmann.size == n):
            raise ValueError("trajectory arrays must have equal length")
        if n >= 2 and not np.all(np.diff(self.times) > 0.0):
            raise ValueError("trajectory times must be strictly increasing")
        interior = self.a[1:-1] if n > 2 else self.a[:0]
        if np.any(interior <= 0.0) or np.any(self.a < 0.0):
            raise ValueError("scale factor must be positive away from window endpoints")

    def __len__(self) -> int:
        return int(self.times.size)


def validate_params(raw) -> CosmoParams:
    """Build CosmoParams from a raw mapping, applying all invariants.

    Accepts the keys of CosmoParams; kappa may arrive as a float from config
    files and is narrowed to int only when it is exactly integral.
    """
    data = dict(raw)
    unknown = set(data) - {"gamma_bar", "kappa", "lambda_cc", "c_int", "a0", "t0"}
    if unknown:
        raise ValueError(f"unknown parameter keys: {sorted(unknown)}")
    missing = {"gamma_bar", "kappa", "lambda_cc", "c_int"} - set(data)
    if missing:
        raise ValueError(f"missing parameter keys: {sorted(missing)}")
    kappa = data["kappa"]
    if isinstance(kappa, float):
        if kappa != int(kappa):
            raise BadCurvature(f"kappa must be -1, 0 or +1, got {kappa!r}")
        kappa = int(kappa)
    if not isinstance(kappa, int):
        raise BadCurvature(f"kappa must be -1, 0 or +1, got {kappa!r}")
    return CosmoParams(
        gamma_bar=float(data["gamma_bar"]),
        kappa=kappa,
        lambda_cc=float(data["lambda_cc"]),
        c_int=float(data["c_int"]),
        a0=float(data.get("a0", 1.0)),
        t0=float(data.get("t0", 0.0)),
    )


def reference_params(gamma_bar, kappa, lambda_cc, a0=1.0, t0=0.0) -> CosmoParams:
    """CosmoParams with c_int pinned to the reference normalization.

    The zero-Lambda closed forms fix the integration constant so that the
    solution scale is set by a0 alone: C = a0^(2 gamma_bar), or a0^(-2) for the
    vacuum index.
    """
    exponent = -2.0 if gamma_bar == -1.0 else 2.0 * gamma_bar
    return CosmoParams(gamma_bar, kappa, lambda_cc, float(a0) ** exponent, a0, t0)


def z_of_a(params: CosmoParams, a):
    """Squared expansion rate adot^2 as a function of the scale factor."""
    a = np.asarray(a, dtype=float)
    if params.is_vacuum:
        return params.c_int * a**2 - params.kappa
    return (
        params.c_int * a ** (-2.0 * params.gamma_bar)
        - params.kappa
        + (params.lambda_cc / 3.0) * a**2
    )


def dz_da(params: CosmoParams, a):
    """Derivative of z with respect to a."""
    a = np.asarray(a, dtype=float)
    if params.is_vacuum:
        return 2.0 * params.c_int * a
    return (
        -2.0 * params.gamma_bar * params.c_int * a ** (-2.0 * params.gamma_bar - 1.0)
        + (2.0 * params.lambda_cc / 3.0) * a
    )


def d2z_da2(params: CosmoParams, a):
    """Second derivative of z with respect to a."""
    a = np.asarray(a, dtype=float)
    if params.is_vacuum:
        return 2.0 * params.c_int * np.ones_like(a)
    gb = params.gamma_bar
    return (
        2.0 * gb * (2.0 * gb + 1.0) * params.c_int * a ** (-2.0 * gb - 2.0)
        + 2.0 * params.lambda_cc / 3.0
    )


def rhs_second_order(params: CosmoParams, a):
    """Acceleration addot of the decoupled second-order equation.

    Equal to dz/da / 2, so trajectories of this equation conserve
    adot^2 - z(a) exactly.
    """
    a = np.asarray(a, dtype=float)
    if params.is_vacuum:
        return params.c_int * a
    return (
        params.lambda_cc / 3.0
    ) * a - params.c_int * params.gamma_bar * a ** (-(2.0 * params.gamma_bar + 1.0))


def accel_with_curvature(params: CosmoParams, a, adot):
    """Acceleration from the curvature-explicit master equation.

    a addot + gamma_bar adot^2 + gamma_bar kappa = (Lambda/3)(gamma_bar + 1) a^2.
    On the constraint surface adot^2 = z(a) this coincides with
    rhs_second_order; off it the two vector fields differ, which makes the pair
    useful as independent integration targets.
    """
    a = np.asarray(a, dtype=float)
    adot = np.asarray(adot, dtype=float)
    gb = params.gamma_bar
    return (
        (params.lambda_cc / 3.0) * (gb + 1.0) * a**2 - gb * adot**2 - gb * params.kappa
    ) / a


def lambda_scale(lambda_cc: float) -> float:
    """Rate scale sqrt(|Lambda| / 3); zero for Lambda = 0."""
    return math.sqrt(abs(lambda_cc) / 3.0)


def discriminant(params: CosmoParams) -> float:
    """kappa^2 - 4 C Lambda / 3, the radiation-family regime discriminant.

    Defined for any parameters; it drives classification only for
    gamma_bar = 1.  Multiplication before the division lets boundary
    constructions like Lambda = 3/(4C) land on an exact zero.
    """
    return params.kappa**2 - (4.0 * params.c_int * params.lambda_cc) / 3.0


def degenerate_index(gamma_bar: float):
    """Index n with gamma_bar = 1/(2n+1) in the degenerate set, else None.

    The scan covers n in [-1, 50] excluding n = 0, with absolute tolerance
    1e-12 on gamma_bar.
    """
    lo, hi = DEGENERATE_N_RANGE
    for n in range(lo, hi + 1):
        if n == 0:
            continue
        if abs(gamma_bar - 1.0 / (2 * n + 1)) <= DEGENERATE_GAMMA_TOL:
            return n
    return None


def classify(params: CosmoParams) -> Regime:
    """Deterministic total map from parameters to a solution family.

    The zero-Lambda test is exact on lambda_cc == 0.0; the zero-Lambda
    formulas are a separate analytic family, not a limit.  A degenerate
    gamma_bar wins only when no explicit closed form is in scope.  Parameters
    with Lambda != 0 and a generic non-radiation index have no closed family
    here and fall into the HypergeometricGeneral bucket, whose closed form is
    available only for Lambda = 0 and kappa != 0; numeric methods cover the
    rest of that bucket.
    """
    disc = discriminant(params)
    lam = lambda_scale(params.lambda_cc)
    gb = params.gamma_bar

    def regime(family):
        return Regime(family=family, discriminant=disc, lambda_scale=lam)

    if params.lambda_cc == 0.0:
        if params.kappa == 0:
            if gb == -1.0:
                return regime(Family.ZeroLambdaDeSitterFlat)
            return regime(Family.ZeroLambdaFlatPowerLaw)
        if gb == 1.0:
            return regime(Family.ZeroLambdaCurvedRadiation)
        if gb == 0.5:
            return regime(Family.ZeroLambdaCurvedDust)
        if gb == -1.0:
            return regime(Family.ZeroLambdaCurvedVacuum)
        if degenerate_index(gb) is not None:
            return regime(Family.LogarithmicDegenerate)
        return regime(Family.HypergeometricGeneral)

    if gb == 1.0:
        if params.kappa == 0:
            if params.lambda_cc > 0.0:
                return regime(Family.FlatRadiationSinh)
            return regime(Family.FlatRadiationTrig)
        if params.lambda_cc < 0.0:
            return regime(Family.RadiationLambdaNegativeTrig)
        if disc < 0.0:
            return regime(Family.RadiationLambdaLargeSinh)
        if disc == 0.0:
            return regime(Family.RadiationLambdaCritical)
        return regime(Family.RadiationLambdaSmallCosh)

    if degenerate_index(gb) is not None:
        return regime(Family.LogarithmicDegenerate)
    return regime(Family.HypergeometricGeneral)


def derived_state(params: CosmoParams, a, adot, tol=1e-9) -> DerivedState:
    """Hubble rate, energy density and pressure from a kinematic state.

    rho = H^2 + kappa/a^2 - Lambda/3 in the 8 pi G / 3 = 1 convention, and
    p = (gamma - 1) rho with gamma = (2/3)(gamma_bar + 1).  On the constraint
    surface this reproduces the barotropic scaling rho = C a^(-3 gamma).
    Raises NegativeDensity when rho is negative beyond tol relative to the
    magnitude of its constituent terms.
    """
    if a <= 0.0:
        raise ValueError(f"scale factor must be positive, got {a}")
    hubble = adot / a
    rho = hubble**2 + params.kappa / a**2 - params.lambda_cc / 3.0
    scale = max(1.0, hubble**2 + 1.0 / a**2 + abs(params.lambda_cc) / 3.0)
    if rho < -tol * scale:
        raise NegativeDensity(f"rho = {rho} at a = {a}")
    gamma = (2.0 / 3.0) * (params.gamma_bar + 1.0)
    return DerivedState(hubble=hubble, energy_density=rho, pressure=(gamma - 1.0) * rho)
