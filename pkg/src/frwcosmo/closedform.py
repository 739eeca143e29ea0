"""Closed-form scale-factor families.

Every family here is an explicit (or, for curved dust, implicit-algebraic)
solution of adot^2 = z(a), organized the same way classify() names them:

* curved radiation with Lambda != 0, in four regimes keyed by the sign of the
  discriminant kappa^2 - 4 C Lambda / 3 (sinh / exponential / cosh rows for
  Lambda > 0, a trig row for Lambda < 0), all in the squared variable y = a^2;
* flat radiation with Lambda != 0 (sinh and sin rows);
* the zero-Lambda flat power law and its de Sitter companion;
* the zero-Lambda curved tables: explicit radiation and vacuum rows, plus the
  implicit dust relation inverted by bisection.

Sign ambiguities exist only in the curved radiation table.  They are resolved
constructively: resolve_branch tries every inner sign and keeps the one that
is real, nonnegative, Friedmann-consistent, and vanishing at the window's
singular endpoints.  The outer sign is always +1; the negative mirror of a
scale factor is redundant.

Validity is decided by the radicand (or the printed domain, for the flat trig
row): evaluation outside raises OutsideWindow instead of returning NaN.  The
zero-Lambda families additionally require the reference normalization
c_int = a0^(2 gamma_bar) (a0^-2 for the vacuum index), since the printed forms
are scaled by a0 alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    AmbiguousBranch,
    NoBracket,
    NoValidBranch,
    OutsideWindow,
    WrongRegime,
)
from .model import (
    CosmoParams,
    Family,
    Trajectory,
    classify,
    discriminant,
    lambda_scale,
    z_of_a,
)

# Relative slack for "the radicand is zero up to roundoff" at window endpoints,
# and for the reference-normalization check on c_int.
RADICAND_TOL = 1e-12
NORMALIZATION_TOL = 1e-9

# kappa = -1 dust bang constant, kept in exact form so a(t0) = a0 holds.
DUST_OPEN_CONSTANT = math.sqrt(2.0) - math.acosh(math.sqrt(2.0))

_CURVED_RADIATION = (
    Family.RadiationLambdaLargeSinh,
    Family.RadiationLambdaCritical,
    Family.RadiationLambdaSmallCosh,
    Family.RadiationLambdaNegativeTrig,
)


@dataclass(frozen=True)
class TimeWindow:
    """Validity interval of one solution branch.

    Endpoints may be infinite.  A singular flag marks an endpoint where the
    branch ends in a -> 0 or hits a domain boundary of its printed form (a
    turning point of an implicit relation, a big-rip blowup), so samplers know
    to keep their distance.
    """

    t_min: float
    t_max: float
    singular_start: bool = False
    singular_end: bool = False

    def __post_init__(self):
        if not self.t_min < self.t_max:
            raise ValueError(f"need t_min < t_max, got [{self.t_min}, {self.t_max}]")

    def contains(self, t) -> bool:
        return bool(np.all((np.asarray(t) >= self.t_min) & (np.asarray(t) <= self.t_max)))


@dataclass(frozen=True)
class BranchChoice:
    """Resolved signs for a closed-form family.

    outer_sign is the overall sign on a and is always +1 here; inner_signs
    holds the resolved selection for the curved radiation table (one sign) and
    is empty for every family without a sign ambiguity.
    """

    outer_sign: int = 1
    inner_signs: tuple = ()

    def __post_init__(self):
        if self.outer_sign not in (1, -1):
            raise ValueError(f"outer_sign must be +-1, got {self.outer_sign!r}")
        if any(s not in (1, -1) for s in self.inner_signs):
            raise ValueError(f"inner signs must be +-1, got {self.inner_signs!r}")


TRIVIAL_BRANCH = BranchChoice(1, ())


def _require(condition, exc, message):
    if not condition:
        raise exc(message)


def _reference_exponent(gamma_bar: float) -> float:
    return -2.0 if gamma_bar == -1.0 else 2.0 * gamma_bar


def _require_reference_norm(params: CosmoParams):
    want = params.a0 ** _reference_exponent(params.gamma_bar)
    _require(
        abs(params.c_int - want) <= NORMALIZATION_TOL * want,
        WrongRegime,
        f"zero-Lambda closed forms need c_int = {want} (a0-normalized), got {params.c_int}",
    )


def _scalar_like(t, values):
    values = np.asarray(values, dtype=float)
    return float(values.reshape(())) if np.ndim(t) == 0 else values


def _a_from_y(y, yscale, t):
    """sqrt of the squared closed form, clamping roundoff droop at endpoints."""
    y = np.atleast_1d(np.asarray(y, dtype=float))
    bad = y < -RADICAND_TOL * yscale
    if np.any(bad):
        t_bad = np.broadcast_to(np.asarray(t, dtype=float), y.shape)[bad][0]
        raise OutsideWindow(f"main square root argument negative at t = {t_bad}")
    return np.sqrt(np.clip(y, 0.0, None))


def _curved_family(params: CosmoParams) -> Family:
    fam = classify(params).family
    _require(
        fam in _CURVED_RADIATION,
        WrongRegime,
        f"curved radiation table does not cover the {fam.value} family",
    )
    return fam


def _single_inner(branch: BranchChoice) -> int:
    if branch.outer_sign != 1:
        raise ValueError("the negative mirror branch is redundant; outer_sign must be +1")
    if len(branch.inner_signs) != 1:
        raise ValueError("curved radiation rows take exactly one inner sign")
    return branch.inner_signs[0]


def _curved_y_ydot(params: CosmoParams, sigma: int, tau):
    """Squared scale factor y and its time derivative for one inner sign.

    The cosh, exponential, and trig rows are evaluated through half-argument
    and expm1 rearrangements that are algebraically identical to the printed
    forms.  The printed numerators cancel to O(lambda^2 y) as Lambda -> 0, so
    the direct expressions lose a factor 1/lambda^2 of relative precision
    exactly where the zero-Lambda consistency checks look; the rearranged ones
    stay at roundoff.  Key identity: kappa + s sqrt(D) = 4 C lambda^2 /
    (kappa - s sqrt(D)) whenever the left side cancels (s kappa = -1).
    """
    fam = _curved_family(params)
    lam = lambda_scale(params.lambda_cc)
    disc = discriminant(params)
    kappa = float(params.kappa)
    arg = 2.0 * lam * np.asarray(tau, dtype=float)
    two_lam_sq = 2.0 * lam**2
    if fam is Family.RadiationLambdaLargeSinh:
        amp = math.sqrt(-disc)
        y = (kappa + sigma * amp * np.sinh(arg)) / two_lam_sq
        ydot = sigma * amp * np.cosh(arg) / lam
    elif fam is Family.RadiationLambdaCritical:
        y = ((kappa + sigma) + sigma * np.expm1(arg)) / two_lam_sq
        ydot = sigma * np.exp(arg) / lam
    elif fam is Family.RadiationLambdaSmallCosh:
        amp = math.sqrt(disc)
        if sigma * params.kappa < 0:
            base = 2.0 * params.c_int / (kappa - sigma * amp)
        else:
            base = (kappa + sigma * amp) / two_lam_sq
        half = np.sinh(lam * np.asarray(tau, dtype=float)) / lam
        y = base + (sigma * amp) * half**2
        ydot = sigma * amp * np.sinh(arg) / lam
    else:
        amp = math.sqrt(disc)
        corner = math.pi / 4.0 - arg / 2.0
        lead = 2.0 * params.c_int * np.sin(arg) / (amp + 1.0)
        if sigma * params.kappa > 0:
            y = sigma * (lead - (np.sin(corner) / lam) ** 2)
        else:
            y = sigma * (lead + (np.cos(corner) / lam) ** 2)
        ydot = sigma * amp * np.cos(arg) / lam
    return y, ydot


def _curved_yscale(params: CosmoParams) -> float:
    lam = lambda_scale(params.lambda_cc)
    return (1.0 + math.sqrt(abs(discriminant(params)))) / (2.0 * lam**2)


def radiation_curved(params: CosmoParams, branch: BranchChoice, t):
    """Curved radiation scale factor with Lambda != 0.

    With y = a^2, Delta = kappa^2 - 4 C Lambda / 3 and lambda = sqrt(|Lambda|/3),
    the rows are

        Lambda > 0, Delta < 0:  y = (kappa + s sqrt(-Delta) sinh 2 lambda tau) / 2 lambda^2
        Lambda > 0, Delta = 0:  y = (kappa + s exp(2 lambda tau)) / 2 lambda^2
        Lambda > 0, Delta > 0:  y = (kappa + s sqrt(Delta) cosh 2 lambda tau) / 2 lambda^2
        Lambda < 0:             y = (-kappa + s sqrt(Delta) sin 2 lambda tau) / 2 lambda^2

    with tau = t - t0 and s the resolved inner sign.  Each row satisfies the
    constraint identically for either sign; the branch narrows it to the
    physical one.  Accepts scalar or array t; raises OutsideWindow where the
    radicand is negative beyond roundoff.
    """
    sigma = _single_inner(branch)
    tau = np.asarray(t, dtype=float) - params.t0
    y, _ = _curved_y_ydot(params, sigma, tau)
    return _scalar_like(t, _a_from_y(y, _curved_yscale(params), t))


def radiation_flat(params: CosmoParams, t):
    """Flat radiation with Lambda != 0: a = (C^(1/4)/sqrt(lambda)) sqrt(sinh or sin).

    The sinh row (Lambda > 0) lives on t >= t0; the sin row (Lambda < 0) on
    one arc 2 lambda (t - t0) in [0, pi].  Both start at a big bang a(t0) = 0.
    """
    fam = classify(params).family
    _require(
        fam in (Family.FlatRadiationSinh, Family.FlatRadiationTrig),
        WrongRegime,
        f"flat radiation table does not cover the {fam.value} family",
    )
    lam = lambda_scale(params.lambda_cc)
    arg = 2.0 * lam * (np.asarray(t, dtype=float) - params.t0)
    prefactor = params.c_int**0.25 / math.sqrt(lam)
    if fam is Family.FlatRadiationSinh:
        radicand = np.sinh(arg)
    else:
        edge = RADICAND_TOL
        if np.any(np.atleast_1d(arg) < -edge) or np.any(np.atleast_1d(arg) > math.pi + edge):
            raise OutsideWindow("sin row is printed for 2 lambda (t - t0) in [0, pi]")
        radicand = np.sin(arg)
    return _scalar_like(t, prefactor * _a_from_y(radicand, 1.0, t))


def zero_lambda_flat(params: CosmoParams, t):
    """Flat Lambda = 0 solutions through a(t0) = a0.

    Power law a = a0 [1 + (gamma_bar + 1)(t - t0)/a0]^(1/(gamma_bar+1)) for
    gamma_bar != -1, exponential a = a0 exp((t - t0)/a0) for the vacuum index.
    Choosing t0 = a0/(gamma_bar+1) collapses the power law to a0 (t/t0)^(1/(gamma_bar+1));
    choosing t0 = a0 ln a0 collapses the exponential to exp(t/a0).
    """
    fam = classify(params).family
    _require(
        fam in (Family.ZeroLambdaFlatPowerLaw, Family.ZeroLambdaDeSitterFlat),
        WrongRegime,
        f"flat zero-Lambda forms do not cover the {fam.value} family",
    )
    _require_reference_norm(params)
    tau = np.asarray(t, dtype=float) - params.t0
    if fam is Family.ZeroLambdaDeSitterFlat:
        return _scalar_like(t, params.a0 * np.exp(tau / params.a0))
    gp = params.gamma_bar + 1.0
    radicand = 1.0 + gp * tau / params.a0
    if gp < 0.0:
        # Negative exponent: the radicand hitting zero is a blowup, not a bang.
        if np.any(np.atleast_1d(radicand) <= 0.0):
            raise OutsideWindow("power-law base must stay positive for 1/(gamma_bar+1) < 0")
        return _scalar_like(t, params.a0 * radicand ** (1.0 / gp))
    base = _a_from_y(radicand, 1.0, t) ** 2  # reuse the clamped-negativity guard
    return _scalar_like(t, params.a0 * base ** (1.0 / gp))


def zero_lambda_curved_explicit(params: CosmoParams, t):
    """Explicit curved Lambda = 0 rows: radiation and vacuum, either curvature.

    kappa = +1: a0 sqrt(1 - (1 - tau/a0)^2)  and  a0 cosh(tau/a0);
    kappa = -1: a0 sqrt(-1 + (1 + tau/a0)^2) and  a0 sinh(tau/a0 + arcsinh 1).
    """
    fam = classify(params).family
    _require(
        fam in (Family.ZeroLambdaCurvedRadiation, Family.ZeroLambdaCurvedVacuum),
        WrongRegime,
        f"explicit curved zero-Lambda rows do not cover the {fam.value} family",
    )
    _require_reference_norm(params)
    x = (np.asarray(t, dtype=float) - params.t0) / params.a0
    if fam is Family.ZeroLambdaCurvedVacuum:
        if params.kappa == 1:
            return _scalar_like(t, params.a0 * np.cosh(x))
        shifted = x + math.asinh(1.0)
        if np.any(np.atleast_1d(shifted) < -RADICAND_TOL):
            raise OutsideWindow("open vacuum branch starts at its bang")
        return _scalar_like(t, params.a0 * np.sinh(np.clip(shifted, 0.0, None)))
    if params.kappa == 1:
        y = 1.0 - (1.0 - x) ** 2
    else:
        y = -1.0 + (1.0 + x) ** 2
        if np.any(np.atleast_1d(np.asarray(x)) < -RADICAND_TOL):
            raise OutsideWindow("open radiation branch starts at its bang t = t0")
    return _scalar_like(t, params.a0 * _a_from_y(y, 1.0, t))


def _dust_closed_ratio(tau_over_a0: float) -> float:
    """Invert sqrt(A) sqrt(1-A) + arcsin sqrt(1-A) = tau/a0 for A = a/a0.

    Solved in B = sqrt(1-A), where the left side G(B) = B sqrt(1-B^2) + arcsin B
    rises from 0 to pi/2 with G' = 2 sqrt(1-B^2) bounded, so bisection to an
    interval of 1e-15 puts the back-substituted residual at the 1e-15 level.
    (In A itself the slope diverges at the turning point A = 1 and the
    1e-12 residual contract would be unreachable in floats.)
    """
    rhs = tau_over_a0
    if rhs < -RADICAND_TOL:
        raise OutsideWindow("closed dust branch starts at its turning point t = t0")
    if rhs > math.pi / 2.0 + RADICAND_TOL:
        raise NoBracket("closed dust relation has no root past tau/a0 = pi/2")
    rhs = min(max(rhs, 0.0), math.pi / 2.0)
    lo, hi = 0.0, 1.0
    for _ in range(200):
        if hi - lo <= 1e-15:
            break
        mid = 0.5 * (lo + hi)
        g = mid * math.sqrt(max(1.0 - mid * mid, 0.0)) + math.asin(mid)
        if g < rhs:
            lo = mid
        else:
            hi = mid
    b = 0.5 * (lo + hi)
    return 1.0 - b * b


def _dust_open_lhs(ratio: float) -> float:
    # arccosh sqrt(1+A) = log1p(A/(sqrt(1+A)+1) + sqrt(A)), stable near A = 0.
    root = math.sqrt(1.0 + ratio)
    return math.sqrt(ratio) * root - math.log1p(ratio / (root + 1.0) + math.sqrt(ratio))


def _dust_open_ratio(tau_over_a0: float) -> float:
    """Invert sqrt(A) sqrt(1+A) - arccosh sqrt(1+A) = tau/a0 + sqrt2 - arccosh sqrt2."""
    rhs = tau_over_a0 + DUST_OPEN_CONSTANT
    if rhs < -RADICAND_TOL:
        raise OutsideWindow("open dust branch starts at its bang")
    if rhs <= 0.0:
        return 0.0
    hi = 1.0
    for _ in range(200):
        if _dust_open_lhs(hi) >= rhs:
            break
        hi *= 2.0
    else:
        raise NoBracket(f"open dust bracket did not reach rhs = {rhs}")
    lo = 0.0
    for _ in range(200):
        if hi - lo <= 1e-15 * max(1.0, hi):
            break
        mid = 0.5 * (lo + hi)
        if _dust_open_lhs(mid) < rhs:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def zero_lambda_dust_implicit(params: CosmoParams, t):
    """Curved dust with Lambda = 0, from the implicit table relations.

    kappa = +1 is the collapsing half-branch from the turning point a0 at t0
    down to the crunch at t0 + a0 pi/2; kappa = -1 expands from its bang at
    t0 - a0 (sqrt2 - arccosh sqrt2) through a(t0) = a0.  The relation is
    inverted per sample by bisection; back substitution stays below 1e-12.
    """
    fam = classify(params).family
    _require(
        fam is Family.ZeroLambdaCurvedDust,
        WrongRegime,
        f"dust relations do not cover the {fam.value} family",
    )
    _require_reference_norm(params)
    tau = np.atleast_1d(np.asarray(t, dtype=float)) - params.t0
    solver = _dust_closed_ratio if params.kappa == 1 else _dust_open_ratio
    a = np.array([params.a0 * solver(x / params.a0) for x in tau])
    return _scalar_like(t, a)


def default_window(params: CosmoParams) -> TimeWindow:
    """Canonical validity window of the family's printed branch."""
    fam = classify(params).family
    lam = lambda_scale(params.lambda_cc)
    disc = discriminant(params)
    t0, a0 = params.t0, params.a0
    inf = math.inf
    if fam is Family.RadiationLambdaLargeSinh:
        bang = math.asinh(-params.kappa / math.sqrt(-disc)) / (2.0 * lam)
        return TimeWindow(t0 + bang, inf, singular_start=True)
    if fam is Family.RadiationLambdaCritical:
        if params.kappa == 1:
            return TimeWindow(-inf, inf)
        return TimeWindow(t0, inf, singular_start=True)
    if fam is Family.RadiationLambdaSmallCosh:
        if params.kappa == 1:
            return TimeWindow(-inf, inf)
        lag = math.acosh(1.0 / math.sqrt(disc)) / (2.0 * lam)
        return TimeWindow(t0 + lag, inf, singular_start=True)
    if fam is Family.RadiationLambdaNegativeTrig:
        phi = math.asin(1.0 / math.sqrt(disc))
        if params.kappa == 1:
            lo, hi = phi, math.pi - phi
        else:
            lo, hi = -phi, math.pi + phi
        return TimeWindow(
            t0 + lo / (2.0 * lam), t0 + hi / (2.0 * lam),
            singular_start=True, singular_end=True,
        )
    if fam is Family.FlatRadiationSinh:
        return TimeWindow(t0, inf, singular_start=True)
    if fam is Family.FlatRadiationTrig:
        return TimeWindow(t0, t0 + math.pi / (2.0 * lam), singular_start=True, singular_end=True)
    if fam is Family.ZeroLambdaFlatPowerLaw:
        gp = params.gamma_bar + 1.0
        if gp > 0.0:
            return TimeWindow(t0 - a0 / gp, inf, singular_start=True)
        return TimeWindow(-inf, t0 + a0 / (-gp), singular_end=True)
    if fam is Family.ZeroLambdaDeSitterFlat:
        return TimeWindow(-inf, inf)
    if fam is Family.ZeroLambdaCurvedRadiation:
        if params.kappa == 1:
            return TimeWindow(t0, t0 + 2.0 * a0, singular_start=True, singular_end=True)
        return TimeWindow(t0, inf, singular_start=True)
    if fam is Family.ZeroLambdaCurvedDust:
        if params.kappa == 1:
            return TimeWindow(t0, t0 + a0 * math.pi / 2.0, singular_start=True, singular_end=True)
        return TimeWindow(t0 - a0 * DUST_OPEN_CONSTANT, inf, singular_start=True)
    if fam is Family.ZeroLambdaCurvedVacuum:
        if params.kappa == 1:
            return TimeWindow(-inf, inf)
        return TimeWindow(t0 - a0 * math.asinh(1.0), inf, singular_start=True)
    raise WrongRegime(f"no closed-form window for the {fam.value} family")


def _window_probes(params: CosmoParams, window: TimeWindow, n=32):
    """Midpoints of n equal bins over the window, boxed to a finite span.

    The box has to reach past every candidate's own validity region, or a
    branch that is only valid on a bounded piece would pass all probes of an
    unbounded window.  The region edge sits where the competing radicand turns
    negative, at a hyperbolic argument of asinh or acosh of 1/sqrt|disc|.
    """
    lam = lambda_scale(params.lambda_cc)
    if lam > 0.0:
        arg_span = 5.0
        fam = classify(params).family
        if fam is Family.RadiationLambdaLargeSinh:
            arg_span = max(arg_span, 1.25 * math.asinh(1.0 / math.sqrt(-discriminant(params))) + 1.0)
        elif fam is Family.RadiationLambdaSmallCosh:
            arg_span = max(arg_span, 1.25 * math.acosh(1.0 / math.sqrt(discriminant(params))) + 1.0)
        elif fam is Family.RadiationLambdaNegativeTrig:
            arg_span = max(arg_span, 2.0 * math.pi + 1.0)
        horizon = arg_span / (2.0 * lam)
    else:
        horizon = 5.0 * max(params.a0, 1.0)
    lo = window.t_min if math.isfinite(window.t_min) else params.t0 - horizon
    hi = window.t_max if math.isfinite(window.t_max) else max(params.t0, lo) + horizon
    return lo + (hi - lo) * (np.arange(n) + 0.5) / n


def resolve_branch(params: CosmoParams, window: TimeWindow) -> BranchChoice:
    """Pick the sign selection that makes the printed form a solution.

    Every candidate inner sign is screened on 32 window samples: the squared
    form must be nonnegative, its analytic rate must satisfy adot^2 = z(a) to
    1e-8 relative, and at any finite singular endpoint the form must vanish.
    Exactly one candidate may survive; none raises NoValidBranch, several
    raise AmbiguousBranch.  Families without inner signs resolve trivially.
    """
    fam = classify(params).family
    if fam not in _CURVED_RADIATION:
        _require(
            fam not in (Family.HypergeometricGeneral, Family.LogarithmicDegenerate),
            WrongRegime,
            f"no closed-form branch for the {fam.value} family",
        )
        return TRIVIAL_BRANCH

    yscale = _curved_yscale(params)
    ts = _window_probes(params, window)
    survivors = []
    for sigma in (1, -1):
        y, ydot = _curved_y_ydot(params, sigma, ts - params.t0)
        if np.any(y < -1e-9 * yscale):
            continue
        a = np.sqrt(np.clip(y, 0.0, None))
        safe = y > 1e-12 * yscale
        with np.errstate(divide="ignore", invalid="ignore"):
            adot = ydot / (2.0 * a)
        z = np.asarray(z_of_a(params, np.where(safe, a, 1.0)))
        residual = np.abs(adot[safe] ** 2 - z[safe]) / np.maximum(1.0, np.abs(z[safe]))
        if residual.size and np.max(residual) > 1e-8:
            continue
        endpoint_ok = True
        for edge, flagged in ((window.t_min, window.singular_start),
                              (window.t_max, window.singular_end)):
            if flagged and math.isfinite(edge):
                ye, _ = _curved_y_ydot(params, sigma, edge - params.t0)
                endpoint_ok = endpoint_ok and abs(float(ye)) <= 1e-8 * yscale
        if endpoint_ok:
            survivors.append(sigma)
    if not survivors:
        raise NoValidBranch(f"no inner sign solves the constraint on [{window.t_min}, {window.t_max}]")
    if len(survivors) > 1:
        raise AmbiguousBranch(f"inner signs {survivors} all pass on this window; narrow it")
    return BranchChoice(1, (survivors[0],))


def closed_state(params: CosmoParams, t):
    """Scale factor and its analytic rate at time(s) t for the closed family.

    Curved radiation resolves its branch on the canonical window first.  The
    rate at a singular endpoint (a = 0) is infinite and is returned as such.
    Families without a closed form raise WrongRegime.
    """
    fam = classify(params).family
    t_arr = np.asarray(t, dtype=float)
    tau = t_arr - params.t0

    if fam in _CURVED_RADIATION:
        branch = resolve_branch(params, default_window(params))
        y, ydot = _curved_y_ydot(params, branch.inner_signs[0], tau)
        a = _a_from_y(y, _curved_yscale(params), t)
        with np.errstate(divide="ignore"):
            adot = np.atleast_1d(ydot) / (2.0 * a)
        return _scalar_like(t, a), _scalar_like(t, adot)

    if fam in (Family.FlatRadiationSinh, Family.FlatRadiationTrig):
        lam = lambda_scale(params.lambda_cc)
        a = radiation_flat(params, t)
        arg = 2.0 * lam * tau
        grow = np.cosh(arg) if fam is Family.FlatRadiationSinh else np.cos(arg)
        a_arr = np.atleast_1d(np.asarray(a, dtype=float))
        with np.errstate(divide="ignore"):
            adot = math.sqrt(params.c_int) * np.atleast_1d(grow) / a_arr
        return a, _scalar_like(t, adot)

    if fam in (Family.ZeroLambdaFlatPowerLaw, Family.ZeroLambdaDeSitterFlat):
        a = zero_lambda_flat(params, t)
        a_arr = np.atleast_1d(np.asarray(a, dtype=float))
        if fam is Family.ZeroLambdaDeSitterFlat:
            adot = a_arr / params.a0
        else:
            with np.errstate(divide="ignore"):
                adot = (a_arr / params.a0) ** (-params.gamma_bar)
        return a, _scalar_like(t, adot)

    if fam in (Family.ZeroLambdaCurvedRadiation, Family.ZeroLambdaCurvedVacuum):
        a = zero_lambda_curved_explicit(params, t)
        x = np.atleast_1d(tau / params.a0)
        a_arr = np.atleast_1d(np.asarray(a, dtype=float))
        if fam is Family.ZeroLambdaCurvedVacuum:
            adot = np.sinh(x) if params.kappa == 1 else np.cosh(x + math.asinh(1.0))
        else:
            u = 1.0 - x if params.kappa == 1 else 1.0 + x
            with np.errstate(divide="ignore"):
                adot = params.a0 * u / a_arr
        return a, _scalar_like(t, adot)

    if fam is Family.ZeroLambdaCurvedDust:
        a = zero_lambda_dust_implicit(params, t)
        a_arr = np.atleast_1d(np.asarray(a, dtype=float))
        sign = -1.0 if params.kappa == 1 else 1.0
        z = np.asarray(z_of_a(params, np.where(a_arr > 0.0, a_arr, 1.0)))
        adot = np.where(a_arr > 0.0, sign * np.sqrt(np.clip(z, 0.0, None)), sign * math.inf)
        return a, _scalar_like(t, adot)

    raise WrongRegime(f"no closed form for the {fam.value} family")


def closed_trajectory(params: CosmoParams, t_grid) -> Trajectory:
    """Sample the closed-form solution on a grid, with constraint residuals."""
    t_grid = np.asarray(t_grid, dtype=float)
    a, adot = closed_state(params, t_grid)
    a = np.atleast_1d(np.asarray(a, dtype=float))
    adot = np.atleast_1d(np.asarray(adot, dtype=float))
    with np.errstate(invalid="ignore"):
        residual = adot**2 - np.asarray(z_of_a(params, np.where(a > 0.0, a, np.nan)))
    return Trajectory(
        times=t_grid,
        a=a,
        adot=adot,
        residual_friedmann=residual,
        params=params,
        method="closed",
    )
