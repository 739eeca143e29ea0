"""Numerical integration machinery, independent of every closed form.

Three engines live here: an adaptive embedded Runge-Kutta 5(4) integration of
the second-order scale-factor equation, adaptive quadrature of the transit
time t = integral da / sqrt(z(a)) with square-root substitutions absorbing the
integrable singularities at turning points, and monotone inversion of that
quadrature to recover a(t).  A piecewise driver stitches monotone quadrature
legs across turning points so recollapsing universes can be sampled on an
arbitrary time grid.

The second-order form is integrated rather than adot = ±sqrt(z) because the
first-order form loses the velocity sign at turning points.  The quadrature
route covers one monotone piece at a time by construction; the piecewise
driver supplies the bookkeeping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.interpolate import PchipInterpolator
from scipy.optimize import brentq

from .errors import (
    Divergence,
    EndpointNotSimpleRoot,
    NoBracket,
    NoConvergence,
    NonPositiveIntegrand,
    ScaleFactorCollapse,
    StepSizeUnderflow,
)
from .model import (
    CosmoParams,
    Trajectory,
    d2z_da2,
    dz_da,
    rhs_second_order,
    z_of_a,
)

A_FLOOR = 1e-12
_BRENT_RTOL = 4.0 * np.finfo(float).eps


@dataclass(frozen=True)
class OdeConfig:
    """Tolerances for the adaptive Runge-Kutta integration."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_step: float = math.inf
    dense_output: bool = True

    def __post_init__(self):
        if self.rel_tol <= 0.0 or self.abs_tol <= 0.0:
            raise ValueError("tolerances must be positive")
        if self.max_step <= 0.0:
            raise ValueError("max_step must be positive")


class EndpointMap(Enum):
    """Which quadrature endpoints get the square-root substitution."""

    NONE = "none"
    SQRT_LOWER = "sqrt_lower"
    SQRT_UPPER = "sqrt_upper"
    SQRT_BOTH = "sqrt_both"


@dataclass(frozen=True)
class QuadConfig:
    target_tol: float = 1e-10
    singular_endpoint_map: EndpointMap = EndpointMap.NONE

    def __post_init__(self):
        if self.target_tol <= 0.0:
            raise ValueError("target_tol must be positive")


def _trajectory_from(sol, params: CosmoParams, method: str) -> Trajectory:
    a = np.asarray(sol.y[0], dtype=float) if sol.y.size else np.empty(0)
    adot = np.asarray(sol.y[1], dtype=float) if sol.y.size else np.empty(0)
    res = adot**2 - np.asarray(z_of_a(params, a)) if a.size else np.empty(0)
    return Trajectory(
        times=np.asarray(sol.t, dtype=float),
        a=a,
        adot=adot,
        residual_friedmann=res,
        params=params,
        method=method,
    )


def integrate_ode(params, a_init, adot_init, t_grid, cfg: OdeConfig | None = None):
    """Integrate the second-order equation and sample on t_grid.

    Initial data need not satisfy the constraint; the per-sample residual
    adot^2 - z(a) then simply reports the offset, which the second-order flow
    conserves.  A collapse through a = 1e-12 terminates the run with
    ScaleFactorCollapse carrying the crossing time and the partial trajectory;
    the same error is raised when the integrator stalls against the a -> 0
    stiffness wall with the universe still contracting, with the crossing time
    extrapolated from the local free-fall scaling.
    """
    if cfg is None:
        cfg = OdeConfig()
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size < 2:
        raise ValueError("t_grid must be a 1-d array with at least two samples")
    if np.any(np.diff(t_grid) <= 0.0):
        raise ValueError("t_grid must be strictly increasing")
    if a_init <= 0.0:
        raise ValueError(f"a_init must be positive, got {a_init}")

    def rhs(t, y):
        return (y[1], float(rhs_second_order(params, y[0])))

    def hit_floor(t, y):
        return y[0] - A_FLOOR

    hit_floor.terminal = True
    hit_floor.direction = -1.0

    sol = solve_ivp(
        rhs,
        (float(t_grid[0]), float(t_grid[-1])),
        (float(a_init), float(adot_init)),
        method="RK45",
        t_eval=t_grid,
        rtol=cfg.rel_tol,
        atol=cfg.abs_tol,
        max_step=cfg.max_step,
        dense_output=cfg.dense_output,
        events=(hit_floor,),
    )

    if sol.status == 1:
        t_c = float(sol.t_events[0][0])
        raise ScaleFactorCollapse(
            f"scale factor crossed {A_FLOOR} at t = {t_c}",
            crossing_time=t_c,
            trajectory=_trajectory_from(sol, params, "ode"),
        )
    if sol.status < 0:
        if sol.sol is not None:
            t_last = float(sol.sol.t_max)
            a_last, adot_last = (float(v) for v in sol.sol(t_last))
        elif sol.t.size:
            t_last = float(sol.t[-1])
            a_last, adot_last = float(sol.y[0, -1]), float(sol.y[1, -1])
        else:
            t_last, a_last, adot_last = float(t_grid[0]), float(a_init), float(adot_init)
        scale = max(float(a_init), float(sol.y[0].max()) if sol.y.size else 0.0)
        if adot_last < 0.0 and a_last < 1e-3 * scale:
            # Free fall onto the singularity: a ~ (t_c - t)^(1/(gb+1)), so the
            # remaining time is a / ((gb+1) |adot|).
            shrink = params.gamma_bar + 1.0 if params.gamma_bar > -1.0 else 1.0
            t_c = t_last + a_last / (shrink * abs(adot_last))
            raise ScaleFactorCollapse(
                f"integrator reached the collapse wall near t = {t_last}; "
                f"extrapolated crossing at t = {t_c}",
                crossing_time=t_c,
                trajectory=_trajectory_from(sol, params, "ode"),
            )
        raise StepSizeUnderflow(f"integration stalled at t = {t_last}: {sol.message}")
    return _trajectory_from(sol, params, "ode")


def ode_transit_time(params, a_from, a_to, cfg: OdeConfig | None = None):
    """Time for the expanding constraint solution to run from a_from to a_to.

    Initial velocity is +sqrt(z(a_from)); integration proceeds in doubling
    time chunks until the crossing event fires.
    """
    if cfg is None:
        cfg = OdeConfig()
    if not 0.0 < a_from < a_to:
        raise ValueError("need 0 < a_from < a_to")
    z0 = float(z_of_a(params, a_from))
    if z0 < 0.0:
        raise NonPositiveIntegrand(f"z({a_from}) = {z0} < 0")

    def rhs(t, y):
        return (y[1], float(rhs_second_order(params, y[0])))

    def crossing(t, y):
        return y[0] - a_to

    crossing.terminal = True
    crossing.direction = 1.0

    t0, y0 = 0.0, (float(a_from), math.sqrt(max(z0, 0.0)))
    chunk = max((a_to - a_from) / max(abs(y0[1]), 1e-6), 1e-3)
    for _ in range(64):
        sol = solve_ivp(
            rhs,
            (t0, t0 + chunk),
            y0,
            method="RK45",
            rtol=cfg.rel_tol,
            atol=cfg.abs_tol,
            events=(crossing,),
        )
        if sol.status == 1:
            return float(sol.t_events[0][0])
        if sol.status < 0:
            raise StepSizeUnderflow(sol.message)
        t0 = float(sol.t[-1])
        y0 = (float(sol.y[0, -1]), float(sol.y[1, -1]))
        chunk *= 2.0
    raise Divergence(f"a = {a_to} not reached after {t0} time units")


def _sub_lower(f, lo):
    return lambda s: 2.0 * s * f(lo + s * s)


def _sub_upper(f, hi):
    return lambda s: 2.0 * s * f(hi - s * s)


def _adaptive(g, s0, s1, tol):
    res = quad(
        g,
        s0,
        s1,
        epsabs=tol * 1e-2,
        epsrel=max(tol * 1e-2, 1e-13),
        limit=200,
        full_output=1,
    )
    val, err = res[0], res[1]
    # QUADPACK warnings (roundoff, slow convergence) are advisory; what the
    # contract cares about is whether the error estimate meets the target.
    if not math.isfinite(val) or (len(res) > 3 and err > tol * max(1.0, abs(val))):
        why = res[3] if len(res) > 3 else f"value {val}"
        raise NoConvergence(f"quadrature trouble on [{s0}, {s1}]: {why}")
    return val, err


def quad_general(integrand, lo, hi, cfg: QuadConfig | None = None):
    """Adaptive quadrature with optional endpoint-absorbing substitutions.

    A flagged endpoint is integrated in the variable s with x = endpoint ± s²,
    which turns an inverse-square-root endpoint singularity into a smooth
    integrand.  Raises NoConvergence when the requested tolerance is not met.
    """
    if cfg is None:
        cfg = QuadConfig()
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    m = cfg.singular_endpoint_map
    pieces = []
    if m is EndpointMap.NONE:
        pieces.append((integrand, lo, hi))
    elif m is EndpointMap.SQRT_LOWER:
        pieces.append((_sub_lower(integrand, lo), 0.0, math.sqrt(hi - lo)))
    elif m is EndpointMap.SQRT_UPPER:
        pieces.append((_sub_upper(integrand, hi), 0.0, math.sqrt(hi - lo)))
    else:
        mid = 0.5 * (lo + hi)
        pieces.append((_sub_lower(integrand, lo), 0.0, math.sqrt(mid - lo)))
        pieces.append((_sub_upper(integrand, hi), 0.0, math.sqrt(hi - mid)))
    total = 0.0
    err = 0.0
    for g, s0, s1 in pieces:
        val, e = _adaptive(g, s0, s1, cfg.target_tol)
        total += val
        err += e
    if err > cfg.target_tol * max(1.0, abs(total)):
        raise NoConvergence(f"quadrature error {err} above target {cfg.target_tol}")
    return total


def t_of_a_quadrature(params, a_from, a_to, cfg: QuadConfig | None = None):
    """Transit time integral of 1/sqrt(z) over [a_from, a_to].

    Endpoints flagged in cfg may be simple roots of z (turning points); a
    flagged endpoint found to carry a double root raises
    EndpointNotSimpleRoot, since the transit time diverges there.  Interior
    nonpositivity of z raises NonPositiveIntegrand.
    """
    if cfg is None:
        cfg = QuadConfig()
    if a_from < 0.0 or not a_from < a_to:
        raise ValueError(f"need 0 <= a_from < a_to, got [{a_from}, {a_to}]")
    span = a_to - a_from
    probe = a_from + span * (np.arange(1, 64) / 64.0)
    zp = np.asarray(z_of_a(params, probe), dtype=float)
    zscale = float(np.max(np.abs(zp[np.isfinite(zp)]), initial=0.0)) or 1.0
    if np.any(zp[np.isfinite(zp)] <= 0.0):
        bad = probe[np.isfinite(zp)][np.asarray(zp[np.isfinite(zp)] <= 0.0)][0]
        raise NonPositiveIntegrand(f"z({bad}) <= 0 inside ({a_from}, {a_to})")

    m = cfg.singular_endpoint_map
    lower_flag = m in (EndpointMap.SQRT_LOWER, EndpointMap.SQRT_BOTH)
    upper_flag = m in (EndpointMap.SQRT_UPPER, EndpointMap.SQRT_BOTH)
    root_slope = {}
    for e, flagged, inward in ((a_from, lower_flag, 1.0), (a_to, upper_flag, -1.0)):
        if not flagged or e <= 0.0:
            continue
        ze = float(z_of_a(params, e))
        # Judge "is this a root, and how degenerate" against z a quarter-span
        # inward; over a wide range the global scale is set by a far pole of z
        # and would wave through any shallow minimum.
        near = abs(float(z_of_a(params, e + inward * 0.25 * span)))
        if not math.isfinite(near) or near == 0.0:
            near = max(1.0, zscale)
        if math.isfinite(ze) and abs(ze) <= 1e-8 * near:
            slope = abs(float(dz_da(params, e)))
            if slope * span <= 1e-7 * near:
                raise EndpointNotSimpleRoot(
                    f"z has a double root at a = {e}; transit time diverges"
                )
            root_slope[e] = (slope, float(d2z_da2(params, e)))

    # A flagged root is located to a few ulp at best, so evaluations can land
    # past the true zero by that much; the resulting droop is slope times the
    # position uncertainty, not a property of the integrand values nearby.
    droop_allow = 1e-9 * zscale
    for e, (slope, _) in root_slope.items():
        droop_allow = max(droop_allow, 64.0 * _BRENT_RTOL * abs(e) * slope)

    def f(a):
        val = float(z_of_a(params, a))
        if val <= 0.0:
            if val < -droop_allow:
                raise NonPositiveIntegrand(f"z({a}) = {val} < 0 in the interior")
            # Roundoff droop right at a flagged root; the magnitude is noise.
            val = abs(val) + 1e-300
        return 1.0 / math.sqrt(val)

    def mapped(origin, sign):
        # Integrand in the substituted variable, x = origin + sign*s^2.  When
        # the origin is a root of z the cancellation in x - origin destroys
        # z(x) for tiny s; there z = |z'| s^2 + z''/2 s^4 is exact in the
        # distance s^2 known without cancellation, so switch below a cut.
        taylor = root_slope.get(origin)

        def g(s):
            d = s * s
            if taylor is not None and d <= 1e-6 * span:
                slope, curv = taylor
                return 2.0 / math.sqrt(slope + 0.5 * curv * d)
            return 2.0 * s * f(origin + sign * d)

        return g

    pieces = []
    if m is EndpointMap.NONE:
        pieces.append((f, a_from, a_to))
    elif m is EndpointMap.SQRT_LOWER:
        pieces.append((mapped(a_from, +1.0), 0.0, math.sqrt(span)))
    elif m is EndpointMap.SQRT_UPPER:
        pieces.append((mapped(a_to, -1.0), 0.0, math.sqrt(span)))
    else:
        mid = 0.5 * (a_from + a_to)
        pieces.append((mapped(a_from, +1.0), 0.0, math.sqrt(mid - a_from)))
        pieces.append((mapped(a_to, -1.0), 0.0, math.sqrt(a_to - mid)))
    total = 0.0
    err = 0.0
    for g, s0, s1 in pieces:
        val, e = _adaptive(g, s0, s1, cfg.target_tol)
        total += val
        err += e
    if err > cfg.target_tol * max(1.0, abs(total)):
        raise NoConvergence(f"quadrature error {err} above target {cfg.target_tol}")
    return total


def z_roots(params, a_min, a_max, n=4096):
    """Roots of z on [a_min, a_max]: sign changes plus touching minima."""
    if not 0.0 < a_min < a_max:
        raise ValueError(f"need 0 < a_min < a_max, got [{a_min}, {a_max}]")
    grid = np.geomspace(a_min, a_max, n)
    zs = np.asarray(z_of_a(params, grid), dtype=float)
    zscale = float(np.max(np.abs(zs[np.isfinite(zs)]), initial=0.0)) or 1.0

    def fz(a):
        return float(z_of_a(params, a))

    roots = []
    for i in range(n - 1):
        if not (math.isfinite(zs[i]) and math.isfinite(zs[i + 1])):
            continue
        if zs[i] == 0.0:
            roots.append(float(grid[i]))
        elif zs[i] * zs[i + 1] < 0.0:
            # Bisect to the last representable bracket: turning-point legs
            # anchor their distance-to-root variable here, and an offset of
            # brentq's default 2e-12 xtol already shows up as spurious z < 0
            # over a resolvable neighborhood of the root.
            roots.append(bisect_root(fz, float(grid[i]), float(grid[i + 1]), tol=4e-16))
    if zs[-1] == 0.0:
        roots.append(float(grid[-1]))

    # Double roots never change sign; find them as minima of z touching zero.
    dzs = np.asarray(dz_da(params, grid), dtype=float)
    for i in range(n - 1):
        if not (math.isfinite(dzs[i]) and math.isfinite(dzs[i + 1])):
            continue
        if dzs[i] < 0.0 <= dzs[i + 1]:
            r = float(brentq(lambda a: float(dz_da(params, a)), grid[i], grid[i + 1], rtol=_BRENT_RTOL))
            # A touching root must vanish relative to z a few grid steps away,
            # not relative to the scan-wide maximum (that sits on a pole).
            j0, j1 = max(0, i - 5), min(n - 1, i + 6)
            local = max(abs(zs[j0]), abs(zs[j1]))
            if not math.isfinite(local) or local == 0.0:
                local = zscale
            if abs(fz(r)) <= 1e-9 * local:
                roots.append(r)

    roots.sort()
    out = []
    for r in roots:
        if not out or r - out[-1] > 1e-9 * max(1.0, r):
            out.append(r)
    return np.asarray(out)


def bisect_root(f, lo, hi, tol=1e-13, max_iter=200):
    """Plain bisection; unconditionally convergent on a sign change."""
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise NoBracket(f"no sign change on [{lo}, {hi}]")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0 or hi - lo <= tol * max(1.0, abs(mid)):
            return mid
        if flo * fm < 0.0:
            hi = mid
        else:
            lo, flo = mid, fm
    return 0.5 * (lo + hi)


def _auto_map(params, a_lo, a_hi, zscale):
    lower = False
    upper = False
    if a_lo > 0.0:
        zl = float(z_of_a(params, a_lo))
        lower = math.isfinite(zl) and abs(zl) <= 1e-8 * max(1.0, zscale)
    zh = float(z_of_a(params, a_hi))
    upper = math.isfinite(zh) and abs(zh) <= 1e-8 * max(1.0, zscale)
    if lower and upper:
        return EndpointMap.SQRT_BOTH
    if lower:
        return EndpointMap.SQRT_LOWER
    if upper:
        return EndpointMap.SQRT_UPPER
    return EndpointMap.NONE


def _transit(params, a_lo, a_hi, tol=1e-10):
    """Transit time with the endpoint flags inferred from z itself."""
    probe = np.linspace(a_lo, a_hi, 33)[1:-1]
    zp = np.asarray(z_of_a(params, probe), dtype=float)
    zscale = float(np.max(np.abs(zp[np.isfinite(zp)]), initial=0.0)) or 1.0
    m = _auto_map(params, a_lo, a_hi, zscale)
    return t_of_a_quadrature(
        params, a_lo, a_hi, QuadConfig(target_tol=tol, singular_endpoint_map=m)
    )


def a_of_t_inverse(params, t, bracket, cfg: QuadConfig | None = None):
    """Invert the transit-time quadrature on one monotone piece.

    t is measured from the lower bracket end: the returned a satisfies
    t_of_a_quadrature(bracket[0], a) = t to 1e-9 relative.  bracket[1] may be
    None, in which case the upper limit expands geometrically, stopping at the
    first turning point if one appears.  A time beyond the piece's image
    raises NoBracket; an upper limit walled off by a double root of z that the
    requested t cannot be squeezed under raises Divergence.
    """
    a_lo, a_hi = bracket
    if a_lo <= 0.0:
        raise ValueError(f"bracket start must be positive, got {a_lo}")
    if t < 0.0:
        raise NoBracket(f"t = {t} precedes the piece start")
    if t == 0.0:
        return float(a_lo)
    del cfg  # transit tolerance is fixed by the 1e-9 contract below

    # Cap the search at the first turning point above a_lo.
    def first_root_above(hi):
        rs = z_roots(params, a_lo, hi)
        rs = rs[rs > a_lo * (1.0 + 1e-9)]
        return float(rs[0]) if rs.size else None

    if a_hi is not None:
        cap = first_root_above(a_hi)
        hi_limit = cap if cap is not None else float(a_hi)
    else:
        hi_limit = None
        cap = None
        hi = 2.0 * max(a_lo, 1.0)
        while True:
            cap = first_root_above(hi)
            if cap is not None:
                hi_limit = cap
                break
            if _transit(params, a_lo, hi) >= t:
                hi_limit = hi
                break
            hi *= 2.0
            if hi > 1e12 * max(1.0, a_lo):
                raise Divergence(f"t = {t} not reached by a = {hi}")

    at_root = cap is not None and hi_limit == cap
    if at_root:
        try:
            total = _transit(params, a_lo, hi_limit)
        except (EndpointNotSimpleRoot, NoConvergence):
            total = math.inf
    else:
        total = _transit(params, a_lo, hi_limit)

    if math.isfinite(total):
        if t > total * (1.0 + 1e-9) + 1e-15:
            raise NoBracket(f"t = {t} beyond the piece image [0, {total}]")
        if at_root and abs(t - total) <= 1e-9 * max(1.0, t):
            return float(hi_limit)
        hi_eff = hi_limit
    else:
        # Double-root asymptote: walk toward it until the image covers t.
        hi_eff = None
        for k in range(1, 48):
            x = hi_limit - (hi_limit - a_lo) * 0.5**k
            if _transit(params, a_lo, x) >= t:
                hi_eff = x
                break
        if hi_eff is None:
            raise Divergence(
                f"t = {t} lies too deep under the double-root asymptote at {hi_limit}"
            )

    def g(x):
        if x <= a_lo:
            return -t
        return _transit(params, a_lo, x) - t

    root = float(brentq(g, a_lo, hi_eff, rtol=_BRENT_RTOL, maxiter=200))
    if abs(g(root)) > 1e-9 * max(1.0, abs(t)):
        raise NoConvergence(f"inversion stalled at a = {root}")
    return root


@dataclass
class _Piece:
    t_lo: float
    t_hi: float
    direction: int
    log_a_of_t: object


@dataclass
class PiecewiseQuadratureSolution:
    """a(t) assembled from monotone quadrature legs between turning points."""

    params: CosmoParams
    pieces: list

    def _locate(self, t):
        for p in self.pieces:
            if p.t_lo - 1e-12 <= t <= p.t_hi + 1e-12:
                return p
        raise NoBracket(f"t = {t} outside the covered range")

    def a_of_t(self, t):
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty_like(t_arr)
        for i, ti in enumerate(t_arr):
            p = self._locate(ti)
            out[i] = math.exp(float(p.log_a_of_t(np.clip(ti, p.t_lo, p.t_hi))))
        return out if np.ndim(t) else float(out[0])

    def adot_of_t(self, t):
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        out = np.empty_like(t_arr)
        for i, ti in enumerate(t_arr):
            p = self._locate(ti)
            a = math.exp(float(p.log_a_of_t(np.clip(ti, p.t_lo, p.t_hi))))
            out[i] = p.direction * math.sqrt(max(float(z_of_a(self.params, a)), 0.0))
        return out if np.ndim(t) else float(out[0])

    def trajectory(self, t_grid) -> Trajectory:
        t_grid = np.asarray(t_grid, dtype=float)
        a = self.a_of_t(t_grid)
        adot = self.adot_of_t(t_grid)
        res = adot**2 - np.asarray(z_of_a(self.params, a))
        return Trajectory(
            times=t_grid,
            a=a,
            adot=adot,
            residual_friedmann=res,
            params=self.params,
            method="quadrature",
        )


def _leg_nodes(a_bottom, a_top, bottom_is_root, top_is_root, asym_root=None, n_bulk=400, n_tail=100):
    """Node layout for one monotone leg.

    The bulk is linear, or log-spaced over wide ranges so power-law stretches
    keep constant relative resolution.  A root endpoint gets a tail uniform in
    s = sqrt(distance), which makes the transit-time nodes equally spaced
    through the turning point where a(t) flattens quadratically.  An end that
    stalls against a double root just outside the leg (asym_root) gets a tail
    geometric in the distance to that root, matching the exponential approach.
    """
    span = a_top - a_bottom
    gap = 0.3 * span
    lo, hi = a_bottom, a_top
    parts = []
    if bottom_is_root:
        s = math.sqrt(gap) * (np.arange(n_tail + 1) / n_tail)
        parts.append(a_bottom + s**2)
        lo = a_bottom + gap
    elif asym_root is not None and asym_root < a_bottom:
        d0 = a_bottom - asym_root
        parts.append(asym_root + np.geomspace(d0, d0 + gap, n_tail + 1))
        lo = a_bottom + gap
    if top_is_root:
        s = math.sqrt(gap) * (np.arange(n_tail + 1) / n_tail)
        parts.append(a_top - s**2)
        hi = a_top - gap
    elif asym_root is not None and asym_root > a_top:
        d0 = asym_root - a_top
        parts.append(asym_root - np.geomspace(d0, d0 + gap, n_tail + 1))
        hi = a_top - gap
    if lo > 0.0 and hi / lo > 50.0:
        parts.append(np.geomspace(lo, hi, n_bulk))
    else:
        parts.append(np.linspace(lo, hi, n_bulk))
    grid = np.unique(np.concatenate(parts))
    keep = np.concatenate(([True], np.diff(grid) > 1e-13 * max(1.0, a_top)))
    return grid[keep]


def _leg_interpolant(params, t_lo, a_bottom, a_top, direction, bottom_is_root, top_is_root, asym_root=None):
    """Cumulative transit table over [a_bottom, a_top], returned as a _Piece.

    The table is accumulated in ascending a; for a contracting leg the times
    are reflected so the interpolant always maps absolute time to log a.
    """
    from scipy.interpolate import CubicSpline

    grid = _leg_nodes(a_bottom, a_top, bottom_is_root, top_is_root, asym_root)
    incs = np.empty(grid.size - 1)
    for i in range(grid.size - 1):
        m = EndpointMap.NONE
        if i == 0 and bottom_is_root:
            m = EndpointMap.SQRT_LOWER
        if i == grid.size - 2 and top_is_root:
            m = EndpointMap.SQRT_UPPER if m is EndpointMap.NONE else EndpointMap.SQRT_BOTH
        incs[i] = t_of_a_quadrature(
            params,
            float(grid[i]),
            float(grid[i + 1]),
            QuadConfig(target_tol=1e-10, singular_endpoint_map=m),
        )
    t_up = np.concatenate(([0.0], np.cumsum(incs)))
    # Deep in a fast-contracting leg the per-interval transit can drop below
    # the spline's time resolution; merge such intervals, keeping both ends.
    tiny = 1e-13 * max(1.0, abs(t_lo) + t_up[-1])
    keep = np.concatenate(([True], np.diff(t_up) > tiny))
    keep[-1] = True
    t_up, grid = t_up[keep], grid[keep]
    while t_up.size > 2 and t_up[-1] - t_up[-2] <= tiny:
        t_up = np.delete(t_up, -2)
        grid = np.delete(grid, -2)
    if direction > 0:
        t_abs = t_lo + t_up
        log_a = np.log(grid)
    else:
        t_abs = t_lo + (t_up[-1] - t_up)[::-1]
        log_a = np.log(grid)[::-1]
    interp = CubicSpline(t_abs, log_a, bc_type="not-a-knot", extrapolate=False)
    return _Piece(t_lo=float(t_abs[0]), t_hi=float(t_abs[-1]), direction=direction, log_a_of_t=interp)


def quadrature_solution(params, t_start, t_end, a_start, adot_start, max_pieces=12):
    """Build a(t) on [t_start, t_end] purely from transit-time quadratures.

    The starting velocity fixes the initial direction (its magnitude is not
    used; speeds come from the constraint).  Legs run between turning points,
    reflecting at simple roots of z.  A crunch inside the window raises
    ScaleFactorCollapse with the crossing time.
    """
    if a_start <= 0.0:
        raise ValueError(f"a_start must be positive, got {a_start}")
    if not t_start < t_end:
        raise ValueError("need t_start < t_end")
    if adot_start != 0.0:
        direction = 1 if adot_start > 0.0 else -1
    else:
        acc = float(rhs_second_order(params, a_start))
        if acc == 0.0:
            raise Divergence(f"static point at a = {a_start}: no motion to follow")
        direction = 1 if acc > 0.0 else -1

    scan_lo = max(A_FLOOR, 1e-7 * a_start)
    scan_hi = 1e7 * max(a_start, 1.0)
    roots = z_roots(params, scan_lo, scan_hi)

    # Whether the leg endpoint at a_cur sits on a turning point; starts true
    # only if z already vanishes there, and becomes true after each reflection.
    probe = np.linspace(0.5 * a_start, 2.0 * a_start, 33)
    zscale = float(np.max(np.abs(np.asarray(z_of_a(params, probe), dtype=float))))
    cur_at_root = abs(float(z_of_a(params, a_start))) <= 1e-8 * max(1.0, zscale)

    pieces = []
    t_cur, a_cur = float(t_start), float(a_start)
    while t_cur < t_end and len(pieces) < max_pieces:
        needed = t_end - t_cur
        if direction > 0:
            above = roots[roots > a_cur * (1.0 + 1e-9)]
            target = float(above[0]) if above.size else None
            if target is None:
                hi = 2.0 * max(a_cur, 1.0)
                while _transit(params, a_cur, hi) < needed:
                    hi *= 2.0
                    if hi > 1e14 * max(1.0, a_cur):
                        raise Divergence("window end unreachable while expanding")
                piece = _leg_interpolant(params, t_cur, a_cur, hi, +1, cur_at_root, False)
                pieces.append(piece)
                t_cur = piece.t_hi
                break
            try:
                leg_time = _transit(params, a_cur, target)
            except (EndpointNotSimpleRoot, NoConvergence):
                # Double-root asymptote: approach it just far enough.
                x = target
                for k in range(1, 48):
                    x = target - (target - a_cur) * 0.5**k
                    if _transit(params, a_cur, x) >= needed:
                        break
                else:
                    raise Divergence(
                        f"cannot cover the window under the asymptote at a = {target}"
                    ) from None
                piece = _leg_interpolant(params, t_cur, a_cur, x, +1, cur_at_root, False, asym_root=target)
                pieces.append(piece)
                t_cur = piece.t_hi
                break
            piece = _leg_interpolant(params, t_cur, a_cur, target, +1, cur_at_root, True)
            pieces.append(piece)
            t_cur, a_cur, direction = piece.t_hi, target, -1
            cur_at_root = True
        else:
            below = roots[roots < a_cur * (1.0 - 1e-9)]
            target = float(below[-1]) if below.size else None
            if target is None:
                # Contracting with no turning point below: either a crunch in
                # finite time or a logarithmic slide toward a = 0.
                try:
                    crunch_time = _transit(params, 0.0, a_cur)
                except (NoConvergence, NonPositiveIntegrand):
                    crunch_time = math.inf
                if crunch_time <= needed:
                    raise ScaleFactorCollapse(
                        f"crunch at t = {t_cur + crunch_time} inside the window",
                        crossing_time=t_cur + crunch_time,
                        trajectory=None,
                    )
                lo = 0.5 * a_cur
                while _transit(params, lo, a_cur) < needed:
                    lo *= 0.5
                    if lo < 1e-14 * a_cur:
                        raise Divergence("window end unreachable while contracting")
                piece = _leg_interpolant(params, t_cur, lo, a_cur, -1, False, cur_at_root)
                pieces.append(piece)
                t_cur = piece.t_hi
                break
            try:
                _transit(params, target, a_cur)
            except (EndpointNotSimpleRoot, NoConvergence):
                x = target
                for k in range(1, 48):
                    x = target + (a_cur - target) * 0.5**k
                    if _transit(params, x, a_cur) >= needed:
                        break
                else:
                    raise Divergence(
                        f"cannot cover the window above the asymptote at a = {target}"
                    ) from None
                piece = _leg_interpolant(params, t_cur, x, a_cur, -1, False, cur_at_root, asym_root=target)
                pieces.append(piece)
                t_cur = piece.t_hi
                break
            piece = _leg_interpolant(params, t_cur, target, a_cur, -1, True, cur_at_root)
            pieces.append(piece)
            t_cur, a_cur, direction = piece.t_hi, target, +1
            cur_at_root = True
    if t_cur < t_end:
        raise NoConvergence(f"piece budget exhausted at t = {t_cur}")
    return PiecewiseQuadratureSolution(params=params, pieces=pieces)


def quadrature_trajectory(params, t_grid, a_start, adot_start) -> Trajectory:
    """Sample the piecewise quadrature solution on a time grid."""
    t_grid = np.asarray(t_grid, dtype=float)
    sol = quadrature_solution(params, float(t_grid[0]), float(t_grid[-1]), a_start, adot_start)
    return sol.trajectory(t_grid)
