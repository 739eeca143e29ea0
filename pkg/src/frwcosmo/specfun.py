"""Gauss hypergeometric evaluation and the hypergeometric form of cosmic time.

For zero cosmological constant and curved spatial sections the quadrature
t = integral da / sqrt(z) closes in terms of 2F1 after the substitution
u = kappa (a/a0)^(2 gamma_bar).  With mu = 1/2 + 1/(2 gamma_bar) and
D = a0/(2 gamma_bar) the time differential becomes

    dt/du = D u^(mu-1) (1-u)^(-1/2),

an incomplete-beta integrand, and integrating from the u=0 endpoint gives

    t(u) = alpha + beta u^mu 2F1(1/2, mu; 1+mu; u),        beta = D/mu,

for closed sections (0 < u <= 1).  Open sections run through v = -u > 0 with
(1+v)^(-1/2) in place of (1-u)^(-1/2).  The evaluator below switches to the
complementary variable near u = 1 so every 2F1 call stays in the
fast-converging region.

The representation degenerates exactly when gamma_bar = 1/(2n+1): mu is then
the integer n+1 and the second solution of the hypergeometric equation turns
logarithmic.  Those indices are rejected here and served by the numeric
module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    ArgumentOutOfDomain,
    CNonPositiveInteger,
    DegenerateGamma,
    FlatUniverse,
    NoConvergence,
    UOutOfRange,
    WrongRegime,
)
from .model import CosmoParams, degenerate_index

SERIES_TERM_CAP = 100_000
SERIES_EPS = 1e-16
# Below this distance of c-a-b from an integer the connection-formula gamma
# coefficients are too ill-conditioned; fall back to the plain series.
CONNECTION_DEGENERACY_TOL = 1e-5


def _is_nonpositive_int(x: float) -> bool:
    return x <= 0.0 and x == round(x)


def inv_gamma(x: float) -> float:
    """1/Gamma(x), zero at the poles, zero on overflow of Gamma itself."""
    if _is_nonpositive_int(x):
        return 0.0
    try:
        return 1.0 / math.gamma(x)
    except OverflowError:
        return 0.0


@dataclass(frozen=True)
class Hyp2F1Args:
    """Arguments of a real-axis 2F1 evaluation.

    c must not be a nonpositive integer; x must satisfy x < 1, or x = 1 with
    c - a - b > 0 where the Gauss summation value exists.
    """

    a: float
    b: float
    c: float
    x: float

    def __post_init__(self):
        if _is_nonpositive_int(self.c):
            raise CNonPositiveInteger(f"c = {self.c} is a nonpositive integer")
        if self.x > 1.0:
            raise ArgumentOutOfDomain(f"x = {self.x} is beyond the real branch cut")
        if self.x == 1.0 and self.c - self.a - self.b <= 0.0:
            raise ArgumentOutOfDomain(
                f"x = 1 requires c - a - b > 0, got {self.c - self.a - self.b}"
            )


def _series(a: float, b: float, c: float, x: float) -> float:
    """Gauss series by term recurrence; assumes |x| < 1 or a terminating case."""
    terminating = _is_nonpositive_int(a) or _is_nonpositive_int(b)
    if not terminating and abs(x) >= 1.0:
        raise NoConvergence(f"series diverges at x = {x}")
    total = 1.0
    comp = 0.0
    term = 1.0
    small_streak = 0
    for n in range(SERIES_TERM_CAP):
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * x
        # Kahan compensation: hundreds of slowly shrinking terms otherwise
        # lose the last couple of ulps near |x| = 1/2.
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        if term == 0.0:
            return total
        if abs(term) <= SERIES_EPS * max(1.0, abs(total)):
            small_streak += 1
            if small_streak >= 2:
                return total
        else:
            small_streak = 0
    raise NoConvergence(
        f"2F1 series not converged after {SERIES_TERM_CAP} terms at x = {x}"
    )


def _at_unit_argument(a: float, b: float, c: float) -> float:
    # Gauss summation at x = 1, requiring c - a - b > 0.
    s = c - a - b
    return math.gamma(c) * math.gamma(s) * inv_gamma(c - a) * inv_gamma(c - b)


def _eval(a: float, b: float, c: float, x: float) -> float:
    if x == 1.0:
        return _at_unit_argument(a, b, c)
    if _is_nonpositive_int(a) or _is_nonpositive_int(b):
        return _series(a, b, c, x)
    if abs(x) <= 0.5:
        return _series(a, b, c, x)
    if x < -0.5:
        # Pfaff x -> x/(x-1) lands in (0, 1); within [-1, -0.5) it lands in
        # the plain-series disc, further left it recurses once more through
        # the connection branch below.
        y = x / (x - 1.0)
        return (1.0 - x) ** (-a) * _eval(a, c - b, c, y)
    # x in (0.5, 1): connection toward the complementary argument.
    s = c - a - b
    if abs(s - round(s)) < CONNECTION_DEGENERACY_TOL:
        # Integer c-a-b: the two-series connection form has colliding gamma
        # poles.  The plain series still converges on (0.5, 1), just slowly,
        # and the term cap bounds the cost.
        return _series(a, b, c, x)
    y = 1.0 - x
    first = (
        math.gamma(c)
        * math.gamma(s)
        * inv_gamma(c - a)
        * inv_gamma(c - b)
        * _series(a, b, 1.0 - s, y)
    )
    second = (
        y**s
        * math.gamma(c)
        * math.gamma(-s)
        * inv_gamma(a)
        * inv_gamma(b)
        * _series(c - a, c - b, 1.0 + s, y)
    )
    return first + second


def hyp2f1(args: Hyp2F1Args) -> float:
    """Evaluate 2F1 on the real axis.

    Plain Gauss series inside |x| <= 1/2, Pfaff reflection for x < -1/2, the
    complementary-argument connection formula on (1/2, 1), and the Gauss
    summation value at x = 1.  Relative accuracy is about 1e-10 through
    x <= 0.95 and degrades to about 1e-7 approaching 1, where a near-integer
    c - a - b forces the slow plain series.
    """
    return _eval(args.a, args.b, args.c, args.x)


@dataclass(frozen=True)
class HypSolutionCoeffs:
    """Integration constants and derived coefficients of the t(u) solution.

    alpha is t at the u -> 0 endpoint, beta = d_coeff/mu scales the
    hypergeometric term, mu = 1/2 + 1/(2 gamma_bar), and d_coeff is the D of
    the dt/du integrand.  t0_origin is t at u = 1 (the turning point of a
    closed section), alpha plus the complete-beta value of the quadrature.
    """

    alpha: float
    beta: float
    mu: float
    d_coeff: float

    @property
    def t0_origin(self) -> float:
        return self.alpha + self.beta * math.sqrt(math.pi) * math.gamma(
            1.0 + self.mu
        ) * inv_gamma(self.mu + 0.5)


def u_of_a(params: CosmoParams, a: float) -> float:
    """Hypergeometric substitution variable kappa (a/a0)^(2 gamma_bar)."""
    if params.kappa == 0:
        raise FlatUniverse("u(a) degenerates for kappa = 0; use the flat families")
    if a <= 0.0:
        raise ValueError(f"scale factor must be positive, got {a}")
    return params.kappa * (a / params.a0) ** (2.0 * params.gamma_bar)


def solution_coeffs(params: CosmoParams, alpha: float | None = None) -> HypSolutionCoeffs:
    """Coefficients anchoring t(u) for zero-Lambda curved parameters.

    Defaults alpha to params.t0, which places the u -> 0 endpoint (the bang,
    for gamma_bar > 0) at the reference epoch.  Requires c_int to carry the
    a0^(2 gamma_bar) normalization under which the substitution closes, and
    mu > 0 so the u = 0 endpoint of the quadrature is integrable.
    """
    if params.lambda_cc != 0.0 or params.kappa == 0:
        raise WrongRegime(
            "hypergeometric time solution needs lambda_cc = 0 and kappa = ±1"
        )
    if degenerate_index(params.gamma_bar) is not None:
        raise DegenerateGamma(
            f"gamma_bar = {params.gamma_bar} has a logarithmic second solution"
        )
    c_ref = params.a0 ** (2.0 * params.gamma_bar)
    if abs(params.c_int - c_ref) > 1e-9 * c_ref:
        raise WrongRegime(
            f"c_int = {params.c_int} breaks the a0-anchored normalization {c_ref}"
        )
    mu = 0.5 + 0.5 / params.gamma_bar
    if mu <= 0.0:
        raise WrongRegime(
            f"mu = {mu} <= 0: time diverges at the u = 0 endpoint, no finite alpha"
        )
    d_coeff = params.a0 / (2.0 * params.gamma_bar)
    if alpha is None:
        alpha = params.t0
    return HypSolutionCoeffs(alpha=alpha, beta=d_coeff / mu, mu=mu, d_coeff=d_coeff)


def dt_du(coeffs: HypSolutionCoeffs, u: float) -> float:
    """Quadrature integrand D u^(mu-1) (1-u)^(-1/2) on 0 < u < 1."""
    if not 0.0 < u < 1.0:
        raise UOutOfRange(f"integrand defined on 0 < u < 1, got {u}")
    return coeffs.d_coeff * u ** (coeffs.mu - 1.0) * (1.0 - u) ** (-0.5)


def t_of_u(coeffs: HypSolutionCoeffs, params: CosmoParams, u: float) -> float:
    """Cosmic time of a closed section as a function of u in (0, 1].

    Evaluates alpha + beta u^mu 2F1(1/2, mu; 1+mu; u) for u <= 1/2 and the
    complementary form

        t0_origin - 2 d_coeff (1-u)^(1/2) u^mu 2F1(1, mu+1/2; 3/2; 1-u)

    above, so the series argument never leaves [0, 1/2].  The two agree
    because both integrate dt_du from the respective endpoint.
    """
    if degenerate_index(params.gamma_bar) is not None:
        raise DegenerateGamma(
            f"gamma_bar = {params.gamma_bar} has a logarithmic second solution"
        )
    if not 0.0 < u <= 1.0:
        raise UOutOfRange(f"closed-section branch needs 0 < u <= 1, got {u}")
    mu = coeffs.mu
    if u <= 0.5:
        f = _eval(0.5, mu, 1.0 + mu, u)
        return coeffs.alpha + coeffs.beta * u**mu * f
    if u == 1.0:
        return coeffs.t0_origin
    f = _eval(1.0, mu + 0.5, 1.5, 1.0 - u)
    return coeffs.t0_origin - 2.0 * coeffs.d_coeff * math.sqrt(1.0 - u) * u**mu * f


def t_of_u_open(coeffs: HypSolutionCoeffs, v: float) -> float:
    """Cosmic time of an open section against v = -u > 0.

    Integrating D w^(mu-1) (1+w)^(-1/2) from 0 to v and applying the Pfaff
    reflection to keep the argument inside [0, 1):

        t(v) = alpha + beta v^mu (1+v)^(-1/2) 2F1(1/2, 1; 1+mu; v/(1+v)).
    """
    if v <= 0.0:
        raise UOutOfRange(f"open-section branch needs v > 0, got {v}")
    w = v / (1.0 + v)
    f = _eval(0.5, 1.0, 1.0 + coeffs.mu, w)
    return coeffs.alpha + coeffs.beta * v**coeffs.mu / math.sqrt(1.0 + v) * f
