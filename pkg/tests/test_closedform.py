"""Closed-form family tests.

Expected numbers come from two oracles: exact algebra on the constraint
adot^2 = z(a) (turning points are roots of z, so peak values are checked
against the independent root scan in frwcosmo.numeric), and fixed reference
constants like 4^(2/3) that follow from the printed forms by hand.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from frwcosmo.closedform import (
    DUST_OPEN_CONSTANT,
    TRIVIAL_BRANCH,
    BranchChoice,
    TimeWindow,
    closed_state,
    closed_trajectory,
    default_window,
    radiation_curved,
    radiation_flat,
    resolve_branch,
    zero_lambda_curved_explicit,
    zero_lambda_dust_implicit,
    zero_lambda_flat,
)
from frwcosmo.errors import (
    AmbiguousBranch,
    NoBracket,
    NoValidBranch,
    OutsideWindow,
    WrongRegime,
)
from frwcosmo.model import CosmoParams, Family, classify, reference_params
from frwcosmo.numeric import z_roots

from conftest import FAMILY_DRAWS, fd_residuals, representative_segment

TRIG = CosmoParams(1.0, 1, -3.0, 1.0)
SINH = CosmoParams(1.0, 1, 3.0, 1.0)
CRITICAL = CosmoParams(1.0, 1, 0.75, 1.0)
COSH = CosmoParams(1.0, 1, 0.5, 1.0)


def resolved(params, window=None):
    w = default_window(params) if window is None else window
    return resolve_branch(params, w), w


class TestTimeWindow:
    def test_orders_endpoints(self):
        with pytest.raises(ValueError):
            TimeWindow(2.0, 1.0)

    def test_contains_is_closed(self):
        w = TimeWindow(0.0, 1.0)
        assert w.contains(0.0) and w.contains(1.0) and not w.contains(1.5)

    def test_branch_signs_validated(self):
        with pytest.raises(ValueError):
            BranchChoice(2, ())
        with pytest.raises(ValueError):
            BranchChoice(1, (0,))


class TestRadiationCurvedTrig:
    def test_peak_is_largest_constraint_root(self):
        # independent oracle: the turning point is the outer positive root
        # of z(a); the analytic arc must top out exactly there
        br, w = resolved(TRIG)
        lam = 1.0
        t_peak = TRIG.t0 + (math.pi / 2.0) / (2.0 * lam)
        a_peak = radiation_curved(TRIG, br, t_peak)
        root = max(z_roots(TRIG, 1e-3, 10.0))
        assert a_peak == pytest.approx(root, abs=1e-9)
        assert a_peak**2 == pytest.approx((-1.0 + math.sqrt(5.0)) / 2.0, abs=1e-12)

    def test_open_counterpart_peak(self):
        p = CosmoParams(1.0, -1, -3.0, 1.0)
        br, _ = resolved(p)
        a_peak = radiation_curved(p, br, math.pi / 4.0)
        assert a_peak**2 == pytest.approx((1.0 + math.sqrt(5.0)) / 2.0, abs=1e-12)

    def test_arc_endpoints_vanish(self):
        br, w = resolved(TRIG)
        assert radiation_curved(TRIG, br, w.t_min) < 1e-7
        assert radiation_curved(TRIG, br, w.t_max) < 1e-7

    def test_outside_arc_raises(self):
        br, w = resolved(TRIG)
        with pytest.raises(OutsideWindow):
            radiation_curved(TRIG, br, w.t_max + 0.5)

    def test_wrong_family_raises(self):
        br, _ = resolved(TRIG)
        with pytest.raises(WrongRegime):
            radiation_curved(reference_params(1.0, 1, 0.0), br, 0.5)


class TestRadiationCurvedHyperbolic:
    def test_sinh_bang_and_growth(self):
        br, w = resolved(SINH)
        assert radiation_curved(SINH, br, w.t_min) < 1e-7
        a = radiation_curved(SINH, br, w.t_min + np.array([0.5, 1.0, 2.0]))
        assert np.all(np.diff(a) > 0)

    def test_critical_windows(self):
        w1 = default_window(CRITICAL)
        assert math.isinf(w1.t_min) and math.isinf(w1.t_max)
        pm = CosmoParams(1.0, -1, 0.75, 1.0)
        wm = default_window(pm)
        assert wm.t_min == pm.t0 and wm.singular_start
        brm, _ = resolved(pm)
        assert radiation_curved(pm, brm, pm.t0) == 0.0

    def test_cosh_bounce_minimum(self):
        br, _ = resolved(COSH)
        lam_sq = 0.5 / 3.0
        disc = 1.0 - 2.0 / 3.0
        want = (1.0 + math.sqrt(disc)) / (2.0 * lam_sq)
        assert radiation_curved(COSH, br, 0.0) ** 2 == pytest.approx(want, rel=1e-14)

    def test_cosh_recollapse_arc(self):
        # narrowed to the bounded bang-to-crunch window the other sign owns
        lam = math.sqrt(0.5 / 3.0)
        width = math.acosh(1.0 / math.sqrt(1.0 / 3.0)) / (2.0 * lam)
        w = TimeWindow(-width, width, singular_start=True, singular_end=True)
        br = resolve_branch(COSH, w)
        assert br.inner_signs == (-1,)
        top = radiation_curved(COSH, br, 0.0) ** 2
        assert top == pytest.approx((1.0 - math.sqrt(1.0 / 3.0)) * 3.0, rel=1e-12)


class TestResolveBranch:
    def test_unique_on_canonical_windows(self):
        for params in (TRIG, SINH, CRITICAL, COSH, CosmoParams(1.0, -1, 0.5, 1.0)):
            br, _ = resolved(params)
            assert br.outer_sign == 1 and br.inner_signs == (1,)

    def test_ambiguous_when_both_signs_solve(self):
        lam = math.sqrt(0.5 / 3.0)
        width = math.acosh(1.0 / math.sqrt(1.0 / 3.0)) / (2.0 * lam)
        with pytest.raises(AmbiguousBranch):
            resolve_branch(COSH, TimeWindow(0.05 * width, 0.5 * width))

    def test_no_branch_on_impossible_window(self):
        pm = CosmoParams(1.0, -1, 0.5, 1.0)
        with pytest.raises(NoValidBranch):
            resolve_branch(pm, TimeWindow(-math.inf, math.inf))

    def test_unbounded_window_rejects_bounded_branch(self):
        # near-critical discriminant pushes the recollapse arc edge far out;
        # the full line must still resolve to the bounce alone
        p = CosmoParams(1.0, 1, 0.75 - 1e-6, 1.0)
        br = resolve_branch(p, TimeWindow(-math.inf, math.inf))
        assert br.inner_signs == (1,)

    def test_trivial_for_single_branch_families(self):
        for params in (CosmoParams(1.0, 0, 3.0, 1.0), reference_params(0.5, 1, 0.0)):
            br, _ = resolved(params)
            assert br == TRIVIAL_BRANCH

    def test_wrong_regime_for_general_exponents(self):
        p = CosmoParams(0.7, 1, 0.0, 1.0)  # no closed family at this index
        with pytest.raises(WrongRegime):
            resolve_branch(p, TimeWindow(0.0, 1.0))


class TestRadiationFlat:
    def test_bang_and_unit_point(self):
        p = CosmoParams(1.0, 0, 3.0, 1.0)
        assert radiation_flat(p, 0.0) == 0.0
        # sinh(2 lambda t) = 1 at t = asinh(1)/2 makes a = C^(1/4)/sqrt(lambda)
        assert radiation_flat(p, math.asinh(1.0) / 2.0) == pytest.approx(1.0, abs=1e-14)

    def test_sin_arc_peak_and_exit(self):
        p = CosmoParams(1.0, 0, -3.0, 1.0)
        assert radiation_flat(p, math.pi / 4.0) == pytest.approx(1.0, abs=1e-14)
        with pytest.raises(OutsideWindow):
            radiation_flat(p, 0.6 * math.pi)

    def test_before_bang_raises(self):
        with pytest.raises(OutsideWindow):
            radiation_flat(CosmoParams(1.0, 0, 3.0, 1.0), -0.2)


class TestZeroLambdaFlat:
    def test_power_law_reference_point(self):
        p = reference_params(0.5, 0, 0.0)
        assert zero_lambda_flat(p, 2.0) == pytest.approx(4.0 ** (2.0 / 3.0), rel=1e-15)
        assert zero_lambda_flat(p, 0.0) == 1.0

    def test_de_sitter_e_folding(self):
        p = reference_params(-1.0, 0, 0.0)
        assert zero_lambda_flat(p, 1.0) == pytest.approx(math.e, rel=1e-15)

    def test_phantom_blowup_window(self):
        p = reference_params(-2.0, 0, 0.0)  # gamma_bar + 1 < 0: finite-time blowup
        w = default_window(p)
        assert math.isinf(w.t_min) and math.isfinite(w.t_max)
        with pytest.raises(OutsideWindow):
            zero_lambda_flat(p, w.t_max + 0.1)

    def test_normalization_enforced(self):
        with pytest.raises(WrongRegime):
            zero_lambda_flat(CosmoParams(0.5, 0, 0.0, 2.0), 1.0)


class TestZeroLambdaCurvedExplicit:
    def test_closed_radiation_lifetime(self):
        p = reference_params(1.0, 1, 0.0)
        assert zero_lambda_curved_explicit(p, 1.0) == 1.0   # peak a0 at tau = a0
        assert zero_lambda_curved_explicit(p, 2.0) == 0.0   # crunch at 2 a0

    def test_open_radiation_bang(self):
        p = reference_params(1.0, -1, 0.0)
        assert zero_lambda_curved_explicit(p, 0.0) == 0.0
        with pytest.raises(OutsideWindow):
            zero_lambda_curved_explicit(p, -0.1)

    def test_vacuum_rows(self):
        closed = reference_params(-1.0, 1, 0.0)
        assert zero_lambda_curved_explicit(closed, 0.0) == 1.0
        opened = reference_params(-1.0, -1, 0.0)
        assert zero_lambda_curved_explicit(opened, 0.0) == pytest.approx(1.0, rel=1e-15)
        assert zero_lambda_curved_explicit(opened, -math.asinh(1.0)) == 0.0


class TestZeroLambdaDustImplicit:
    def test_reference_points(self):
        closed = reference_params(0.5, 1, 0.0)
        assert zero_lambda_dust_implicit(closed, 0.0) == 1.0
        assert zero_lambda_dust_implicit(closed, math.pi / 2.0) < 1e-7
        opened = reference_params(0.5, -1, 0.0)
        assert zero_lambda_dust_implicit(opened, 0.0) == pytest.approx(1.0, abs=1e-13)
        assert zero_lambda_dust_implicit(opened, -DUST_OPEN_CONSTANT) == 0.0

    @given(frac=st.floats(0.001, 0.999))
    @settings(max_examples=60, deadline=None)
    def test_closed_roundtrip_residual(self, frac):
        p = reference_params(0.5, 1, 0.0)
        tau = frac * math.pi / 2.0
        A = zero_lambda_dust_implicit(p, tau) / p.a0
        assert math.isfinite(A) and 0.0 <= A <= 1.0
        B = math.sqrt(1.0 - A)
        residual = math.sqrt(A) * B + math.asin(B) - tau
        assert abs(residual) < 1e-12

    @given(tau=st.floats(-0.52, 8.0))
    @settings(max_examples=60, deadline=None)
    def test_open_roundtrip_residual(self, tau):
        p = reference_params(0.5, -1, 0.0)
        A = zero_lambda_dust_implicit(p, tau) / p.a0
        if A == 0.0:
            return
        lhs = math.sqrt(A * (1.0 + A)) - math.acosh(math.sqrt(1.0 + A))
        assert abs(lhs - (tau + DUST_OPEN_CONSTANT)) < 1e-12

    def test_beyond_crunch_raises(self):
        with pytest.raises(NoBracket):
            zero_lambda_dust_implicit(reference_params(0.5, 1, 0.0), 2.0)
        with pytest.raises(OutsideWindow):
            zero_lambda_dust_implicit(reference_params(0.5, -1, 0.0), -1.0)


class TestResidualSuites:
    @pytest.mark.parametrize("family", sorted(FAMILY_DRAWS, key=lambda f: f.value))
    def test_fd_residuals_across_draws(self, family, rng):
        worst_fri = worst_ode = 0.0
        for _ in range(10):
            params = FAMILY_DRAWS[family](rng)
            assert classify(params).family is family
            lo, hi = representative_segment(params)
            fri, ode = fd_residuals(params, lo, hi)
            worst_fri, worst_ode = max(worst_fri, fri), max(worst_ode, ode)
        assert worst_fri < 1e-8
        assert worst_ode < 1e-6


class TestRegimeContinuity:
    @pytest.mark.parametrize("sign", [+1, -1])
    def test_critical_limit(self, sign):
        # a shifted time origin matches the exponential row: the off-critical
        # rows approach it as sqrt|disc| e^(2 lam t) / 2 after the shift
        eps = 1e-6
        grid = np.linspace(-1.0, 1.5, 51)
        a_crit, _ = closed_state(CRITICAL, grid)
        p = CosmoParams(1.0, 1, 0.75 + sign * eps, 1.0)
        shift = math.log(2.0 / math.sqrt(abs(classify(p).discriminant)))
        p_shifted = CosmoParams(1.0, 1, p.lambda_cc, 1.0, t0=-shift)
        a_eps, _ = closed_state(p_shifted, grid)
        assert float(np.max(np.abs(a_eps - a_crit))) < 1e-3

    @pytest.mark.parametrize("kappa", [1, -1])
    def test_vanishing_lambda_matches_explicit_rows(self, kappa):
        tiny = 1e-10
        explicit = reference_params(1.0, kappa, 0.0)
        grid = np.linspace(0.1, 1.8, 41) if kappa == 1 else np.linspace(0.1, 3.0, 41)

        if kappa == 1:
            lam = math.sqrt(tiny / 3.0)
            disc = classify(CosmoParams(1.0, 1, tiny, 1.0)).discriminant
            width = math.acosh(1.0 / math.sqrt(disc)) / (2.0 * lam)
            p_pos = CosmoParams(1.0, 1, tiny, 1.0, t0=width)
            w = TimeWindow(0.0, 2.0 * width, singular_start=True, singular_end=True)
            br = resolve_branch(p_pos, w)
            assert br.inner_signs == (-1,)
        else:
            probe = default_window(CosmoParams(1.0, -1, tiny, 1.0))
            p_pos = CosmoParams(1.0, -1, tiny, 1.0, t0=-probe.t_min)
            br, _ = resolved(p_pos)
        dev = np.abs(radiation_curved(p_pos, br, grid)
                     - zero_lambda_curved_explicit(explicit, grid))
        assert float(np.max(dev)) < 1e-4

        probe = default_window(CosmoParams(1.0, kappa, -tiny, 1.0))
        p_neg = CosmoParams(1.0, kappa, -tiny, 1.0, t0=-probe.t_min)
        br_neg, _ = resolved(p_neg)
        dev = np.abs(radiation_curved(p_neg, br_neg, grid)
                     - zero_lambda_curved_explicit(explicit, grid))
        assert float(np.max(dev)) < 1e-4


class TestClosedDispatch:
    def test_scalar_in_scalar_out(self):
        a, adot = closed_state(CosmoParams(1.0, 0, 3.0, 1.0), 0.7)
        assert isinstance(a, float) and isinstance(adot, float)

    def test_trajectory_has_tiny_residual(self):
        p = reference_params(1.0, 1, 0.0)
        traj = closed_trajectory(p, np.linspace(0.05, 1.95, 77))
        assert traj.method == "closed"
        assert float(np.max(np.abs(traj.residual_friedmann))) < 1e-10

    def test_analytic_rate_matches_fd(self):
        p = COSH
        ts = np.linspace(-1.0, 1.0, 9)
        h = 1e-6
        _, adot = closed_state(p, ts)
        ap, _ = closed_state(p, ts + h)
        am, _ = closed_state(p, ts - h)
        assert np.max(np.abs((ap - am) / (2 * h) - adot)) < 1e-7

    def test_no_closed_form_families_raise(self):
        with pytest.raises(WrongRegime):
            closed_state(CosmoParams(0.7, 1, 0.0, 1.0), 1.0)
        with pytest.raises(WrongRegime):
            closed_trajectory(CosmoParams(-1.0, 1, 1.0, 1.0), np.linspace(0, 1, 5))
