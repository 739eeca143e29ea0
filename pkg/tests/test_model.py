"""Parameter validation, the z(a) first integral, and regime classification.

Expected numbers are hand substitutions into the printed forms of z, the
discriminant, and the second-order right-hand side; the turning-point state
test takes its root from the independent scan in frwcosmo.numeric instead of
inverting anything by hand.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from frwcosmo.errors import (
    BadCurvature,
    GammaBarZero,
    NegativeDensity,
    NonPositiveConstant,
)
from frwcosmo.model import (
    CosmoParams,
    Family,
    Trajectory,
    classify,
    derived_state,
    discriminant,
    lambda_scale,
    reference_params,
    rhs_second_order,
    validate_params,
    z_of_a,
)
from frwcosmo.numeric import z_roots


class TestValidateParams:
    def test_valid_radiation_record(self):
        p = validate_params(
            {"gamma_bar": 1, "kappa": 0, "lambda_cc": 0, "c_int": 1, "a0": 1, "t0": 0}
        )
        assert p == CosmoParams(1.0, 0, 0.0, 1.0)
        assert isinstance(p.kappa, int)

    def test_gamma_bar_zero_rejected(self):
        with pytest.raises(GammaBarZero):
            validate_params({"gamma_bar": 0.0, "kappa": 0, "lambda_cc": 0, "c_int": 1})

    def test_curvature_outside_triple_rejected(self):
        with pytest.raises(BadCurvature):
            validate_params({"gamma_bar": 1.0, "kappa": 2, "lambda_cc": 0, "c_int": 1})

    def test_float_kappa_narrowed_only_when_integral(self):
        p = validate_params({"gamma_bar": 1.0, "kappa": -1.0, "lambda_cc": 0, "c_int": 1})
        assert p.kappa == -1 and isinstance(p.kappa, int)
        with pytest.raises(BadCurvature):
            validate_params({"gamma_bar": 1.0, "kappa": 0.5, "lambda_cc": 0, "c_int": 1})

    def test_nonpositive_amplitudes_rejected(self):
        with pytest.raises(NonPositiveConstant):
            validate_params({"gamma_bar": 1.0, "kappa": 0, "lambda_cc": 0, "c_int": 0.0})
        with pytest.raises(NonPositiveConstant):
            validate_params(
                {"gamma_bar": 1.0, "kappa": 0, "lambda_cc": 0, "c_int": 1, "a0": -2.0}
            )

    def test_unknown_and_missing_keys(self):
        with pytest.raises(ValueError, match="unknown"):
            validate_params({"gamma_bar": 1, "kappa": 0, "lambda_cc": 0, "c_int": 1, "h0": 70})
        with pytest.raises(ValueError, match="missing"):
            validate_params({"gamma_bar": 1, "kappa": 0})

    def test_reference_normalization_pins_c(self):
        assert reference_params(1.0, 1, 0.0, a0=2.0).c_int == 4.0
        assert reference_params(0.5, 0, 0.0, a0=4.0).c_int == 4.0
        # Vacuum index swaps the exponent sign with it the interpretation of c.
        assert reference_params(-1.0, 0, 0.0, a0=2.0).c_int == 0.25


class TestFirstIntegral:
    def test_flat_radiation_value(self):
        assert float(z_of_a(CosmoParams(1.0, 0, 0.0, 1.0), 2.0)) == 0.25

    def test_vacuum_open_value(self):
        assert float(z_of_a(CosmoParams(-1.0, -1, 0.0, 1.0), 1.0)) == 2.0

    def test_curved_lambda_value(self):
        assert float(z_of_a(CosmoParams(1.0, 1, 3.0, 1.0), 1.0)) == 1.0

    def test_rhs_values(self):
        assert float(rhs_second_order(CosmoParams(1.0, 0, 0.0, 1.0), 1.0)) == -1.0
        assert float(rhs_second_order(CosmoParams(-1.0, 0, 0.0, 4.0), 2.0)) == 8.0
        assert float(rhs_second_order(CosmoParams(1.0, 0, 3.0, 1.0), 1.0)) == 0.0

    @given(
        gb=st.floats(-2.0, 2.0).filter(lambda g: abs(g) > 0.05),
        kappa=st.sampled_from([-1, 0, 1]),
        lcc=st.floats(-3.0, 3.0),
        c=st.floats(0.2, 5.0),
        a=st.floats(0.1, 10.0),
    )
    @settings(max_examples=200, deadline=None)
    def test_z_solves_its_linear_ode(self, gb, kappa, lcc, c, a):
        # z' + (2 gb / a) z = 2 (lcc/3)(gb+1) a - 2 gb kappa / a, the linear
        # equation the first integral came from.  z' by 4th-order central
        # differences: the wide stencil admits h = 1e-3 a, which keeps the
        # roundoff term eps z / h below the 1e-10 gate even where z is steep.
        p = CosmoParams(gb, kappa, lcc, c)
        h = 1e-3 * a
        zm2, zm1, zp1, zp2 = (
            float(z_of_a(p, a + k * h)) for k in (-2.0, -1.0, 1.0, 2.0)
        )
        fd = (-zp2 + 8.0 * zp1 - 8.0 * zm1 + zm2) / (12.0 * h)
        coupling = 2.0 * gb / a * float(z_of_a(p, a))
        rhs = 2.0 * (lcc / 3.0) * (gb + 1.0) * a - 2.0 * gb * kappa / a
        scale = max(1.0, abs(fd), abs(coupling), abs(rhs))
        assert abs(fd + coupling - rhs) <= 1e-10 * scale

    def test_rhs_is_half_z_gradient(self):
        for p in (
            CosmoParams(1.0, 1, 0.8, 1.3),
            CosmoParams(0.5, -1, -1.1, 0.7),
            CosmoParams(-1.25, 0, 0.0, 2.0),
            CosmoParams(-1.0, 1, 0.0, 1.0),
        ):
            for a in np.geomspace(0.1, 10.0, 25):
                h = 1e-6 * a
                fd = float(z_of_a(p, a + h) - z_of_a(p, a - h)) / (2.0 * h)
                got = float(rhs_second_order(p, a))
                assert abs(got - 0.5 * fd) <= 1e-8 * max(1.0, abs(got))


class TestDiscriminant:
    def test_critical_boundary_is_exact_zero(self):
        assert discriminant(CosmoParams(1.0, 1, 0.75, 1.0)) == 0.0

    def test_zero_lambda_is_kappa_squared(self):
        assert discriminant(CosmoParams(1.0, 1, 0.0, 1.0)) == 1.0

    def test_open_large_lambda(self):
        assert discriminant(CosmoParams(1.0, -1, 3.0, 1.0)) == -3.0


class TestClassify:
    def test_representative_family_members(self):
        assert classify(CosmoParams(1.0, 1, -1.0, 1.0)).family is Family.RadiationLambdaNegativeTrig
        assert classify(CosmoParams(1.0, 0, 3.0, 1.0)).family is Family.FlatRadiationSinh
        assert classify(CosmoParams(-1.0, 0, 0.0, 1.0)).family is Family.ZeroLambdaDeSitterFlat

    def test_discriminant_split(self):
        assert classify(CosmoParams(1.0, 1, 0.75, 1.0)).family is Family.RadiationLambdaCritical
        assert classify(CosmoParams(1.0, 1, 0.7, 1.0)).family is Family.RadiationLambdaSmallCosh
        assert classify(CosmoParams(1.0, 1, 0.8, 1.0)).family is Family.RadiationLambdaLargeSinh

    def test_exact_zero_lambda_required(self):
        # 1e-300 is not zero: near-zero values stay with the Lambda != 0 rows.
        assert classify(CosmoParams(1.0, 1, 1e-300, 1.0)).family is Family.RadiationLambdaSmallCosh
        assert classify(CosmoParams(1.0, 1, 0.0, 1.0)).family is Family.ZeroLambdaCurvedRadiation

    def test_degenerate_indices(self):
        for gb in (-1.0, 1.0 / 3.0, 0.2):
            assert classify(CosmoParams(gb, 1, 1.0, 1.0)).family is Family.LogarithmicDegenerate
        # Explicit rows take precedence over the degenerate label.
        assert classify(CosmoParams(-1.0, 1, 0.0, 1.0)).family is Family.ZeroLambdaCurvedVacuum
        assert classify(reference_params(1.0 / 3.0, 0, 0.0)).family is Family.ZeroLambdaFlatPowerLaw

    def test_degenerate_tolerance_window(self):
        third = 1.0 / 3.0
        assert classify(CosmoParams(third + 1e-13, 1, 1.0, 1.0)).family is Family.LogarithmicDegenerate
        assert classify(CosmoParams(third + 1e-10, 1, 1.0, 1.0)).family is Family.HypergeometricGeneral

    def test_pure_over_random_draws(self, rng):
        kappas = np.array([-1, 0, 1])
        for _ in range(10_000):
            gb = float(rng.uniform(-3.0, 3.0)) or 0.5
            p = CosmoParams(
                gb,
                int(rng.choice(kappas)),
                float(rng.uniform(-2.0, 2.0)),
                float(rng.uniform(0.1, 3.0)),
            )
            r1, r2 = classify(p), classify(p)
            assert r1 == r2
            assert r1.lambda_scale == lambda_scale(p.lambda_cc)


class TestDerivedState:
    def test_radiation_pressure_third(self):
        s = derived_state(CosmoParams(1.0, 0, 0.0, 1.0), 1.0, 1.0)
        assert (s.hubble, s.energy_density) == (1.0, 1.0)
        assert s.pressure == pytest.approx(1.0 / 3.0, abs=0.0, rel=1e-15)

    def test_vacuum_pressure_negative(self):
        s = derived_state(CosmoParams(-1.0, 0, 0.0, 1.0), 1.0, 1.0)
        assert (s.hubble, s.energy_density, s.pressure) == (1.0, 1.0, -1.0)

    def test_turning_point_state(self):
        # At a root of z the motion stops; the root comes from the scan.
        p = reference_params(1.0, 1, 0.0)
        root = float(z_roots(p, 0.1, 10.0)[0])
        s = derived_state(p, root, 0.0)
        assert s.hubble == 0.0
        assert s.energy_density == pytest.approx(p.kappa / root**2, rel=1e-12)

    def test_negative_density_signalled(self):
        with pytest.raises(NegativeDensity):
            derived_state(CosmoParams(1.0, -1, 3.0, 1.0), 10.0, 0.0)

    @given(
        gb=st.floats(-2.0, 2.0).filter(lambda g: abs(g) > 0.05),
        a=st.floats(0.2, 5.0),
        adot=st.floats(-3.0, 3.0),
    )
    @settings(max_examples=100, deadline=None)
    def test_barotropic_relation_is_exact(self, gb, a, adot):
        p = CosmoParams(gb, 0, 0.0, 1.0)
        try:
            s = derived_state(p, a, adot)
        except NegativeDensity:
            return
        gamma = (2.0 / 3.0) * (gb + 1.0)
        assert s.pressure == (gamma - 1.0) * s.energy_density


class TestTrajectory:
    def test_times_must_increase(self):
        ts = np.array([0.0, 1.0, 1.0])
        ones = np.ones(3)
        with pytest.raises(ValueError):
            Trajectory(ts, ones, ones, np.zeros(3), CosmoParams(1.0, 0, 0.0, 1.0))

    def test_interior_zeros_rejected_endpoints_allowed(self):
        p = reference_params(1.0, 1, 0.0)
        ts = np.linspace(0.0, 2.0, 5)
        good = np.array([0.0, 1.0, 1.0, 1.0, 0.0])
        t = Trajectory(ts, good, np.zeros(5), np.zeros(5), p)
        assert t.a[0] == 0.0
        bad = np.array([1.0, 1.0, 0.0, 1.0, 1.0])
        with pytest.raises(ValueError):
            Trajectory(ts, bad, np.zeros(5), np.zeros(5), p)
