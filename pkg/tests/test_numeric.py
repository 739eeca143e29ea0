"""ODE, quadrature, and inversion engines against elementary solutions.

Every reference here is an antiderivative computable by hand: power laws for
the flat families, sqrt(1 - t^2) style arcs for closed radiation, exponentials
for the vacuum index.  No closed-form module code is consulted.
"""

import math

import numpy as np
import pytest

from frwcosmo.errors import (
    EndpointNotSimpleRoot,
    NoBracket,
    NonPositiveIntegrand,
    ScaleFactorCollapse,
)
from frwcosmo.model import CosmoParams, reference_params, z_of_a
from frwcosmo.numeric import (
    EndpointMap,
    OdeConfig,
    QuadConfig,
    a_of_t_inverse,
    bisect_root,
    integrate_ode,
    ode_transit_time,
    quad_general,
    quadrature_trajectory,
    t_of_a_quadrature,
    z_roots,
)
from frwcosmo.specfun import dt_du, solution_coeffs, t_of_u

CLOSED_RADIATION = reference_params(1.0, 1, 0.0)
FLAT_RADIATION = reference_params(1.0, 0, 0.0)
FLAT_DUST = reference_params(0.5, 0, 0.0)
CRITICAL_RADIATION = CosmoParams(1.0, 1, 0.75, 1.0)


class TestOdeConfig:
    def test_rejects_nonpositive_tolerances(self):
        with pytest.raises(ValueError):
            OdeConfig(rel_tol=0.0)
        with pytest.raises(ValueError):
            OdeConfig(abs_tol=-1e-12)
        with pytest.raises(ValueError):
            OdeConfig(max_step=0.0)


class TestIntegrateOde:
    def test_flat_dust_matches_power_law(self):
        grid = np.linspace(0.0, 5.0, 101)
        traj = integrate_ode(FLAT_DUST, 1.0, 1.0, grid)
        exact = (1.0 + 1.5 * grid) ** (2.0 / 3.0)
        assert np.max(np.abs(traj.a - exact)) <= 1e-8
        assert traj.method == "ode"

    def test_vacuum_index_matches_exponential(self):
        p = CosmoParams(-1.0, 0, 0.0, 1.0)
        grid = np.linspace(0.0, 3.0, 61)
        traj = integrate_ode(p, 1.0, 1.0, grid)
        assert np.max(np.abs(traj.a - np.exp(grid))) <= 1e-8

    def test_recollapse_from_apex_reports_crossing_time(self):
        # From the turning point the closed radiation arc reaches a = 0 in
        # exactly one time unit of a0.
        with pytest.raises(ScaleFactorCollapse) as ei:
            integrate_ode(CLOSED_RADIATION, 1.0, 0.0, np.linspace(0.0, 2.0, 201))
        assert ei.value.crossing_time == pytest.approx(1.0, abs=1e-6)
        part = ei.value.trajectory
        assert part is not None
        assert part.times.size > 0
        assert np.all(part.times <= ei.value.crossing_time + 1e-12)

    def test_constraint_offset_is_conserved(self):
        # The second-order flow never looks at adot^2 - z, so initial data
        # off the constraint must keep their offset, not decay or grow.
        grid = np.linspace(0.0, 4.0, 81)
        traj = integrate_ode(FLAT_RADIATION, 1.0, 1.2, grid)
        offset = 1.2**2 - 1.0
        assert np.max(np.abs(traj.residual_friedmann - offset)) <= 1e-6

    def test_input_validation(self):
        grid = np.linspace(0.0, 1.0, 11)
        with pytest.raises(ValueError):
            integrate_ode(FLAT_DUST, 1.0, 1.0, grid[::-1])
        with pytest.raises(ValueError):
            integrate_ode(FLAT_DUST, 1.0, 1.0, [0.0])
        with pytest.raises(ValueError):
            integrate_ode(FLAT_DUST, -1.0, 1.0, grid)


class TestTransitQuadrature:
    def test_flat_radiation_is_a_triangle_area(self):
        # 1/sqrt(z) = a, so the transit 1 -> 3 is (9 - 1)/2.
        assert t_of_a_quadrature(FLAT_RADIATION, 1.0, 3.0) == pytest.approx(
            4.0, rel=1e-10
        )

    def test_vacuum_index_is_a_logarithm(self):
        p = CosmoParams(-1.0, 0, 0.0, 1.0)
        assert t_of_a_quadrature(p, 1.0, math.e) == pytest.approx(1.0, rel=1e-10)

    def test_closed_radiation_quarter_period(self):
        cfg = QuadConfig(singular_endpoint_map=EndpointMap.SQRT_UPPER)
        got = t_of_a_quadrature(CLOSED_RADIATION, 0.0, 1.0, cfg)
        assert got == pytest.approx(1.0, rel=1e-9)

    def test_interior_negative_z_rejected(self):
        with pytest.raises(NonPositiveIntegrand):
            t_of_a_quadrature(CLOSED_RADIATION, 0.5, 1.5)

    def test_double_root_endpoint_rejected(self):
        cfg = QuadConfig(singular_endpoint_map=EndpointMap.SQRT_UPPER)
        with pytest.raises(EndpointNotSimpleRoot):
            t_of_a_quadrature(CRITICAL_RADIATION, 1.0, math.sqrt(2.0), cfg)

    def test_interval_validation(self):
        with pytest.raises(ValueError):
            t_of_a_quadrature(FLAT_RADIATION, -0.5, 1.0)
        with pytest.raises(ValueError):
            t_of_a_quadrature(FLAT_RADIATION, 2.0, 1.0)


class TestQuadGeneral:
    def test_polynomial(self):
        assert quad_general(lambda x: x, 0.0, 1.0) == pytest.approx(0.5, rel=1e-12)

    def test_inverse_sqrt_upper_endpoint(self):
        cfg = QuadConfig(singular_endpoint_map=EndpointMap.SQRT_UPPER)
        got = quad_general(lambda x: (1.0 - x) ** (-0.5), 0.0, 1.0, cfg)
        assert got == pytest.approx(2.0, rel=1e-10)

    def test_arcsine_weight_both_endpoints(self):
        cfg = QuadConfig(singular_endpoint_map=EndpointMap.SQRT_BOTH)
        got = quad_general(lambda x: (x * (1.0 - x)) ** (-0.5), 0.0, 1.0, cfg)
        assert got == pytest.approx(math.pi, rel=1e-10)

    def test_time_integrand_consistent_with_series_solution(self):
        cf = solution_coeffs(CLOSED_RADIATION)
        got = quad_general(lambda u: dt_du(cf, u), 0.2, 0.45)
        want = t_of_u(cf, CLOSED_RADIATION, 0.45) - t_of_u(cf, CLOSED_RADIATION, 0.2)
        assert got == pytest.approx(want, abs=1e-8)

    def test_interval_validation(self):
        with pytest.raises(ValueError):
            quad_general(lambda x: x, 1.0, 1.0)


class TestInverseTransit:
    def test_flat_radiation_point(self):
        got = a_of_t_inverse(FLAT_RADIATION, 4.0, (1.0, 10.0))
        assert got == pytest.approx(3.0, rel=1e-9)

    def test_flat_dust_power_law(self):
        got = a_of_t_inverse(FLAT_DUST, 2.0, (1.0, None))
        assert got == pytest.approx(4.0 ** (2.0 / 3.0), rel=1e-8)

    def test_time_of_turning_point_lands_on_root(self):
        # Transit 0.5 -> 1 under z = 1/a^2 - 1 is sqrt(3)/2 on the nose.
        t_apex = math.sqrt(0.75)
        got = a_of_t_inverse(CLOSED_RADIATION, t_apex, (0.5, None))
        assert got == pytest.approx(1.0, rel=1e-8)

    def test_zero_transit_returns_start(self):
        assert a_of_t_inverse(FLAT_RADIATION, 0.0, (1.3, None)) == 1.3

    def test_times_outside_piece_rejected(self):
        with pytest.raises(NoBracket):
            a_of_t_inverse(CLOSED_RADIATION, 1.2, (0.5, None))
        with pytest.raises(NoBracket):
            a_of_t_inverse(FLAT_RADIATION, -0.1, (1.0, 2.0))

    def test_roundtrip_against_forward_quadrature(self, rng):
        for _ in range(5):
            gb = float(rng.uniform(0.4, 1.6))
            p = reference_params(gb, 0, 0.0, a0=float(rng.uniform(0.7, 1.3)))
            a_target = float(rng.uniform(1.5, 4.0)) * p.a0
            t = t_of_a_quadrature(p, p.a0, a_target)
            back = a_of_t_inverse(p, t, (p.a0, None))
            assert back == pytest.approx(a_target, rel=1e-8)


class TestZRoots:
    def test_subcritical_pair_matches_quartic_formula(self):
        # z a^2 = (lcc/3) a^4 - a^2 + 1 vanishes at
        # a^2 = (1 ± sqrt(1 - 4 lcc / 3)) / (2 lcc / 3).
        p = CosmoParams(1.0, 1, 0.45, 1.0)
        disc = math.sqrt(1.0 - 4.0 * 0.45 / 3.0)
        lo = math.sqrt((1.0 - disc) / 0.3)
        hi = math.sqrt((1.0 + disc) / 0.3)
        roots = z_roots(p, 0.1, 10.0)
        assert roots.shape == (2,)
        assert roots[0] == pytest.approx(lo, rel=1e-12)
        assert roots[1] == pytest.approx(hi, rel=1e-12)

    def test_critical_touching_root(self):
        roots = z_roots(CRITICAL_RADIATION, 0.5, 5.0)
        assert roots.shape == (1,)
        assert roots[0] == pytest.approx(math.sqrt(2.0), rel=1e-9)

    def test_rootless_window_is_empty(self):
        assert z_roots(FLAT_RADIATION, 0.5, 2.0).size == 0

    def test_range_validation(self):
        with pytest.raises(ValueError):
            z_roots(FLAT_RADIATION, 0.0, 1.0)


class TestBisectRoot:
    def test_polynomial_root(self):
        got = bisect_root(lambda x: x**3 - 2.0, 0.0, 2.0, tol=1e-15)
        assert got == pytest.approx(2.0 ** (1.0 / 3.0), rel=1e-14)

    def test_endpoint_zero_short_circuits(self):
        assert bisect_root(lambda x: x, 0.0, 1.0) == 0.0

    def test_no_sign_change_rejected(self):
        with pytest.raises(NoBracket):
            bisect_root(lambda x: 1.0 + x * x, -1.0, 1.0)


class TestCrossEngineAgreement:
    def test_ode_and_quadrature_transits_agree(self, rng):
        # Twenty parameter draws across flat, open, and below-apex closed
        # regions; the two engines share no code past z_of_a itself.
        for k in range(20):
            gb = float(rng.uniform(0.4, 1.6))
            kappa = [0, -1, 1][k % 3]
            lcc = 0.45 if kappa == 1 else 0.0
            p = reference_params(gb if kappa != 1 else 1.0, kappa, lcc)
            a1 = float(rng.uniform(0.3, 0.5))
            a2 = a1 + float(rng.uniform(0.3, 0.5))
            t_quad = t_of_a_quadrature(p, a1, a2)
            t_ode = ode_transit_time(p, a1, a2)
            assert abs(t_ode - t_quad) <= 1e-7 * max(1.0, t_quad)

    def test_ode_error_tracks_requested_tolerance(self):
        # Flat trig surrogate: y = a^2 obeys y'' = -4y, so from the apex
        # a(t) = sqrt(cos 2t) exactly.
        p = CosmoParams(1.0, 0, -3.0, 1.0)
        grid = np.linspace(0.0, 0.6, 41)
        exact = np.sqrt(np.cos(2.0 * grid))
        errs = []
        for rel in (1e-5, 1e-7, 1e-9, 1e-11):
            traj = integrate_ode(p, 1.0, 0.0, grid, OdeConfig(rel_tol=rel, abs_tol=1e-14))
            errs.append(float(np.max(np.abs(traj.a - exact))))
        for coarse, fine in zip(errs, errs[1:]):
            assert fine <= 2.0 * coarse + 1e-13
        assert errs[0] >= 30.0 * errs[-1]

    def test_ermakov_energy_drift_over_ten_dynamical_times(self):
        # Open radiation: E = adot^2/2 - c/(2 a^2) must hold at 1/2.
        p = reference_params(1.0, -1, 0.0)
        grid = np.linspace(0.0, 10.0, 501)
        traj = integrate_ode(p, 1.0, math.sqrt(2.0), grid)
        energy = 0.5 * traj.adot**2 - 0.5 / traj.a**2
        assert np.max(np.abs(energy - 0.5)) <= 1e-8


class TestPiecewiseQuadrature:
    def test_reflection_through_apex_matches_circle_arc(self):
        # Closed radiation: a^2 = 1 - (t - t_apex)^2 with the apex reached
        # sqrt(3)/2 after a = 1/2 on the way up.
        t_apex = math.sqrt(0.75)
        grid = np.linspace(0.0, 1.5, 61)
        traj = quadrature_trajectory(CLOSED_RADIATION, grid, 0.5, 1.0)
        exact = np.sqrt(1.0 - (grid - t_apex) ** 2)
        assert np.max(np.abs(traj.a - exact)) <= 1e-7
        assert traj.method == "quadrature"
        # Velocity sign flips across the turning point.
        assert traj.adot[grid < t_apex - 0.05].min() > 0.0
        assert traj.adot[grid > t_apex + 0.05].max() < 0.0

    def test_start_exactly_on_turning_point(self):
        grid = np.linspace(0.0, 0.9, 31)
        traj = quadrature_trajectory(CLOSED_RADIATION, grid, 1.0, 0.0)
        exact = np.sqrt(1.0 - grid**2)
        assert np.max(np.abs(traj.a - exact)) <= 1e-7

    def test_crunch_inside_window_raises(self):
        with pytest.raises(ScaleFactorCollapse) as ei:
            quadrature_trajectory(
                CLOSED_RADIATION, np.linspace(0.0, 3.0, 31), 0.5, 1.0
            )
        assert ei.value.crossing_time == pytest.approx(
            math.sqrt(0.75) + 1.0, abs=1e-6
        )

    def test_friedmann_residual_is_tiny_by_construction(self):
        grid = np.linspace(0.0, 1.2, 25)
        traj = quadrature_trajectory(CLOSED_RADIATION, grid, 0.5, 1.0)
        # adot comes from the constraint itself, up to the root clamp.
        scale = np.maximum(1.0, np.abs(z_of_a(CLOSED_RADIATION, traj.a)))
        assert np.max(np.abs(traj.residual_friedmann) / scale) <= 1e-12
