"""Constrained minimization, saddle search, projection, classification.

Closed-form oracles: the fiber energy of the scaled GN extremal is a
three-term expression in the extremal's norms, so gn_fiber_energy is
checked against the discrete energy of the actually-scaled profile and
against frozen values recomputed from the norms in-test.  Projection
roots are checked against a plain midpoint bisection written here.
Solver candidates must pass the report filters and reproduce frozen
energies from independent earlier runs of the same discretization.
"""

import math

import numpy as np
import pytest

from kirchhoff_normalized import (
    Model,
    RadialFunction,
    SolveParams,
    affine_coefficient,
    classify,
    energy,
    fiber_energy,
    gn_fiber_barrier,
    gn_fiber_energy,
    gn_fiber_min,
    gn_fiber_well,
    ground_state,
    make_exp_critical,
    make_grid,
    minimize_on_sphere,
    mountain_pass,
    multiplier_estimate,
    normalize_mass,
    pohozaev_project,
    power_nonlinearity,
    recommended_grid,
)
from kirchhoff_normalized import constrained_solver as cs
from kirchhoff_normalized.functional import fiber_pohozaev


def affine_power(n, p, a=1.0, b=1.0):
    return Model(affine_coefficient(a, b), power_nonlinearity(p, n))


def bisect_threshold(model, lo, hi):
    """Mass radius where the fiber well depth crosses zero."""
    def depth(c):
        w = gn_fiber_well(model, c)
        return w[1] if w is not None else 1.0
    assert depth(lo) > 0 > depth(hi)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if depth(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@pytest.fixture(scope="module")
def shallow_kirchhoff():
    """N=5, p=2.9, weak quartic term: thresholds at desk scale."""
    model = affine_power(5, 2.9, b=0.001)
    c1 = bisect_threshold(model, 10.0, 500.0)
    return model, c1


@pytest.fixture(scope="module")
def n4_threshold_model():
    model = affine_power(4, 3.0)
    q = ground_state(4, 3.0)
    return model, q.q_l2


@pytest.fixture(scope="module")
def wide_minimizer_report(n4_threshold_model):
    model, c1 = n4_threshold_model
    return minimize_on_sphere(model, 1.05 * c1)


@pytest.fixture(scope="module")
def saddle_report(shallow_kirchhoff):
    model, c1 = shallow_kirchhoff
    return mountain_pass(model, 0.97 * c1)


class TestFiberClosedForm:
    def test_matches_discrete_energy_of_scaled_extremal(self):
        model = affine_power(5, 2.5)
        c = 160.0
        t_star, j_star = gn_fiber_min(model, c)
        grid = recommended_grid(model, c, SolveParams())
        vals = cs._q_scaled_values(model, c, grid, t_star)
        u = RadialFunction(grid, vals)
        discrete = energy(model, u).total
        assert discrete == pytest.approx(j_star, rel=2e-3)

    def test_frozen_deep_well(self):
        model = affine_power(5, 2.5)
        t_star, j_star = gn_fiber_min(model, 160.0)
        assert t_star == pytest.approx(0.02449, rel=1e-3)
        assert j_star == pytest.approx(-133.8075, rel=1e-4)

    def test_well_and_barrier_bracket_the_threshold(self, shallow_kirchhoff):
        model, c1 = shallow_kirchhoff
        assert c1 == pytest.approx(50.7224, rel=1e-4)
        below = gn_fiber_well(model, 0.97 * c1)
        above = gn_fiber_well(model, 1.05 * c1)
        assert below is not None and below[1] > 0
        assert above is not None and above[1] < 0
        bar = gn_fiber_barrier(model, 0.97 * c1, below[0])
        assert bar is not None
        assert bar[1] > below[1]
        assert bar[0] < below[0]

    def test_no_interior_well_below_mass_critical_threshold(
            self, n4_threshold_model):
        model, c1 = n4_threshold_model
        assert gn_fiber_well(model, 0.95 * c1) is None
        well = gn_fiber_well(model, 1.05 * c1)
        assert well is not None and well[1] < 0

    def test_rejects_exponential_family(self):
        model = Model(affine_coefficient(1, 1), make_exp_critical(1, 1, 1))
        with pytest.raises(ValueError):
            gn_fiber_energy(model, 1.0, 1.0)


class TestGridSizing:
    def test_widens_for_spread_minimizer(self, n4_threshold_model):
        model, c1 = n4_threshold_model
        grid = recommended_grid(model, 1.05 * c1, SolveParams())
        assert grid.r_max > 1000.0

    def test_keeps_default_when_fiber_monotone(self, n4_threshold_model):
        model, c1 = n4_threshold_model
        params = SolveParams()
        grid = recommended_grid(model, 0.95 * c1, params)
        assert grid.r_max == pytest.approx(params.r_max)

    def test_exponential_keeps_default(self):
        model = Model(affine_coefficient(1, 1), make_exp_critical(1, 1, 1))
        params = SolveParams()
        grid = recommended_grid(model, 1.0, params)
        assert grid.r_max == pytest.approx(params.r_max)
        assert grid.dimension == 2


class TestNonlinearityJacobian:
    def fd(self, nl, u, h=1e-6):
        return (nl.f(u + h) - nl.f(u - h)) / (2 * h)

    def test_power_family(self):
        nl = power_nonlinearity(2.7, 5)
        u = np.array([0.3, 0.9, 1.7, 4.2])
        model = Model(affine_coefficient(1, 1), nl)
        got = cs._f_prime(model, u)
        assert got == pytest.approx(self.fd(nl, u), rel=1e-6)

    def test_exponential_family_both_branches(self):
        nl = make_exp_critical(1.0, 1.0, 1.0)
        # straddle the splice height and include the dead negative side
        u = np.array([-0.5, 0.2, 0.9 * nl.u1, 1.1 * nl.u1, 2.5])
        model = Model(affine_coefficient(1, 1), nl)
        got = cs._f_prime(model, u)
        want = self.fd(nl, u)
        assert got[0] == 0.0
        assert got[1:] == pytest.approx(want[1:], rel=1e-5)


class TestProjection:
    # mass-subcritical p: the balance changes sign exactly once, and the
    # root of a unit-mass Gaussian is a spread profile, so the grid must
    # hold the spread image
    def setup_method(self):
        self.model = affine_power(5, 2.5)
        self.grid = make_grid(5, 2000.0, 4000, "graded")
        vals = np.exp(-0.5 * (self.grid.nodes / 8.0) ** 2)
        self.c = 1.0
        self.u = normalize_mass(RadialFunction(self.grid, vals), self.c)

    def test_root_matches_plain_bisection(self):
        s_star, v = pohozaev_project(self.model, self.u, self.c)

        def g(s):
            return fiber_pohozaev(self.model, self.u, s)

        lo, hi = s_star - 0.05, s_star + 0.05
        glo, ghi = g(lo), g(hi)
        assert glo * ghi < 0
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if g(mid) * glo > 0:
                lo = mid
            else:
                hi = mid
        assert s_star == pytest.approx(0.5 * (lo + hi), abs=1e-9)
        assert abs(g(s_star)) < 1e-8

    def test_balance_split_at_the_root(self):
        s_star, _ = pohozaev_project(self.model, self.u, self.c)
        n, p = 5, 2.5
        qs = 2.0 * n / (n - 2)
        scale = math.exp(s_star)
        g = self.u.grad_norm_sq() * scale**2
        lp = self.u.lp_norm(p) ** p * scale ** (n * (p - 2) / 2)
        lc = self.u.lp_norm(qs) ** qs * scale ** (n * (qs - 2) / 2)
        lhs = self.model.coefficient.M(g) * g
        rhs = n * (p - 2) / (2 * p) * lp + lc
        assert lhs == pytest.approx(rhs, rel=1e-6)

    def test_projected_profile_is_on_the_sphere(self):
        s_star, v = pohozaev_project(self.model, self.u, self.c)
        assert v.mass() == pytest.approx(self.c**2, rel=1e-9)

    def test_near_critical_point_projects_to_small_shift(
            self, wide_minimizer_report):
        cand = wide_minimizer_report.candidate
        model = affine_power(4, 3.0)
        c = math.sqrt(cand.u.mass())
        s_star, _ = pohozaev_project(model, cand.u, c, s_range=(-0.5, 0.5))
        assert abs(s_star) < 1e-4

    def test_off_sphere_rejected(self):
        with pytest.raises(ValueError):
            pohozaev_project(self.model, self.u, 2.0 * self.c)

    def test_rootless_range_raises(self):
        with pytest.raises(cs.FiberMonotoneError):
            pohozaev_project(self.model, self.u, self.c, s_range=(3.0, 4.0))


class TestMinimize:
    def test_subcritical_always_attained(self):
        rep = minimize_on_sphere(affine_power(4, 2.5), 1.0)
        assert rep.status == "converged_minimizer"
        assert rep.candidate.energy < 0
        assert rep.candidate.lam < 0

    def test_frozen_subcritical_n5(self):
        rep = minimize_on_sphere(affine_power(5, 2.2), 1.0)
        assert rep.status == "converged_minimizer"
        assert rep.candidate.energy == pytest.approx(-0.0756571535, rel=1e-6)
        assert rep.candidate.lam == pytest.approx(-0.17021958, rel=1e-5)

    def test_wide_minimizer_above_threshold(self, wide_minimizer_report):
        rep = wide_minimizer_report
        assert rep.status == "converged_minimizer"
        assert rep.candidate.energy == pytest.approx(-0.00063039607, rel=1e-4)
        assert rep.candidate.lam == pytest.approx(-5.8719e-05, rel=1e-3)
        assert rep.candidate.lam < 0

    def test_nothing_passes_below_threshold(self, n4_threshold_model):
        model, c1 = n4_threshold_model
        rep = minimize_on_sphere(model, 0.5 * c1)
        assert rep.status == "no_nontrivial_solution_found"
        assert rep.candidate is None
        assert rep.infimum_estimate >= -1e-6

    def test_deep_well_above_shallow_threshold(self, shallow_kirchhoff):
        model, c1 = shallow_kirchhoff
        rep = minimize_on_sphere(model, 1.5 * c1)
        assert rep.status == "converged_minimizer"
        assert rep.candidate.energy < 0
        assert rep.candidate.lam < 0

    def test_candidate_invariants(self, wide_minimizer_report):
        cand = wide_minimizer_report.candidate
        c_sq = cand.u.mass()
        model = affine_power(4, 3.0)
        assert abs(c_sq - (1.05 * ground_state(4, 3.0).q_l2) ** 2) \
            <= 1e-8 * c_sq
        assert cand.pde_residual <= 1e-5 * cand.u.h1_norm()
        g = cand.u.grad_norm_sq()
        scale = model.coefficient.M(g) * g
        assert abs(cand.pohozaev_residual) <= 1e-5 * scale
        est = multiplier_estimate(model, cand.u, math.sqrt(c_sq))
        assert est.gap is not None and est.gap <= 1e-2

    def test_energy_history_non_increasing(self, wide_minimizer_report):
        hist = np.array(wide_minimizer_report.energy_history)
        slack = 1e-10 * (1.0 + np.abs(hist[:-1]))
        assert np.all(np.diff(hist) <= slack)

    def test_deterministic_reruns(self):
        model = affine_power(4, 2.5)
        params = SolveParams(restarts=2)
        rep1 = minimize_on_sphere(model, 1.0, params)
        rep2 = minimize_on_sphere(model, 1.0, params)
        assert rep1.candidate.energy == rep2.candidate.energy
        assert rep1.candidate.lam == rep2.candidate.lam

    def test_rejects_bad_mass(self):
        with pytest.raises(ValueError):
            minimize_on_sphere(affine_power(4, 2.5), -1.0)

    def test_report_dict_shape(self, wide_minimizer_report):
        d = wide_minimizer_report.to_dict()
        assert d["status"] == "converged_minimizer"
        assert d["candidate"]["lambda"] < 0
        assert d["final_residual"] is not None
        assert isinstance(d["notes"], list)


class TestMountainPass:
    def test_saddle_just_below_threshold(self, saddle_report):
        rep = saddle_report
        assert rep.status == "converged_mountain_pass"
        assert rep.candidate.lam < 0
        assert rep.candidate.energy == pytest.approx(19.9653, rel=1e-3)

    def test_saddle_sits_on_the_balance_manifold(self, saddle_report,
                                                 shallow_kirchhoff):
        model, _ = shallow_kirchhoff
        cand = saddle_report.candidate
        g = cand.u.grad_norm_sq()
        scale = model.coefficient.M(g) * g
        assert abs(cand.pohozaev_residual) <= 1e-5 * scale

    def test_level_ordering(self, saddle_report, shallow_kirchhoff):
        model, c1 = shallow_kirchhoff
        assert saddle_report.path_level > 0
        # the barrier estimate upper-bounds the refined saddle level
        assert saddle_report.path_level >= saddle_report.candidate.energy \
            - 1e-6 * (1 + abs(saddle_report.path_level))
        low = minimize_on_sphere(model, 0.97 * c1,
                                 SolveParams(restarts=2))
        assert saddle_report.path_level > min(low.infimum_estimate, 0.0)

    def test_exponential_reports_level_without_asserting_convergence(self):
        model = Model(affine_coefficient(1, 1), make_exp_critical(1, 1, 1))
        rep = mountain_pass(model, 1.0)
        assert rep.status in ("no_nontrivial_solution_found",
                              "converged_mountain_pass")
        assert rep.path_level > 0
        assert any("dilation ceiling" in note for note in rep.notes)


class TestClassify:
    def test_attained_branch_corroborated(self, n4_threshold_model):
        model, c1 = n4_threshold_model
        rec = classify(model, 1.2 * c1)
        assert rec.predicted == "ground_state"
        assert rec.observed_status == "converged_minimizer"
        assert rec.infimum_sign == "negative"
        assert rec.multiplier < 0
        assert rec.agreement == "corroborated"

    def test_nonexistence_corroborated(self):
        model = affine_power(4, 3.5)
        rec = classify(model, 0.5 * rec_c0(model),
                       SolveParams(restarts=12))
        assert rec.predicted == "no_solution"
        assert rec.observed_status == "no_nontrivial_solution_found"
        assert rec.agreement == "corroborated"

    def test_zero_infimum_corroborated_mass_critical(self):
        model = affine_power(5, 2.8)
        rec = classify(model, 1.0)
        assert rec.predicted == "zero_infimum_unattained"
        assert rec.observed_status == "no_nontrivial_solution_found"
        assert rec.infimum_estimate >= -1e-6
        assert rec.agreement == "corroborated"

    def test_exponential_defaults_to_report_only(self):
        model = Model(affine_coefficient(1, 1), make_exp_critical(1, 1, 1))
        rec = classify(model, 1.0)
        assert rec.predicted == "mountain_pass_regime"
        assert rec.observed_status == "not_run"
        assert rec.agreement == "inconclusive"

    def test_power_needs_affine_coefficient(self):
        from kirchhoff_normalized import general_coefficient
        model = Model(general_coefficient(lambda t: 1.0 + t,
                                          lambda t: t + t * t / 2, 1.0),
                      power_nonlinearity(2.5, 4))
        with pytest.raises(ValueError):
            classify(model, 1.0)

    def test_record_dict_shape(self, n4_threshold_model):
        model, c1 = n4_threshold_model
        rec = classify(model, 1.2 * c1)
        d = rec.to_dict()
        assert d["predicted"] == "ground_state"
        assert d["thresholds"]["c1_exact"] == pytest.approx(c1, rel=1e-12)
        assert d["agreement"] == "corroborated"


def rec_c0(model):
    from kirchhoff_normalized import gn_constant, threshold_set
    nl = model.nonlinearity
    q = ground_state(nl.dimension, nl.p)
    thr = threshold_set(model.coefficient.a, model.coefficient.b, nl.p,
                        nl.dimension, q.q_l2, gn_constant(nl.dimension, nl.p))
    assert thr.c0 is not None
    return thr.c0


class TestParamsValidation:
    @pytest.mark.parametrize("kw", [
        {"step": 0.0},
        {"residual_tol": -1.0},
        {"max_iter": 0},
        {"restarts": 0},
        {"beads": 2},
        {"r_max": 0.0},
        {"gaussian_widths": ()},
    ])
    def test_bad_params_rejected(self, kw):
        with pytest.raises(ValueError):
            SolveParams(**kw)
