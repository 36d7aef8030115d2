import math

import numpy as np
import pytest

from hopfbvp.analysis import (
    auto_comparison_config,
    blowup_compare,
    comparison_check,
    estimate_Is1_trend,
    estimate_Is2,
    find_solution,
    junction_asymptotics_check,
    scan_jump,
    solvability_map,
    write_map_csv,
    write_scan_csv,
)
from hopfbvp.core import HALF_PI, HopfParams


class TestScanJump:
    def test_straight_family_zero_jump(self, params_flat):
        scan = scan_jump(params_flat, 0.3, 1.2, 5, grid_n=1200)
        assert all(r.converged for r in scan.rows)
        assert all(abs(r.l) <= 1e-5 for r in scan.rows)

    def test_main_regime_has_bracket(self, params_main):
        scan = scan_jump(params_main, 0.05, 1.45, 10, grid_n=800)
        assert scan.brackets
        svals = [r.s for r in scan.rows]
        assert svals == sorted(svals)
        lo, hi = scan.brackets[0]
        l_by_s = {r.s: r.l for r in scan.rows}
        assert l_by_s[lo] * l_by_s[hi] < 0.0

    def test_sign_consistency_and_cross_check(self, params_main):
        scan = scan_jump(params_main, 0.05, 1.45, 8, grid_n=800)
        for r in scan.rows:
            if r.converged and abs(r.l) > 1e-7:
                assert math.copysign(1, r.l) == math.copysign(1, r.I_s)
                assert abs(r.l - r.l_tilde) <= max(1e-4, 1e-2 * abs(r.l))

    def test_below_threshold_no_bracket(self):
        params = HopfParams(p=1, q=2, lam=1.0, mu=1.9)
        scan = scan_jump(params, 0.05, 1.4, 8, grid_n=600)
        assert not scan.brackets
        assert all(r.l < 0 for r in scan.rows if r.converged)

    def test_parallel_matches_serial(self, params_main):
        a = scan_jump(params_main, 0.1, 1.0, 4, grid_n=500, jobs=1)
        b = scan_jump(params_main, 0.1, 1.0, 4, grid_n=500, jobs=2)
        assert [r.s for r in a.rows] == [r.s for r in b.rows]
        assert [r.l for r in a.rows] == [r.l for r in b.rows]

    def test_energy_bound_over_scan(self, params_main):
        scan = scan_jump(params_main, 0.05, 1.45, 8, grid_n=800)
        totals = [r.J_interior + r.J_exterior for r in scan.rows if r.converged]
        assert max(totals) <= 10.0 * float(np.median(totals))

    def test_csv_write(self, tmp_path, params_main):
        scan = scan_jump(params_main, 0.2, 1.0, 3, grid_n=400)
        path = tmp_path / "scan.csv"
        write_scan_csv(scan, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "s,l,l_tilde,I_s,I_s1,I_s2,converged"
        assert len(lines) == 4


class TestFindSolution:
    def test_main_regime(self, params_main):
        out = find_solution(params_main, s_min=0.05, s_max=1.45, n_scan=10,
                            grid_n=1000)
        assert out.verdict == "solution_found"
        assert abs(out.glued.l) <= 1e-6
        # the 1e-4 residual contract holds at the default n=2000 (acceptance
        # suite); at this test's n=1000 the h^2 scaling allows 4x more
        assert out.max_residual_away <= 5e-4
        assert out.boundary_error_zero <= 1e-3
        assert out.boundary_error_pi <= 1e-3
        prof = out.glued.merged_profile()
        assert np.all(np.diff(prof.values) > 0.0)

    def test_p2_q2(self):
        params = HopfParams(p=2, q=2, lam=2.0, mu=2.0)
        out = find_solution(params, s_min=0.1, s_max=1.4, n_scan=10, grid_n=800)
        assert out.verdict == "solution_found"

    def test_below_threshold_q3(self):
        params = HopfParams(p=1, q=3, lam=1.0, mu=2.0)
        out = find_solution(params, s_min=0.05, s_max=1.4, n_scan=8, grid_n=600)
        assert out.verdict == "no_sign_change"

    def test_flat_family_root_at_scan_point(self, params_flat):
        out = find_solution(params_flat, s_min=0.3, s_max=1.2, n_scan=5, grid_n=800)
        assert out.verdict == "solution_found"
        assert abs(out.glued.l) <= 1e-6


class TestBlowupCompare:
    def test_distance_decreases(self, params_main):
        d_far = blowup_compare(0.04, params_main, 0.1, grid_n=1200)
        d_near = blowup_compare(0.02, params_main, 0.1, grid_n=1200)
        assert d_near < d_far

    def test_junction_pinned(self, params_main):
        from hopfbvp.variational import glue

        g = glue(0.02, params_main, n=800)
        gamma_at_1 = g.merged_profile().interpolate(0.02)
        assert gamma_at_1 == pytest.approx(HALF_PI, abs=1e-12)

    def test_eps_validation(self, params_main):
        with pytest.raises(ValueError):
            blowup_compare(0.02, params_main, 1.5)


class TestIsTrends:
    def test_is1_positive(self, params_main):
        vals = estimate_Is1_trend(params_main, [0.04, 0.02], grid_n=800)
        assert all(v > 0 for v in vals)

    def test_is1_grows_at_lam1(self, params_main):
        vals = estimate_Is1_trend(params_main, [0.04, 0.02, 0.01], grid_n=1200)
        assert vals[0] < vals[1] < vals[2]

    def test_is2_split(self, params_main):
        rep = estimate_Is2(params_main, 0.01, 50.0, 3.0, grid_n=1200)
        assert rep.bound_ok
        assert rep.A_s > 0 and rep.B_s > 0 and rep.I_s2 > 0
        rep2 = estimate_Is2(params_main, 0.005, 50.0, 3.0, grid_n=1200)
        assert rep2.ratio < rep.ratio


class TestComparison:
    def test_auto_config_and_ordering(self, params_main):
        s, d, t0 = auto_comparison_config(0.01, params_main)
        rep = comparison_check(s, d, t0, params_main, grid_n=1500)
        assert rep.hypothesis_met
        assert rep.ordering_ok
        assert rep.supersolution_ok
        assert rep.n_nodes_checked > 0

    def test_hypothesis_not_met_reported(self, params_main):
        # d too large: psi at t0 falls below the threshold angle
        rep = comparison_check(0.01, 49.0, 0.5, params_main, grid_n=600)
        assert not rep.hypothesis_met
        assert math.isnan(rep.min_gap)

    def test_supersolution_endpoint_algebra(self, params_main):
        # at psi = pi the bracket is (mu - lam) - sqrt(lam)(q-1) > 0 for mu > lam q
        lam, mu, q = params_main.lam, params_main.mu, params_main.q
        val = (lam - mu) * math.cos(math.pi) - math.sqrt(lam) * (q - 1)
        assert val == pytest.approx(mu - lam - math.sqrt(lam) * (q - 1), abs=1e-15)
        assert val > 0.0

    def test_factor_vanishes_at_threshold(self, params_main):
        from hopfbvp.closed_forms import theta_threshold

        theta = theta_threshold(params_main)
        lam, mu, q = params_main.lam, params_main.mu, params_main.q
        val = (lam - mu) * math.cos(theta) - math.sqrt(lam) * (q - 1)
        assert abs(val) < 1e-13


class TestJunctionAsymptotics:
    def test_psi_at_own_scale(self, params_main):
        rep = junction_asymptotics_check(0.01, 10.0, 10.0, params_main, grid_n=600)
        assert abs(rep.cos_psi_at_sR) < 1e-12

    def test_frozen_limit_value(self, params_main):
        rep = junction_asymptotics_check(0.01, 10.0, 3.0, params_main, grid_n=600)
        assert rep.alpha_limit == pytest.approx(-0.9801980198019802, abs=1e-15)

    def test_psi_error_quarters_when_s_halves(self, params_main):
        r1 = junction_asymptotics_check(0.01, 10.0, 3.0, params_main, grid_n=600)
        r2 = junction_asymptotics_check(0.005, 10.0, 3.0, params_main, grid_n=600)
        ratio = r2.psi_err / r1.psi_err
        assert abs(ratio - 0.25) <= 0.05


class TestSolvabilityMap:
    def test_small_threshold_slice(self):
        cells = solvability_map(
            1, 2, (1.0, 2.0), (1.0, 4.0), 2, 3,
            grid_n=500, n_scan=8, s_min=0.05, s_max=1.4, jobs=2,
        )
        by_pair = {(c.lam, c.mu): c.verdict for c in cells}
        assert by_pair[(1.0, 4.0)] == "solution_found"
        assert by_pair[(1.0, 2.5)] == "solution_found"  # mu > lam*q = 2
        assert by_pair[(1.0, 1.0)] == "no_sign_change"
        assert by_pair[(2.0, 1.0)] == "no_sign_change"
        assert by_pair[(2.0, 2.5)] == "no_sign_change"  # mu < lam*q = 4

    def test_q1_diagonal(self):
        cells = solvability_map(
            1, 1, (1.0, 2.0), (1.0, 2.0), 2, 2,
            grid_n=400, n_scan=6, s_min=0.2, s_max=1.3,
        )
        by_pair = {(c.lam, c.mu): c.verdict for c in cells}
        assert by_pair[(1.0, 1.0)] == "solution_found"
        assert by_pair[(2.0, 2.0)] == "solution_found"
        assert by_pair[(1.0, 2.0)] == "no_sign_change"
        assert by_pair[(2.0, 1.0)] == "no_sign_change"

    def test_map_csv(self, tmp_path):
        cells = solvability_map(
            1, 1, (1.0, 1.0), (1.0, 1.0), 1, 1, grid_n=300, n_scan=4,
            s_min=0.3, s_max=1.2,
        )
        path = tmp_path / "map.csv"
        write_map_csv(cells, path)
        lines = path.read_text().splitlines()
        assert lines[0] == "lambda,mu,verdict,s_star"
        assert len(lines) == 2
