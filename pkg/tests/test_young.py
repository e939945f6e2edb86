"""Young functions: evaluation, inverses, conjugates, doubling, and the
strong-type integral class."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from orliczmax.young import (
    BpResult,
    YoungFunction,
    bp_check,
    bp_conjugate_integral,
    conjugate,
    delta2_constant,
    inverse,
    inverse_grid,
)

E = math.e


def built_in_families():
    return [
        YoungFunction.power(1.0),
        YoungFunction.power(1.5),
        YoungFunction.power(2.0),
        YoungFunction.power(3.0),
        YoungFunction.power_log(2.0, 1.0),
        YoungFunction.power_log(1.5, 0.5),
        YoungFunction.from_table([[0, 0], [0.5, 0.2], [1, 1], [2, 3]]),
    ]


class TestEval:
    def test_power_normalization_and_values(self):
        phi = YoungFunction.power(2.0)
        assert phi.eval(1.0) == 1.0
        assert phi.eval(3.0) == 9.0
        assert phi.eval(0.0) == 0.0

    def test_power_log_normalized_at_one(self):
        phi = YoungFunction.power_log(2.0, 1.0)
        assert abs(phi.eval(1.0) - 1.0) <= 1e-12

    def test_all_families_normalized(self):
        for phi in built_in_families():
            assert abs(phi.eval(1.0) - 1.0) <= 1e-12, phi.family

    def test_domain_errors(self):
        phi = YoungFunction.power(2.0)
        with pytest.raises(ValueError):
            phi.eval(-1.0)
        with pytest.raises(ValueError):
            phi.eval(float("nan"))

    def test_monotone_on_grid(self):
        ts = np.geomspace(1e-8, 1e8, 400)
        for phi in built_in_families():
            vals = phi.eval(ts)
            assert np.all(np.diff(vals) >= -1e-15 * vals[1:])

    def test_midpoint_convexity(self):
        rng = np.random.default_rng(3)
        for phi in built_in_families():
            t1 = np.exp(rng.uniform(-6, 6, 200))
            t2 = np.exp(rng.uniform(-6, 6, 200))
            mid = phi.eval((t1 + t2) / 2.0)
            avg = (phi.eval(t1) + phi.eval(t2)) / 2.0
            assert np.all(mid <= avg + 1e-12 * np.maximum(avg, 1.0))

    def test_ratio_to_argument_nondecreasing(self):
        ts = np.geomspace(1e-6, 1e6, 500)
        for phi in built_in_families():
            r = phi.eval(ts) / ts
            assert np.all(np.diff(r) >= -1e-12 * np.maximum(r[1:], 1e-30))


class TestInverse:
    def test_square_root(self):
        phi = YoungFunction.power(2.0)
        assert abs(inverse(phi, 4.0) - 2.0) <= 1e-12
        assert inverse(phi, 0.0) == 0.0

    def test_power_log_fixed_point(self):
        phi = YoungFunction.power_log(2.0, 1.0)
        assert abs(inverse(phi, 1.0) - 1.0) <= 1e-10

    def test_roundtrip_on_grid(self):
        ys = np.geomspace(1e-6, 1e6, 60)
        for phi in built_in_families():
            ts = inverse_grid(phi, ys)
            back = phi.eval(ts)
            assert np.all(np.abs(back - ys) <= 1e-10 * np.maximum(1.0, ys)), phi.family


class TestConjugate:
    def test_square_closed_form(self):
        psi = conjugate(YoungFunction.power(2.0))
        assert abs(psi.eval(1.0) - 0.25) <= 1e-14
        assert psi.eval(0.0) == 0.0

    def test_biconjugate_of_power_closed(self):
        phi = YoungFunction.power(1.5)
        back = conjugate(conjugate(phi))
        for t in (0.5, 1.0, 2.0):
            assert abs(back.eval(t) - phi.eval(t)) <= 1e-12

    def test_biconjugate_numeric_against_brute_force(self):
        # numeric double transform compared with a dense-grid supremum oracle
        phi = YoungFunction.power(1.5)
        psi_num = YoungFunction(kind="conjugate", family="conjugate", base=phi, normalized=False)
        back = conjugate(psi_num)
        grid = np.geomspace(1e-6, 1e4, 200_000)
        psi_on_grid = conjugate(phi).eval(grid)
        for t in (0.5, 1.0, 2.0):
            oracle = float(np.max(t * grid - psi_on_grid))
            assert abs(float(back.eval(t)) - oracle) <= 1e-8 * max(1.0, oracle)
            assert abs(float(back.eval(t)) - phi.eval(t)) <= 1e-8

    def test_numeric_sup_matches_brute_force(self):
        phi = YoungFunction.power_log(2.0, 1.0)
        psi = conjugate(phi)
        grid = np.geomspace(1e-8, 1e5, 400_000)
        phi_on_grid = phi.eval(grid)
        for s in (0.25, 1.0, 4.0, 50.0):
            oracle = float(np.max(s * grid - phi_on_grid))
            assert abs(float(psi.eval(s)) - oracle) <= 1e-7 * max(1.0, oracle)

    def test_linear_conjugate_is_degenerate(self):
        psi = conjugate(YoungFunction.power(1.0))
        assert psi.eval(0.5) == 0.0
        assert psi.eval(1.0) == 0.0
        assert math.isinf(psi.eval(1.5))

    def test_youngs_inequality_sampled(self):
        rng = np.random.default_rng(11)
        for phi in (
            YoungFunction.power(1.5),
            YoungFunction.power(2.0),
            YoungFunction.power_log(2.0, 1.0),
        ):
            psi = conjugate(phi)
            t = np.exp(rng.uniform(-6, 6, 300))
            s = np.exp(rng.uniform(-6, 6, 300))
            lhs = t * s
            rhs = phi.eval(t) + psi.eval(s)
            assert np.all(lhs <= rhs * (1.0 + 1e-12) + 1e-300)

    def test_sandwich_identity(self):
        ts = np.geomspace(1e-6, 1e6, 121)
        for phi in (
            YoungFunction.power(1.3),
            YoungFunction.power(2.0),
            YoungFunction.power_log(2.0, 1.0),
        ):
            psi = conjugate(phi)
            prod = inverse_grid(phi, ts) * inverse_grid(psi, ts)
            assert np.all(prod >= ts * (1.0 - 1e-9))
            assert np.all(prod <= 2.0 * ts * (1.0 + 1e-9))


class TestDelta2:
    def test_power_families_exact(self):
        assert abs(delta2_constant(YoungFunction.power(2.0)) - 4.0) <= 1e-12
        assert abs(delta2_constant(YoungFunction.power(1.0)) - 2.0) <= 1e-12

    def test_power_log_between_4_and_8(self):
        k = delta2_constant(YoungFunction.power_log(2.0, 1.0))
        assert 4.0 <= k <= 8.0

    def test_power_log_window_decays_to_tail_ratio(self):
        # the doubling ratio peaks at moderate arguments and tends to 2^a in
        # both tails, so sliding the sample window up brings the sup down
        phi = YoungFunction.power_log(2.0, 1.0)
        near = delta2_constant(phi, t_max=1e6)
        far = delta2_constant(phi, t_max=1e30)
        assert near > far > 4.0
        assert far - 4.0 <= 0.2

    def test_degenerate_conjugate_fails_doubling(self):
        psi = conjugate(YoungFunction.power(1.0))
        assert math.isinf(delta2_constant(psi))


class TestBpIntegral:
    def test_power_convergent(self):
        res = bp_check(YoungFunction.power(1.5), 2.0, c=1.0)
        assert res.member
        assert abs(res.integral - 2.0) <= 1e-12

    def test_power_divergent(self):
        res = bp_check(YoungFunction.power(2.0), 2.0, c=1.0)
        assert math.isinf(res.integral)
        assert not res.member

    def test_conjugate_exponent_family(self):
        # (p' r)' with p = 2, r = 2 gives 4/3 < 2, hence membership
        res = bp_check(YoungFunction.power(4.0 / 3.0), 2.0, c=1.0)
        assert res.member
        assert math.isfinite(res.integral)

    def test_lower_cutoff_dependence(self):
        # closed form c^(a-p)/(p-a): with a=1.5, p=2, c=4 the integral is 1
        res = bp_check(YoungFunction.power(1.5), 2.0, c=4.0)
        assert abs(res.integral - 1.0) <= 1e-12

    def test_power_log_against_quadrature_oracle(self):
        phi = YoungFunction.power_log(1.5, 1.0)
        res = bp_check(phi, 2.5, c=1.0)
        oracle, err = quad(
            lambda t: float(phi.eval(t)) / t**3.5, 1.0, np.inf, limit=400
        )
        assert res.member
        assert abs(res.integral - oracle) <= 1e-7 * oracle + 10 * err

    def test_table_linear_tail(self):
        phi = YoungFunction.from_table([[0, 0], [0.5, 0.2], [1, 1], [2, 3]])
        res = bp_check(phi, 2.0, c=0.5)
        oracle, err = quad(
            lambda t: float(phi.eval(t)) / t**3, 0.5, np.inf, limit=400
        )
        assert res.member
        assert abs(res.integral - oracle) <= 1e-6 * oracle + 10 * err

    def test_dual_integral_equivalence_on_powers(self):
        # the direct and conjugate-side integrals converge together
        p = 2.0
        for a in (1.2, 1.5, 1.9):
            assert bp_check(YoungFunction.power(a), p).member
            assert math.isfinite(bp_conjugate_integral(YoungFunction.power(a), p))
        assert not bp_check(YoungFunction.power(2.5), p).member
        assert math.isinf(bp_conjugate_integral(YoungFunction.power(2.5), p))

    def test_result_type(self):
        res = bp_check(YoungFunction.power(1.5), 2.0)
        assert isinstance(res, BpResult)


class TestSpecParsing:
    def test_roundtrip(self):
        for spec in (
            {"family": "power", "a": 2.0},
            {"family": "power_log", "a": 2.0, "b": 1.0},
            {"family": "conjugate_of", "base": {"family": "power", "a": 2.0}},
        ):
            phi = YoungFunction.from_spec(spec)
            assert phi.spec()["family"] == spec["family"]

    def test_table_must_be_convex(self):
        with pytest.raises(ValueError):
            YoungFunction.from_table([[0, 0], [1, 2], [2, 2.5]])
