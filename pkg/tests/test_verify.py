"""Theorem harnesses: condition constants, embedding ratios, level-set
inclusion, reports, and designed-to-fail controls."""

import json
import math

import pytest

from orliczmax.config import ConfigError
from orliczmax.field import GridField, box_mass, luxembourg_norm
from orliczmax.grid import CarlesonSquare, Domain
from orliczmax.verify import (
    TheoremInstance,
    build_parts,
    condition_constant,
    embedding_ratio,
    levelset_inclusion_check,
    negative_instance,
    theorem_report,
)
from orliczmax.young import YoungFunction, conjugate

SEED = 0xB5EBA


def make_instance(thm="T1", **kw):
    base = dict(
        thm=thm,
        p=2.0,
        q=2.0 if thm in ("T1", "T3", "T4", "C1") else 1.5,
        alpha=0.0,
        phi_spec={"family": "power", "a": 1.5},
        omega_spec={"kind": "power_y", "s": 0.5},
        mu_spec={"kind": "scale_of_weight", "c": 1.0},
        indicator_depth=2,
        seeded_count=4,
    )
    base.update(kw)
    return TheoremInstance(**base)


class TestInstanceValidation:
    def test_upper_triangle_needs_p_le_q(self):
        with pytest.raises(ConfigError):
            make_instance("T1", p=2.0, q=1.5)

    def test_lower_triangle_needs_q_below_p(self):
        with pytest.raises(ConfigError):
            make_instance("T2", p=2.0, q=2.0)

    def test_phi_must_be_in_class(self):
        with pytest.raises(ConfigError):
            make_instance("T1", phi_spec={"family": "power", "a": 2.0})

    def test_unknown_theorem(self):
        with pytest.raises(ConfigError):
            make_instance("T9")


class TestConditionConstant:
    def test_measure_proportional_to_weight_gives_one(self):
        inst = make_instance("T1")
        res = condition_constant(inst, build_parts(inst, 5))
        assert abs(res.constant - 1.0) <= 1e-10

    def test_lower_triangle_trivial_ratio_norm(self):
        # box-ratio function identically 1: the condition is the s-norm of 1
        inst = make_instance("T2", p=2.0, q=1.5)
        parts = build_parts(inst, 5)
        res = condition_constant(inst, parts)
        s = 2.0 / (2.0 - 1.5)
        predicted = parts.omega.total_mass(0.0) ** (1.0 / s)
        assert abs(res.constant - predicted) <= 1e-9 * predicted

    def test_conjugate_norm_condition_hand_enumeration(self):
        # unit weight, Lebesgue measure, p = q: the conjugate-norm factor is
        # constant across boxes, so the condition equals that factor to the
        # q-th power; enumerate all depth-4 dyadic boxes by hand as oracle
        inst = make_instance(
            "T3",
            omega_spec={"kind": "constant", "value": 1.0},
            mu_spec={"kind": "constant", "value": 1.0},
            indicator_depth=4,
            grid_spec={"padded": False, "depth": 4},
        )
        parts = build_parts(inst, 4)
        res = condition_constant(inst, parts)
        phi = YoungFunction.power(1.5)
        psi = conjugate(phi)
        dom = parts.domain
        oracle = -math.inf
        for k in range(5):
            for m in range(2**k):
                iv = dom.dyadic_interval(0, k, m)
                one = GridField.constant(dom, 1.0)
                nrm = luxembourg_norm(one, CarlesonSquare(iv), psi, one, 0.0)
                mu_q = box_mass(one, 0.0, iv)
                meas = iv.length**2
                oracle = max(oracle, nrm**2 * mu_q / meas)
        assert abs(res.constant - oracle) <= 1e-9 * oracle
        # the factor itself: norm of 1 against the conjugate of t^1.5
        inv_one = 1.0 / (0.5 * 1.5**-3.0) ** (1.0 / 3.0)
        assert abs(res.constant - (1.0 / inv_one) ** 2) <= 1e-9


class TestEmbeddingRatio:
    def test_single_box_instance_ratio_one(self):
        # one-root domain, f the root indicator, measure = weight: both
        # sides equal the box mass to matching powers
        inst = make_instance(
            "T1",
            omega_spec={"kind": "constant", "value": 1.0},
            grid_spec={"padded": False, "depth": 4},
            indicator_depth=0,
            seeded_count=0,
        )
        parts = build_parts(inst, 4)
        res = embedding_ratio(inst, parts)
        assert res.witness == "ind:0:0"
        assert abs(res.ratio - 1.0) <= 1e-9

    def test_family_has_no_zero_ratio(self):
        inst = make_instance("T1")
        parts = build_parts(inst, 5)
        res = embedding_ratio(inst, parts)
        assert all(v > 0.0 for v in res.per_function.values())

    def test_necessity_box_bound_exact(self):
        # each box's measure-to-weight ratio is certified by the indicator
        # of that box inside the ratio supremum
        inst = make_instance(
            "T1",
            omega_spec={"kind": "power_y", "s": 0.5},
            mu_spec={"kind": "seeded", "stream": 77, "support": "central"},
            indicator_depth=3,
        )
        parts = build_parts(inst, 5)
        cond = condition_constant(inst, parts)
        rat = embedding_ratio(inst, parts)
        assert cond.constant <= rat.ratio**inst.q * (1.0 + 1e-8)


class TestLevelSetInclusion:
    def test_constant_formula(self):
        dom = Domain.padded((0.0, 1.0), 4)
        f = GridField.constant(dom, 1.0)
        res = levelset_inclusion_check(
            f, YoungFunction.power(1.5), GridField.constant(dom, 1.0),
            0.0, (1.0, 1.0), lattice_depth=4,
        )
        assert abs(res.constant - 136.0) <= 1e-12
        assert res.violations == 0

    def test_seeded_battery_zero_violations(self):
        dom = Domain.padded((0.0, 1.0), 5)
        unit = GridField.constant(dom, 1.0)
        wpow = GridField.power_y(dom, 0.5)
        for stream, (w, doubling) in enumerate(
            [(unit, (1.0, 1.0)), (wpow, (2.0, 4.0 / 3.0))]
        ):
            f = GridField.seeded(dom, SEED, stream=400 + stream)
            vals = f.values.copy()
            vals[dom.cell_root != 1] = 0.0
            f = GridField(dom, vals)
            res = levelset_inclusion_check(
                f, YoungFunction.power_log(2.0, 1.0), w, 0.0, doubling,
                lattice_depth=5,
            )
            assert res.violations == 0
            assert len(res.ladder) == 20


class TestTheoremReports:
    def test_t1_report_passes_and_serializes(self):
        rep = theorem_report(make_instance("T1"), [4, 5])
        assert rep.passed
        blob = json.dumps(rep.to_json(), sort_keys=True)
        parsed = json.loads(blob)
        assert parsed["pass"] is True
        assert {a["name"] for a in parsed["assertions"]} >= {
            "necessity_box_bound@depth4",
            "depth_stability@4->5",
        }

    def test_t4_unit_weight_matches_unweighted_t1(self):
        # with the unit weight the maximal of the weight is identically 1,
        # so the weighted right-hand side coincides with the plain p-norm
        shared = dict(
            omega_spec={"kind": "constant", "value": 1.0},
            mu_spec={"kind": "constant", "value": 1.0},
            indicator_depth=2,
            seeded_count=3,
        )
        t1 = make_instance("T1", **shared)
        t4 = make_instance("T4", **shared)
        p1 = build_parts(t1, 4)
        p4 = build_parts(t4, 4)
        r1 = embedding_ratio(t1, p1)
        r4 = embedding_ratio(t4, p4)
        assert abs(r1.ratio - r4.ratio) <= 1e-9 * r1.ratio

    def test_t4_report_carries_rhs_note(self):
        rep = theorem_report(make_instance("T4"), [4])
        assert any("d-mu" in n for n in rep.notes)

    def test_t5_trivial_prediction(self):
        rep = theorem_report(make_instance("T5", p=2.0, q=1.5), [4, 5])
        assert rep.passed
        names = {a.name for a in rep.assertions}
        assert "kmu_trivial_prediction@depth4" in names

    def test_depths_must_ascend(self):
        with pytest.raises(ConfigError):
            theorem_report(make_instance("T1"), [5, 4])

    @pytest.mark.parametrize("thm", ["T1", "T2", "T3", "T4", "T5"])
    def test_negative_controls_fail(self, thm):
        rep = theorem_report(negative_instance(thm), [4, 5])
        assert not rep.passed
        failed = [a.name for a in rep.assertions if not a.passed]
        if thm == "T1":
            assert any(n.startswith("necessity") for n in failed)
        else:
            assert any(n.startswith("depth_stability") for n in failed)

    def test_negative_instance_is_deterministic(self):
        a = theorem_report(negative_instance("T2"), [4, 5]).to_json()
        b = theorem_report(negative_instance("T2"), [4, 5]).to_json()
        a.pop("runtime_ms")
        b.pop("runtime_ms")
        assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)

    def test_analytic_measure_density(self):
        # a power-in-y measure density exercises the exact-mass path end to end
        rep = theorem_report(
            make_instance("T1", mu_spec={"kind": "power_y", "s": 1.0}), [4, 5]
        )
        assert rep.passed
        assert math.isfinite(rep.condition["constant"])

    def test_exclusion_counts_recorded(self):
        rep = theorem_report(make_instance("T1"), [4])
        assert any("overflow boxes excluded" in n for n in rep.notes)

    def test_nonzero_alpha_instance(self):
        rep = theorem_report(
            make_instance(
                "T1", alpha=0.5, omega_spec={"kind": "power_y", "s": -0.3}
            ),
            [4, 5],
        )
        assert rep.passed

    def test_power_log_function_instance(self):
        rep = theorem_report(
            make_instance("T1", phi_spec={"family": "power_log", "a": 1.5, "b": 1.0}),
            [4, 5],
        )
        assert rep.passed
