"""Acceptance battery: one runnable check per criterion, shared by the
``suite`` CLI subcommand and the acceptance test module.

Each criterion function takes ``quick`` (smaller depths where the criterion
does not pin them) and returns (ok, detail). ``run_suite`` prints one
PASS/FAIL line per criterion and returns a process exit code.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from . import young as youngmod
from .field import GridField, batch_luxembourg, lp_norm, luxembourg_norm
from .grid import CarlesonSquare, Domain, Interval, Tessellation, cover_interval
from .maximal import _family_and_batch, dyadic_maximal
from .stopping import CarlesonSequence, carleson_embedding_check, stopping_family
from .verify import (
    TheoremInstance,
    levelset_inclusion_check,
    negative_instance,
    theorem_report,
)
from .weights import bekolle_constant, power_weight
from .young import YoungFunction, conjugate

DEFAULT_SEED = 0xB5EBA


def _phi_battery() -> list[tuple[str, YoungFunction]]:
    return [
        ("power:1", YoungFunction.power(1.0)),
        ("power:1.5", YoungFunction.power(1.5)),
        ("power:2", YoungFunction.power(2.0)),
        ("power:3", YoungFunction.power(3.0)),
        ("power_log:2,1", YoungFunction.power_log(2.0, 1.0)),
        ("power_log:1.5,0.5", YoungFunction.power_log(1.5, 0.5)),
        ("table", YoungFunction.from_table([[0, 0], [0.5, 0.2], [1, 1], [2, 3]])),
    ]


def criterion_tiling(quick: bool) -> tuple[bool, str]:
    """Cell alpha-measures sum to the root box measure at depth 10."""
    t0 = time.perf_counter()
    worst = 0.0
    for alpha in (-0.5, 0.0, 1.0, 2.3):
        tess = Tessellation(Interval(0.0, 1.0), 10)
        total = math.fsum(tess.cell_measures(alpha))
        expect = 1.0 / (alpha + 1.0)
        worst = max(worst, abs(total - expect) / expect)
    dt = time.perf_counter() - t0
    ok = worst <= 1e-12 and dt < 1.0
    return ok, f"max rel err {worst:.2e}, within the 1s budget: {dt < 1.0}"


def criterion_lux_vs_paverage(quick: bool) -> tuple[bool, str]:
    """Luxembourg norm equals the p-average for power functions, 1e-8."""
    t0 = time.perf_counter()
    dom = Domain.single((0.0, 1.0), 6)
    unit = GridField.constant(dom, 1.0)
    wpow = GridField.power_y(dom, 0.5)
    q = CarlesonSquare(Interval(0.0, 1.0))
    count = 100
    worst = 0.0
    for i in range(count):
        f = GridField.seeded(dom, DEFAULT_SEED, stream=100 + i)
        w = unit if i % 2 == 0 else wpow
        wm = w.cell_masses(0.0)
        wtot = math.fsum(wm)
        for p in (1.5, 2.0, 3.0):
            phi = YoungFunction.power(p)
            norm = luxembourg_norm(f, q, phi, w, 0.0)
            oracle = (math.fsum(f.values**p * wm) / wtot) ** (1.0 / p)
            worst = max(worst, abs(norm - oracle) / oracle)
    dt = time.perf_counter() - t0
    ok = worst <= 1e-8 and dt < 10.0
    return ok, f"max rel err {worst:.2e} on {count}x3, within the 10s budget: {dt < 10.0}"


def criterion_indicator_norms(quick: bool) -> tuple[bool, str]:
    """The indicator of any dyadic box has Luxembourg norm 1 over that box."""
    dom = Domain.single((0.0, 1.0), 8)
    w = GridField.power_y(dom, 0.3)
    ones = GridField.constant(dom, 1.0)
    _, batch = _family_and_batch(dom, "dyadic")
    worst = 0.0
    for _, phi in _phi_battery():
        norms = batch_luxembourg(batch, ones, phi, w, 0.0)
        worst = max(worst, float(np.max(np.abs(norms - 1.0))))
    # spot-check genuine indicator fields through the single-box path
    rng = np.random.default_rng(DEFAULT_SEED)
    for _ in range(20):
        k = int(rng.integers(0, 9))
        m = int(rng.integers(0, 2**k))
        iv = dom.dyadic_interval(0, k, m)
        f = GridField.indicator(dom, iv)
        phi = _phi_battery()[int(rng.integers(0, 7))][1]
        v = luxembourg_norm(f, CarlesonSquare(iv), phi, w, 0.0)
        worst = max(worst, abs(v - 1.0))
    return worst <= 1e-10, f"max |norm-1| {worst:.2e} over dyadic depth 8"


def criterion_sandwich(quick: bool) -> tuple[bool, str]:
    """t <= inv(phi)(t) inv(psi)(t) <= 2t on a log grid over [1e-6, 1e6]."""
    ts = np.geomspace(1e-6, 1e6, 97 if quick else 241)
    families = [
        YoungFunction.power(1.3),
        YoungFunction.power(2.0),
        YoungFunction.power(3.0),
        YoungFunction.power_log(2.0, 1.0),
        YoungFunction.power_log(1.5, 1.0),
    ]
    worst_lo = worst_hi = 0.0
    for phi in families:
        psi = conjugate(phi)
        prod = youngmod.inverse_grid(phi, ts) * youngmod.inverse_grid(psi, ts)
        worst_lo = max(worst_lo, float(np.max((ts - prod) / ts)))
        worst_hi = max(worst_hi, float(np.max((prod - 2.0 * ts) / ts)))
    ok = worst_lo <= 1e-9 and worst_hi <= 1e-9
    return ok, f"lower slack {worst_lo:.2e}, upper slack {worst_hi:.2e}"


def criterion_power_weight_constants(quick: bool) -> tuple[bool, str]:
    """Measured power-weight class constants match the closed form, 1e-6."""
    worst = 0.0
    for s, p, alpha in ((0.5, 2.0, 0.0), (-0.3, 2.0, 0.5), (0.8, 3.0, 1.0)):
        dom = Domain.single((0.0, 1.0), 6)
        w = power_weight(dom, s, alpha, p)
        measured = bekolle_constant(w, p, alpha).constant
        p_conj = p / (p - 1.0)
        predicted = (alpha + 1.0) ** p / (
            (s + alpha + 1.0) * (s * (1.0 - p_conj) + alpha + 1.0) ** (p - 1.0)
        )
        worst = max(worst, abs(measured - predicted) / predicted)
    return worst <= 1e-6, f"max rel err {worst:.2e} on three (s,p,alpha) triples"


def criterion_covering(quick: bool) -> tuple[bool, str]:
    """10^4 seeded intervals all covered by a shifted-dyadic J, |J| <= 6|I|."""
    t0 = time.perf_counter()
    rng = np.random.default_rng(DEFAULT_SEED)
    n = 10_000
    lengths = np.exp(rng.uniform(math.log(1e-4), math.log(1e2), n))
    starts = rng.uniform(-8.0, 8.0, n)
    failures = 0
    for a, ln in zip(starts, lengths):
        iv = Interval(float(a), float(a + ln))
        try:
            _, j = cover_interval(iv)
        except RuntimeError:
            failures += 1
            continue
        if not (j.a <= iv.a and iv.b <= j.b and j.length <= 6.0 * iv.length * (1 + 1e-12)):
            failures += 1
    dt = time.perf_counter() - t0
    ok = failures == 0 and dt < 1.0
    return ok, f"{n - failures}/{n} covered, within the 1s budget: {dt < 1.0}"


def criterion_stopping_invariants(quick: bool) -> tuple[bool, str]:
    """Stopping families: disjoint, above threshold, maximal, union equals
    the cell-granular superlevel set; 200 seeded cases."""
    cases = 60 if quick else 200
    rng = np.random.default_rng(DEFAULT_SEED + 7)
    phis = [
        YoungFunction.power(1.0),
        YoungFunction.power(1.5),
        YoungFunction.power_log(2.0, 1.0),
    ]
    bad = 0
    for c in range(cases):
        depth = 6 + int(rng.integers(0, 2 if quick else 4))
        dom = Domain.single((0.0, 1.0), depth)
        f = GridField.seeded(dom, DEFAULT_SEED, stream=500 + c)
        wkind = c % 3
        if wkind == 0:
            w = GridField.constant(dom, 1.0)
        elif wkind == 1:
            w = GridField.power_y(dom, 0.5)
        else:
            w = GridField.seeded(dom, DEFAULT_SEED, stream=900 + c, value_range=(0.5, 2.0))
        phi = phis[c % 3]
        _, batch = _family_and_batch(dom, "dyadic")
        norms = batch_luxembourg(batch, f, phi, w, 0.0)
        lam = float(np.quantile(norms, 0.6)) * 1.01
        if lam <= 0:
            continue
        fam = stopping_family(f, phi, w, 0.0, lam, node_norms=norms)
        members = set(fam.members)
        # threshold and maximality against the independently indexed norms
        for (r, k, m), nv in zip(fam.members, fam.norms):
            if not nv > lam:
                bad += 1
            kk, mm = k - 1, m // 2
            while kk >= 0:
                if norms[dom.cell_id(r, kk, mm)] > lam:
                    bad += 1
                    break
                kk, mm = kk - 1, mm // 2
        # disjointness (same-root dyadic members must not nest)
        for r, k, m in fam.members:
            kk, mm = k - 1, m // 2
            while kk >= 0:
                if (r, kk, mm) in members:
                    bad += 1
                    break
                kk, mm = kk - 1, mm // 2
        # union equals the superlevel set of the running-max field
        from .maximal import _sweep_dyadic

        mf = _sweep_dyadic(dom, None, norms)
        covered = np.zeros(dom.n_cells, dtype=bool)
        for r, k, m in fam.members:
            for kk in range(k, depth + 1):
                lo = dom.cell_id(r, kk, m * 2 ** (kk - k))
                covered[lo : lo + 2 ** (kk - k)] = True
        if not np.array_equal(covered, mf > lam):
            bad += 1
    return bad == 0, f"{cases} cases, {bad} invariant violations"


def criterion_strong_type(quick: bool) -> tuple[bool, str]:
    """Dyadic maximal p-norm bound with the layer-cake constant."""
    count = 40 if quick else 100
    dom = Domain.single((0.0, 1.0), 6)
    p = 2.0
    worst = -math.inf
    for i in range(count):
        f = GridField.seeded(dom, DEFAULT_SEED, stream=2000 + i)
        a = 1.2 if i % 2 == 0 else 1.5
        phi = YoungFunction.power(a)
        if i % 3 == 0:
            w = GridField.constant(dom, 1.0)
        elif i % 3 == 1:
            w = GridField.power_y(dom, 0.5)
        else:
            w = GridField.seeded(dom, DEFAULT_SEED, stream=4000 + i, value_range=(0.5, 2.0))
        mf = dyadic_maximal(f, phi, w, 0.0, beta=0)
        ratio = lp_norm(mf.as_field(), w, 0.0, p) / lp_norm(f, w, 0.0, p)
        bound = (p * 2.0 ** (p - a) / (p - a)) ** (1.0 / p)
        worst = max(worst, ratio / bound)
    return worst <= 1.0 + 1e-6, f"max ratio/bound {worst:.4f} on {count} fields"


def criterion_carleson_embedding(quick: bool) -> tuple[bool, str]:
    """Certified box sequences embed against the dyadic maximal p-norm."""
    dom = Domain.single((0.0, 1.0), 6)
    phi = YoungFunction.power(1.5)
    p = 2.0
    weights = [
        GridField.constant(dom, 1.0),
        GridField.power_y(dom, 0.5),
        GridField.power_y(dom, -0.3),
    ]
    violations = 0
    checks = 0
    for w in weights:
        for gamma in (1.0, 1.25):
            box_masses = None
            _, batch = _family_and_batch(dom, "dyadic")
            from .field import batch_box_masses

            box_masses = batch_box_masses(batch, w, 0.0)
            seq = CarlesonSequence.certify(dom, w, 0.0, gamma, box_masses**gamma)
            for stream in (1, 2, 3):
                f = GridField.seeded(dom, DEFAULT_SEED, stream=6000 + stream)
                res = carleson_embedding_check(seq, f, phi, p)
                checks += 1
                if not res.ok:
                    violations += 1
            # single-box sequence
            vals = np.zeros(dom.n_cells)
            vals[dom.cell_id(0, 2, 1)] = box_masses[dom.cell_id(0, 2, 1)] ** gamma
            seq1 = CarlesonSequence.certify(dom, w, 0.0, gamma, vals)
            f = GridField.indicator(dom, dom.dyadic_interval(0, 2, 1))
            res = carleson_embedding_check(seq1, f, phi, p)
            checks += 1
            if not res.ok:
                violations += 1
    return violations == 0, f"{checks} embedding checks, {violations} violations"


def criterion_levelset_inclusion(quick: bool) -> tuple[bool, str]:
    """All-intervals superlevel sets sit inside dyadic ones at lambda / C."""
    depth = 5
    dom = Domain.padded((0.0, 1.0), depth)
    cases = []
    unit = GridField.constant(dom, 1.0)
    wpow = GridField.power_y(dom, 0.5)
    for stream in (1, 2, 3):
        f = GridField.seeded(dom, DEFAULT_SEED, stream=7000 + stream)
        vals = f.values.copy()
        vals[dom.cell_root != 1] = 0.0
        f = GridField(dom, vals)
        cases.append((f, unit, (1.0, 1.0), YoungFunction.power(1.5)))
        cases.append((f, wpow, (2.0, 4.0 / 3.0), YoungFunction.power_log(2.0, 1.0)))
    f_ind = GridField.indicator(dom, Interval(0.25, 0.5))
    cases.append((f_ind, unit, (1.0, 1.0), YoungFunction.power(1.5)))
    total_viol = 0
    for f, w, doubling, phi in cases:
        res = levelset_inclusion_check(f, phi, w, 0.0, doubling, lattice_depth=depth)
        total_viol += res.violations
    return total_viol == 0, f"{len(cases)} cases x 20 thresholds, {total_viol} violations"


def _t1_instance(s: float) -> TheoremInstance:
    return TheoremInstance(
        thm="T1",
        p=2.0,
        q=2.0,
        alpha=0.0,
        phi_spec={"family": "power", "a": 1.5},
        omega_spec={"kind": "power_y", "s": s},
        mu_spec={"kind": "scale_of_weight", "c": 1.0},
        indicator_depth=3,
        seeded_count=8,
        label=f"T1 weight y^{s}",
    )


def criterion_theorem1(quick: bool) -> tuple[bool, str]:
    """Upper-triangle theorem: exact necessity, stable sufficiency, negative
    control fails."""
    depths = [5, 6] if quick else [6, 7, 8, 9]
    details = []
    ok = True
    for s in (0.5, -0.3):
        rep = theorem_report(_t1_instance(s), depths)
        ok = ok and rep.passed
        details.append(f"y^{s}: {'PASS' if rep.passed else 'FAIL'}")
    neg = theorem_report(negative_instance("T1"), depths[:2])
    ok = ok and not neg.passed
    details.append(f"negative control {'FAILED as designed' if not neg.passed else 'PASSED (bad)'}")
    return ok, "; ".join(details)


def criterion_theorems_2_5(quick: bool) -> tuple[bool, str]:
    """Lower-triangle and unweighted-operator harnesses plus negatives."""
    depths = [5, 6] if quick else [6, 7]
    shared = dict(alpha=0.0, indicator_depth=2, seeded_count=6)
    instances = [
        TheoremInstance(
            thm="T2", p=2.0, q=1.5,
            phi_spec={"family": "power", "a": 1.5},
            omega_spec={"kind": "power_y", "s": 0.5},
            mu_spec={"kind": "scale_of_weight", "c": 1.0},
            label="T2 trivial box-ratio", **shared,
        ),
        TheoremInstance(
            thm="T3", p=2.0, q=2.0,
            phi_spec={"family": "power", "a": 1.5},
            omega_spec={"kind": "constant", "value": 1.0},
            mu_spec={"kind": "constant", "value": 1.0},
            label="T3 unweighted", **shared,
        ),
        TheoremInstance(
            thm="T4", p=2.0, q=2.0,
            phi_spec={"family": "power", "a": 1.5},
            omega_spec={"kind": "power_y", "s": 0.5},
            mu_spec={"kind": "scale_of_weight", "c": 1.0},
            label="T4 weighted rhs", **shared,
        ),
        TheoremInstance(
            thm="T5", p=2.0, q=1.5,
            phi_spec={"family": "power", "a": 1.5},
            omega_spec={"kind": "power_y", "s": 0.5},
            mu_spec={"kind": "scale_of_weight", "c": 1.0},
            label="T5 trivial box-ratio", **shared,
        ),
        TheoremInstance(
            thm="C1", p=2.0, q=2.0, r=2.0,
            phi_spec={"family": "power", "a": 4.0 / 3.0},
            omega_spec={"kind": "seeded", "seed": DEFAULT_SEED, "range": [0.5, 2.0]},
            mu_spec={"kind": "constant", "value": 1.0},
            label="C1 conjugate-average condition", **shared,
        ),
    ]
    details = []
    ok = True
    for inst in instances:
        rep = theorem_report(inst, depths)
        ok = ok and rep.passed
        details.append(f"{inst.thm}:{'PASS' if rep.passed else 'FAIL'}")
    for thm in ("T2", "T3", "T4", "T5"):
        neg = theorem_report(negative_instance(thm), depths)
        ok = ok and not neg.passed
        details.append(f"neg-{thm}:{'FAILED as designed' if not neg.passed else 'PASSED (bad)'}")
    return ok, "; ".join(details)


@dataclass
class CriterionResult:
    index: int
    name: str
    passed: bool
    detail: str
    seconds: float


CRITERIA = [
    (1, "tiling identity", criterion_tiling),
    (2, "luxembourg vs p-average", criterion_lux_vs_paverage),
    (3, "indicator norms are 1", criterion_indicator_norms),
    (4, "inverse-product sandwich", criterion_sandwich),
    (5, "power-weight class constants", criterion_power_weight_constants),
    (6, "shifted-dyadic covering", criterion_covering),
    (7, "stopping-family invariants", criterion_stopping_invariants),
    (8, "strong-type constant", criterion_strong_type),
    (9, "carleson embedding", criterion_carleson_embedding),
    (10, "level-set inclusion", criterion_levelset_inclusion),
    (11, "upper-triangle theorem harness", criterion_theorem1),
    (12, "remaining theorem harnesses", criterion_theorems_2_5),
]


def run_criterion(index: int, quick: bool) -> CriterionResult:
    for i, name, fn in CRITERIA:
        if i == index:
            t0 = time.perf_counter()
            ok, detail = fn(quick)
            return CriterionResult(i, name, ok, detail, time.perf_counter() - t0)
    raise KeyError(index)


def run_suite(quick: bool = False, out=print) -> int:
    """Run the full battery; criterion 13 is the quick battery's wall time."""
    t0 = time.perf_counter()
    results = []
    for i, name, fn in CRITERIA:
        t1 = time.perf_counter()
        try:
            ok, detail = fn(quick)
        except Exception as exc:  # a crashed criterion is a failure, not an abort
            ok, detail = False, f"error: {exc}"
        results.append(CriterionResult(i, name, ok, detail, time.perf_counter() - t1))
    total = time.perf_counter() - t0
    budget_ok = total < 120.0 if quick else True
    results.append(
        CriterionResult(
            13,
            "suite wall time",
            budget_ok,
            f"{total:.1f}s ({'quick' if quick else 'full'} battery)",
            total,
        )
    )
    failures = 0
    for r in results:
        status = "PASS" if r.passed else "FAIL"
        out(f"[{status}] criterion {r.index:2d} ({r.name}): {r.detail} [{r.seconds:.1f}s]")
        if not r.passed:
            failures += 1
    out(f"suite: {len(results) - failures}/{len(results)} criteria passed")
    return 0 if failures == 0 else 1
