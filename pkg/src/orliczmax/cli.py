"""Command-line front end.

Subcommands: young, grid, weights, maximal, stopping, verify, suite.
Reports are JSON (sorted keys; runtime fields excluded from determinism
claims); per-cell fields and threshold ladders go to CSV. Exit codes:
0 pass, 1 assertion failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from fractions import Fraction

import numpy as np

from . import acceptance
from . import young as youngmod
from ._kernels import backend_name
from .config import (
    DEFAULT_SEED,
    ConfigError,
    build_domain,
    build_field,
    load_config,
    parse_grid,
    parse_phi,
)
from .grid import Interval, Tessellation, beta_label, cover_interval
from .maximal import brute_force_maximal, dyadic_maximal, kmu_field
from .stopping import levelset_mass_bound, stopping_family
from .verify import TheoremInstance, theorem_report
from .weights import (
    WeightDescriptor,
    bekolle_constant,
    binfty_constant,
    power_weight,
    unit_weight,
)
from .young import YoungFunction


def _emit_json(report: dict, out_path: str | None) -> None:
    text = json.dumps(report, sort_keys=True, indent=2, allow_nan=True)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _emit_field_csv(path: str, domain, values) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["level", "index", "value"])
        glob_index = domain.cell_root * (2**domain.cell_level) + domain.cell_index
        for lv, gi, v in zip(domain.cell_level, glob_index, values):
            writer.writerow([int(lv), int(gi), repr(float(v))])


def _config_or_default(args) -> dict:
    if getattr(args, "config", None):
        return load_config(args.config)
    return {}


def _phi_from(cfg: dict, args) -> YoungFunction:
    if getattr(args, "family", None):
        spec = {"family": args.family}
        if args.family in ("power", "power_log"):
            spec["a"] = args.a
            if args.family == "power_log":
                spec["b"] = args.b
        return parse_phi(spec)
    return parse_phi(cfg.get("phi", {"family": "power", "a": 2.0}))


def _seed_from(cfg: dict, args) -> int:
    seed = getattr(args, "seed", None)
    if seed is not None:
        return int(seed, 0) if isinstance(seed, str) else int(seed)
    s = cfg.get("seed", DEFAULT_SEED)
    return int(s, 0) if isinstance(s, str) else int(s)


def cmd_young(args) -> int:
    cfg = _config_or_default(args)
    phi = _phi_from(cfg, args)
    report = {
        "backend": backend_name(),
        "phi": phi.spec(),
        "phi_at_1": float(phi.eval(1.0)),
        "delta2_constant": youngmod.delta2_constant(phi),
    }
    if args.bp_check:
        res = youngmod.bp_check(phi, args.p)
        report["bp"] = {
            "p": args.p,
            "integral": res.integral if math.isfinite(res.integral) else "inf",
            "member": res.member,
            "note": res.note,
        }
    if args.sandwich:
        ts = np.geomspace(1e-6, 1e6, 61)
        psi = youngmod.conjugate(phi)
        prod = youngmod.inverse_grid(phi, ts) * youngmod.inverse_grid(psi, ts)
        report["sandwich"] = {
            "min_ratio": float(np.min(prod / ts)),
            "max_ratio": float(np.max(prod / ts)),
            "ok": bool(np.all(prod >= ts * (1 - 1e-9)) and np.all(prod <= 2 * ts * (1 + 1e-9))),
        }
    _emit_json(report, args.out)
    if args.bp_check and not report["bp"]["member"]:
        return 0  # informational: non-membership is a result, not a failure
    return 0


def cmd_grid(args) -> int:
    cfg = _config_or_default(args)
    spec = parse_grid(cfg.get("grid"))
    if args.depth is not None:
        spec["depth"] = args.depth
    tess = Tessellation(Interval(*spec["root"]), spec["depth"])
    alpha = args.alpha
    total = math.fsum(tess.cell_measures(alpha))
    expect = tess.root.length ** (alpha + 2.0) / (alpha + 1.0)
    rel = abs(total - expect) / expect
    rng = np.random.default_rng(_seed_from(cfg, args))
    worst = 0.0
    covered = 0
    n_cover = 1000
    for _ in range(n_cover):
        ln = math.exp(rng.uniform(math.log(1e-4), math.log(1e2)))
        a = rng.uniform(-8.0, 8.0)
        beta, j = cover_interval(Interval(a, a + ln))
        if j.a <= a and a + ln <= j.b:
            covered += 1
            worst = max(worst, j.length / ln)
    report = {
        "grid": {**spec, "shifts": ["0", "1/3"]},
        "alpha": alpha,
        "tiling": {"total": total, "expected": expect, "rel_err": rel},
        "covering": {"checked": n_cover, "covered": covered, "worst_ratio": worst},
        "pass": rel <= 1e-12 and covered == n_cover and worst <= 6.0 + 1e-9,
    }
    _emit_json(report, args.out)
    return 0 if report["pass"] else 1


def _weight_from(cfg: dict, domain, args) -> WeightDescriptor:
    spec = cfg.get("omega", {"kind": "constant", "value": 1.0})
    if spec.get("kind") == "power_y":
        p_meta = args.p if args.p > 1.0 else 2.0  # prediction metadata needs p > 1
        return power_weight(domain, float(spec["s"]), args.alpha, p_meta)
    if spec.get("kind") == "constant" and float(spec.get("value", 1.0)) == 1.0:
        return unit_weight(domain)
    return WeightDescriptor(build_field(spec, domain), name=str(spec))


def cmd_weights(args) -> int:
    cfg = _config_or_default(args)
    domain = build_domain(cfg.get("grid"), args.depth)
    w = _weight_from(cfg, domain, args)
    classes = [c.strip() for c in args.classes.split(",") if c.strip()]
    report = {
        "backend": backend_name(),
        "alpha": args.alpha,
        "weight": w.name,
        "predicted_constant": w.predicted_constant,
        "in_class": w.in_class,
    }
    for cls in classes:
        if cls == "b1":
            res = bekolle_constant(w, 1.0, args.alpha)
        elif cls == "bp":
            res = bekolle_constant(w, args.p, args.alpha)
        elif cls == "binf":
            res = binfty_constant(w, args.alpha)
        else:
            raise ConfigError("classes", f"unknown class {cls!r}")
        report[cls] = {
            "constant": res.constant,
            "witness_interval": [res.witness.a, res.witness.b],
            "family_size": res.family_size,
            "family": res.family_kind,
        }
    _emit_json(report, args.out)
    return 0


def cmd_maximal(args) -> int:
    cfg = _config_or_default(args)
    domain = build_domain(cfg.get("grid"), args.depth)
    seed = _seed_from(cfg, args)
    phi = _phi_from(cfg, args)
    omega = build_field(cfg.get("omega", {"kind": "constant", "value": 1.0}), domain, seed)
    f = build_field(
        cfg.get("f", {"kind": "seeded", "stream": 1}), domain, seed, weight=omega
    )
    beta = Fraction(1, 3) if args.beta == "1/3" else 0
    if args.op == "dyadic":
        mf = dyadic_maximal(f, phi, omega, args.alpha, beta=beta)
    elif args.op == "brute":
        mf = brute_force_maximal(
            f, phi, omega, args.alpha, args.lattice_depth or min(domain.depth, 5)
        )
    elif args.op == "kmu":
        mu = build_field(
            cfg.get("mu", {"kind": "scale_of_weight", "c": 1.0}), domain, seed, weight=omega
        )
        mf = kmu_field(
            mu, omega, args.alpha, "lattice", args.lattice_depth or min(domain.depth, 5)
        )
    else:
        raise ConfigError("op", f"unknown op {args.op!r}")
    if args.out:
        _emit_field_csv(args.out, domain, mf.values)
    report = {
        "backend": backend_name(),
        "op": args.op,
        "beta": beta_label(beta),
        "provenance": mf.provenance,
        "family": mf.family,
        "max_value": float(np.max(mf.values)),
        "excluded_boxes": mf.excluded,
        "uncovered_cells": mf.uncovered_cells,
        "csv": args.out,
    }
    _emit_json(report, None)
    return 0


def cmd_stopping(args) -> int:
    cfg = _config_or_default(args)
    domain = build_domain(cfg.get("grid"), args.depth)
    seed = _seed_from(cfg, args)
    phi = _phi_from(cfg, args)
    omega = build_field(cfg.get("omega", {"kind": "constant", "value": 1.0}), domain, seed)
    f = build_field(cfg.get("f", {"kind": "seeded", "stream": 1}), domain, seed, weight=omega)
    fam = stopping_family(f, phi, omega, args.alpha, args.threshold)
    mb = levelset_mass_bound(f, phi, omega, args.alpha, args.threshold)
    if args.ladder_out:
        # threshold-ladder curve (plot data): superlevel mass vs its bound
        top = max(float(np.max(f.cell_densities(args.alpha))), args.threshold)
        ladder = np.geomspace(top * 1e-3, top * 1.2, 20)
        with open(args.ladder_out, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["lambda", "superlevel_mass", "bound", "ratio"])
            for lam in ladder:
                row = levelset_mass_bound(f, phi, omega, args.alpha, float(lam))
                writer.writerow([repr(float(lam)), repr(row.lhs), repr(row.rhs), repr(row.ratio)])
    members = set(fam.members)
    disjoint = True
    maximal = True
    from .maximal import _family_and_batch, _sweep_dyadic
    from .field import batch_luxembourg

    _, batch = _family_and_batch(domain, "dyadic")
    norms = batch_luxembourg(batch, f, phi, omega, args.alpha)
    for r, k, m in fam.members:
        kk, mm = k - 1, m // 2
        while kk >= 0:
            if (r, kk, mm) in members:
                disjoint = False
            if norms[domain.cell_id(r, kk, mm)] > args.threshold:
                maximal = False
            kk, mm = kk - 1, mm // 2
    mf = _sweep_dyadic(domain, None, norms)
    covered = np.zeros(domain.n_cells, dtype=bool)
    for r, k, m in fam.members:
        for kk in range(k, domain.depth + 1):
            lo = domain.cell_id(r, kk, m * 2 ** (kk - k))
            covered[lo : lo + 2 ** (kk - k)] = True
    union_ok = bool(np.array_equal(covered, mf > args.threshold))
    report = {
        "lambda": args.threshold,
        "intervals": [
            {
                "level": k,
                "index": r * 2**k + m,
                "norm": float(nv),
            }
            for (r, k, m), nv in zip(fam.members, fam.norms)
        ],
        "checks": {"disjoint": disjoint, "maximal": maximal, "union": union_ok},
        "mass_bound": {"lhs": mb.lhs, "rhs": mb.rhs, "ratio": mb.ratio},
    }
    _emit_json(report, args.out)
    return 0 if (disjoint and maximal and union_ok) else 1


def cmd_verify(args) -> int:
    cfg = _config_or_default(args)
    depths = [int(d) for d in args.depths.split(",")] if args.depths else [5, 6]
    seed = _seed_from(cfg, args)
    inst = TheoremInstance(
        thm=args.thm,
        p=float(cfg.get("p", 2.0)),
        q=float(cfg.get("q", 2.0 if args.thm in ("T1", "T3", "T4", "C1") else 1.5)),
        alpha=float(cfg.get("alpha", 0.0)),
        phi_spec=cfg.get("phi", {"family": "power", "a": 1.5}),
        omega_spec=cfg.get("omega", {"kind": "constant", "value": 1.0}),
        mu_spec=cfg.get("mu", {"kind": "scale_of_weight", "c": 1.0}),
        grid_spec=cfg.get("grid"),
        indicator_depth=int(cfg.get("indicator_depth", 3)),
        seeded_count=int(cfg.get("seeded_count", 8)),
        seed=seed,
        r=float(cfg.get("r", 2.0)),
        condition_family=cfg.get("condition_family", "indicators"),
        label=cfg.get("label", ""),
    )
    report = theorem_report(inst, depths)
    _emit_json(report.to_json(), args.out)
    return 0 if report.passed else 1


def cmd_suite(args) -> int:
    return acceptance.run_suite(quick=args.quick)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="orliczmax",
        description=__doc__,
    )
    parser.add_argument("--threads", type=int, default=1,
                        help="accepted for report metadata; execution is sequential")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="JSON config path")
        p.add_argument("--out", help="output path (JSON report or CSV field)")
        p.add_argument("--alpha", type=float, default=0.0)
        p.add_argument("--depth", type=int, default=None)
        p.add_argument("--seed", default=None, help="hex or decimal seed")

    p_young = sub.add_parser("young", help="Young function diagnostics")
    common(p_young)
    p_young.add_argument("--family", choices=["power", "power_log"])
    p_young.add_argument("--a", type=float, default=2.0)
    p_young.add_argument("--b", type=float, default=1.0)
    p_young.add_argument("--p", type=float, default=2.0)
    p_young.add_argument("--bp-check", action="store_true", dest="bp_check")
    p_young.add_argument("--sandwich", action="store_true")
    p_young.set_defaults(fn=cmd_young)

    p_grid = sub.add_parser("grid", help="tessellation and covering diagnostics")
    common(p_grid)
    p_grid.set_defaults(fn=cmd_grid)

    p_w = sub.add_parser("weights", help="weight class constants")
    common(p_w)
    p_w.add_argument("--p", type=float, default=2.0)
    p_w.add_argument("--classes", default="bp", help="comma list from b1,bp,binf")
    p_w.set_defaults(fn=cmd_weights)

    p_m = sub.add_parser("maximal", help="maximal fields to CSV")
    common(p_m)
    p_m.add_argument("--op", choices=["dyadic", "brute", "kmu"], default="dyadic")
    p_m.add_argument("--beta", choices=["0", "1/3"], default="0")
    p_m.add_argument("--family", choices=["power", "power_log"])
    p_m.add_argument("--a", type=float, default=1.5)
    p_m.add_argument("--b", type=float, default=1.0)
    p_m.add_argument("--lattice-depth", type=int, default=None, dest="lattice_depth")
    p_m.set_defaults(fn=cmd_maximal)

    p_s = sub.add_parser("stopping", help="stopping family at a threshold")
    common(p_s)
    p_s.add_argument("--lambda", type=float, default=0.2, dest="threshold")
    p_s.add_argument("--family", choices=["power", "power_log"])
    p_s.add_argument("--a", type=float, default=1.0)
    p_s.add_argument("--b", type=float, default=1.0)
    p_s.add_argument("--ladder-out", default=None, dest="ladder_out",
                     help="CSV of the threshold-ladder mass-bound curve")
    p_s.set_defaults(fn=cmd_stopping)

    p_v = sub.add_parser("verify", help="theorem experiment report")
    common(p_v)
    p_v.add_argument("--thm", required=True, choices=["T1", "T2", "T3", "T4", "T5", "C1"])
    p_v.add_argument("--depths", default=None, help="comma list, e.g. 6,7,8")
    p_v.set_defaults(fn=cmd_verify)

    p_suite = sub.add_parser("suite", help="acceptance battery")
    p_suite.add_argument("--quick", action="store_true")
    p_suite.set_defaults(fn=cmd_suite)
    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
