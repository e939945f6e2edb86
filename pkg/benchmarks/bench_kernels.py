#!/usr/bin/env python3
"""Benchmark the box-norm kernel backends (numpy vs compiled).

Builds representative workloads (dyadic trees, shifted grids, endpoint
lattices; pure-power and log-augmented Young functions), times both backends
on identical CSR batches, and checks that their results agree.

Run after building the extension in place:

    python setup.py build_ext --inplace
    python benchmarks/bench_kernels.py [--repeat 5]
"""

import argparse
import time

import numpy as np

from orliczmax._kernels import backends
from orliczmax.field import GridField, gather_family
from orliczmax.grid import Domain, dyadic_family, lattice_family, shifted_family
from orliczmax.young import YoungFunction

SEED = 0xB5EBA


def workloads():
    out = []
    for depth, fam_name, builder in [
        (7, "dyadic tree", dyadic_family),
        (7, "shifted grid", shifted_family),
        (7, "lattice d5", lambda d: lattice_family(d, 5)),
        (9, "dyadic tree", dyadic_family),
    ]:
        dom = Domain.padded((0.0, 1.0), depth)
        fam = builder(dom)
        batch = gather_family(dom, fam)
        f = GridField.seeded(dom, SEED, stream=1)
        w = GridField.power_y(dom, 0.5)
        wm = batch.field_masses(w, 0.0)
        wtot = batch.box_sums(wm)
        fv = batch.gather_values(f.values)
        for phi_name, phi in [
            ("power a=1.5", YoungFunction.power(1.5)),
            ("power_log a=2 b=1", YoungFunction.power_log(2.0, 1.0)),
        ]:
            coef, a, b, kappa = phi.closed_params()
            out.append(
                {
                    "label": f"depth {depth} {fam_name} ({len(fam)} boxes, "
                    f"{len(batch.cell)} entries), {phi_name}",
                    "args": (fv, wm, batch.indptr, wtot, coef, a, b, kappa),
                }
            )
    return out


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    bk = backends()
    if "compiled" not in bk:
        print("note: compiled extension not built; timing the pure backend only")
    header = f"{'workload':68s} " + " ".join(f"{n:>10s}" for n in bk)
    print(header)
    print("-" * len(header))
    worst_diff = 0.0
    for wl in workloads():
        times = {}
        results = {}
        for name, mod in bk.items():
            best = float("inf")
            for _ in range(args.repeat):
                t0 = time.perf_counter()
                res = mod.box_norms(*wl["args"], 1e-10, 200, True)
                best = min(best, time.perf_counter() - t0)
            times[name] = best
            results[name] = res
        row = f"{wl['label']:68s} " + " ".join(
            f"{times[n] * 1e3:8.1f}ms" for n in bk
        )
        if len(results) == 2:
            diff = float(
                np.max(
                    np.abs(results["pure"] - results["compiled"])
                    / np.maximum(results["pure"], 1e-300)
                )
            )
            worst_diff = max(worst_diff, diff)
            row += f"  (rel diff {diff:.1e})"
        print(row)
    if len(bk) == 2:
        print(f"\nmax relative backend difference: {worst_diff:.2e}")
        if worst_diff > 1e-9:
            print("ERROR: backends disagree beyond the bisection tolerance")
            return 1
        print("backends agree within the bisection tolerance")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
