"""Dyadic and brute-force Orlicz maximal operators, Hardy-Littlewood ratio
sweeps, and the box-ratio function used for lower-triangle embeddings.

Every field is evaluated at cell granularity: a cell's value is the supremum
over family boxes that contain the whole cell region, so each reported value
is a true lower bound of the pointwise supremum everywhere on the cell.

Sweep engines per family:

* dyadic (beta = 0): the box tree is the tessellation's own tree, so one
  top-down running-max pass assigns cell values (cells and tree nodes share
  an index space).
* shifted (beta = 1/3): the shifted grid is also nested; a running-max pass
  over the shifted forest plus a precomputed smallest-containing-member map
  per cell does the assignment. Cells with no admissible shifted member
  (domain fringe) get 0 and are counted.
* lattice: a prefix/suffix max over the endpoint-pair matrix gives, per cell,
  the max over all lattice boxes containing it.

Box-norm evaluations are pure and independent; the running-max passes are
cheap sequential sweeps per field.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import field as fieldmod
from .field import BoxBatch, GridField, batch_box_masses, batch_luxembourg, gather_family
from .grid import (
    ONE_THIRD,
    BoxFamily,
    Domain,
    dyadic_family,
    lattice_family,
    shifted_family,
)
from .young import YoungFunction


@dataclass
class MaximalField:
    """Per-cell values of a maximal function at cell granularity."""

    domain: Domain
    values: np.ndarray
    provenance: str  # "dyadic-0" | "dyadic-1/3" | "brute-force" | "two-grid-combined" | "ratio-..."
    family: str
    excluded: int = 0
    uncovered_cells: int = 0

    def as_field(self) -> GridField:
        return GridField(self.domain, np.maximum(self.values, 0.0))


# ---------------------------------------------------------------------------
# sweep engines
# ---------------------------------------------------------------------------


def _sweep_dyadic(domain: Domain, family: BoxFamily, box_values: np.ndarray) -> np.ndarray:
    """Running max down each root tree; node index == cell index."""
    out = box_values.copy()
    for r in range(len(domain.roots)):
        for k in range(1, domain.depth + 1):
            start, stop = domain.block(r, k)
            p_start, _ = domain.block(r, k - 1)
            parents = np.repeat(out[p_start : p_start + 2 ** (k - 1)], 2)
            np.maximum(out[start:stop], parents, out=out[start:stop])
    return out


def _shifted_parent(j: int, m: int) -> tuple[int, int]:
    """Parent member (one level up) of shifted member (j, m)."""
    sign = 1 if (j + 1) % 2 == 0 else -1
    return j + 1, (m - sign) // 2


def _shifted_cover_map(domain: Domain, family: BoxFamily) -> tuple[np.ndarray, int]:
    """Per cell: the index in ``family`` of the smallest shifted member
    containing the cell's x-interval (-1 when none exists). Exact rational
    arithmetic; cached on the domain."""
    cached = getattr(domain, "_shifted_cover_cache", None)
    if cached is not None:
        return cached
    member = {mid: i for i, mid in enumerate(family.ids)}
    g = round(math.log2(domain.root_width()))
    cover = np.full(domain.n_cells, -1, dtype=np.int64)
    uncovered = 0
    for c in range(domain.n_cells):
        k = int(domain.cell_level[c])
        r = int(domain.cell_root[c])
        root = domain.roots[r]
        x0 = Fraction(root.a).limit_denominator(2**40) + Fraction(
            int(domain.cell_index[c]), 2**k
        ) * Fraction(2) ** g
        width = Fraction(2) ** (g - k)
        x1 = x0 + width
        found = -1
        for j in range(g - k, g + 1):
            scale = Fraction(2) ** j
            shift = ONE_THIRD if j % 2 == 0 else -ONE_THIRD
            m = math.floor(x0 / scale - shift)
            lo = scale * (m + shift)
            if lo <= x0 and x1 <= lo + scale and (j, m) in member:
                found = member[(j, m)]
                break
        cover[c] = found
        if found < 0:
            uncovered += 1
    domain._shifted_cover_cache = (cover, uncovered)
    return cover, uncovered


def _sweep_shifted(
    domain: Domain, family: BoxFamily, box_values: np.ndarray
) -> tuple[np.ndarray, int]:
    """Running max down the shifted forest, then per-cell lookup."""
    index = {mid: i for i, mid in enumerate(family.ids)}
    run = box_values.copy()
    order = sorted(range(len(family.ids)), key=lambda i: -family.ids[i][0])
    for i in order:
        j, m = family.ids[i]
        pj, pm = _shifted_parent(j, m)
        pi = index.get((pj, pm))
        if pi is not None:
            run[i] = max(run[i], run[pi])
    cover, uncovered = _shifted_cover_map(domain, family)
    vals = np.where(cover >= 0, run[np.maximum(cover, 0)], 0.0)
    return vals, uncovered


def _sweep_lattice(
    domain: Domain,
    family: BoxFamily,
    box_values: np.ndarray,
    lattice_depth: int,
    allow_uncovered: bool = False,
) -> tuple[np.ndarray, int]:
    """max over boxes (ia <= A, ib >= B) via a prefix/suffix max table.

    Cells with no containing family box get 0 when allow_uncovered is set
    (restricted families on padded domains), otherwise they raise.
    """
    step = domain.root_width() / 2**lattice_depth
    n_pts = round((domain.x_max - domain.x_min) / step)
    table = np.full((n_pts + 1, n_pts + 1), -np.inf)
    ia = np.asarray([i for i, _ in family.ids], dtype=np.int64)
    ib = np.asarray([j for _, j in family.ids], dtype=np.int64)
    table[ia, ib] = box_values
    best = np.full(n_pts + 1, -np.inf)
    rows = np.empty_like(table)
    for A in range(n_pts + 1):
        np.maximum(best, table[A], out=best)
        rows[A] = np.maximum.accumulate(best[::-1])[::-1]
    a_idx = np.floor((domain.cell_x0 - domain.x_min) / step + 1e-9).astype(np.int64)
    b_idx = np.ceil((domain.cell_x1 - domain.x_min) / step - 1e-9).astype(np.int64)
    vals = rows[a_idx, b_idx]
    bad = ~np.isfinite(vals)
    if np.any(bad):
        if not allow_uncovered:
            raise RuntimeError("lattice family leaves a cell uncovered")
        vals = np.where(bad, 0.0, vals)
        return vals, int(bad.sum())
    return vals, 0


# ---------------------------------------------------------------------------
# Orlicz maximal operators
# ---------------------------------------------------------------------------


def dyadic_maximal(
    f: GridField,
    phi: YoungFunction,
    weight: GridField,
    alpha: float,
    beta=0,
    batch: BoxBatch | None = None,
) -> MaximalField:
    """Dyadic Orlicz maximal field over one shifted grid system."""
    domain = f.domain
    if beta == 0:
        family, fam_batch = _family_and_batch(domain, "dyadic")
        batch = batch if batch is not None else fam_batch
        norms = batch_luxembourg(batch, f, phi, weight, alpha)
        vals = _sweep_dyadic(domain, family, norms)
        return MaximalField(domain, vals, "dyadic-0", "dyadic", family.excluded)
    if beta in (ONE_THIRD, float(ONE_THIRD), 1.0 / 3.0):
        family, fam_batch = _family_and_batch(domain, "shifted")
        batch = batch if batch is not None else fam_batch
        norms = batch_luxembourg(batch, f, phi, weight, alpha)
        vals, uncovered = _sweep_shifted(domain, family, norms)
        return MaximalField(
            domain, vals, "dyadic-1/3", "shifted", family.excluded, uncovered
        )
    raise ValueError("beta must be 0 or 1/3")


def brute_force_maximal(
    f: GridField,
    phi: YoungFunction,
    weight: GridField,
    alpha: float,
    lattice_depth: int,
    central_only: bool = False,
) -> MaximalField:
    """Oracle approximation of the all-intervals maximal function: supremum
    over every box with endpoints on the depth-L lattice of the domain.

    central_only restricts to boxes inside the central root, the setting in
    which every box keeps a shifted-dyadic cover inside the domain (used by
    the domination and level-set inclusion checks on padded domains).
    """
    domain = f.domain
    kind = "lattice_central" if central_only else "lattice"
    family, batch = _family_and_batch(domain, kind, lattice_depth)
    norms = batch_luxembourg(batch, f, phi, weight, alpha)
    vals, uncovered = _sweep_lattice(
        domain, family, norms, lattice_depth, allow_uncovered=central_only
    )
    return MaximalField(
        domain,
        vals,
        "brute-force",
        f"{family.kind}:{lattice_depth}",
        family.excluded,
        uncovered,
    )


def two_grid_combined(
    f: GridField,
    phi: YoungFunction,
    weight: GridField,
    alpha: float,
) -> MaximalField:
    """Cellwise max of the two dyadic fields: the two-grid lower envelope of
    the all-intervals operator."""
    m0 = dyadic_maximal(f, phi, weight, alpha, beta=0)
    m1 = dyadic_maximal(f, phi, weight, alpha, beta=ONE_THIRD)
    return MaximalField(
        f.domain,
        np.maximum(m0.values, m1.values),
        "two-grid-combined",
        "dyadic+shifted",
        m0.excluded + m1.excluded,
        m1.uncovered_cells,
    )


# ---------------------------------------------------------------------------
# ratio sweeps (Hardy-Littlewood specialization and K_mu)
# ---------------------------------------------------------------------------


def _family_and_batch(domain: Domain, family_kind: str, lattice_depth: int | None = None):
    """Family plus its gathered batch, cached on the domain (geometry only)."""
    key = (family_kind, lattice_depth if family_kind.startswith("lattice") else None)
    cache = getattr(domain, "_family_batch_cache", None)
    if cache is None:
        cache = {}
        domain._family_batch_cache = cache
    got = cache.get(key)
    if got is not None:
        return got
    if family_kind == "dyadic":
        fam = dyadic_family(domain)
    elif family_kind == "shifted":
        fam = shifted_family(domain)
    elif family_kind == "lattice":
        depth = domain.depth if lattice_depth is None else lattice_depth
        fam = lattice_family(domain, depth)
    elif family_kind == "lattice_central":
        depth = domain.depth if lattice_depth is None else lattice_depth
        fam = lattice_family(domain, depth, within=domain.central_root)
    else:
        raise ValueError(f"unknown family kind {family_kind!r}")
    got = (fam, gather_family(domain, fam))
    cache[key] = got
    return got


def ratio_maximal(
    numer: GridField | tuple,
    denom: GridField | None,
    alpha: float,
    family_kind: str = "lattice",
    lattice_depth: int | None = None,
    provenance: str = "ratio",
) -> MaximalField:
    """Per-cell sup over family boxes of numerator mass / denominator mass.

    numer may be a field or an (f, weight) pair integrated as a product;
    denom None means the plain alpha-measure. Boxes with zero denominator
    mass are skipped (they never raise the sup).
    """
    if isinstance(numer, tuple):
        f, w = numer
        domain = f.domain
        dens, sigma, coef = fieldmod._product_descriptor(f, w)
    else:
        domain = numer.domain
        dens, sigma, coef = fieldmod._product_descriptor(numer, None)
    fam, batch = _family_and_batch(domain, family_kind, lattice_depth)
    num = batch.box_sums(batch.masses(alpha, dens, sigma, coef))
    den = batch_box_masses(batch, denom, alpha)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(den > 0.0, num / den, 0.0)
    uncovered = 0
    if family_kind == "dyadic":
        vals = _sweep_dyadic(domain, fam, ratios)
    elif family_kind == "shifted":
        vals, uncovered = _sweep_shifted(domain, fam, ratios)
    else:
        depth = domain.depth if lattice_depth is None else lattice_depth
        vals, uncovered = _sweep_lattice(
            domain, fam, ratios, depth, allow_uncovered=family_kind == "lattice_central"
        )
    return MaximalField(
        domain, vals, provenance, fam.kind, fam.excluded, uncovered
    )


def hardy_littlewood(
    f: GridField,
    weight: GridField | None,
    alpha: float,
    family_kind: str = "lattice",
    lattice_depth: int | None = None,
) -> MaximalField:
    """Weighted Hardy-Littlewood maximal function (weight None = unweighted):
    sup over boxes of the weighted f-average, computed as exact mass ratios."""
    domain = f.domain
    if weight is None:
        weight = GridField.constant(domain, 1.0)
    return ratio_maximal(
        (f, weight), weight, alpha, family_kind, lattice_depth, "hardy-littlewood"
    )


def kmu_field(
    mu: GridField,
    weight: GridField,
    alpha: float,
    family_kind: str = "lattice",
    lattice_depth: int | None = None,
) -> MaximalField:
    """Box-ratio function: per-cell sup of mu(Q_I) / |Q_I|_{w,alpha} over
    admissible boxes containing the cell."""
    fieldmod._require_shared_domain(mu, weight)
    return ratio_maximal(mu, weight, alpha, family_kind, lattice_depth, "kmu")
