"""Bekolle-Bonami class constants (B_1, B_p, B_infty), alpha-doubling
diagnostics, and the closed-form power weight family.

Suprema over "all intervals" are approximated over finite families (dyadic by
default, optionally plus the endpoint lattice); the witness box is always
reported. Power weights y^s are scale-free, so the dyadic family already
attains their true constant, which the closed form predicts exactly.
All computations are pure over immutable fields with deterministic
reductions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from .field import GridField, batch_box_masses, gather_boxes, gather_family, integrate
from .grid import BoxFamily, CarlesonSquare, Domain, Interval, family_for
from .maximal import _family_and_batch, _sweep_lattice


class NondegenerateWeightError(ValueError):
    """Raised when a weight has a zero-density cell."""


@dataclass
class WeightDescriptor:
    """A weight (positive GridField) plus its class-constant cache."""

    field: GridField
    name: str = "weight"
    power_s: float | None = None
    predicted_constant: float | None = None  # [w]_{B_{p,alpha}} for power weights
    in_class: bool | None = None
    doubling: tuple[float, float] | None = None  # (exponent p, constant K)
    _constants: dict = dc_field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        if not self.field.positive_everywhere():
            raise NondegenerateWeightError("weight density must be positive on every cell")
        if self.power_s is None and self.field.is_analytic:
            self.power_s = self.field.power_y

    @property
    def domain(self) -> Domain:
        return self.field.domain


def power_weight(domain: Domain, s: float, alpha: float, p: float) -> WeightDescriptor:
    """Weight y^s with exact cell masses and its predicted B_{p,alpha} data.

    The predicted constant (alpha+1)^p / ((s+alpha+1) (s(1-p')+alpha+1)^(p-1))
    is scale-invariant across boxes; membership needs
    -(alpha+1) < s < (alpha+1)(p-1), otherwise the weight is built but marked
    out of class.
    """
    if p <= 1.0:
        raise ValueError("p must exceed 1")
    if s <= -(alpha + 1.0):
        raise ValueError("y^s is not locally integrable against dV_alpha")
    p_conj = p / (p - 1.0)
    in_class = -(alpha + 1.0) < s < (alpha + 1.0) * (p - 1.0)
    predicted = None
    if in_class:
        predicted = (alpha + 1.0) ** p / (
            (s + alpha + 1.0) * (s * (1.0 - p_conj) + alpha + 1.0) ** (p - 1.0)
        )
    return WeightDescriptor(
        GridField.power_y(domain, s),
        name=f"y^{s}",
        power_s=s,
        predicted_constant=predicted,
        in_class=in_class,
        doubling=(p, predicted) if in_class else None,
    )


def unit_weight(domain: Domain) -> WeightDescriptor:
    return WeightDescriptor(
        GridField.constant(domain, 1.0),
        name="1",
        predicted_constant=1.0,
        in_class=True,
        doubling=(1.0, 1.0),
    )


@dataclass
class ClassConstant:
    constant: float
    witness: Interval
    witness_id: tuple
    family_size: int
    family_kind: str


def bekolle_constant(
    w: WeightDescriptor,
    p: float,
    alpha: float,
    family: BoxFamily | None = None,
) -> ClassConstant:
    """[w]_{B_{p,alpha}} over a finite box family (default: all dyadic boxes).

    For p > 1: sup of (average of w) * (average of w^{1-p'})^(p-1), averages
    against dV_alpha over the box. For p = 1: sup over boxes and cells of
    (average of w) / (min cell density on the box).
    """
    if p < 1.0:
        raise ValueError("p must be >= 1")
    domain = w.domain
    if family is None:
        family = family_for(domain, "dyadic")
    key = (p, alpha, family.kind, len(family))
    got = w._constants.get(key)
    if got is not None:
        return got
    batch = gather_family(domain, family)
    meas = batch_box_masses(batch, None, alpha)
    w_mass = batch_box_masses(batch, w.field, alpha)
    avg_w = w_mass / meas
    if p > 1.0:
        p_conj = p / (p - 1.0)
        dual = w.field.powered(1.0 - p_conj)
        avg_dual = batch_box_masses(batch, dual, alpha) / meas
        consts = avg_w * avg_dual ** (p - 1.0)
    else:
        dens = w.field.cell_densities(alpha)
        min_dens = np.minimum.reduceat(dens[batch.cell], batch.indptr[:-1])
        consts = avg_w / min_dens
    i = int(np.argmax(consts))
    res = ClassConstant(
        float(consts[i]), family.interval(i), family.ids[i], len(family), family.kind
    )
    w._constants[key] = res
    return res


def binfty_constant(
    w: WeightDescriptor,
    alpha: float,
    family: BoxFamily | None = None,
    lattice_depth: int | None = None,
) -> ClassConstant:
    """[w]_{B_{infty,alpha}}: sup over boxes I of the average over Q_I of the
    unweighted Hardy-Littlewood maximal function of w restricted to Q_I,
    against the w-mass of Q_I.

    The inner maximal function runs over the lattice family at cell
    granularity; the outer family is dyadic with levels at most the lattice
    depth (deeper boxes would see no admissible inner box of ratio one).
    """
    domain = w.domain
    depth = min(domain.depth, 4) if lattice_depth is None else lattice_depth
    if family is None:
        family = family_for(domain, "dyadic")
    lat_fam, lat_batch = _family_and_batch(domain, "lattice", depth)
    den = batch_box_masses(lat_batch, None, alpha)  # |Q_J|_alpha
    best = -np.inf
    witness = 0
    step = domain.root_width() / 2**depth
    for i in range(len(family)):
        iv = family.interval(i)
        if isinstance(family.ids[i], tuple) and len(family.ids[i]) == 3:
            if family.ids[i][1] > depth:  # dyadic level deeper than lattice
                continue
        qa = np.maximum(lat_fam.qa, iv.a)
        qb = np.minimum(lat_fam.qb, iv.b)
        h = np.minimum(lat_fam.heights, iv.length)
        live = qb > qa
        num = np.zeros(len(lat_fam))
        clipped = gather_boxes_clipped(domain, qa, qb, h, live)
        num[live] = batch_box_masses(clipped, w.field, alpha)
        with np.errstate(invalid="ignore"):
            ratios = np.where(den > 0.0, num / den, 0.0)
        m_vals, _ = _sweep_lattice(domain, lat_fam, ratios, depth)
        m_field = GridField(domain, np.maximum(m_vals, 0.0))
        numerator = integrate(m_field, None, alpha, CarlesonSquare(iv))
        denominator = integrate(None, w.field, alpha, CarlesonSquare(iv))
        val = numerator / denominator
        if val > best:
            best = val
            witness = i
    return ClassConstant(
        float(best),
        family.interval(witness),
        family.ids[witness],
        len(family),
        f"{family.kind} (inner lattice:{depth})",
    )


def gather_boxes_clipped(domain: Domain, qa, qb, heights, live):
    """Gather only the live boxes (used for clipped-rectangle sweeps)."""
    return gather_boxes(domain, qa[live], qb[live], heights[live])


@dataclass
class DoublingReport:
    worst_ratio: float
    worst_pair: tuple
    fitted_exponent: float
    skipped: int
    certified: bool


def doubling_report(
    w: WeightDescriptor,
    alpha: float,
    pairs: list,
    p: float,
    K: float | None = None,
) -> DoublingReport:
    """Check the alpha-doubling inequality on sampled pairs (E inside Q_I).

    Each pair is (interval, cell index array); the report's worst ratio is
    the max of (w-mass ratio) / (K * (alpha-measure ratio)^p), so a value at
    most 1 certifies doubling with phi(t) = t^p and constant K on the sample.
    """
    if K is None:
        if w.doubling is not None and w.doubling[0] == p:
            K = w.doubling[1]
        else:
            K = bekolle_constant(w, p, alpha).constant
    domain = w.domain
    wm = w.field.cell_masses(alpha)
    meas = domain.cell_measures(alpha)
    worst = -math.inf
    worst_pair = None
    skipped = 0
    logs = []
    for iv, cells in pairs:
        cells = np.asarray(cells, dtype=np.int64)
        e_mass = float(np.sum(wm[cells]))
        e_meas = float(np.sum(meas[cells]))
        if e_mass <= 0.0 or e_meas <= 0.0:
            skipped += 1
            continue
        q_mass = integrate(None, w.field, alpha, CarlesonSquare(iv))
        q_meas = float((iv.length) ** (alpha + 2.0) / (alpha + 1.0))
        mass_ratio = q_mass / e_mass
        meas_ratio = q_meas / e_meas
        val = mass_ratio / (K * meas_ratio**p)
        if val > worst:
            worst = val
            worst_pair = (iv, cells)
        if meas_ratio > 1.0 + 1e-12:
            logs.append((math.log(meas_ratio), math.log(mass_ratio)))
    if logs:
        xs = np.asarray([x for x, _ in logs])
        ys = np.asarray([y for _, y in logs])
        slope = float(np.dot(xs, ys) / np.dot(xs, xs))
    else:
        slope = p
    return DoublingReport(worst, worst_pair, slope, skipped, worst <= 1.0 + 1e-9)
