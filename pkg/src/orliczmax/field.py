"""Cell-wise densities, weighted box integrals, and Luxembourg norms.

A GridField is a nonnegative density against dV_alpha, constant on each
tessellation cell. Power-in-y fields carry an analytic tag so their masses
over any rectangle are closed form, which keeps power-weight class constants
exact rather than discretization-limited.

Box integrals run through a gathered CSR layout (one entry per cell/box
intersection) shared by every field on the domain; the Luxembourg bisection
over a batch of boxes is delegated to the kernel backend.

Fields freeze their value arrays at construction and every operation is
pure, so callers may evaluate many boxes concurrently; the reduction order
inside one call is fixed (root-major, level-major, index-ascending).
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .grid import BoxFamily, CarlesonSquare, Domain, Interval, _check_alpha
from .young import YoungFunction

LUX_RTOL = 1e-10
LUX_MAXITER = 200


class DegenerateBoxError(ValueError):
    """Raised when a norm is requested over a box with zero weight mass."""


class DomainMismatchError(ValueError):
    """Raised when fields on different tessellations are combined."""


class GridField:
    """Nonnegative cell-wise density against dV_alpha on a domain.

    Cell-wise fields store one density per cell. Analytic fields represent
    coef * y^s exactly: their rectangle masses use the closed-form y-power
    integral and their cell densities are the per-cell mass averages (which
    depend on alpha).
    """

    def __init__(
        self,
        domain: Domain,
        values: np.ndarray | None = None,
        power_y: float | None = None,
        coef: float = 1.0,
    ):
        self.domain = domain
        self.power_y = power_y
        self.coef = float(coef)
        if power_y is None:
            vals = np.ascontiguousarray(values, dtype=np.float64)
            if vals.shape != (domain.n_cells,):
                raise ValueError("values must have one entry per cell")
            if np.any(~np.isfinite(vals)) or np.any(vals < 0.0):
                raise ValueError("densities must be finite and nonnegative")
            vals.setflags(write=False)
            self._values = vals
        else:
            if coef < 0.0:
                raise ValueError("analytic coefficient must be nonnegative")
            self._values = None
        self._mass_cache: dict[float, np.ndarray] = {}
        self._lock = threading.Lock()

    # -- constructors -------------------------------------------------------

    @staticmethod
    def constant(domain: Domain, c: float) -> "GridField":
        return GridField(domain, np.full(domain.n_cells, float(c)))

    @staticmethod
    def indicator(domain: Domain, interval: Interval) -> "GridField":
        """Indicator of the Carleson square over ``interval``, at cell
        resolution (cells whose region lies inside the square get 1)."""
        tol = 1e-12 * max(1.0, interval.length)
        inside = (
            (domain.cell_x0 >= interval.a - tol)
            & (domain.cell_x1 <= interval.b + tol)
            & (domain.cell_y1 <= interval.length + tol)
        )
        return GridField(domain, inside.astype(np.float64))

    @staticmethod
    def power_y(domain: Domain, s: float, coef: float = 1.0) -> "GridField":
        return GridField(domain, power_y=float(s), coef=coef)

    @staticmethod
    def seeded(
        domain: Domain,
        seed: int,
        stream: int = 0,
        law: str = "loguniform",
        value_range: tuple[float, float] = (0.1, 10.0),
    ) -> "GridField":
        rng = np.random.default_rng([seed & 0xFFFFFFFF, stream])
        lo, hi = value_range
        if law == "loguniform":
            u = rng.random(domain.n_cells)
            vals = np.exp(u * (math.log(hi) - math.log(lo)) + math.log(lo))
        elif law == "uniform":
            vals = rng.uniform(lo, hi, domain.n_cells)
        else:
            raise ValueError(f"unknown law {law!r}")
        return GridField(domain, vals)

    @staticmethod
    def from_values(domain: Domain, values) -> "GridField":
        return GridField(domain, np.asarray(values, dtype=np.float64))

    # -- views --------------------------------------------------------------

    @property
    def is_analytic(self) -> bool:
        return self.power_y is not None

    def cell_masses(self, alpha: float) -> np.ndarray:
        """Integral of the density against dV_alpha over each cell region."""
        _check_alpha(alpha)
        with self._lock:
            got = self._mass_cache.get(alpha)
            if got is not None:
                return got
        d = self.domain
        if self.power_y is None:
            got = self._values * d.cell_measures(alpha)
        else:
            e = self.power_y + alpha + 1.0
            if e <= 0.0:
                raise ValueError(
                    f"power weight y^{self.power_y} is not integrable "
                    f"against dV_{alpha} near y = 0"
                )
            got = self.coef * (d.cell_x1 - d.cell_x0) * (
                d.cell_y1**e - d.cell_y0**e
            ) / e
        got.setflags(write=False)
        with self._lock:
            self._mass_cache[alpha] = got
        return got

    def cell_densities(self, alpha: float) -> np.ndarray:
        """Density per cell; for analytic fields the cell mass average."""
        if self.power_y is None:
            return self._values
        return self.cell_masses(alpha) / self.domain.cell_measures(alpha)

    @property
    def values(self) -> np.ndarray:
        if self._values is None:
            raise ValueError(
                "analytic field has no alpha-free densities; "
                "use cell_densities(alpha)"
            )
        return self._values

    def total_mass(self, alpha: float) -> float:
        return math.fsum(self.cell_masses(alpha))

    # -- algebra ------------------------------------------------------------

    def powered(self, e: float) -> "GridField":
        """Pointwise power of the density (exact for both representations)."""
        if self.power_y is not None:
            return GridField(
                self.domain, power_y=self.power_y * e, coef=self.coef**e
            )
        with np.errstate(divide="ignore"):
            vals = self._values**e
        if np.any(~np.isfinite(vals)):
            raise ValueError("powered density is not finite on every cell")
        return GridField(self.domain, vals)

    def scaled(self, c: float) -> "GridField":
        if self.power_y is not None:
            return GridField(self.domain, power_y=self.power_y, coef=self.coef * c)
        return GridField(self.domain, self._values * c)

    def positive_everywhere(self) -> bool:
        if self.power_y is not None:
            return self.coef > 0.0
        return bool(np.all(self._values > 0.0))


def _product_descriptor(f: GridField | None, w: GridField | None):
    """(dens, sigma, coef) describing the pointwise product of two fields:
    density dens[cell] * coef * y^sigma (dens may be None for pure powers)."""
    dens, sigma, coef = None, 0.0, 1.0
    for g in (f, w):
        if g is None:
            continue
        if g.is_analytic:
            sigma += g.power_y
            coef *= g.coef
        else:
            dens = g.values if dens is None else dens * g.values
    return dens, sigma, coef


# ---------------------------------------------------------------------------
# gathered box batches
# ---------------------------------------------------------------------------


@dataclass
class BoxBatch:
    """CSR geometry of a box family against a domain.

    One entry per (cell, box) intersection; entries of a box are ordered
    root-major, level-major, index-ascending. ``masses`` turns the geometry
    into per-entry integrals for any field without re-gathering.
    """

    domain: Domain
    qa: np.ndarray
    qb: np.ndarray
    heights: np.ndarray
    cell: np.ndarray  # global cell id per entry
    xw: np.ndarray  # x-overlap width per entry
    ylo: np.ndarray  # y-overlap per entry
    yhi: np.ndarray
    indptr: np.ndarray  # (n_boxes + 1,)

    def __len__(self) -> int:
        return len(self.qa)

    def masses(
        self,
        alpha: float,
        dens: np.ndarray | None = None,
        sigma: float = 0.0,
        coef: float = 1.0,
    ) -> np.ndarray:
        """Per-entry integral of dens(cell) * coef * y^sigma against dV_alpha
        over the cell/box intersection rectangle."""
        _check_alpha(alpha + sigma)
        e = alpha + sigma + 1.0
        out = coef * self.xw * (self.yhi**e - self.ylo**e) / e
        if dens is not None:
            out = out * dens[self.cell]
        return out

    def field_masses(self, field: GridField | None, alpha: float) -> np.ndarray:
        if field is None:
            return self.masses(alpha)
        dens, sigma, coef = _product_descriptor(field, None)
        return self.masses(alpha, dens, sigma, coef)

    def box_sums(self, entry_values: np.ndarray) -> np.ndarray:
        return np.add.reduceat(entry_values, self.indptr[:-1])

    def gather_values(self, values: np.ndarray) -> np.ndarray:
        return values[self.cell]


def gather_boxes(domain: Domain, qa, qb, heights=None) -> BoxBatch:
    """Build the CSR intersection layout for boxes [qa, qb) x (0, height].

    heights defaults to the box lengths (true Carleson squares); explicit
    heights support clipped rectangles such as Q_J intersected with Q_I.
    """
    qa = np.ascontiguousarray(qa, dtype=np.float64)
    qb = np.ascontiguousarray(qb, dtype=np.float64)
    if heights is None:
        heights = qb - qa
    else:
        heights = np.ascontiguousarray(heights, dtype=np.float64)
    nb = len(qa)
    ent_cell, ent_xw, ent_ylo, ent_yhi, ent_box = [], [], [], [], []
    for r, root in enumerate(domain.roots):
        for k in range(domain.depth + 1):
            w = root.length / 2**k
            y0k = 0.0 if k == domain.depth else w / 2.0
            y1k = w
            ytop = np.minimum(heights, y1k)
            a_cl = np.maximum(qa, root.a)
            b_cl = np.minimum(qb, root.b)
            ok = (ytop > y0k) & (b_cl > a_cl)
            if not np.any(ok):
                continue
            idx = np.nonzero(ok)[0]
            a_cl = a_cl[idx]
            b_cl = b_cl[idx]
            i0 = np.floor((a_cl - root.a) / w).astype(np.int64)
            i1 = np.ceil((b_cl - root.a) / w).astype(np.int64) - 1
            np.clip(i0, 0, 2**k - 1, out=i0)
            np.clip(i1, 0, 2**k - 1, out=i1)
            counts = i1 - i0 + 1
            total = int(counts.sum())
            if total == 0:
                continue
            firsts = np.concatenate([[0], np.cumsum(counts)[:-1]])
            intra = np.arange(total, dtype=np.int64) - np.repeat(firsts, counts)
            cell_i = np.repeat(i0, counts) + intra
            cx0 = root.a + cell_i * w
            cx1 = cx0 + w
            xw = np.minimum(np.repeat(b_cl, counts), cx1) - np.maximum(
                np.repeat(a_cl, counts), cx0
            )
            keep = xw > 0.0
            if not np.any(keep):
                continue
            start, _ = domain.block(r, k)
            ent_cell.append((start + cell_i)[keep])
            ent_xw.append(xw[keep])
            ent_ylo.append(np.full(int(keep.sum()), y0k))
            ent_yhi.append(np.repeat(ytop[idx], counts)[keep])
            ent_box.append(np.repeat(idx, counts)[keep])
    if ent_cell:
        cell = np.concatenate(ent_cell)
        xw = np.concatenate(ent_xw)
        ylo = np.concatenate(ent_ylo)
        yhi = np.concatenate(ent_yhi)
        box = np.concatenate(ent_box)
    else:
        cell = np.empty(0, dtype=np.int64)
        xw = ylo = yhi = np.empty(0)
        box = np.empty(0, dtype=np.int64)
    order = np.argsort(box, kind="stable")
    box = box[order]
    indptr = np.searchsorted(box, np.arange(nb + 1, dtype=np.int64))
    return BoxBatch(
        domain,
        qa,
        qb,
        heights,
        cell[order],
        xw[order],
        ylo[order],
        yhi[order],
        indptr.astype(np.int64),
    )


def gather_family(domain: Domain, family: BoxFamily) -> BoxBatch:
    return gather_boxes(domain, family.qa, family.qb)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def _require_shared_domain(*fields: GridField) -> Domain:
    domains = {id(f.domain) for f in fields if f is not None}
    if len(domains) != 1:
        raise DomainMismatchError("fields must share one tessellation domain")
    for f in fields:
        if f is not None:
            return f.domain
    raise DomainMismatchError("no fields given")


def integrate(
    f: GridField | None,
    weight: GridField | None,
    alpha: float,
    square: CarlesonSquare,
) -> float:
    """Integral of f * weight against dV_alpha over a Carleson square.

    Exact for cell-wise and power-in-y densities (the product is integrated
    in closed form on each cell/box intersection rectangle). Deterministic:
    entries are summed with math.fsum in a fixed order.
    """
    domain = _require_shared_domain(*(g for g in (f, weight) if g is not None))
    iv = square.interval
    batch = gather_boxes(domain, [iv.a], [iv.b])
    dens, sigma, coef = _product_descriptor(f, weight)
    return math.fsum(batch.masses(alpha, dens, sigma, coef))


def box_mass(weight: GridField, alpha: float, interval: Interval) -> float:
    """Weight mass of the Carleson square over ``interval``; 0 when the box
    misses the domain (truncated boxes integrate over the overlap)."""
    if interval.b <= weight.domain.x_min or interval.a >= weight.domain.x_max:
        return 0.0
    return integrate(None, weight, alpha, CarlesonSquare(interval))


def batch_box_masses(batch: BoxBatch, field: GridField | None, alpha: float) -> np.ndarray:
    return batch.box_sums(batch.field_masses(field, alpha))


def lp_norm(g: GridField, weight: GridField, alpha: float, p: float) -> float:
    """Weighted L^p norm of a cell-wise density over the whole domain."""
    if p < 1.0:
        raise ValueError("p must be >= 1")
    domain = _require_shared_domain(g, weight)
    gv = g.cell_densities(alpha)
    wm = weight.cell_masses(alpha)
    return math.fsum((gv**p) * wm) ** (1.0 / p)


def batch_luxembourg(
    batch: BoxBatch,
    f: GridField,
    phi: YoungFunction,
    weight: GridField,
    alpha: float,
    wm: np.ndarray | None = None,
    wtot: np.ndarray | None = None,
    rtol: float = LUX_RTOL,
    maxiter: int = LUX_MAXITER,
    validate: bool = True,
) -> np.ndarray:
    """Luxembourg norms of f over every box of a gathered batch.

    wm/wtot may be passed in when the caller reuses the weight masses across
    many fields (they depend only on (batch, weight, alpha)).
    """
    _require_shared_domain(f, weight)
    if batch.domain is not f.domain:
        raise DomainMismatchError("batch was gathered on a different domain")
    if wm is None:
        wm = batch.field_masses(weight, alpha)
    if wtot is None:
        wtot = batch.box_sums(wm)
    if np.any(wtot <= 0.0):
        raise DegenerateBoxError("box with zero weight mass in batch")
    fv = batch.gather_values(f.cell_densities(alpha))
    params = phi.closed_params()
    if params is not None:
        coef, a, b, kappa = params
        return _kernels.box_norms(
            fv, wm, batch.indptr, wtot, coef, a, b, kappa, rtol, maxiter, validate
        )
    return _kernels.box_norms_generic(
        phi._eval_array, fv, wm, batch.indptr, wtot, rtol, maxiter, validate
    )


def luxembourg_norm(
    f: GridField,
    square: CarlesonSquare,
    phi: YoungFunction,
    weight: GridField,
    alpha: float,
) -> float:
    """Luxembourg norm of f over one Carleson square.

    inf{lam > 0 : mean of phi(|f|/lam) against the box weight measure <= 1},
    by bracketed bisection (relative tolerance 1e-10, cap 200 iterations),
    with the bracket entry/exit post-checks always on. Zero f gives 0; a box
    with zero weight mass raises DegenerateBoxError.
    """
    domain = _require_shared_domain(f, weight)
    iv = square.interval
    batch = gather_boxes(domain, [iv.a], [iv.b])
    if len(batch.cell) == 0:
        raise DegenerateBoxError("box does not meet the domain")
    return float(batch_luxembourg(batch, f, phi, weight, alpha)[0])
