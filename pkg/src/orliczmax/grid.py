"""Geometry of the upper half-plane lab: intervals, Carleson squares, top
halves, shifted dyadic grids, tessellations, and exact alpha-measures.

All combinatorial predicates that involve the 1/3-shifted grid are done in
exact rational arithmetic (``fractions.Fraction``); measures are floats.
Geometry values are immutable and the operations pure; the per-alpha measure
caches are lock-protected.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

ONE_THIRD = Fraction(1, 3)

#: shifts of the two dyadic grid systems used throughout
GRID_SHIFTS = (Fraction(0), ONE_THIRD)


@dataclass(frozen=True)
class Interval:
    """Half-open interval [a, b) on the real line."""

    a: float
    b: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValueError("interval endpoints must be finite")
        if not self.a < self.b:
            raise ValueError(f"degenerate interval [{self.a}, {self.b})")

    @property
    def length(self) -> float:
        return self.b - self.a

    def contains_interval(self, other: "Interval") -> bool:
        return self.a <= other.a and other.b <= self.b

    def contains_point(self, x: float) -> bool:
        return self.a <= x < self.b


@dataclass(frozen=True)
class CarlesonSquare:
    """Box over an interval I: {x + iy : x in I, 0 < y < |I|}."""

    interval: Interval

    @property
    def height(self) -> float:
        return self.interval.length


@dataclass(frozen=True)
class TopHalf:
    """Upper half of a Carleson square: |I|/2 < y < |I|."""

    interval: Interval


@dataclass(frozen=True)
class Rect:
    """Axis-aligned box [x0, x1) x (y0, y1]."""

    x0: float
    x1: float
    y0: float
    y1: float


def _check_alpha(alpha: float) -> None:
    if not alpha > -1.0:
        raise ValueError(f"alpha must exceed -1, got {alpha}")


def y_slab_integral(alpha: float, y0: float, y1: float) -> float:
    """Integral of y^alpha over (y0, y1], zero when the slab is empty."""
    if y1 <= y0:
        return 0.0
    a1 = alpha + 1.0
    return (y1**a1 - y0**a1) / a1


def region_rect(region) -> Rect:
    """Bounding rectangle of a region (already a rectangle for all kinds)."""
    if isinstance(region, Rect):
        return region
    if isinstance(region, CarlesonSquare):
        iv = region.interval
        return Rect(iv.a, iv.b, 0.0, iv.length)
    if isinstance(region, TopHalf):
        iv = region.interval
        return Rect(iv.a, iv.b, iv.length / 2.0, iv.length)
    raise TypeError(f"unsupported region type {type(region).__name__}")


def alpha_measure(region, alpha: float) -> float:
    """Measure of a region against dV_alpha = y^alpha dx dy (closed form)."""
    _check_alpha(alpha)
    if isinstance(region, CarlesonSquare):
        length = region.interval.length
        return length ** (alpha + 2.0) / (alpha + 1.0)
    if isinstance(region, TopHalf):
        length = region.interval.length
        return (
            length ** (alpha + 2.0)
            * (1.0 - 2.0 ** -(alpha + 1.0))
            / (alpha + 1.0)
        )
    r = region_rect(region)
    return (r.x1 - r.x0) * y_slab_integral(alpha, r.y0, r.y1)


def region_intersection_measure(cell_region, square: CarlesonSquare, alpha: float) -> float:
    """alpha-measure of (cell region intersected with a Carleson square)."""
    _check_alpha(alpha)
    c = region_rect(cell_region)
    q = region_rect(square)
    x0 = max(c.x0, q.x0)
    x1 = min(c.x1, q.x1)
    if x1 <= x0:
        return 0.0
    y0 = max(c.y0, q.y0)
    y1 = min(c.y1, q.y1)
    return (x1 - x0) * y_slab_integral(alpha, y0, y1)


# ---------------------------------------------------------------------------
# shifted dyadic grids
# ---------------------------------------------------------------------------


def shifted_endpoints_exact(beta: Fraction, j: int, m: int) -> tuple[Fraction, Fraction]:
    """Exact endpoints of the grid member 2^j([0,1) + m + (-1)^j beta)."""
    scale = Fraction(2) ** j
    shift = beta if j % 2 == 0 else -beta
    lo = scale * (m + shift)
    return lo, lo + scale


@dataclass(frozen=True)
class ShiftedDyadicGrid:
    """Dyadic grid system 2^j([0,1) + m + (-1)^j beta), beta in {0, 1/3}.

    The 1/3 shift with the alternating sign keeps the grid nested: each member
    splits exactly into two members one level down.
    """

    beta: Fraction
    j_min: int
    j_max: int

    def __post_init__(self) -> None:
        if self.beta not in GRID_SHIFTS:
            raise ValueError("shift must be 0 or 1/3")
        if self.j_min > self.j_max:
            raise ValueError("empty level range")

    def interval(self, j: int, m: int) -> Interval:
        if not self.j_min <= j <= self.j_max:
            raise ValueError(f"level {j} outside [{self.j_min}, {self.j_max}]")
        lo, hi = shifted_endpoints_exact(self.beta, j, m)
        return Interval(float(lo), float(hi))

    def interval_exact(self, j: int, m: int) -> tuple[Fraction, Fraction]:
        if not self.j_min <= j <= self.j_max:
            raise ValueError(f"level {j} outside [{self.j_min}, {self.j_max}]")
        return shifted_endpoints_exact(self.beta, j, m)

    def child_indices(self, j: int, m: int) -> tuple[int, int]:
        """Indices (at level j-1) of the two halves of member (j, m)."""
        sign = 1 if j % 2 == 0 else -1
        left = 2 * m + sign  # 3*beta*(-1)^j with beta = 1/3; 2*m for beta = 0
        if self.beta == 0:
            left = 2 * m
        return left, left + 1


def shifted_interval(grid: ShiftedDyadicGrid, j: int, m: int) -> Interval:
    """Grid member (j, m) as a float interval."""
    return grid.interval(j, m)


def cover_interval(iv: Interval) -> tuple[Fraction, Interval]:
    """Smallest shifted-dyadic interval J containing iv, with |J| <= 6|iv|.

    Searches levels upward starting at the smallest dyadic length >= |iv|,
    trying the unshifted grid before the 1/3-shifted one on each level.
    """
    length = iv.length
    j0 = math.ceil(math.log2(length))
    for j in range(j0, j0 + 5):
        w = 2.0**j
        for beta in GRID_SHIFTS:
            sigma = float(beta) * w if j % 2 == 0 else -float(beta) * w
            m = math.floor((iv.a - sigma) / w)
            lo = m * w + sigma
            hi = lo + w
            if lo <= iv.a and iv.b <= hi:
                cand = Interval(lo, hi)
                if cand.length > 6.0 * length + 1e-12 * length:
                    raise RuntimeError(
                        "covering contract violated: smallest admissible "
                        f"cover of [{iv.a}, {iv.b}) has length {cand.length}"
                    )
                return beta, cand
    raise RuntimeError(f"no shifted-dyadic cover found for [{iv.a}, {iv.b})")


def adjacent_dyadic_cover(iv: Interval) -> tuple[Interval, Interval]:
    """Two adjacent unshifted dyadic intervals J1, J2 (equal length) with
    iv inside J1 union J2 and |iv| < |J1| = |J2| <= 2|iv|."""
    j = math.floor(math.log2(iv.length)) + 1
    w = 2.0**j
    if w <= iv.length:  # float guard at exact powers of two
        j += 1
        w = 2.0**j
    m = math.floor(iv.a / w)
    j1 = Interval(m * w, (m + 1) * w)
    j2 = Interval((m + 1) * w, (m + 2) * w)
    return j1, j2


# ---------------------------------------------------------------------------
# tessellations and working domains
# ---------------------------------------------------------------------------


class Tessellation:
    """Finite exact partition of a root Carleson square.

    Cells are indexed by (level k, position m): for k < depth the cell region
    is the top half of the k-level dyadic descendant of the root, and at
    k = depth the cell is the full leaf Carleson square. Together the regions
    tile the root square exactly.
    """

    def __init__(self, root: Interval, depth: int):
        if depth < 1:
            raise ValueError("depth must be >= 1")
        self.root = root
        self.depth = depth
        self.n_cells = 2 ** (depth + 1) - 1
        levels = []
        indices = []
        for k in range(depth + 1):
            levels.append(np.full(2**k, k, dtype=np.int64))
            indices.append(np.arange(2**k, dtype=np.int64))
        self.cell_level = np.concatenate(levels)
        self.cell_index = np.concatenate(indices)
        widths = root.length / np.exp2(self.cell_level.astype(np.float64))
        self.cell_x0 = root.a + self.cell_index * widths
        self.cell_x1 = self.cell_x0 + widths
        is_leaf = self.cell_level == depth
        self.cell_y0 = np.where(is_leaf, 0.0, widths / 2.0)
        self.cell_y1 = widths.copy()
        self._measure_cache: dict[float, np.ndarray] = {}
        self._lock = threading.Lock()

    def level_offset(self, k: int) -> int:
        """Flat index of cell (k, 0)."""
        return 2**k - 1

    def cell_id(self, k: int, m: int) -> int:
        return 2**k - 1 + m

    def cell_interval(self, cell: int) -> Interval:
        return Interval(float(self.cell_x0[cell]), float(self.cell_x1[cell]))

    def cell_region(self, cell: int):
        iv = self.cell_interval(cell)
        if self.cell_level[cell] == self.depth:
            return CarlesonSquare(iv)
        return TopHalf(iv)

    def cell_measures(self, alpha: float) -> np.ndarray:
        """alpha-measure of every cell region, cached per alpha."""
        _check_alpha(alpha)
        with self._lock:
            got = self._measure_cache.get(alpha)
            if got is None:
                got = (self.cell_x1 - self.cell_x0) * (
                    self.cell_y1 ** (alpha + 1.0) - self.cell_y0 ** (alpha + 1.0)
                ) / (alpha + 1.0)
                self._measure_cache[alpha] = got
        return got


class Domain:
    """Working domain: one or more adjacent equal-width root tessellations.

    Multi-grid experiments use the padded form (one extra unit root on each
    side of the central root) so that shifted-grid and lattice boxes near the
    central root stay inside the region where fields are defined. Boxes taller
    than the root height overflow the domain region and are excluded from
    supremum families; exclusions are counted by the family builders.
    """

    def __init__(self, roots: Sequence[Interval], depth: int):
        if not roots:
            raise ValueError("at least one root required")
        width = roots[0].length
        for prev, nxt in zip(roots, roots[1:]):
            if not math.isclose(prev.b, nxt.a, rel_tol=0.0, abs_tol=1e-12):
                raise ValueError("roots must be adjacent")
            if not math.isclose(nxt.length, width, rel_tol=1e-12):
                raise ValueError("roots must have equal width")
        self.roots = tuple(roots)
        self.depth = depth
        self.tessellations = tuple(Tessellation(r, depth) for r in roots)
        self.cells_per_root = self.tessellations[0].n_cells
        self.n_cells = self.cells_per_root * len(roots)
        self.cell_x0 = np.concatenate([t.cell_x0 for t in self.tessellations])
        self.cell_x1 = np.concatenate([t.cell_x1 for t in self.tessellations])
        self.cell_y0 = np.concatenate([t.cell_y0 for t in self.tessellations])
        self.cell_y1 = np.concatenate([t.cell_y1 for t in self.tessellations])
        self.cell_level = np.concatenate([t.cell_level for t in self.tessellations])
        self.cell_index = np.concatenate([t.cell_index for t in self.tessellations])
        self.cell_root = np.repeat(np.arange(len(roots), dtype=np.int64), self.cells_per_root)
        self._measure_cache: dict[float, np.ndarray] = {}
        self._lock = threading.Lock()

    @classmethod
    def single(cls, root: tuple[float, float] = (0.0, 1.0), depth: int = 6) -> "Domain":
        return cls([Interval(*root)], depth)

    @classmethod
    def padded(cls, root: tuple[float, float] = (0.0, 1.0), depth: int = 6) -> "Domain":
        base = Interval(*root)
        w = base.length
        return cls(
            [Interval(base.a - w, base.a), base, Interval(base.b, base.b + w)],
            depth,
        )

    @property
    def x_min(self) -> float:
        return self.roots[0].a

    @property
    def x_max(self) -> float:
        return self.roots[-1].b

    @property
    def height(self) -> float:
        return self.roots[0].length

    @property
    def central_root(self) -> Interval:
        return self.roots[len(self.roots) // 2]

    def root_width(self) -> float:
        return self.roots[0].length

    def cell_id(self, root: int, level: int, m: int) -> int:
        return root * self.cells_per_root + 2**level - 1 + m

    def block(self, root: int, level: int) -> tuple[int, int]:
        """Flat [start, stop) range of the cells at (root, level)."""
        start = root * self.cells_per_root + 2**level - 1
        return start, start + 2**level

    def cell_measures(self, alpha: float) -> np.ndarray:
        _check_alpha(alpha)
        with self._lock:
            got = self._measure_cache.get(alpha)
            if got is None:
                got = (self.cell_x1 - self.cell_x0) * (
                    self.cell_y1 ** (alpha + 1.0) - self.cell_y0 ** (alpha + 1.0)
                ) / (alpha + 1.0)
                self._measure_cache[alpha] = got
        return got

    def contains_box(self, interval: Interval) -> bool:
        """Whether the Carleson square over ``interval`` lies in the domain
        region (x inside the union of roots, height at most the root width)."""
        return (
            interval.a >= self.x_min - 1e-12
            and interval.b <= self.x_max + 1e-12
            and interval.length <= self.height * (1.0 + 1e-12)
        )

    def dyadic_interval(self, root: int, level: int, m: int) -> Interval:
        base = self.roots[root]
        w = base.length / 2**level
        return Interval(base.a + m * w, base.a + (m + 1) * w)


# ---------------------------------------------------------------------------
# box families
# ---------------------------------------------------------------------------


@dataclass
class BoxFamily:
    """A finite family of Carleson boxes (qa, qb) with metadata.

    kind: "dyadic" (the domain's own trees), "shifted" (1/3-shifted grid
    members inside the domain), or "lattice" (all boxes with endpoints on the
    depth-L lattice). ids carries one tuple per box for witness reporting.
    excluded counts boxes dropped because they overflow the domain region.
    """

    kind: str
    qa: np.ndarray
    qb: np.ndarray
    ids: list
    excluded: int = 0

    def __len__(self) -> int:
        return len(self.qa)

    @property
    def heights(self) -> np.ndarray:
        return self.qb - self.qa

    def interval(self, i: int) -> Interval:
        return Interval(float(self.qa[i]), float(self.qb[i]))


def dyadic_family(domain: Domain, max_level: int | None = None) -> BoxFamily:
    """All dyadic tree boxes of the domain's roots, level-major per root."""
    top = domain.depth if max_level is None else min(max_level, domain.depth)
    qa, qb, ids = [], [], []
    for r, root in enumerate(domain.roots):
        for k in range(top + 1):
            w = root.length / 2**k
            for m in range(2**k):
                qa.append(root.a + m * w)
                qb.append(root.a + (m + 1) * w)
                ids.append((r, k, m))
    return BoxFamily("dyadic", np.asarray(qa), np.asarray(qb), ids)


def shifted_family(domain: Domain, max_level: int | None = None) -> BoxFamily:
    """1/3-shifted grid members inside the domain with length <= root width.

    Levels run from the root width down to the cell width. Members that
    overflow the domain region are excluded and counted.
    """
    top = domain.depth if max_level is None else min(max_level, domain.depth)
    g = round(math.log2(domain.root_width()))
    if not math.isclose(2.0**g, domain.root_width(), rel_tol=1e-12):
        raise ValueError("shifted families require a power-of-two root width")
    lo_x = Fraction(domain.x_min).limit_denominator(2**40)
    hi_x = Fraction(domain.x_max).limit_denominator(2**40)
    qa, qb, ids = [], [], []
    excluded = 0
    for k in range(top + 1):
        j = g - k
        scale = Fraction(2) ** j
        shift = ONE_THIRD if j % 2 == 0 else -ONE_THIRD
        m_lo = math.floor((lo_x / scale) - shift)
        m_hi = math.ceil((hi_x / scale) - shift)
        for m in range(m_lo - 1, m_hi + 1):
            a = scale * (m + shift)
            b = a + scale
            if a >= lo_x and b <= hi_x:
                qa.append(float(a))
                qb.append(float(b))
                ids.append((j, m))
            elif b > lo_x and a < hi_x:
                excluded += 1
    return BoxFamily("shifted", np.asarray(qa), np.asarray(qb), ids, excluded)


def lattice_family(
    domain: Domain, lattice_depth: int, within: Interval | None = None
) -> BoxFamily:
    """All boxes [a, b) with endpoints on the depth-L lattice of the domain
    and height at most the root width (taller boxes overflow the region).

    ``within`` restricts to boxes inside a subinterval; on padded domains the
    central root is the restriction under which every lattice box keeps an
    admissible shifted-dyadic cover inside the domain.
    """
    if lattice_depth < 0 or lattice_depth > domain.depth:
        raise ValueError("lattice depth must lie in [0, tessellation depth]")
    step = domain.root_width() / 2**lattice_depth
    n_pts = round((domain.x_max - domain.x_min) / step)
    max_span = 2**lattice_depth  # boxes longer than a root overflow in y
    lo = domain.x_min if within is None else within.a - 1e-12
    hi = domain.x_max if within is None else within.b + 1e-12
    qa, qb, ids = [], [], []
    excluded = 0
    for i in range(n_pts):
        a = domain.x_min + i * step
        if a < lo:
            continue
        for span in range(1, max_span + 1):
            j = i + span
            if j > n_pts:
                break
            b = domain.x_min + j * step
            if b > hi:
                break
            qa.append(a)
            qb.append(b)
            ids.append((i, j))
    # count boxes dropped by the height cap for reporting
    for i in range(n_pts):
        excluded += max(0, n_pts - i - max_span)
    kind = "lattice" if within is None else "lattice-central"
    return BoxFamily(kind, np.asarray(qa), np.asarray(qb), ids, excluded)


def family_for(domain: Domain, kind: str, lattice_depth: int | None = None) -> BoxFamily:
    if kind == "dyadic":
        return dyadic_family(domain)
    if kind == "shifted":
        return shifted_family(domain)
    if kind == "lattice":
        depth = domain.depth if lattice_depth is None else lattice_depth
        return lattice_family(domain, depth)
    if kind == "dyadic+lattice":
        dy = dyadic_family(domain)
        la = lattice_family(domain, domain.depth if lattice_depth is None else lattice_depth)
        return BoxFamily(
            "dyadic+lattice",
            np.concatenate([dy.qa, la.qa]),
            np.concatenate([dy.qb, la.qb]),
            dy.ids + la.ids,
            dy.excluded + la.excluded,
        )
    raise ValueError(f"unknown family kind {kind!r}")


def beta_label(beta) -> str:
    """Serialize a grid shift: exact string "1/3" for the shifted grid."""
    if beta == 0:
        return "0"
    if beta == ONE_THIRD or beta == float(ONE_THIRD) or beta == 1.0 / 3.0:
        return "1/3"
    return str(beta)
