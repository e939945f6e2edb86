"""Stopping families, level-set mass bounds, Carleson sequences, and the
Carleson embedding checker.

A stopping family at threshold lambda is the antichain of maximal dyadic
intervals whose box Luxembourg norm exceeds lambda; the union of their
Carleson squares is exactly the cell-granular superlevel set of the dyadic
maximal field.

Traversals are sequential per family (they are cheap); independent
(function, threshold) cases parallelize trivially.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field as dc_field

import numpy as np

from . import young as youngmod
from .field import (
    GridField,
    batch_box_masses,
    batch_luxembourg,
    lp_norm,
)
from .grid import Domain, Interval
from .maximal import _family_and_batch, _sweep_dyadic
from .young import YoungFunction


@dataclass
class StoppingFamily:
    """Maximal dyadic intervals with box norm above the threshold."""

    lam: float
    domain: Domain
    members: list  # [(root, level, m)]
    norms: list
    doubling_bound: float | None = None  # phi(2^(2+alpha)) K lam when certified
    doubling_violations: int = 0

    def intervals(self) -> list[Interval]:
        return [self.domain.dyadic_interval(r, k, m) for (r, k, m) in self.members]

    def __len__(self) -> int:
        return len(self.members)


def _tree_norms(f, phi, weight, alpha):
    """Norms over every dyadic tree box, ordered like the dyadic family."""
    domain = f.domain
    family, batch = _family_and_batch(domain, "dyadic")
    return family, batch, batch_luxembourg(batch, f, phi, weight, alpha)


def stopping_family(
    f: GridField,
    phi: YoungFunction,
    weight: GridField,
    alpha: float,
    lam: float,
    domain: Domain | None = None,
    doubling: tuple[float, float] | None = None,
    node_norms: np.ndarray | None = None,
) -> StoppingFamily:
    """Select maximal dyadic intervals with norm > lam, top-down per root.

    When the weight carries an alpha-doubling certificate (exponent p,
    constant K), every selected non-root member is checked against the
    covering bound norm <= K (2^(2+alpha))^p lam.
    """
    if lam <= 0.0:
        raise ValueError("threshold must be positive")
    domain = f.domain if domain is None else domain
    if node_norms is None:
        _, _, node_norms = _tree_norms(f, phi, weight, alpha)
    members: list = []
    norms: list = []
    violations = 0
    bound = None
    if doubling is not None:
        p_doub, k_doub = doubling
        bound = k_doub * (2.0 ** (2.0 + alpha)) ** p_doub * lam
    for r in range(len(domain.roots)):
        stack = [(0, 0)]
        while stack:
            k, m = stack.pop()
            val = float(node_norms[domain.cell_id(r, k, m)])
            if val > lam:
                members.append((r, k, m))
                norms.append(val)
                if bound is not None and k > 0 and val > bound * (1.0 + 1e-9):
                    violations += 1
            elif k < domain.depth:
                stack.append((k + 1, 2 * m + 1))
                stack.append((k + 1, 2 * m))
    return StoppingFamily(lam, domain, members, norms, bound, violations)


@dataclass
class LevelSetMassBound:
    lhs: float  # weight mass of the superlevel set
    rhs: float  # doubling-constant-weighted integral over {|f| > lam/2}
    ratio: float


def levelset_mass_bound(
    f: GridField,
    phi: YoungFunction,
    weight: GridField,
    alpha: float,
    lam: float,
    node_norms: np.ndarray | None = None,
) -> LevelSetMassBound:
    """Weak-type mass bound for the dyadic superlevel set.

    lhs is the weight mass of {dyadic maximal > lam} (sum over the stopping
    family); rhs integrates K_Phi * phi(|f|/lam) over {|f| > lam/2} against
    the weight, K_Phi the doubling constant of phi.
    """
    if lam <= 0.0:
        raise ValueError("threshold must be positive")
    fam = stopping_family(f, phi, weight, alpha, lam, node_norms=node_norms)
    wm = weight.cell_masses(alpha)
    lhs = 0.0
    if fam.members:
        domain = f.domain
        qa = [domain.dyadic_interval(r, k, m).a for r, k, m in fam.members]
        qb = [domain.dyadic_interval(r, k, m).b for r, k, m in fam.members]
        from .field import gather_boxes

        batch = gather_boxes(domain, qa, qb)
        lhs = float(np.sum(batch_box_masses(batch, weight, alpha)))
    k_phi = youngmod.delta2_constant(phi)
    fv = f.cell_densities(alpha)
    support = fv > lam / 2.0
    rhs = 0.0
    if np.any(support):
        rhs = k_phi * math.fsum(
            np.asarray(phi.eval(fv[support] / lam), dtype=np.float64) * wm[support]
        )
    ratio = lhs / rhs if rhs > 0.0 else (0.0 if lhs == 0.0 else math.inf)
    return LevelSetMassBound(lhs, rhs, ratio)


# ---------------------------------------------------------------------------
# Carleson sequences and the embedding theorem
# ---------------------------------------------------------------------------


@dataclass
class CarlesonSequence:
    """Nonnegative values on dyadic boxes with a certified Carleson constant:
    for every dyadic R, the sum over boxes inside R is at most
    A * (weight mass of R)^gamma."""

    domain: Domain
    weight: GridField
    alpha: float
    gamma: float
    values: np.ndarray  # one value per dyadic tree box (cell-indexed)
    constant: float = dc_field(default=math.nan)
    certified: bool = False

    @staticmethod
    def certify(
        domain: Domain,
        weight: GridField,
        alpha: float,
        gamma: float,
        values: np.ndarray,
    ) -> "CarlesonSequence":
        """Compute the minimal constant by bottom-up subtree aggregation."""
        if gamma < 1.0:
            raise ValueError("gamma must be >= 1")
        values = np.ascontiguousarray(values, dtype=np.float64)
        if values.shape != (domain.n_cells,):
            raise ValueError("one value per dyadic box required")
        if np.any(values < 0.0):
            raise ValueError("sequence values must be nonnegative")
        family, batch = _family_and_batch(domain, "dyadic")
        box_mass = batch_box_masses(batch, weight, alpha)
        subtree = values.copy()
        best = 0.0
        for r in range(len(domain.roots)):
            for k in range(domain.depth - 1, -1, -1):
                start, stop = domain.block(r, k)
                c_start, _ = domain.block(r, k + 1)
                kids = subtree[c_start : c_start + 2 ** (k + 1)]
                subtree[start:stop] += kids[0::2] + kids[1::2]
        with np.errstate(divide="ignore", invalid="ignore"):
            ratios = np.where(box_mass > 0.0, subtree / box_mass**gamma, np.inf)
        live = subtree > 0.0
        best = float(np.max(np.where(live, ratios, 0.0))) if np.any(live) else 0.0
        return CarlesonSequence(domain, weight, alpha, gamma, values, best, True)


@dataclass
class EmbeddingCheck:
    lhs: float
    rhs: float
    bound: float
    observed: float  # lhs / rhs
    ok: bool


def carleson_embedding_check(
    seq: CarlesonSequence,
    f: GridField,
    phi: YoungFunction,
    p: float,
) -> EmbeddingCheck:
    """Carleson embedding: sum of lambda_Q norm(f, Q)^(p gamma) against the
    certified constant times gamma times the dyadic maximal p-norm^(p gamma)."""
    if not seq.certified or not math.isfinite(seq.constant):
        raise ValueError("sequence must carry a certified constant")
    bp = youngmod.bp_check(phi, p)
    if not bp.member:
        raise ValueError("phi must satisfy the strong-type integral test for p")
    domain = seq.domain
    family, batch = _family_and_batch(domain, "dyadic")
    norms = batch_luxembourg(batch, f, phi, seq.weight, seq.alpha)
    gamma = seq.gamma
    lhs = math.fsum(seq.values * norms ** (p * gamma))
    m_vals = _sweep_dyadic(domain, family, norms)
    m_field = GridField(domain, np.maximum(m_vals, 0.0))
    rhs = lp_norm(m_field, seq.weight, seq.alpha, p) ** (p * gamma)
    bound = seq.constant * gamma * rhs
    return EmbeddingCheck(lhs, rhs, bound, lhs / rhs if rhs > 0 else 0.0, lhs <= bound * (1.0 + 1e-8))


@dataclass
class CarlesonMeasureLevelSet:
    constant: float
    mu_mass: float
    bound: float
    ok: bool


def carleson_measure_levelset_check(
    mu: GridField,
    weight: GridField,
    alpha: float,
    gamma: float,
    f: GridField,
    phi: YoungFunction,
    t: float,
    sigma: GridField | None = None,
) -> CarlesonMeasureLevelSet:
    """Box-condition mu(Q) <= C |Q|_w^gamma transfers to superlevel sets of
    the dyadic maximal field (computed with weight sigma, default w)."""
    if gamma < 1.0:
        raise ValueError("gamma must be >= 1")
    domain = mu.domain
    sigma = weight if sigma is None else sigma
    family, batch = _family_and_batch(domain, "dyadic")
    mu_boxes = batch_box_masses(batch, mu, alpha)
    w_boxes = batch_box_masses(batch, weight, alpha)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(w_boxes > 0.0, mu_boxes / w_boxes**gamma, np.inf)
    constant = float(np.max(ratios))
    norms = batch_luxembourg(batch, f, phi, sigma, alpha)
    fam = stopping_family(f, phi, sigma, alpha, t, node_norms=norms)
    idx = [domain.cell_id(r, k, m) for r, k, m in fam.members]
    mu_mass = math.fsum(mu_boxes[idx]) if idx else 0.0
    w_mass = math.fsum(w_boxes[idx]) if idx else 0.0
    bound = constant * w_mass**gamma
    return CarlesonMeasureLevelSet(
        constant, mu_mass, bound, mu_mass <= bound * (1.0 + 1e-9)
    )
