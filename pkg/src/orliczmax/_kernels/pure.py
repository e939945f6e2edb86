"""Pure numpy implementations of the hot kernels.

These are the reference semantics for the compiled twin in ``_core.pyx``:
lockstep bisection for batches of box Luxembourg norms. Each box's iterate
sequence is identical to a sequential per-box bisection; running them in
lockstep only batches the arithmetic.

The closed family is coef * (kappa t)^a * log(e + kappa t)^b. For b = 0 the
box average factors as G(lam) = coef (fmax/lam)^a S / W with the lam-free sum
S = sum wm (f/fmax)^a, so each bisection step costs O(#boxes); the log factor
(b != 0) needs a per-entry pass per step.
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "pure"

_E = math.e
_TINY = 1e-300


def young_eval(t, coef: float, a: float, b: float, kappa: float) -> np.ndarray:
    """Closed-family Young function coef * (kappa t)^a * log(e + kappa t)^b.

    No argument validation: infinities propagate (used inside bisection).
    """
    u = kappa * np.asarray(t, dtype=np.float64)
    with np.errstate(over="ignore", invalid="ignore"):
        out = coef * u**a
        if b != 0.0:
            out = out * np.log(_E + u) ** b
    return np.where(u == 0.0, 0.0, out)


class _BoxAverages:
    """G(lambda) per box for the bisection.

    The lam-free power factor wm (f/fmax)^a is hoisted out of the loop; the
    per-step work is one scalar scale per box for b = 0 and one log-factor
    pass per entry otherwise (with the power skipped at b = 1).
    """

    def __init__(self, fv, wm, starts, box_of, wtot, coef, a, b, kappa):
        self.starts = starts
        self.box_of = box_of
        self.wtot = wtot
        self.coef = coef
        self.a = a
        self.b = b
        with np.errstate(divide="ignore"):
            self.lf = np.log(kappa * fv)
        fmax = np.maximum.reduceat(fv, starts)
        self.fmax = fmax
        with np.errstate(divide="ignore"):
            self.lfm = np.where(fmax > 0.0, np.log(kappa * fmax), 0.0)
        with np.errstate(invalid="ignore"):
            pw = wm * np.exp(a * (self.lf - self.lfm[box_of]))
        self.power_part = np.where(wm == 0.0, 0.0, pw)
        self.scaled_sum = np.add.reduceat(self.power_part, starts)

    def __call__(self, lam: np.ndarray) -> np.ndarray:
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            llam = np.log(lam)
            scale = self.coef * np.exp(self.a * (self.lfm - llam))
            if self.b == 0.0:
                return scale * self.scaled_sum / self.wtot
            u = np.exp(self.lf - llam[self.box_of])
            logs = np.log(_E + u)
            if self.b != 1.0:
                logs = logs**self.b
            vals = self.power_part * logs
            vals = np.where(self.power_part == 0.0, 0.0, vals)
            sums = np.add.reduceat(vals, self.starts)
            out = scale * sums / self.wtot
            return np.where(np.isnan(out), np.inf, out)


def _bisect_batch(G, fmax, wtot, rtol, maxiter, validate):
    nb = len(wtot)
    norms = np.zeros(nb)
    active = fmax > 0.0
    if not np.any(active):
        return norms

    hi = np.where(active, fmax, 1.0)
    # phi(1) <= 1 makes G(fmax) <= 1 for normalized families; grow defensively
    for _ in range(64):
        g = G(hi)
        bad = active & (g > 1.0)
        if not np.any(bad):
            break
        hi = np.where(bad, 2.0 * hi, hi)

    lo = hi / 2.0
    pending = active.copy()
    dead = np.zeros(nb, dtype=bool)
    for _ in range(1200):
        if not np.any(pending):
            break
        g = G(np.where(pending, lo, 1.0))
        below = pending & (g <= 1.0)
        hi = np.where(below, lo, hi)
        lo = np.where(below, lo / 2.0, lo)
        under = below & (lo < _TINY)
        dead |= under
        pending = below & ~under

    bracketed = active & ~dead
    for _ in range(maxiter):
        todo = bracketed & ((hi - lo) > rtol * hi)
        if not np.any(todo):
            break
        mid = 0.5 * (lo + hi)
        g = G(np.where(todo, mid, 1.0))
        le = g <= 1.0
        hi = np.where(todo & le, mid, hi)
        lo = np.where(todo & ~le, mid, lo)

    norms = np.where(bracketed, hi, 0.0)

    if validate:
        pos = norms > 0.0
        if np.any(pos):
            g1 = G(np.where(pos, norms, 1.0))
            if np.any(pos & (g1 > 1.0 + 1e-9)):
                i = int(np.argmax(pos & (g1 > 1.0 + 1e-9)))
                raise RuntimeError(
                    f"norm post-check failed on box {i}: G(norm) = {g1[i]}"
                )
            g2 = G(np.where(pos, norms * (1.0 - 1e-6), 1.0))
            if np.any(pos & (g2 <= 1.0 - 1e-9)):
                i = int(np.argmax(pos & (g2 <= 1.0 - 1e-9)))
                raise RuntimeError(
                    f"norm post-check failed on box {i}: "
                    f"G(norm*(1-1e-6)) = {g2[i]} is not > 1"
                )
    return norms


def _check_csr(fv, wm, indptr, wtot):
    fv = np.ascontiguousarray(fv, dtype=np.float64)
    wm = np.ascontiguousarray(wm, dtype=np.float64)
    indptr = np.ascontiguousarray(indptr, dtype=np.int64)
    wtot = np.ascontiguousarray(wtot, dtype=np.float64)
    lens = np.diff(indptr)
    if np.any(lens <= 0):
        raise ValueError("empty box in batch")
    if np.any(wtot <= 0.0):
        raise ValueError("degenerate box: zero weight mass")
    box_of = np.repeat(np.arange(len(wtot), dtype=np.int64), lens)
    return fv, wm, indptr, wtot, box_of


def box_norms(
    fv,
    wm,
    indptr,
    wtot,
    coef: float,
    a: float,
    b: float,
    kappa: float,
    rtol: float = 1e-10,
    maxiter: int = 200,
    validate: bool = True,
) -> np.ndarray:
    """Luxembourg norms for a batch of boxes in CSR layout.

    fv: per-entry function value, wm: per-entry weight mass, indptr: box
    boundaries, wtot: per-box total weight mass (must be positive). The norm
    of box q is inf{lam > 0 : mean of phi(f/lam) against the box weight <= 1}
    found by bracketed bisection to relative tolerance rtol.
    """
    fv, wm, indptr, wtot, box_of = _check_csr(fv, wm, indptr, wtot)
    starts = indptr[:-1]
    G = _BoxAverages(fv, wm, starts, box_of, wtot, coef, a, b, kappa)
    return _bisect_batch(G, G.fmax, wtot, rtol, maxiter, validate)


def box_norms_generic(
    phi_eval,
    fv,
    wm,
    indptr,
    wtot,
    rtol: float = 1e-10,
    maxiter: int = 200,
    validate: bool = True,
) -> np.ndarray:
    """Same bisection with an arbitrary vectorized Young function.

    Used for families without a kernel-friendly closed form (tables and
    numeric conjugates); exists only on the pure backend.
    """
    fv, wm, indptr, wtot, box_of = _check_csr(fv, wm, indptr, wtot)
    starts = indptr[:-1]

    def G(lam):
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            x = fv / lam[box_of]
            x = np.where(np.isfinite(x), x, 1e300)
            vals = np.asarray(phi_eval(x), dtype=np.float64) * wm
            vals = np.where(wm == 0.0, 0.0, vals)
            vals = np.where(np.isnan(vals), np.inf, vals)
            return np.add.reduceat(vals, starts) / wtot

    fmax = np.maximum.reduceat(fv, starts)
    return _bisect_batch(G, fmax, wtot, rtol, maxiter, validate)
