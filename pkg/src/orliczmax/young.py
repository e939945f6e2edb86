"""Young functions, complementary functions, and the B_p integral test.

Built-in families (all argument-rescaled so phi(1) = 1 exactly):

* ``power``:      phi(t) = t^a, a >= 1
* ``power_log``:  phi(t) = (kappa t)^a log(e + kappa t)^b, kappa solving
                  phi(1) = 1
* ``table``:      piecewise-linear convex interpolant through given points,
                  extended linearly past the last point

Complementary (conjugate) functions are exact Legendre transforms and are NOT
renormalized: the inverse-product sandwich t <= phi^{-1}(t) psi^{-1}(t) <= 2t
requires the raw transform. Conjugates of power-type functions are closed
form; other conjugates evaluate a memoized numeric supremum (the memo is the
only mutable state and is lock-protected; everything else is immutable).
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

E = math.e

_CLOSED = "closed"  # coef * (kappa t)^a * log(e + kappa t)^b
_TABLE = "table"
_CONJUGATE = "conjugate"  # numeric Legendre transform of .base
_LINEAR_CONJ = "linear_conj"  # conjugate of a linear function: 0 then +inf


@dataclass(frozen=True)
class YoungFunction:
    """Immutable Young function; all operations are pure."""

    kind: str
    family: str
    a: float = 1.0
    b: float = 0.0
    coef: float = 1.0
    kappa: float = 1.0
    slope: float = 0.0  # linear_conj threshold
    base: "YoungFunction | None" = None
    table_t: tuple = ()
    table_y: tuple = ()
    normalized: bool = True
    _memo: dict = field(default_factory=dict, compare=False, repr=False)
    _lock: threading.Lock = field(
        default_factory=threading.Lock, compare=False, repr=False
    )

    # -- constructors -------------------------------------------------------

    @staticmethod
    def power(a: float) -> "YoungFunction":
        if a < 1.0:
            raise ValueError("power exponent must be >= 1")
        return YoungFunction(kind=_CLOSED, family="power", a=float(a))

    @staticmethod
    def power_log(a: float, b: float) -> "YoungFunction":
        if a < 1.0 or b < 0.0:
            raise ValueError("need a >= 1 and b >= 0")
        if b == 0.0:
            return YoungFunction.power(a)
        # solve (kappa)^a log(e + kappa)^b = 1 for the argument rescale
        lo, hi = 0.0, 1.0
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid**a * math.log(E + mid) ** b < 1.0:
                lo = mid
            else:
                hi = mid
        return YoungFunction(
            kind=_CLOSED, family="power_log", a=float(a), b=float(b), kappa=hi
        )

    @staticmethod
    def from_table(points) -> "YoungFunction":
        pts = sorted((float(t), float(y)) for t, y in points)
        if pts[0] != (0.0, 0.0):
            pts.insert(0, (0.0, 0.0))
        ts = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        slopes = []
        for i in range(1, len(ts)):
            if ts[i] <= ts[i - 1]:
                raise ValueError("table abscissae must be strictly increasing")
            if ys[i] < ys[i - 1]:
                raise ValueError("table must be nondecreasing")
            slopes.append((ys[i] - ys[i - 1]) / (ts[i] - ts[i - 1]))
        for s0, s1 in zip(slopes, slopes[1:]):
            if s1 < s0 - 1e-12 * max(1.0, s0):
                raise ValueError("table must be convex (nondecreasing slopes)")
        if slopes[-1] <= 0.0:
            raise ValueError("table must eventually increase")
        # argument rescale so the interpolant hits 1 at argument 1
        kappa = None
        for i in range(1, len(ts)):
            if ys[i] >= 1.0:
                kappa = ts[i - 1] + (1.0 - ys[i - 1]) / slopes[i - 1]
                break
        if kappa is None:
            kappa = ts[-1] + (1.0 - ys[-1]) / slopes[-1]
        return YoungFunction(
            kind=_TABLE,
            family="table",
            kappa=1.0,
            table_t=tuple(t / kappa for t in ts),
            table_y=tuple(ys),
        )

    @staticmethod
    def from_spec(spec: dict) -> "YoungFunction":
        fam = spec.get("family")
        if fam == "power":
            return YoungFunction.power(spec["a"])
        if fam == "power_log":
            return YoungFunction.power_log(spec["a"], spec["b"])
        if fam == "table":
            return YoungFunction.from_table(spec["points"])
        if fam == "conjugate_of":
            return conjugate(YoungFunction.from_spec(spec["base"]))
        raise ValueError(f"unknown Young-function family {fam!r}")

    def spec(self) -> dict:
        if self.family == "power":
            return {"family": "power", "a": self.a}
        if self.family == "power_log":
            return {"family": "power_log", "a": self.a, "b": self.b}
        if self.family == "table":
            return {
                "family": "table",
                "points": [[t, y] for t, y in zip(self.table_t, self.table_y)],
            }
        if self.base is not None:
            return {"family": "conjugate_of", "base": self.base.spec()}
        return {"family": self.family, "a": self.a, "b": self.b, "coef": self.coef}

    # -- evaluation ---------------------------------------------------------

    def closed_params(self):
        """(coef, a, b, kappa) when the kernel-friendly closed form applies."""
        if self.kind == _CLOSED:
            return (self.coef, self.a, self.b, self.kappa)
        return None

    def __call__(self, t):
        return self.eval(t)

    def eval(self, t):
        """phi(t) for a scalar or array argument; domain [0, inf)."""
        arr = np.asarray(t, dtype=np.float64)
        if np.any(~np.isfinite(arr)) or np.any(arr < 0.0):
            raise ValueError("Young function argument must be finite and >= 0")
        out = self._eval_array(arr)
        if np.ndim(t) == 0:
            return float(out)
        return out

    def _eval_array(self, arr: np.ndarray) -> np.ndarray:
        if self.kind == _CLOSED:
            u = self.kappa * arr
            with np.errstate(divide="ignore", over="ignore"):
                out = self.coef * u**self.a
                if self.b != 0.0:
                    out = out * np.log(E + u) ** self.b
            return np.where(u == 0.0, 0.0, out)
        if self.kind == _TABLE:
            ts = np.asarray(self.table_t)
            ys = np.asarray(self.table_y)
            out = np.interp(arr, ts, ys)
            tail = arr > ts[-1]
            if np.any(tail):
                last_slope = (ys[-1] - ys[-2]) / (ts[-1] - ts[-2])
                out = np.where(tail, ys[-1] + last_slope * (arr - ts[-1]), out)
            return out
        if self.kind == _LINEAR_CONJ:
            return np.where(arr <= self.slope * (1.0 + 1e-15), 0.0, np.inf)
        if self.kind == _CONJUGATE:
            return self._conjugate_eval(arr)
        raise AssertionError(f"unhandled kind {self.kind}")

    def _conjugate_eval(self, s: np.ndarray) -> np.ndarray:
        flat = np.atleast_1d(s).astype(np.float64)
        out = np.empty_like(flat)
        todo = []
        with self._lock:
            for i, v in enumerate(flat):
                got = self._memo.get(float(v))
                if got is None:
                    todo.append(i)
                else:
                    out[i] = got
        if todo:
            vals = _legendre_sup(self.base, flat[todo])
            out[todo] = vals
            with self._lock:
                for i, v in zip(todo, vals):
                    self._memo[float(flat[i])] = float(v)
        return out.reshape(np.shape(s))


def _legendre_sup(base: YoungFunction, s: np.ndarray) -> np.ndarray:
    """sup_t {s t - base(t)} by bracket growth plus ternary search.

    The objective is concave in t; the bracket grows until the objective
    decreases past the top, and diverging transforms return +inf.
    """
    s = np.asarray(s, dtype=np.float64)
    hi = np.ones_like(s)
    for _ in range(600):
        g_hi = s * hi - base.eval(hi)
        g_2hi = s * (2.0 * hi) - base.eval(2.0 * hi)
        grow = g_2hi >= g_hi
        if not np.any(grow):
            break
        hi = np.where(grow, 2.0 * hi, hi)
        if np.all(hi[grow] > 1e150):
            break
    diverged = hi > 1e150
    # growth stopped because g decreased across [hi, 2 hi]; by concavity the
    # maximizer lies below 2 hi, which is the valid ternary bracket top
    hi = 2.0 * hi
    lo = np.zeros_like(s)
    for _ in range(90):
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        g1 = s * m1 - base.eval(m1)
        g2 = s * m2 - base.eval(m2)
        take_hi = g1 < g2
        lo = np.where(take_hi, m1, lo)
        hi = np.where(take_hi, hi, m2)
    mid = 0.5 * (lo + hi)
    val = np.maximum(s * mid - base.eval(mid), 0.0)
    return np.where(diverged, np.inf, val)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def eval(phi: YoungFunction, t):  # noqa: A001 - spec operation name
    return phi.eval(t)


def inverse(phi: YoungFunction, y: float) -> float:
    """Right-continuous generalized inverse sup{t : phi(t) <= y}.

    Monotone bisection with geometric bracket growth; |phi(t) - y| is pushed
    below 1e-12 * max(1, y) wherever phi is continuous through y.
    """
    if not math.isfinite(y) or y < 0.0:
        raise ValueError("inverse argument must be finite and >= 0")
    return float(inverse_grid(phi, np.asarray([y]))[0])


def inverse_grid(phi: YoungFunction, ys) -> np.ndarray:
    """Vectorized generalized inverse over an array of targets."""
    ys = np.asarray(ys, dtype=np.float64)
    if np.any(~np.isfinite(ys)) or np.any(ys < 0.0):
        raise ValueError("inverse argument must be finite and >= 0")
    hi = np.ones_like(ys)
    for _ in range(1100):
        vals = np.atleast_1d(np.asarray(phi.eval(hi)))
        grow = vals <= ys
        if not np.any(grow):
            break
        hi = np.where(grow, np.minimum(2.0 * hi, 1e300), hi)
        if np.all(hi[grow] >= 1e300):
            break
    lo = np.zeros_like(ys)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        vals = np.atleast_1d(np.asarray(phi.eval(mid)))
        le = vals <= ys
        lo = np.where(le, mid, lo)
        hi = np.where(le, hi, mid)
        if np.all(hi - lo <= 1e-15 * np.maximum(hi, 1.0)):
            break
    return lo


def conjugate(phi: YoungFunction) -> YoungFunction:
    """Complementary function psi(s) = sup_t {ts - phi(t)}.

    Closed form for power-type functions; numeric (memoized) otherwise.
    """
    params = phi.closed_params()
    if params is not None and phi.b == 0.0:
        coef, a, _, kappa = params
        if a == 1.0:
            return YoungFunction(
                kind=_LINEAR_CONJ,
                family="conjugate",
                slope=coef * kappa,
                base=phi,
                normalized=False,
            )
        a_conj = a / (a - 1.0)
        new_coef = (a - 1.0) * a**-a_conj * coef ** (1.0 - a_conj) * kappa**-a_conj
        return YoungFunction(
            kind=_CLOSED,
            family="conjugate",
            a=a_conj,
            coef=new_coef,
            base=phi,
            normalized=False,
        )
    return YoungFunction(kind=_CONJUGATE, family="conjugate", base=phi, normalized=False)


def delta2_constant(
    phi: YoungFunction, t_max: float = 1e6, samples: int | None = None
) -> float:
    """sup of phi(2t)/phi(t) over a log-spaced grid in (0, t_max].

    The grid default is 256 points per decade over twelve decades below
    t_max; the best grid point is refined by golden-section. Returns +inf
    when the ratio is unbounded on the grid (doubling fails).
    """
    if t_max <= 0.0:
        raise ValueError("t_max must be positive")
    decades = 12
    if samples is None:
        samples = 256 * decades
    if samples < 2:
        raise ValueError("need at least two sample points")
    grid = np.logspace(math.log10(t_max) - decades, math.log10(t_max), samples)
    num = phi.eval(2.0 * grid)
    den = phi.eval(grid)
    ok = den > 0.0
    if np.any(~ok & (np.asarray(num) > 0.0)):
        return float("inf")
    ratios = np.asarray(num)[ok] / np.asarray(den)[ok]
    if np.any(np.isinf(ratios)):
        return float("inf")
    gpts = grid[ok]
    i = int(np.argmax(ratios))
    lo = gpts[max(i - 1, 0)]
    hi = gpts[min(i + 1, len(gpts) - 1)]

    def ratio(t: float) -> float:
        d = float(phi.eval(t))
        return float(phi.eval(2.0 * t)) / d if d > 0.0 else 0.0

    gr = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - gr * (hi - lo)
    x2 = lo + gr * (hi - lo)
    f1, f2 = ratio(x1), ratio(x2)
    for _ in range(120):
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + gr * (hi - lo)
            f2 = ratio(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - gr * (hi - lo)
            f1 = ratio(x1)
        if hi - lo <= 1e-12 * hi:
            break
    return max(float(np.max(ratios)), f1, f2)


@dataclass(frozen=True)
class BpResult:
    integral: float  # +inf marks divergence
    member: bool
    note: str = ""


def _adaptive_simpson(f: Callable[[float], float], a: float, b: float, tol: float) -> float:
    """Adaptive Simpson on [a, b] with absolute tolerance tol."""

    def simpson(x0, x2, f0, f1, f2):
        return (x2 - x0) / 6.0 * (f0 + 4.0 * f1 + f2)

    def recurse(x0, x2, f0, f2, fm, whole, tol, depth):
        xm = 0.5 * (x0 + x2)
        xl = 0.5 * (x0 + xm)
        xr = 0.5 * (xm + x2)
        fl, fr = f(xl), f(xr)
        left = simpson(x0, xm, f0, fl, fm)
        right = simpson(xm, x2, fm, fr, f2)
        if depth <= 0 or abs(left + right - whole) <= 15.0 * tol:
            return left + right + (left + right - whole) / 15.0
        return recurse(x0, xm, f0, fm, fl, left, tol / 2.0, depth - 1) + recurse(
            xm, x2, fm, f2, fr, right, tol / 2.0, depth - 1
        )

    fa, fb = f(a), f(b)
    fm = f(0.5 * (a + b))
    whole = simpson(a, b, fa, fm, fb)
    return recurse(a, b, fa, fb, fm, whole, tol, 48)


def _bp_quadrature(phi: YoungFunction, p: float, c: float, T: float) -> float:
    """Integral of phi(t)/t^p dt/t over [c, T], evaluated in log space."""
    if T <= c:
        return 0.0

    def integrand(x: float) -> float:
        t = math.exp(x)
        return float(phi.eval(t)) * math.exp(-p * x)

    return _adaptive_simpson(integrand, math.log(c), math.log(T), 1e-12)


def bp_check(phi: YoungFunction, p: float, c: float = 1.0) -> BpResult:
    """Integral test for the strong-type class: finite integral of
    phi(t)/t^p dt/t over [c, inf) plus a finite doubling constant.

    Power-type functions are closed form (finite iff exponent < p); the
    log-augmented family uses adaptive quadrature plus an analytic power
    tail bound below 1e-10; tables use their exact linear tail.
    """
    if p <= 1.0:
        raise ValueError("p must exceed 1")
    if c <= 0.0:
        raise ValueError("c must be positive")
    k2 = delta2_constant(phi)
    doubles = math.isfinite(k2)

    if phi.kind == _LINEAR_CONJ:
        # vanishes below the slope, +inf above: integral diverges
        return BpResult(float("inf"), False, "degenerate conjugate of a linear function")

    if phi.kind == _CLOSED and phi.b == 0.0:
        if phi.a >= p:
            return BpResult(float("inf"), False)
        val = phi.coef * phi.kappa**phi.a * c ** (phi.a - p) / (p - phi.a)
        return BpResult(val, doubles)

    if phi.kind == _CLOSED:
        a, b, kappa = phi.a, phi.b, phi.kappa
        if a >= p:
            return BpResult(float("inf"), False)
        delta = 0.5 * (p - a)
        dprime = delta / b
        T = max(c, (math.exp(1.0 / dprime) - E) / kappa, 1e3)
        for _ in range(64):
            tail = (
                phi.coef
                * kappa**a
                * math.log(E + kappa * T) ** b
                * T ** (a - p)
                / (p - a - delta)
            )
            if tail < 1e-10:
                break
            T *= 4.0
        val = _bp_quadrature(phi, p, c, T)
        return BpResult(val, doubles)

    if phi.kind == _TABLE:
        ts = phi.table_t
        ys = phi.table_y
        t_last = ts[-1]
        sl = (ys[-1] - ys[-2]) / (ts[-1] - ts[-2])
        start = max(c, t_last)
        head = _bp_quadrature(phi, p, c, start) if start > c else 0.0
        y0 = float(phi.eval(start))
        tail = (y0 - sl * start) * start**-p / p + sl * start ** (1.0 - p) / (p - 1.0)
        return BpResult(head + tail, doubles)

    # numeric conjugate: growth exponent from the base when known
    base = phi.base
    bp = base.closed_params() if base is not None else None
    if bp is not None:
        _, a, b, kappa = bp
        a_conj = a / (a - 1.0) if a > 1.0 else float("inf")
        if a_conj > p:
            return BpResult(float("inf"), False)
        if a_conj == p:
            member = b > (a - 1.0)
            val = _bp_quadrature(phi, p, c, 1e8)
            return BpResult(val if member else float("inf"), member and doubles,
                            "borderline exponent; integral truncated at 1e8")
        c1 = base.coef * kappa**a * math.log(E + kappa) ** b
        coef2 = (a - 1.0) * a ** (-a / (a - 1.0)) * c1 ** (1.0 - a / (a - 1.0))
        T = max(c, 1e3)
        for _ in range(64):
            tail = T ** (1.0 - p) / (p - 1.0) + coef2 * T ** (a_conj - p) / (p - a_conj)
            if tail < 1e-10:
                break
            T *= 4.0
        val = _bp_quadrature(phi, p, c, T)
        return BpResult(val, doubles)
    val = _bp_quadrature(phi, p, c, 1e8)
    return BpResult(val, doubles, "generic numeric integral truncated at 1e8")


def bp_conjugate_integral(phi: YoungFunction, p: float, c: float = 1.0) -> float:
    """Dual-side integral of (t^{p'} / psi(t))^{p-1} dt/t over [c, inf) for
    psi the complementary function; closed form for power-type phi."""
    if p <= 1.0:
        raise ValueError("p must exceed 1")
    psi = conjugate(phi)
    params = psi.closed_params()
    p_conj = p / (p - 1.0)
    if params is not None and psi.b == 0.0:
        coef, m, _, kappa = params
        # integrand = (t^{p'} / (coef (kappa t)^m))^{p-1} / t
        expo = (p_conj - m) * (p - 1.0)
        pref = (coef * kappa**m) ** (1.0 - p)
        if expo >= 0.0:
            return float("inf")
        return pref * c**expo / -expo

    def integrand(x: float) -> float:
        t = math.exp(x)
        ps = float(psi.eval(t))
        if not math.isfinite(ps) or ps <= 0.0:
            return 0.0
        return (t**p_conj / ps) ** (p - 1.0)

    return _adaptive_simpson(integrand, math.log(c), math.log(1e8), 1e-10)
