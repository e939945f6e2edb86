# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled twin of the pure kernels: per-box bisection in C.

Semantics match ``orliczmax._kernels.pure``: same bracket schedule, same
tolerances, same hoisted power factor (wm (f/fmax)^a precomputed per box,
each bisection step then costs one scalar scale for pure powers and one
log-factor pass per entry otherwise). Sums use Neumaier compensation, so
the backends agree to within the bisection tolerance.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport INFINITY, exp, fabs, isnan, log, pow

cnp.import_array()

BACKEND = "compiled"

cdef double _E = 2.718281828459045235360287
cdef double _TINY = 1e-300


cdef inline double _phi(double t, double coef, double a, double b, double kappa) nogil:
    cdef double u = kappa * t
    cdef double out
    if u <= 0.0:
        return 0.0
    out = coef * pow(u, a)
    if b != 0.0:
        out = out * pow(log(_E + u), b)
    return out


def young_eval(t, double coef, double a, double b, double kappa):
    """Closed-family Young function on an array (no validation)."""
    cdef cnp.ndarray[double, ndim=1] arr = np.ascontiguousarray(
        np.atleast_1d(t).ravel(), dtype=np.float64
    )
    cdef cnp.ndarray[double, ndim=1] out = np.empty_like(arr)
    cdef Py_ssize_t i, n = arr.shape[0]
    for i in range(n):
        out[i] = _phi(arr[i], coef, a, b, kappa)
    if np.ndim(t) == 0:
        return float(out[0])
    return out.reshape(np.shape(t))


cdef double _g_log_factor(
    const double[::1] lf,
    const double[::1] spa,
    Py_ssize_t lo,
    Py_ssize_t hi,
    double wtot,
    double llam,
    double scale,
    double b,
) nogil:
    """Per-entry pass for b != 0: scale * sum spa_i log(e + u_i)^b / wtot."""
    cdef double s = 0.0
    cdef double comp = 0.0
    cdef double v, u, t
    cdef Py_ssize_t i
    for i in range(lo, hi):
        if spa[i] == 0.0:
            continue
        u = exp(lf[i] - llam)
        if b == 1.0:
            v = spa[i] * log(_E + u)
        else:
            v = spa[i] * pow(log(_E + u), b)
        if isnan(v) or v == INFINITY:
            return INFINITY
        t = s + v
        if fabs(s) >= fabs(v):
            comp += (s - t) + v
        else:
            comp += (v - t) + s
        s = t
    v = scale * (s + comp) / wtot
    if isnan(v):
        return INFINITY
    return v


def box_norms(
    fv,
    wm,
    indptr,
    wtot,
    double coef,
    double a,
    double b,
    double kappa,
    double rtol=1e-10,
    int maxiter=200,
    bint validate=True,
):
    """Luxembourg norms for a batch of boxes in CSR layout (see pure twin)."""
    cdef const double[::1] fvv = np.ascontiguousarray(fv, dtype=np.float64)
    cdef const double[::1] wmv = np.ascontiguousarray(wm, dtype=np.float64)
    cdef const cnp.int64_t[::1] ip = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef const double[::1] wt = np.ascontiguousarray(wtot, dtype=np.float64)
    cdef Py_ssize_t nb = wt.shape[0]
    cdef Py_ssize_t n_ent = fvv.shape[0]
    cdef cnp.ndarray[double, ndim=1] out = np.zeros(nb, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] lf_arr = np.empty(n_ent, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] spa_arr = np.empty(n_ent, dtype=np.float64)
    cdef double[::1] ov = out
    cdef double[::1] lf = lf_arr
    cdef double[::1] spa = spa_arr
    cdef Py_ssize_t q, s0, s1, i, it
    cdef double fmax, lfm, ssum, comp, v, t, hi, lo, mid, g
    cdef bint factored = b == 0.0
    cdef Py_ssize_t bad = -1
    cdef double badval = 0.0
    cdef int badkind = 0

    for q in range(nb):
        if ip[q + 1] <= ip[q]:
            raise ValueError("empty box in batch")
        if wt[q] <= 0.0:
            raise ValueError("degenerate box: zero weight mass")

    with nogil:
        for i in range(n_ent):
            lf[i] = log(kappa * fvv[i]) if fvv[i] > 0.0 else -INFINITY
        for q in range(nb):
            s0 = ip[q]
            s1 = ip[q + 1]
            fmax = 0.0
            for i in range(s0, s1):
                if fvv[i] > fmax:
                    fmax = fvv[i]
            if fmax <= 0.0:
                ov[q] = 0.0
                continue
            lfm = log(kappa * fmax)
            # lam-free power factor wm (f/fmax)^a and its compensated sum
            ssum = 0.0
            comp = 0.0
            for i in range(s0, s1):
                if wmv[i] == 0.0 or fvv[i] <= 0.0:
                    spa[i] = 0.0
                    continue
                v = wmv[i] * exp(a * (lf[i] - lfm))
                spa[i] = v
                t = ssum + v
                if fabs(ssum) >= fabs(v):
                    comp += (ssum - t) + v
                else:
                    comp += (v - t) + ssum
                ssum = t
            ssum = ssum + comp

            hi = fmax
            for it in range(64):
                g = _g_of(lf, spa, s0, s1, wt[q], log(hi), coef, a, b,
                          factored, lfm, ssum)
                if g <= 1.0:
                    break
                hi = 2.0 * hi
            lo = hi / 2.0
            for it in range(1200):
                g = _g_of(lf, spa, s0, s1, wt[q], log(lo), coef, a, b,
                          factored, lfm, ssum)
                if g > 1.0:
                    break
                hi = lo
                lo = lo / 2.0
                if lo < _TINY:
                    hi = 0.0
                    break
            if hi <= 0.0:
                ov[q] = 0.0
                continue
            for it in range(maxiter):
                if (hi - lo) <= rtol * hi:
                    break
                mid = 0.5 * (lo + hi)
                g = _g_of(lf, spa, s0, s1, wt[q], log(mid), coef, a, b,
                          factored, lfm, ssum)
                if g <= 1.0:
                    hi = mid
                else:
                    lo = mid
            ov[q] = hi
            if validate:
                g = _g_of(lf, spa, s0, s1, wt[q], log(hi), coef, a, b,
                          factored, lfm, ssum)
                if g > 1.0 + 1e-9:
                    bad = q
                    badval = g
                    badkind = 1
                    break
                g = _g_of(lf, spa, s0, s1, wt[q], log(hi * (1.0 - 1e-6)),
                          coef, a, b, factored, lfm, ssum)
                if g <= 1.0 - 1e-9:
                    bad = q
                    badval = g
                    badkind = 2
                    break

    if bad >= 0:
        if badkind == 1:
            raise RuntimeError(f"norm post-check failed on box {bad}: G(norm) = {badval}")
        raise RuntimeError(
            f"norm post-check failed on box {bad}: G(norm*(1-1e-6)) = {badval} is not > 1"
        )
    return out


cdef inline double _g_of(
    const double[::1] lf,
    const double[::1] spa,
    Py_ssize_t s0,
    Py_ssize_t s1,
    double wtot,
    double llam,
    double coef,
    double a,
    double b,
    bint factored,
    double lfm,
    double ssum,
) nogil:
    cdef double scale = coef * exp(a * (lfm - llam))
    if factored:
        return scale * ssum / wtot
    return _g_log_factor(lf, spa, s0, s1, wtot, llam, scale, b)
