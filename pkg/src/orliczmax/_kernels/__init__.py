"""Kernel backend selection.

The compiled Cython extension is used when it imports; otherwise the numpy
kernels take over. Set ``ORLICZMAX_BACKEND=pure`` or ``=compiled`` to force a
backend (forcing ``compiled`` raises if the extension is missing).
"""

from __future__ import annotations

import os

from . import pure

_requested = os.environ.get("ORLICZMAX_BACKEND", "auto").lower()

_impl = pure
if _requested in ("auto", "compiled"):
    try:
        from . import _core as _compiled

        _impl = _compiled
    except ImportError:
        if _requested == "compiled":
            raise ImportError(
                "ORLICZMAX_BACKEND=compiled but the extension is not built; "
                "run `python setup.py build_ext --inplace`"
            )
elif _requested != "pure":
    raise ValueError(f"unknown ORLICZMAX_BACKEND {_requested!r}")

young_eval = _impl.young_eval
box_norms = _impl.box_norms
box_norms_generic = pure.box_norms_generic  # generic path has no compiled twin


def backend_name() -> str:
    return _impl.BACKEND


def backends() -> dict:
    """Both backends when available, for parity tests and benchmarks."""
    out = {"pure": pure}
    try:
        from . import _core as _compiled

        out["compiled"] = _compiled
    except ImportError:
        pass
    return out
