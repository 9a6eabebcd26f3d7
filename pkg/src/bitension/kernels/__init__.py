"""Backend selection for the pointwise field kernels.

The compiled extension is used when it imports; setting
``BITENSION_BACKEND=python`` forces the numpy reference implementation.
Both expose the same functions, wrapped here to accept broadcastable input.
"""

from __future__ import annotations

import os

import numpy as np

from . import _pykernel

try:
    from . import _ckernel
except ImportError:  # extension not built
    _ckernel = None

BACKENDS = ("python",) + (("compiled",) if _ckernel is not None else ())


def _default_backend() -> str:
    wanted = os.environ.get("BITENSION_BACKEND", "").strip().lower()
    if wanted == "python" or _ckernel is None:
        return "python"
    return "compiled"


BACKEND = _default_backend()


def _flat(*arrays):
    b = np.broadcast_arrays(*[np.asarray(a, dtype=float) for a in arrays])
    shape = b[0].shape
    return shape, [np.ascontiguousarray(x, dtype=float).ravel() for x in b]


def _shape(shape, outs):
    return tuple(np.asarray(o).reshape(shape) for o in outs)


def _module(backend):
    backend = backend or BACKEND
    if backend == "compiled":
        if _ckernel is None:
            raise RuntimeError("compiled kernels are not available")
        return _ckernel
    if backend != "python":
        raise ValueError(f"unknown backend {backend!r}")
    return _pykernel


def tension(p, s, l, c, k, backend=None):
    """``(x, y)`` from jets ``p = (ρ, ρ', ρ'')``, ``s = (σ, σ')``, ``l = (λ, λ')``."""
    shape, (p0, p1, p2, s0, s1, l0, l1) = _flat(*p[:3], *s[:2], *l[:2])
    mod = _module(backend)
    return _shape(shape, mod.tension(p0, p1, p2, s0, s1, l0, l1, float(c), float(k)))


def residual_simplified(p, s, l, c, k, backend=None):
    """``(x, y, res1, res2, |x|, |y|, |res1|, |res2|)``; the last four are magnitudes."""
    shape, flat = _flat(*p[:5], *s[:4], *l[:4])
    mod = _module(backend)
    return _shape(shape, mod.residual_simplified(*flat, float(c), float(k)))


def residual_termsum(p, s, l, c, k, backend=None):
    """``(res1, res2)`` as the sum of the individual coordinate contributions."""
    shape, flat = _flat(*p[:5], *s[:4], *l[:4])
    mod = _module(backend)
    return _shape(shape, mod.residual_termsum(*flat, float(c), float(k)))


def termsum_terms(p, s, l, c, k):
    shape, flat = _flat(*p[:5], *s[:4], *l[:4])
    terms = _pykernel.termsum_terms(*flat, float(c), float(k))
    return {name: v.reshape(shape) for name, v in terms.items()}


def obstruction(a, k, a1, r, backend=None):
    shape, (rr,) = _flat(r)
    mod = _module(backend)
    return _shape(shape, mod.obstruction(float(a), float(k), float(a1), rr))
