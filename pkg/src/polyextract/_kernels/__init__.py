"""Hot numeric kernels with a compiled fast path.

The Cython extension `_core` is selected at import time when available;
otherwise the numpy implementations in `pure` take over. Both expose the
same two functions with identical semantics:

* ``rasterize_ring(xs, ys, width, height) -> uint8 (height, width) mask``
* ``lsa_solve(cost) -> int64 column index per row`` (requires rows <= cols)

`benchmarks/bench_kernels.py` compares the two backends.
"""

from . import pure

try:
    from . import _core

    _impl = _core
    HAVE_COMPILED = True
except ImportError:  # extension not built; numpy fallback
    _impl = pure
    HAVE_COMPILED = False

rasterize_ring = _impl.rasterize_ring
lsa_solve = _impl.lsa_solve


def active_backend():
    """Name of the backend selected at import: 'compiled' or 'pure'."""
    return "compiled" if HAVE_COMPILED else "pure"
