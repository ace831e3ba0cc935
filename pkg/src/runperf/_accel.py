"""JIT switch for the numeric hot kernels.

Every kernel in this package is written in plain NumPy-compatible Python and
decorated with ``njit`` imported from here.  By default the decorator is
numba's and the kernels are compiled.  Setting ``RUNPERF_DISABLE_JIT=1`` in
the environment turns the decorator into a no-op so the same code runs as
ordinary Python/NumPy: slower, but debuggable and free of compiler warm-up.

``benchmarks/bench_kernels.py`` runs the kernels both ways and checks the
two paths agree bit for bit.
"""

import os

_FLAG = os.environ.get("RUNPERF_DISABLE_JIT", "").strip().lower()
JIT_ENABLED = _FLAG not in ("1", "true", "yes")

if JIT_ENABLED:
    try:
        from numba import njit, prange
    except ImportError:  # pragma: no cover - numba is a hard dep, but stay usable
        JIT_ENABLED = False

if not JIT_ENABLED:

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def wrap(func):
            return func

        return wrap

    prange = range
