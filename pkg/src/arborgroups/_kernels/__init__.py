"""Backend selection for the enumeration hot loops.

Two interchangeable implementations of the closure BFS and the exhaustive
predicate counter:

* ``numba_backend`` — compiled tight loops (default when numba imports);
* ``numpy_backend`` — vectorized chunk-at-a-time fallback.

Set ``ARBOR_BACKEND=numpy`` or ``ARBOR_BACKEND=numba`` to force one.
"""

import os

_requested = os.environ.get("ARBOR_BACKEND", "").strip().lower()
if _requested not in ("", "numba", "numpy"):
    raise ValueError(
        f"ARBOR_BACKEND={_requested!r} not understood; use 'numba' or 'numpy'"
    )

if _requested == "numpy":
    from . import numpy_backend as backend

    HAS_NUMBA = False
elif _requested == "numba":
    from . import numba_backend as backend

    HAS_NUMBA = True
else:
    try:
        from . import numba_backend as backend

        HAS_NUMBA = True
    except ImportError:
        from . import numpy_backend as backend

        HAS_NUMBA = False

BACKEND_NAME = "numba" if HAS_NUMBA else "numpy"

closure_count = backend.closure_count
count_matching = backend.count_matching
