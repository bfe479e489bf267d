"""Hot integer kernels with a compiled core and a pure-numpy fallback.

The compiled extension is optional; whichever twin loads, the results are
bit-identical. Set GL2LOCAL_NO_EXT=1 to force the pure backend.
"""

from __future__ import annotations

import os

import numpy as np

from ..errors import RangeExceeded
from ._ntt import cyclic_convolve as ntt_cyclic_convolve
from ._ntt import linear_convolve

_backend = "pure"
if not os.environ.get("GL2LOCAL_NO_EXT"):
    try:
        from . import _ckernels as _impl

        _backend = "compiled"
    except ImportError:
        from . import _pykernels as _impl
else:
    from . import _pykernels as _impl

accumulate = _impl.accumulate
outer_conv = _impl.outer_conv
char_sum_block = _impl.char_sum_block


def backend() -> str:
    return _backend


# Pair blocks beyond this go to the NTT path instead of the outer kernel.
_OUTER_OPS_MAX = 1 << 26
_INT64_SAFE = 1 << 62


def _as_int64(v: np.ndarray) -> np.ndarray:
    return v if v.dtype == np.int64 else v.astype(np.int64)


def convolve_counts(v1: np.ndarray, v2: np.ndarray) -> np.ndarray:
    """Exact cyclic convolution of two length-m integer count vectors.

    Sparse inputs go through the pairwise outer kernel when the operation
    count and an int64 overflow bound both allow it; everything else goes
    through the CRT-checked NTT.
    """
    m = len(v1)
    if len(v2) != m:
        raise RangeExceeded(f"length mismatch {len(v1)} vs {len(v2)}")
    if v1.dtype == np.int64 and v2.dtype == np.int64:
        nz1 = np.nonzero(v1)[0]
        nz2 = np.nonzero(v2)[0]
        n1, n2 = len(nz1), len(nz2)
        if n1 == 0 or n2 == 0:
            return np.zeros(m, dtype=np.int64)
        if n1 * n2 <= _OUTER_OPS_MAX:
            w1 = v1[nz1]
            w2 = v2[nz2]
            peak = min(n1, n2) * int(np.abs(w1).max()) * int(np.abs(w2).max())
            if peak < _INT64_SAFE:
                return outer_conv(_as_int64(nz1), w1, _as_int64(nz2), w2, m, 1)
    return ntt_cyclic_convolve(v1, v2, m)


__all__ = [
    "accumulate",
    "outer_conv",
    "char_sum_block",
    "backend",
    "convolve_counts",
    "linear_convolve",
    "ntt_cyclic_convolve",
]
