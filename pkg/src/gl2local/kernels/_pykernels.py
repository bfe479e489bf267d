"""Pure-numpy hot kernels; drop-in twins of the compiled versions.

All three kernels take int64 arrays and return exact int64 counts. Weighted
scatter goes through np.add.at (np.bincount would coerce weights to float64).
"""

from __future__ import annotations

import numpy as np

_BLOCK = 1 << 22


def accumulate(exps: np.ndarray, weights: np.ndarray, m: int) -> np.ndarray:
    """out[exps[i] mod m] += weights[i]."""
    out = np.zeros(m, dtype=np.int64)
    np.add.at(out, exps % m, weights)
    return out


def outer_conv(
    e1: np.ndarray,
    w1: np.ndarray,
    e2: np.ndarray,
    w2: np.ndarray,
    m: int,
    sign2: int,
) -> np.ndarray:
    """out[(e1[i] + sign2*e2[j]) mod m] += w1[i]*w2[j] over all pairs.

    Blocked over rows of e1 so the pair matrices stay around 32 MiB.
    """
    out = np.zeros(m, dtype=np.int64)
    n1, n2 = len(e1), len(e2)
    if n1 == 0 or n2 == 0:
        return out
    s2 = e2 if sign2 >= 0 else -e2
    rows = max(1, _BLOCK // n2)
    for i in range(0, n1, rows):
        eb = (e1[i : i + rows, None] + s2[None, :]) % m
        wb = w1[i : i + rows, None] * w2[None, :]
        np.add.at(out, eb, wb)
    return out


def char_sum_block(
    base: np.ndarray, step: np.ndarray, ts: np.ndarray, m: int
) -> np.ndarray:
    """Row r counts (base[i] - ts[r]*step[i]) mod m over i."""
    out = np.empty((len(ts), m), dtype=np.int64)
    for r, t in enumerate(ts):
        out[r] = np.bincount((base - int(t) * step) % m, minlength=m)
    return out
