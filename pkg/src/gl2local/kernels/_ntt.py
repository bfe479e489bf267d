"""Exact integer convolution via number-theoretic transforms.

Inputs are integer weight vectors; the convolution is computed modulo several
NTT-friendly primes and recombined by CRT into exact Python ints whenever the
a-priori coefficient bound requires it. All butterflies run in vectorized
int64 numpy: values stay below 2^30, so products stay below 2^60.

The forward pass is decimation-in-frequency, the inverse decimation-in-time;
the pointwise product happens in bit-reversed order, so no permutation is
needed.
"""

from __future__ import annotations

import numpy as np

from ..errors import RangeExceeded

# (prime, primitive root); every prime supports transform length 2^23
_PRIMES: tuple[tuple[int, int], ...] = (
    (998244353, 3),  # 119 * 2^23 + 1
    (754974721, 11),  # 45 * 2^24 + 1
    (167772161, 3),  # 5 * 2^25 + 1
    (469762049, 3),  # 7 * 2^26 + 1
)
_MAX_N = 1 << 23

_table_cache: dict[tuple[int, int, bool], np.ndarray] = {}


def _pow_table(p: int, g: int, n: int, invert: bool) -> np.ndarray:
    """Powers w^0 .. w^(n/2 - 1) of the primitive n-th root of unity mod p."""
    key = (p, n, invert)
    got = _table_cache.get(key)
    if got is not None:
        return got
    w = pow(g, (p - 1) // n, p)
    if invert:
        w = pow(w, -1, p)
    half = n // 2
    t = np.zeros(half, dtype=np.int64)
    t[0] = 1
    size = 1
    while size < half:
        m = min(size, half - size)
        t[size : size + m] = t[:m] * pow(w, size, p) % p
        size += m
    _table_cache[key] = t
    return t


def _dif(a: np.ndarray, p: int, table: np.ndarray) -> None:
    """In-place forward transform, natural order in, bit-reversed out."""
    n = len(a)
    length = n
    while length >= 2:
        half = length // 2
        ws = table[:: n // length][:half]
        b = a.reshape(-1, length)
        lo = b[:, :half].copy()
        hi = b[:, half:]
        b[:, :half] = (lo + hi) % p
        b[:, half:] = (lo - hi) % p * ws % p
        length = half


def _dit(a: np.ndarray, p: int, inv_table: np.ndarray) -> None:
    """In-place inverse transform (up to 1/n), bit-reversed in, natural out."""
    n = len(a)
    length = 2
    while length <= n:
        half = length // 2
        ws = inv_table[:: n // length][:half]
        b = a.reshape(-1, length)
        hi = b[:, half:] * ws % p
        lo = b[:, :half].copy()
        b[:, :half] = (lo + hi) % p
        b[:, half:] = (lo - hi) % p
        length *= 2


def _mod_vec(a: np.ndarray, p: int) -> np.ndarray:
    if a.dtype == object:
        return (a % p).astype(np.int64)
    return a.astype(np.int64, copy=True) % p


def _conv_mod(a: np.ndarray, b: np.ndarray, p: int, g: int, n: int) -> np.ndarray:
    fa = np.zeros(n, dtype=np.int64)
    fa[: len(a)] = _mod_vec(a, p)
    fb = np.zeros(n, dtype=np.int64)
    fb[: len(b)] = _mod_vec(b, p)
    fwd = _pow_table(p, g, n, False)
    _dif(fa, p, fwd)
    _dif(fb, p, fwd)
    fc = fa * fb % p
    _dit(fc, p, _pow_table(p, g, n, True))
    return fc * pow(n, -1, p) % p


def _abs_stats(a: np.ndarray) -> tuple[int, int]:
    """(sum of |entries|, max |entry|) as exact Python ints."""
    if len(a) == 0:
        return 0, 0
    mags = np.abs(a.astype(object))
    return int(mags.sum()), int(mags.max())


def linear_convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact linear convolution of two integer vectors.

    Returns int64 when the coefficient bound certifies it fits, otherwise an
    object array of Python ints.
    """
    la, lb = len(a), len(b)
    if la == 0 or lb == 0:
        return np.zeros(0, dtype=np.int64)
    out_len = la + lb - 1
    n = 1 << (out_len - 1).bit_length()
    if n > _MAX_N:
        raise RangeExceeded(f"convolution length {out_len} exceeds NTT capacity {_MAX_N}")
    s1, m1 = _abs_stats(a)
    s2, m2 = _abs_stats(b)
    bound = min(s1 * m2, s2 * m1)
    need = 2 * bound + 1
    prod = 1
    k = 0
    while prod < need:
        if k == len(_PRIMES):
            raise RangeExceeded(f"coefficient bound {bound} exceeds CRT capacity")
        prod *= _PRIMES[k][0]
        k += 1
    res = [_conv_mod(a, b, p, g, n)[:out_len] for p, g in _PRIMES[:k]]
    return _crt_signed(res, [p for p, _ in _PRIMES[:k]], bound)


def _crt_signed(res: list[np.ndarray], primes: list[int], bound: int) -> np.ndarray:
    x = res[0]
    m = primes[0]
    for r, p in zip(res[1:], primes[1:]):
        inv = pow(m % p, -1, p)
        t = (r - x % p) % p * inv % p
        if m * (p - 1) + (m - 1) < (1 << 62) and x.dtype != object:
            x = x + m * t
        else:
            x = x.astype(object) + m * t.astype(object)
        m *= p
    # center into (-m/2, m/2); the bound guarantees this recovers the sign
    if x.dtype == object:
        out = np.where(x > m // 2, x - m, x)
        if bound < (1 << 62):
            out = out.astype(np.int64)
        return out
    return np.where(x > m // 2, x - m, x)


def cyclic_convolve(a: np.ndarray, b: np.ndarray, m: int) -> np.ndarray:
    """Exact cyclic convolution mod m of integer vectors of length m."""
    lin = linear_convolve(a, b)
    out = np.zeros(m, dtype=lin.dtype)
    for s in range(0, len(lin), m):
        seg = lin[s : s + m]
        out[: len(seg)] += seg
    return out
