"""Integer-weighted sums of M-th roots of unity as dense count vectors.

A ZetaSum holds w[0..M-1] representing sum_j w[j] zeta_M^j with integer
weights. Products are exact cyclic convolutions; zero and rationality tests
go through a tensor-product basis: CRT splits Z/M into prime-power axes and
each axis is folded into the power basis of its prime-power cyclotomic field.
This costs O(M log M)-ish numpy work instead of a dense power-basis reduction
over Q(zeta_M), which is what makes large mixed moduli affordable.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import numpy as np

from .arith import factorize
from .cyclo import CycloNumber, check_modulus
from .errors import NonRationalNorm
from .kernels import accumulate, convolve_counts


@lru_cache(maxsize=None)
def _crt_layout(m: int) -> tuple[tuple[int, ...], tuple[int, ...], np.ndarray]:
    """(prime-power shape, per-axis phi, flat tensor index for each j mod m).

    Position j of the count vector lands at tensor coordinates
    (j * inv(m/q) mod q) per axis q, so that the product of the axis roots
    recovers zeta_m^j.
    """
    check_modulus(m)
    shape = tuple(p**e for p, e in factorize(m)) if m > 1 else (1,)
    phis = tuple(q - q // p for q, (p, _) in zip(shape, factorize(m))) if m > 1 else (1,)
    j = np.arange(m, dtype=np.int64)
    flat = np.zeros(m, dtype=np.int64)
    stride = 1
    for q in reversed(shape):
        c = pow(m // q, -1, q) if m > 1 else 0
        flat += (j * c % q) * stride
        stride *= q
    return shape, phis, flat


def _fold_axes(tensor: np.ndarray, m: int) -> np.ndarray:
    """Reduce each prime-power axis into its cyclotomic power basis, in place.

    Axis of size q = p^e uses zeta^(phi(q)+r) = -sum_s zeta^(s p^(e-1) + r):
    the top p^(e-1) slices are folded subtractively onto the p-1 lower ones.
    Entries above phi(q) are zeroed; the canonical block is the corner.
    """
    for axis, q in enumerate(tensor.shape):
        if q == 1:
            continue
        p = factorize(q)[0][0]
        step = q // p
        view = np.moveaxis(tensor, axis, 0)
        high = view[q - step : q]
        for s in range(p - 1):
            view[s * step : (s + 1) * step] -= high
        view[q - step : q] = 0
    return tensor


class ZetaSum:
    """sum_j weights[j] * zeta_modulus^j with exact integer weights."""

    __slots__ = ("modulus", "weights", "_canon")

    def __init__(self, modulus: int, weights: np.ndarray):
        check_modulus(modulus)
        if len(weights) != modulus:
            raise ValueError(f"weight vector length {len(weights)} != modulus {modulus}")
        self.modulus = modulus
        self.weights = weights
        self._canon = None

    # -- constructors ------------------------------------------------------

    @staticmethod
    def zero(modulus: int) -> "ZetaSum":
        return ZetaSum(modulus, np.zeros(modulus, dtype=np.int64))

    @staticmethod
    def from_exponents(modulus: int, exps: np.ndarray, weights: np.ndarray | None = None) -> "ZetaSum":
        exps = np.ascontiguousarray(exps, dtype=np.int64)
        if weights is None:
            weights = np.ones(len(exps), dtype=np.int64)
        return ZetaSum(modulus, accumulate(exps, np.ascontiguousarray(weights, dtype=np.int64), modulus))

    # -- ring operations ---------------------------------------------------

    def __add__(self, other: "ZetaSum") -> "ZetaSum":
        self._check_same(other)
        return ZetaSum(self.modulus, self.weights + other.weights)

    def __sub__(self, other: "ZetaSum") -> "ZetaSum":
        self._check_same(other)
        return ZetaSum(self.modulus, self.weights - other.weights)

    def __mul__(self, other: "ZetaSum") -> "ZetaSum":
        self._check_same(other)
        return ZetaSum(self.modulus, convolve_counts(self.weights, other.weights))

    def scale(self, k: int) -> "ZetaSum":
        return ZetaSum(self.modulus, self.weights * int(k))

    def mul_root(self, s: int) -> "ZetaSum":
        """Multiply by zeta^s: rotate the weight vector."""
        return ZetaSum(self.modulus, np.roll(self.weights, s % self.modulus))

    def conj(self) -> "ZetaSum":
        """Complex conjugate: weight at j moves to -j mod M."""
        return ZetaSum(self.modulus, np.roll(self.weights[::-1], 1))

    def _check_same(self, other: "ZetaSum") -> None:
        if self.modulus != other.modulus:
            raise ValueError(f"modulus mismatch {self.modulus} vs {other.modulus}")

    # -- canonical form ----------------------------------------------------

    def _canonical(self) -> np.ndarray:
        if self._canon is None:
            shape, phis, flat = _crt_layout(self.modulus)
            w = self.weights
            # folding can grow magnitudes by 2 per axis; escalate when close
            if w.dtype == np.int64 and int(np.abs(w).max(initial=0)) << len(shape) >= 1 << 62:
                w = w.astype(object)
            tensor = np.zeros(shape, dtype=w.dtype).reshape(-1)
            tensor[flat] = w
            canon = _fold_axes(tensor.reshape(shape), self.modulus)
            block = canon[tuple(slice(0, f) for f in phis)]
            self._canon = np.ascontiguousarray(block)
        return self._canon

    def is_zero(self) -> bool:
        return not np.any(self._canonical())

    def rational_value(self) -> Fraction:
        """The value as a rational; raises NonRationalNorm if it is not one."""
        block = self._canonical()
        probe = block.reshape(-1)[1:]
        if np.any(probe):
            raise NonRationalNorm(f"root-of-unity sum mod {self.modulus} is irrational")
        return Fraction(int(block.reshape(-1)[0]))

    def to_cyclo(self) -> CycloNumber:
        """Exact CycloNumber; intended for small moduli or sparse canon."""
        block = self._canonical()
        shape, _, _ = _crt_layout(self.modulus)
        m = self.modulus
        coeffs: dict[int, Fraction] = {}
        for idx in np.argwhere(block):
            e = 0
            for i, q in zip(idx, shape):
                e += int(i) * (m // q)
            coeffs[e % m] = coeffs.get(e % m, Fraction(0)) + Fraction(int(block[tuple(idx)]))
        return CycloNumber(m, coeffs)

    def norm_squared(self) -> Fraction:
        """|sum|^2 as an exact rational; raises if irrational."""
        return (self * self.conj()).rational_value()

    def to_complex(self) -> complex:
        ang = np.exp(2j * np.pi * np.arange(self.modulus) / self.modulus)
        return complex(np.dot(self.weights.astype(np.float64), ang))

    def __repr__(self):
        nnz = int(np.count_nonzero(self.weights))
        return f"ZetaSum(mod {self.modulus}, {nnz} terms)"
