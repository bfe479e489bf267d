"""Exact arithmetic in cyclotomic fields Q(zeta_M).

A CycloNumber is a finite rational combination of M-th roots of unity kept in
canonical form: the power basis zeta_M^j, 0 <= j < phi(M), after reduction
modulo the M-th cyclotomic polynomial. Canonical form makes equality, zero
tests and rationality tests structural.

Cyclotomic polynomials are computed once per modulus by exact division of
x^rad - 1 over the squarefree radical and inflation x -> x^(M/rad), and cached
in a write-once map guarded by a lock.
"""

from __future__ import annotations

import cmath
import heapq
import threading
from fractions import Fraction
from functools import lru_cache
from math import gcd

from .arith import euler_phi, factorize, mobius, radical
from .errors import BadModulus, ModulusCapExceeded, NonRationalNorm

Rational = Fraction

_DEFAULT_MODULUS_CAP = 10**6
_modulus_cap = _DEFAULT_MODULUS_CAP

_ZERO = Fraction(0)
_ONE = Fraction(1)


def set_modulus_cap(cap: int) -> int:
    """Set the largest allowed root-of-unity order; returns the previous cap."""
    global _modulus_cap
    old, _modulus_cap = _modulus_cap, int(cap)
    return old


def modulus_cap() -> int:
    return _modulus_cap


def check_modulus(m: int) -> int:
    if m < 1:
        raise BadModulus(f"modulus must be positive, got {m}")
    if m > _modulus_cap:
        raise ModulusCapExceeded(f"modulus {m} exceeds cap {_modulus_cap}")
    return m


def _poly_mul(a: list[int], b: list[int]) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] += ai * bj
    return out


def _poly_div_exact(num: list[int], den: list[int]) -> list[int]:
    """Quotient of an exact division of integer polynomials (monic-led den)."""
    num = list(num)
    dn = len(den) - 1
    out = [0] * (len(num) - dn)
    lead = den[-1]
    for k in range(len(out) - 1, -1, -1):
        q, r = divmod(num[k + dn], lead)
        assert r == 0, "inexact cyclotomic division"
        out[k] = q
        if q:
            for j, dj in enumerate(den):
                num[k + j] -= q * dj
    assert not any(num[: dn]), "nonzero remainder in cyclotomic division"
    return out


def _squarefree_divisors(n: int) -> list[int]:
    out = [1]
    for p, _ in factorize(n):
        out += [d * p for d in out]
    return sorted(out)


_cyclo_cache: dict[int, tuple[tuple[int, ...], tuple[tuple[int, int], ...]]] = {}
_cyclo_lock = threading.Lock()


@lru_cache(maxsize=None)
def _cyclo_squarefree(n: int) -> list[int]:
    if n == 1:
        return [-1, 1]
    num = [0] * (n + 1)
    num[0], num[n] = -1, 1
    for d in _squarefree_divisors(n):
        if d < n:
            num = _poly_div_exact(num, _cyclo_squarefree(d))
    return num


def cyclotomic_polynomial(m: int) -> tuple[int, ...]:
    """Dense coefficient tuple of Phi_m, constant term first, monic."""
    got = _cyclo_cache.get(m)
    if got is not None:
        return got[0]
    rad = radical(m) if m > 1 else 1
    base = _cyclo_squarefree(rad)
    t = m // rad
    if t == 1:
        dense = base
    else:
        dense = [0] * ((len(base) - 1) * t + 1)
        for i, ci in enumerate(base):
            dense[i * t] = ci
    poly = tuple(dense)
    tail = tuple((i, c) for i, c in enumerate(dense[:-1]) if c)
    with _cyclo_lock:
        _cyclo_cache.setdefault(m, (poly, tail))
    return poly


def _cyclo_tail(m: int) -> tuple[tuple[int, int], ...]:
    """Nonzero sub-leading coefficients (degree, value) of Phi_m."""
    if m not in _cyclo_cache:
        cyclotomic_polynomial(m)
    return _cyclo_cache[m][1]


def reduce_exponents(m: int, raw: dict[int, Fraction]) -> dict[int, Fraction]:
    """Canonicalize a formal sum over exponents of zeta_m into the power basis."""
    phi = euler_phi(m)
    work: dict[int, Fraction] = {}
    for j, c in raw.items():
        if not c:
            continue
        j %= m
        acc = work.get(j)
        work[j] = c if acc is None else acc + c
    if not work:
        return {}
    # rewrite high powers sparsely, largest degree first
    high = [-j for j in work if j >= phi]
    if high:
        heapq.heapify(high)
        tail = _cyclo_tail(m)
        while high:
            deg = -heapq.heappop(high)
            c = work.pop(deg, None)
            if not c:
                continue
            base = deg - phi
            for i, a in tail:
                k = base + i
                acc = work.get(k)
                v = -c * a if acc is None else acc - c * a
                if v:
                    if acc is None and k >= phi:
                        heapq.heappush(high, -k)
                    work[k] = v
                else:
                    work.pop(k, None)
    return {j: c for j, c in work.items() if c}


class CycloNumber:
    """Element of Q(zeta_modulus) in reduced power-basis form. Immutable."""

    __slots__ = ("modulus", "coeffs", "_hash")

    def __init__(self, modulus: int, coeffs: dict[int, Fraction], *, _reduced: bool = False):
        check_modulus(modulus)
        if not _reduced:
            coeffs = reduce_exponents(modulus, {j: Fraction(c) for j, c in coeffs.items()})
        object.__setattr__(self, "modulus", modulus)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, *_):
        raise AttributeError("CycloNumber is immutable")

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_rational(r, modulus: int = 1) -> "CycloNumber":
        r = Fraction(r)
        return CycloNumber(modulus, {0: r} if r else {}, _reduced=True)

    @staticmethod
    def zero(modulus: int = 1) -> "CycloNumber":
        return CycloNumber(modulus, {}, _reduced=True)

    @staticmethod
    def one(modulus: int = 1) -> "CycloNumber":
        return CycloNumber.from_rational(1, modulus)

    # -- structure ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_rational(self) -> bool:
        return not self.coeffs or set(self.coeffs) == {0}

    def to_rational(self) -> Fraction:
        if not self.coeffs:
            return _ZERO
        if set(self.coeffs) == {0}:
            return self.coeffs[0]
        raise NonRationalNorm(f"value is not rational (modulus {self.modulus})")

    def lift(self, new_modulus: int) -> "CycloNumber":
        """Rewrite in Q(zeta_new) via zeta_M -> zeta_new^(new/M)."""
        if new_modulus == self.modulus:
            return self
        if new_modulus % self.modulus:
            raise BadModulus(f"{new_modulus} is not a multiple of {self.modulus}")
        check_modulus(new_modulus)
        step = new_modulus // self.modulus
        return CycloNumber(new_modulus, {j * step: c for j, c in self.coeffs.items()})

    def _common(self, other: "CycloNumber") -> tuple["CycloNumber", "CycloNumber"]:
        if self.modulus == other.modulus:
            return self, other
        m = self.modulus // gcd(self.modulus, other.modulus) * other.modulus
        return self.lift(m), other.lift(m)

    # -- arithmetic --------------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, CycloNumber):
            return other
        if isinstance(other, (int, Fraction)):
            return CycloNumber.from_rational(other, 1)
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self._common(o)
        out = dict(a.coeffs)
        for j, c in b.coeffs.items():
            s = out.get(j, _ZERO) + c
            if s:
                out[j] = s
            else:
                out.pop(j, None)
        return CycloNumber(a.modulus, out, _reduced=True)

    __radd__ = __add__

    def __neg__(self):
        return CycloNumber(self.modulus, {j: -c for j, c in self.coeffs.items()}, _reduced=True)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o + (-self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            r = Fraction(other)
            if not r:
                return CycloNumber.zero(self.modulus)
            return CycloNumber(
                self.modulus, {j: c * r for j, c in self.coeffs.items()}, _reduced=True
            )
        if not isinstance(other, CycloNumber):
            return NotImplemented
        a, b = self._common(other)
        raw: dict[int, Fraction] = {}
        for j1, c1 in a.coeffs.items():
            for j2, c2 in b.coeffs.items():
                k = j1 + j2
                acc = raw.get(k)
                raw[k] = c1 * c2 if acc is None else acc + c1 * c2
        return CycloNumber(a.modulus, reduce_exponents(a.modulus, raw), _reduced=True)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / Fraction(other))
        if isinstance(other, CycloNumber):
            return self * other.inverse()
        return NotImplemented

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return o * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = CycloNumber.one(self.modulus)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base if n > 1 else base
            n >>= 1
        return out

    def conj(self) -> "CycloNumber":
        """Complex conjugate: zeta^j -> zeta^(M-j)."""
        m = self.modulus
        return CycloNumber(m, {(m - j) % m: c for j, c in self.coeffs.items()})

    def norm_squared(self) -> Fraction:
        """z * conj(z) when rational; raises NonRationalNorm otherwise."""
        prod = self * self.conj()
        if not prod.is_rational():
            raise NonRationalNorm(
                f"|z|^2 lies outside Q for modulus {self.modulus}; "
                "it is a real cyclotomic of degree > 1"
            )
        return prod.to_rational()

    def inverse(self) -> "CycloNumber":
        """1/z: fast path conj(z)/|z|^2 when |z|^2 is rational, else a dense
        linear solve in the canonical basis (capped at degree 64)."""
        prod = self * self.conj()
        if prod.is_rational():
            nsq = prod.to_rational()
            if not nsq:
                raise ZeroDivisionError("inverse of zero")
            return self.conj() * (Fraction(1) / nsq)
        return self._inverse_dense()

    def _inverse_dense(self) -> "CycloNumber":
        m = self.modulus
        basis = _canonical_basis(m)
        if len(basis) > 64:
            raise NonRationalNorm(
                f"|z|^2 lies outside Q and the field degree {len(basis)} "
                "exceeds the dense-inversion cap of 64"
            )
        index = {j: idx for idx, j in enumerate(basis)}
        dim = len(basis)
        # columns: z * zeta^e expressed on the canonical basis
        cols = []
        for e in basis:
            w = self * CycloNumber(m, {e: _ONE})
            col = [_ZERO] * dim
            for j, c in w.coeffs.items():
                col[index[j]] = c
            cols.append(col)
        rhs = [_ZERO] * dim
        rhs[index[0]] = _ONE
        x = _solve_fraction_system([[cols[c][r] for c in range(dim)] for r in range(dim)], rhs)
        if x is None:
            raise ZeroDivisionError("inverse of zero")
        return CycloNumber(m, {basis[idx]: val for idx, val in enumerate(x) if val})

    # -- embeddings & misc -------------------------------------------------

    def to_complex(self) -> complex:
        w = 2j * cmath.pi / self.modulus
        return sum((complex(c) * cmath.exp(w * j) for j, c in self.coeffs.items()), 0j)

    def support(self) -> int:
        return len(self.coeffs)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        a, b = self._common(o)
        return a.coeffs == b.coeffs

    def __hash__(self):
        # Equal values at different moduli must hash alike, so hash the
        # normalized trace sum_j c_j mu(d_j)/phi(d_j), d_j = M/gcd(j, M): it
        # scales out the field degree, and for rational values it equals the
        # value itself so hashes match plain int/Fraction.
        h = object.__getattribute__(self, "_hash")
        if h is None:
            m = self.modulus
            t = _ZERO
            for j, c in self.coeffs.items():
                d = m // gcd(j, m)
                t += c * Fraction(mobius(d), euler_phi(d))
            h = hash(t)
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self):
        if self.is_rational():
            return f"CycloNumber({self.to_rational()})"
        terms = ", ".join(f"{j}: {c}" for j, c in sorted(self.coeffs.items()))
        return f"CycloNumber(zeta_{self.modulus}; {{{terms}}})"


    def to_json(self) -> dict:
        """Portable form: modulus plus [exponent, numerator, denominator] rows."""
        return {
            "modulus": self.modulus,
            "terms": [[j, c.numerator, c.denominator] for j, c in sorted(self.coeffs.items())],
        }

    @staticmethod
    def from_json(obj: dict) -> "CycloNumber":
        return CycloNumber(
            int(obj["modulus"]),
            {int(j): Fraction(int(num), int(den)) for j, num, den in obj["terms"]},
        )


@lru_cache(maxsize=None)
def _canonical_basis(m: int) -> tuple:
    """Exponents spanning Q(zeta_m) after canonical reduction (a Q-basis)."""
    exps = set()
    for j in range(m):
        exps.update(CycloNumber(m, {j: _ONE}).coeffs.keys())
    return tuple(sorted(exps))


def _solve_fraction_system(a: list, b: list):
    """Gaussian elimination over Q; returns None when singular."""
    n = len(b)
    rows = [list(a[r]) + [b[r]] for r in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if rows[r][col]), None)
        if piv is None:
            return None
        rows[col], rows[piv] = rows[piv], rows[col]
        inv = Fraction(1) / rows[col][col]
        rows[col] = [v * inv for v in rows[col]]
        for r in range(n):
            if r != col and rows[r][col]:
                f = rows[r][col]
                rows[r] = [v - f * w for v, w in zip(rows[r], rows[col])]
    return [rows[r][n] for r in range(n)]


def zeta(m: int, j: int = 1) -> CycloNumber:
    """The root of unity zeta_m^j as a CycloNumber."""
    check_modulus(m)
    return CycloNumber(m, {j % m: _ONE})


def legendre_symbol(a: int, p: int) -> int:
    a %= p
    if a == 0:
        return 0
    r = pow(a, (p - 1) // 2, p)
    return 1 if r == 1 else -1


def sqrt_prime(p: int) -> CycloNumber:
    """sqrt(p) as an exact cyclotomic number via the quadratic Gauss sum.

    Sum_a (a|p) zeta_p^a equals sqrt(p) for p = 1 mod 4 and i*sqrt(p) for
    p = 3 mod 4; in the latter case divide by i inside Q(zeta_4p).
    """
    g = CycloNumber(p, {a: Fraction(legendre_symbol(a, p)) for a in range(1, p)})
    if p % 4 == 1:
        return g
    # zeta_4^3 = -i; (i sqrt p) * (-i) = sqrt p
    return g.lift(4 * p) * zeta(4 * p, 3 * p)
