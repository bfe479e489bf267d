"""Unit groups of Z/p^k, multiplicative characters, and exact shell integrals.

Every integral over the p-adic units is reduced to a finite sum over
(Z/p^L)* at an explicit level L and evaluated exactly in cyclotomic
arithmetic.  Conventions, fixed once for the whole package:

* the additive character ``psi`` is trivial on Z_p and psi(p^-j u) is the
  primitive p^j-th root of unity raised to u;
* multiplicative Haar measure gives the unit group total mass 1, so an
  integral over the units at level L is the plain average over (Z/p^L)*.

p = 2 is rejected everywhere: its unit groups are not cyclic and nothing
downstream needs them.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .arith import euler_phi, factorize, primitive_root, valuation
from .cyclo import CycloNumber, zeta
from .errors import (
    InsufficientPrecision,
    RangeExceeded,
    RegimeMismatch,
    UnsupportedPrime,
)
from .zetasum import ZetaSum

Rational = Union[int, Fraction]

# Unit-group tables are dense over Z/p^k; keep them comfortably in memory.
_TABLE_CAP = 1 << 22


class UnitGroup:
    """The cyclic group (Z/p^k)* with power and discrete-log tables.

    ``pow_table[e] = generator**e mod p^k`` for e in [0, order) and
    ``dlog_table[u]`` inverts it (-1 on non-units).  Both arrays are
    read-only so cached instances can be shared freely.
    """

    __slots__ = ("p", "k", "generator", "order", "modulus", "pow_table", "dlog_table")

    def __init__(self, p: int, k: int):
        if p == 2:
            raise UnsupportedPrime("unit groups are only cyclic for odd p")
        if k < 1:
            raise ValueError(f"need k >= 1, got {k}")
        pk = p**k
        if pk > _TABLE_CAP:
            raise RangeExceeded(f"unit-group table for modulus {pk} exceeds cap {_TABLE_CAP}")
        g = primitive_root(p)
        order = euler_phi(pk)
        # primitive_root certifies g mod p^2; recheck the exact order at
        # this level so the invariant never rests on a theorem alone.
        for q, _ in factorize(order):
            if pow(g, order // q, pk) == 1:
                raise ArithmeticError(f"{g} is not a generator of (Z/{pk})*")
        pows = np.empty(order, dtype=np.int64)
        acc = 1
        for e in range(order):
            pows[e] = acc
            acc = (acc * g) % pk
        if acc != 1:
            raise ArithmeticError(f"{g} has wrong order modulo {pk}")
        dlog = np.full(pk, -1, dtype=np.int64)
        dlog[pows] = np.arange(order, dtype=np.int64)
        pows.setflags(write=False)
        dlog.setflags(write=False)
        self.p = p
        self.k = k
        self.generator = g
        self.order = order
        self.modulus = pk
        self.pow_table = pows
        self.dlog_table = dlog

    def dlog(self, u: int) -> int:
        """Discrete log of the unit u to base ``generator``."""
        e = int(self.dlog_table[u % self.modulus])
        if e < 0:
            raise ValueError(f"{u} is not a unit modulo {self.modulus}")
        return e

    def units(self) -> np.ndarray:
        """All units of Z/p^k in generator-power order (a copy)."""
        return self.pow_table.copy()

    def __repr__(self) -> str:
        return f"UnitGroup(p={self.p}, k={self.k}, generator={self.generator}, order={self.order})"


@lru_cache(maxsize=None)
def unit_group(p: int, k: int) -> UnitGroup:
    """Cached constructor for (Z/p^k)*."""
    return UnitGroup(p, k)


class MultChar:
    """Character of (Z/p^k)*, stored as an exponent against the generator.

    With g the fixed primitive root, the character sends g^e to the
    phi(p^k)-th root of unity raised to t*e.  Products and inverses are
    exponent arithmetic; the level (conductor exponent) is the smallest
    j with the character trivial on 1 + p^j Z.
    """

    __slots__ = ("p", "k", "t", "_level")

    def __init__(self, p: int, k: int, t: int):
        if p == 2:
            raise UnsupportedPrime("characters of (Z/2^k)* are out of scope")
        if k < 1:
            raise ValueError(f"need k >= 1, got {k}")
        order = euler_phi(p**k)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "k", k)
        object.__setattr__(self, "t", t % order)
        object.__setattr__(self, "_level", None)

    def __setattr__(self, name, value):
        raise AttributeError("MultChar is immutable")

    @property
    def order_of_group(self) -> int:
        return euler_phi(self.p**self.k)

    @property
    def level(self) -> int:
        """Smallest j >= 0 such that the character kills 1 + p^j units."""
        lv = object.__getattribute__(self, "_level")
        if lv is None:
            if self.t == 0:
                lv = 0
            else:
                phi_k = self.order_of_group
                lv = next(
                    j
                    for j in range(1, self.k + 1)
                    if self.t % (phi_k // euler_phi(self.p**j)) == 0
                )
            object.__setattr__(self, "_level", lv)
        return lv

    @property
    def is_trivial(self) -> bool:
        return self.t == 0

    def lift(self, k2: int) -> "MultChar":
        """Same character viewed on (Z/p^k2)* for k2 >= level."""
        if k2 == self.k:
            return self
        if k2 < self.level or k2 < 1:
            raise ValueError(f"cannot restrict a level-{self.level} character to k={k2}")
        phi_old = self.order_of_group
        phi_new = euler_phi(self.p**k2)
        if k2 > self.k:
            return MultChar(self.p, k2, self.t * (phi_new // phi_old))
        assert self.t % (phi_old // phi_new) == 0
        return MultChar(self.p, k2, self.t // (phi_old // phi_new))

    def reduce(self) -> "MultChar":
        """Canonical representative at the smallest ambient modulus."""
        return self.lift(max(self.level, 1))

    def __mul__(self, other: "MultChar") -> "MultChar":
        if not isinstance(other, MultChar):
            return NotImplemented
        if self.p != other.p:
            raise ValueError("characters live at different primes")
        k = max(self.k, other.k)
        a, b = self.lift(k), other.lift(k)
        return MultChar(self.p, k, a.t + b.t)

    def inverse(self) -> "MultChar":
        return MultChar(self.p, self.k, -self.t)

    def __pow__(self, n: int) -> "MultChar":
        return MultChar(self.p, self.k, self.t * n)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultChar):
            return NotImplemented
        a, b = self.reduce(), other.reduce()
        return (a.p, a.k, a.t) == (b.p, b.k, b.t)

    def __hash__(self) -> int:
        a = self.reduce()
        return hash((a.p, a.k, a.t))

    def value_exponent(self, u: int) -> int:
        """e such that the value at u is zeta(order_of_group)^e."""
        return (self.t * unit_group(self.p, self.k).dlog(u)) % self.order_of_group

    def value(self, u: int) -> CycloNumber:
        return zeta(self.order_of_group, self.value_exponent(u))

    def exponent_table(self) -> np.ndarray:
        """Value exponents over all units in generator-power order."""
        order = self.order_of_group
        return (self.t * np.arange(order, dtype=np.int64)) % order

    def __repr__(self) -> str:
        return f"MultChar(p={self.p}, k={self.k}, t={self.t}, level={self.level})"


def trivial_char(p: int, k: int = 1) -> MultChar:
    return MultChar(p, k, 0)


class MultCharExtended:
    """Character of Q_p*: a unit-group character plus a unitary value at p."""

    __slots__ = ("unit_part", "value_at_p")

    def __init__(self, unit_part: MultChar, value_at_p: Union[CycloNumber, Rational]):
        z = value_at_p if isinstance(value_at_p, CycloNumber) else CycloNumber.from_rational(value_at_p)
        if z.norm_squared() != 1:
            raise ValueError("value at the uniformizer must have norm_squared 1")
        object.__setattr__(self, "unit_part", unit_part)
        object.__setattr__(self, "value_at_p", z)

    def __setattr__(self, name, value):
        raise AttributeError("MultCharExtended is immutable")

    @property
    def p(self) -> int:
        return self.unit_part.p

    @property
    def level(self) -> int:
        return self.unit_part.level

    @property
    def is_unramified(self) -> bool:
        return self.unit_part.is_trivial

    def eval(self, val: int, u: int) -> CycloNumber:
        """Value at p^val * u for a unit u."""
        return self.value_at_p**val * self.unit_part.value(u)

    def eval_shell(self, x: "PAdicShell") -> CycloNumber:
        if x.is_zero:
            raise ValueError("characters are not defined at 0")
        need = max(self.unit_part.level, 1)
        return self.eval(x.valuation, x.unit_mod(self.p**need))

    def __mul__(self, other: "MultCharExtended") -> "MultCharExtended":
        if not isinstance(other, MultCharExtended):
            return NotImplemented
        return MultCharExtended(self.unit_part * other.unit_part, self.value_at_p * other.value_at_p)

    def inverse(self) -> "MultCharExtended":
        return MultCharExtended(self.unit_part.inverse(), self.value_at_p.inverse())

    def __eq__(self, other) -> bool:
        if not isinstance(other, MultCharExtended):
            return NotImplemented
        return self.unit_part == other.unit_part and self.value_at_p == other.value_at_p

    def __hash__(self) -> int:
        return hash((self.unit_part, self.value_at_p))

    def __repr__(self) -> str:
        return f"MultCharExtended(unit_part={self.unit_part!r}, value_at_p={self.value_at_p!r})"


@dataclass(frozen=True)
class PAdicShell:
    """A p-adic number p^valuation * unit, the unit known mod p^precision.

    The exact zero is carried as a separate flag.  Operations track how
    much precision survives and raise InsufficientPrecision rather than
    return a residue they cannot certify.
    """

    p: int
    valuation: int
    unit_residue: int
    precision: int
    is_zero: bool = False

    def __post_init__(self):
        if self.p == 2:
            raise UnsupportedPrime("p = 2 shells are out of scope")
        if self.is_zero:
            return
        if self.precision < 1:
            raise InsufficientPrecision("a nonzero shell needs at least one unit digit")
        pk = self.p**self.precision
        u = self.unit_residue % pk
        if u % self.p == 0:
            raise ValueError(f"{self.unit_residue} is not a unit modulo {self.p}")
        object.__setattr__(self, "unit_residue", u)

    @classmethod
    def zero(cls, p: int) -> "PAdicShell":
        return cls(p, 0, 1, 1, is_zero=True)

    @classmethod
    def from_rational(cls, p: int, x: Rational, precision: int) -> "PAdicShell":
        x = Fraction(x)
        if x == 0:
            return cls.zero(p)
        vn = valuation(x.numerator, p) if x.numerator else 0
        vd = valuation(x.denominator, p)
        pk = p**precision
        num = abs(x.numerator) // p**vn * (1 if x.numerator > 0 else -1)
        den = x.denominator // p**vd
        u = num * pow(den, -1, pk) % pk
        return cls(p, vn - vd, u, precision)

    def unit_mod(self, pj: int) -> int:
        """The unit residue modulo pj, certified by current precision."""
        if self.is_zero:
            raise ValueError("zero has no unit part")
        need = valuation(pj, self.p)
        if pj != self.p**need:
            raise ValueError(f"{pj} is not a power of {self.p}")
        if self.precision < need:
            raise InsufficientPrecision(
                f"unit known mod p^{self.precision}, requested mod p^{need}"
            )
        return self.unit_residue % pj

    def __neg__(self) -> "PAdicShell":
        if self.is_zero:
            return self
        return PAdicShell(self.p, self.valuation, -self.unit_residue, self.precision)

    def __add__(self, other: "PAdicShell") -> "PAdicShell":
        if not isinstance(other, PAdicShell):
            return NotImplemented
        if self.p != other.p:
            raise ValueError("shells live at different primes")
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        a, b = (self, other) if self.valuation <= other.valuation else (other, self)
        # absolute precision of the sum: min over both operands
        abs_prec = min(a.valuation + a.precision, b.valuation + b.precision)
        rel = abs_prec - a.valuation
        if rel < 1:
            raise InsufficientPrecision("operands share no certified digits")
        pk = a.p**rel
        s = (a.unit_residue + b.unit_residue * a.p ** (b.valuation - a.valuation)) % pk
        if s == 0:
            raise InsufficientPrecision(
                f"cancellation: sum vanishes modulo p^{rel}, valuation unresolved"
            )
        drop = valuation(s, a.p)
        if rel - drop < 1:
            raise InsufficientPrecision("cancellation consumed every certified digit")
        return PAdicShell(a.p, a.valuation + drop, s // a.p**drop, rel - drop)

    def __sub__(self, other: "PAdicShell") -> "PAdicShell":
        return self + (-other)

    def __mul__(self, other: "PAdicShell") -> "PAdicShell":
        if not isinstance(other, PAdicShell):
            return NotImplemented
        if self.p != other.p:
            raise ValueError("shells live at different primes")
        if self.is_zero or other.is_zero:
            return PAdicShell.zero(self.p)
        prec = min(self.precision, other.precision)
        u = self.unit_residue * other.unit_residue % self.p**prec
        return PAdicShell(self.p, self.valuation + other.valuation, u, prec)

    def inverse(self) -> "PAdicShell":
        if self.is_zero:
            raise ZeroDivisionError("inverse of the zero shell")
        u = pow(self.unit_residue, -1, self.p**self.precision)
        return PAdicShell(self.p, -self.valuation, u, self.precision)

    def scale_power(self, n: int) -> "PAdicShell":
        """Multiply by p^n."""
        if self.is_zero:
            return self
        return PAdicShell(self.p, self.valuation + n, self.unit_residue, self.precision)


def psi_eval(x: PAdicShell) -> CycloNumber:
    """The standard additive character, trivial on Z_p.

    For v(x) = -j < 0 the value is the primitive p^j-th root of unity
    raised to the unit residue; the shell must carry at least j digits.
    """
    if x.is_zero or x.valuation >= 0:
        return CycloNumber.one()
    j = -x.valuation
    pj = x.p**j
    return zeta(pj, x.unit_mod(pj))


def _average(acc: ZetaSum, count: int) -> CycloNumber:
    return acc.to_cyclo() / count


def gauss_integral(m: PAdicShell, char: MultChar) -> CycloNumber:
    """Average of psi(m*u) against the inverse character over the units.

    Computed as the exact finite sum (1/phi(p^L)) * sum over units u of
    (Z/p^L)* of psi(m*u) * char(u)^-1 with L = max(-v(m), level, 1).
    Nonzero only when -v(m) equals the level (level >= 1), or for the
    trivial character when -v(m) = 1.
    """
    if m.is_zero or m.valuation >= 0:
        raise ValueError("need v(m) < 0; psi(m*u) is identically 1 otherwise")
    if m.p != char.p:
        raise ValueError("shell and character live at different primes")
    p = m.p
    j = -m.valuation
    L = max(j, char.level, 1)
    pj = p**j
    m_u = m.unit_mod(pj)
    grp = unit_group(p, L)
    phi_L = grp.order
    cl = char.lift(L)
    M = lcm(pj, phi_L)
    e = np.arange(phi_L, dtype=np.int64)
    psi_part = (m_u * (grp.pow_table % pj)) % pj
    char_part = (-cl.t * e) % phi_L
    exps = (psi_part * (M // pj) + char_part * (M // phi_L)) % M
    acc = ZetaSum.from_exponents(M, exps, np.ones(phi_L, dtype=np.int64))
    return _average(acc, phi_L)


@lru_cache(maxsize=None)
def gauss_table(p: int, level: int) -> Mapping[MultChar, CycloNumber]:
    """Every nonvanishing unit-shell Fourier coefficient of psi at one depth.

    Returns {char: integral of psi(p^-level x) char^-1(x) d*x} over the
    characters of exact level ``level`` (plus the trivial character when
    level is 1, the only other survivor).  For a general argument with
    unit part m the coefficient against char is char(m) times the tabled
    value, so one cached table serves every expansion at this depth.
    """
    from types import MappingProxyType

    from .kernels import char_sum_block

    if level < 1:
        raise ValueError(f"need level >= 1, got {level}")
    grp = unit_group(p, level)
    phi = grp.order
    pl = p**level
    M = lcm(pl, phi)
    chars = list(enumerate_chars(p, level, level))
    if level == 1:
        chars.append(MultChar(p, 1, 0))
    base = (grp.pow_table % pl) * (M // pl)
    step = np.arange(phi, dtype=np.int64) * (M // phi)
    ts = np.array([ch.lift(level).t for ch in chars], dtype=np.int64)
    out: dict[MultChar, CycloNumber] = {}
    rows = max(1, (1 << 22) // M)
    for lo in range(0, len(ts), rows):
        block = char_sum_block(base, step, ts[lo : lo + rows], M)
        for r, ch in enumerate(chars[lo : lo + rows]):
            out[ch.reduce()] = ZetaSum(M, block[r]).to_cyclo() / phi
    return MappingProxyType(out)


_REGIMES = ("interior", "boundary", "negative")


def char_integral_shifted(char: MultChar, twist: MultChar, j: int, regime: str) -> CycloNumber:
    """Exact shifted-argument character integrals over the unit sphere.

    With i = level(char) >= 1 and d*x giving the units mass 1:

    * ``interior`` (0 < j < i): integral of char(1 + p^j x) twist(x) d*x
      over v(x) = 0;
    * ``boundary`` (j = 0): the same integrand over the units excluding
      x = -1 + pZ_p, so 1 + x stays a unit;
    * ``negative`` (j < 0): integral of char(unit part of 1 + p^j x)
      twist(x) d*x; for a character extended to Q_p* the full integral
      is this value times the uniformizer value raised to j.
    """
    if char.p != twist.p:
        raise ValueError("characters live at different primes")
    i = char.level
    if i < 1:
        raise RegimeMismatch("the shifted character must be ramified")
    if regime not in _REGIMES:
        raise RegimeMismatch(f"unknown regime {regime!r}; pick one of {_REGIMES}")
    if regime == "interior" and not 0 < j < i:
        raise RegimeMismatch(f"interior regime needs 0 < j < level = {i}, got j = {j}")
    if regime == "boundary" and j != 0:
        raise RegimeMismatch(f"boundary regime is the j = 0 case, got j = {j}")
    if regime == "negative" and j >= 0:
        raise RegimeMismatch(f"negative regime needs j < 0, got j = {j}")

    p = char.p
    depth = i - j if regime == "interior" else i
    L = max(depth, twist.level, 1)
    grp = unit_group(p, L)
    grp_i = unit_group(p, max(i, 1))
    pi_ = p**i
    phi_i = grp_i.order
    phi_L = grp.order
    cl, tw = char.lift(max(i, 1)), twist.lift(L)
    units = grp.pow_table

    if regime == "interior":
        args = (1 + p**j * units) % pi_
        keep = np.ones(phi_L, dtype=bool)
    elif regime == "boundary":
        args = (1 + units) % pi_
        keep = units % p != p - 1
    else:
        args = (units + p**(-j)) % pi_
        keep = np.ones(phi_L, dtype=bool)

    char_exp = (cl.t * grp_i.dlog_table[args[keep]]) % phi_i
    twist_exp = (tw.t * np.arange(phi_L, dtype=np.int64)[keep]) % phi_L
    M = lcm(phi_i, phi_L)
    exps = (char_exp * (M // phi_i) + twist_exp * (M // phi_L)) % M
    acc = ZetaSum.from_exponents(M, exps, np.ones(int(keep.sum()), dtype=np.int64))
    return _average(acc, phi_L)


def unit_integral(p: int, L: int, f: Mapping[int, Union[CycloNumber, Rational]]) -> CycloNumber:
    """Average of a level-L locally constant function over the units.

    ``f`` must be a full table keyed by every unit residue mod p^L.
    """
    grp = unit_group(p, L)
    if len(f) != grp.order or any(u % p == 0 or not 0 <= u < grp.modulus for u in f):
        raise ValueError(f"table must cover exactly the units of Z/{grp.modulus}")
    total = CycloNumber.zero()
    for v in f.values():
        total = total + v
    return total / grp.order


def enumerate_chars(p: int, k: int, level: int) -> list[MultChar]:
    """All characters of (Z/p^k)* of exact level ``level``."""
    if not 0 <= level <= k:
        raise ValueError(f"need 0 <= level <= k, got level={level}, k={k}")
    if level == 0:
        return [MultChar(p, k, 0)]
    phi_k = euler_phi(p**k)
    step = phi_k // euler_phi(p**level)
    coarse = phi_k // euler_phi(p ** (level - 1)) if level > 1 else 0
    out = []
    for s in range(1, euler_phi(p**level)):
        t = s * step
        if level == 1 or t % coarse != 0:
            out.append(MultChar(p, k, t))
    return out


def all_chars(p: int, k: int) -> list[MultChar]:
    """Every character of (Z/p^k)*, trivial first, then by level."""
    out = []
    for lv in range(0, k + 1):
        out.extend(enumerate_chars(p, k, lv))
    return out
