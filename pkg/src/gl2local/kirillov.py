"""Symbolic Kirillov-model engine for GL(2, Q_p) with trivial central character.

Vectors are finite sums of basis functions indexed by (char, n): the
function equal to char(u) at x = u*p^n and 0 off that shell.  The Borel
actions are exact rewrites of those basis functions; the Weyl element
acts through an abstract table of unitary constants, one per unit
character, subject to the involution constraints.  Lower unipotents go
through the fixed Bruhat word (1 0; x 1) = w (1 -x; 0 1) w (-1), where
the central -1 acts trivially here.

Nothing in this module claims the table constants come from a genuine
representation; downstream checks quantify over seeded mock tables.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from random import Random
from typing import Iterable, Optional, Sequence, Union

from .cyclo import CycloNumber, zeta
from .errors import MissingOmegaEntry, RangeExceeded
from .padic import (
    MultChar,
    PAdicShell,
    all_chars,
    gauss_table,
    trivial_char,
)

Coeff = Union[CycloNumber, int, Fraction]

# Expansion guard: a single Whittaker evaluation stays far below this.
TERM_CAP = 10**6


def _as_cyclo(x: Coeff) -> CycloNumber:
    return x if isinstance(x, CycloNumber) else CycloNumber.from_rational(x)


class KirillovVector:
    """Finite linear combination of shell-character basis functions."""

    __slots__ = ("p", "terms")

    def __init__(self, p: int, terms: Optional[dict] = None):
        clean = {}
        if terms:
            for (ch, n), a in terms.items():
                a = _as_cyclo(a)
                if not a.is_zero():
                    clean[(ch.reduce(), n)] = a
        self.p = p
        self.terms = clean

    @classmethod
    def basis(cls, p: int, char: MultChar, n: int, coeff: Coeff = 1) -> "KirillovVector":
        return cls(p, {(char, n): _as_cyclo(coeff)})

    @classmethod
    def newform(cls, p: int) -> "KirillovVector":
        return cls.basis(p, trivial_char(p), 0)

    def __add__(self, other: "KirillovVector") -> "KirillovVector":
        if self.p != other.p:
            raise ValueError("vectors live at different primes")
        out = dict(self.terms)
        for k, a in other.terms.items():
            out[k] = out[k] + a if k in out else a
        return KirillovVector(self.p, out)

    def scale(self, c: Coeff) -> "KirillovVector":
        c = _as_cyclo(c)
        return KirillovVector(self.p, {k: a * c for k, a in self.terms.items()})

    def __sub__(self, other: "KirillovVector") -> "KirillovVector":
        return self + other.scale(-1)

    def pairing(self, other: "KirillovVector") -> CycloNumber:
        """Hermitian pairing; the basis is orthonormal (unit shell mass)."""
        tot = CycloNumber.zero()
        a_map, b_map = self.terms, other.terms
        keys = a_map if len(a_map) <= len(b_map) else b_map
        for k in keys:
            a, b = a_map.get(k), b_map.get(k)
            if a is not None and b is not None:
                tot = tot + a * b.conj()
        return tot

    def total_norm_squared(self) -> CycloNumber:
        return self.pairing(self)

    @property
    def term_count(self) -> int:
        return len(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, KirillovVector):
            return NotImplemented
        return self.p == other.p and self.terms == other.terms

    def __repr__(self) -> str:
        return f"KirillovVector(p={self.p}, terms={self.term_count})"


@dataclass(frozen=True)
class SupercuspidalData:
    """Abstract Weyl-action data for a level-c supercuspidal, trivial center.

    omega_table maps each unit character nu to (n_nu, C_nu): the basis
    rewrite under the Weyl element is

        (nu, n)  ->  C_nu * basis(nu^-1, -n + n_{nu^-1}).
    """

    p: int
    c: int
    omega_table: dict
    label: str = "supercuspidal"

    def __post_init__(self):
        if self.c < 2:
            raise ValueError(f"supercuspidal level must be >= 2, got {self.c}")

    def entry(self, char: MultChar) -> tuple[int, CycloNumber]:
        key = char.reduce()
        try:
            return self.omega_table[key]
        except KeyError:
            raise MissingOmegaEntry(
                f"no Weyl-action entry for character of level {char.level} (p={self.p}, c={self.c})"
            ) from None

    def validate(self) -> None:
        """Check every structural constraint on the table."""
        one = CycloNumber.one()
        for ch, (n, cc) in self.omega_table.items():
            if n != min(-self.c, -2 * ch.level):
                raise ValueError(f"bad shell index {n} for level-{ch.level} character")
            if cc.norm_squared() != 1:
                raise ValueError("Weyl constants must be unitary")
            n_inv, cc_inv = self.entry(ch.inverse())
            if n_inv != n or cc * cc_inv != one:
                raise ValueError("Weyl constants violate the involution constraint")


def mock_supercuspidal(p: int, c: int, seed: int) -> SupercuspidalData:
    """Admissible Weyl-action data with pseudo-random unitary constants.

    Constants are 24th roots of unity paired so C(nu)*C(nu^-1) = 1, with
    C(nu) = +-1 whenever nu is self-inverse; deterministic in the seed.
    """
    rng = Random(f"mock-supercuspidal:{p}:{c}:{seed}")
    table: dict[MultChar, tuple[int, CycloNumber]] = {}
    for ch in all_chars(p, c):
        ch = ch.reduce()
        if ch in table:
            continue
        n = min(-c, -2 * ch.level)
        inv = ch.inverse().reduce()
        if inv == ch:
            table[ch] = (n, CycloNumber.from_rational(rng.choice((1, -1))))
        else:
            val = zeta(24, rng.randrange(24))
            table[ch] = (n, val)
            table[inv] = (n, val.inverse())
    return SupercuspidalData(p, c, table, label=f"mock(p={p},c={c},seed={seed})")


# ------------------------------------------------------------ the actions


def act_diag(v: KirillovVector, a1: PAdicShell, a2: PAdicShell) -> KirillovVector:
    """Diagonal torus action: basis (nu, n) -> nu(u) * basis(nu, n - d).

    Here a1/a2 = u * p^d.  The central character is trivial, so only the
    ratio matters.
    """
    ratio = a1 * a2.inverse()
    out: dict = {}
    for (ch, n), a in v.terms.items():
        u = ratio.unit_mod(v.p ** max(ch.level, 1))
        key = (ch, n - ratio.valuation)
        val = a * ch.value(u)
        out[key] = out[key] + val if key in out else val
    return KirillovVector(v.p, out)


def act_upper(v: KirillovVector, m: PAdicShell) -> KirillovVector:
    """Upper unipotent action: pointwise multiplication by psi(m x).

    On the shell v(x) = n the multiplier has level L = max(0, -v(m)-n)
    as a function of the unit, and its character expansion is a Gauss
    average: only characters of level exactly L survive (level <= 1 when
    L = 1, none but the trivial when L = 0).
    """
    if m.is_zero:
        return v
    p = v.p
    out: dict = {}

    def add(key, val):
        out[key] = out[key] + val if key in out else val

    for (ch, n), a in v.terms.items():
        level = max(0, -(m.valuation + n))
        if level == 0:
            add((ch, n), a)
            continue
        m_u = m.unit_mod(p**level)
        for comp, tabled in gauss_table(p, level).items():
            coeff = comp.value(m_u) * tabled
            if coeff.is_zero():
                continue
            add(((ch * comp).reduce(), n), a * coeff)
        if len(out) > TERM_CAP:
            raise RangeExceeded(f"expansion exceeded {TERM_CAP} terms")
    return KirillovVector(p, out)


def act_omega(v: KirillovVector, data: SupercuspidalData) -> KirillovVector:
    """Weyl element action through the abstract table."""
    out: dict = {}
    for (ch, n), a in v.terms.items():
        _, cc = data.entry(ch)
        inv = ch.inverse().reduce()
        n_inv, _ = data.entry(inv)
        key = (inv, -n + n_inv)
        val = a * cc
        out[key] = out[key] + val if key in out else val
    return KirillovVector(v.p, out)


def act_lower(v: KirillovVector, x: PAdicShell, data: SupercuspidalData) -> KirillovVector:
    """Lower unipotent via the Bruhat word w n(-x) w (-1); -1 acts trivially."""
    if x.is_zero:
        return v
    return act_omega(act_upper(act_omega(v, data), -x), data)


def apply_word(v: KirillovVector, word: Sequence[tuple], data: SupercuspidalData) -> KirillovVector:
    """Apply a product of generators, rightmost factor first.

    Generators: ("diag", a1, a2), ("upper", m), ("omega",), ("lower", x)
    with PAdicShell parameters.
    """
    for gen in reversed(word):
        tag = gen[0]
        if tag == "diag":
            v = act_diag(v, gen[1], gen[2])
        elif tag == "upper":
            v = act_upper(v, gen[1])
        elif tag == "omega":
            v = act_omega(v, data)
        elif tag == "lower":
            v = act_lower(v, gen[1], data)
        else:
            raise ValueError(f"unknown generator {tag!r}")
    return v


# -------------------------------------------------------- Whittaker tables


@dataclass
class WhittakerTable:
    """Values W(u p^n) = sum over nu of a(nu, n) nu(u), one map per shell.

    Normalized so the newform vector has value 1 on the unit shell.
    Produced both by this engine and by the ramified principal-series
    integral formulas; consumed by the matrix-coefficient layer.
    """

    rep: str
    p: int
    i: int
    entries: dict
    normalization: str = "newform-unit"

    def coefficient(self, char: MultChar, n: int) -> CycloNumber:
        return self.entries.get(n, {}).get(char.reduce(), CycloNumber.zero())

    def support_valuations(self) -> list[int]:
        return sorted(n for n, comps in self.entries.items() if comps)

    def component_levels(self, n: int) -> set[int]:
        return {ch.level for ch in self.entries.get(n, {})}

    def shell_norm_squared(self, n: int) -> CycloNumber:
        tot = CycloNumber.zero()
        for a in self.entries.get(n, {}).values():
            tot = tot + a * a.conj()
        return tot

    def level_norm_squared(self, n: int, level: int) -> CycloNumber:
        tot = CycloNumber.zero()
        for ch, a in self.entries.get(n, {}).items():
            if ch.level == level:
                tot = tot + a * a.conj()
        return tot

    def total_norm_squared(self) -> CycloNumber:
        tot = CycloNumber.zero()
        for n in self.entries:
            tot = tot + self.shell_norm_squared(n)
        return tot

    def value(self, u: int, n: int) -> CycloNumber:
        """W at u * p^n for a unit residue u."""
        tot = CycloNumber.zero()
        for ch, a in self.entries.get(n, {}).items():
            tot = tot + a * ch.value(u)
        return tot

    def prune(self) -> "WhittakerTable":
        entries = {}
        for n, comps in self.entries.items():
            keep = {ch: a for ch, a in comps.items() if not a.is_zero()}
            if keep:
                entries[n] = keep
        return WhittakerTable(self.rep, self.p, self.i, entries, self.normalization)


def vector_to_table(v: KirillovVector, rep: str, i: int) -> WhittakerTable:
    entries: dict = {}
    for (ch, n), a in v.terms.items():
        entries.setdefault(n, {})[ch] = a
    return WhittakerTable(rep, v.p, i, entries).prune()


def whittaker_supercuspidal(
    data: SupercuspidalData, i: int, valuation_range: Optional[tuple[int, int]] = None
) -> WhittakerTable:
    """Shell-by-shell table of W(diag(alpha,1) lower(p^i)) on the newform.

    valuation_range = (lo, hi) restricts the returned shells; the
    computation itself is always finite.
    """
    if not 0 <= i <= data.c:
        raise ValueError(f"need 0 <= i <= c = {data.c}, got {i}")
    x = PAdicShell(data.p, i, 1, data.c + 2) if i > 0 else PAdicShell(data.p, 0, 1, data.c + 2)
    v = act_lower(KirillovVector.newform(data.p), x, data)
    table = vector_to_table(v, data.label, i)
    if valuation_range is not None:
        lo, hi = valuation_range
        table.entries = {n: c for n, c in table.entries.items() if lo <= n <= hi}
    return table
