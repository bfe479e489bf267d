"""Diagonal matrix coefficients from Whittaker tables, plus the table-driven
matrix coefficient of an unramified twist of the special representation.

For a new vector with Whittaker table W, the coefficient of the element
(a m; 0 1)(1 0; p^i 1) is the unit-circle pairing

    sum over characters nu in row v(a) of  a(nu, v(a)) nu(unit(a)) *
        (average of psi(m alpha) nu(alpha) over units alpha),

evaluated exactly.  Translated (old) vectors reduce to the same pairing,
directly when the lower-left depth allows it and through an explicit
matrix identity otherwise.  The special-representation coefficient is a
six-entry table indexed by double cosets of the depth-one congruence
subgroup; the classifier reduces any invertible matrix to its coset tag
using only the valuation of the determinant and the mod-p rank pattern.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from random import Random
from typing import Union

from .cyclo import CycloNumber
from .errors import InsufficientPrecision, PrecisionTooLow
from .kirillov import SupercuspidalData, WhittakerTable, whittaker_supercuspidal
from .padic import MultChar, PAdicShell, gauss_integral
from .whittaker import PrincipalSeriesRamified, wi_principal_series

__all__ = [
    "MatCoefQuery",
    "SteinbergRep",
    "phi_from_whittaker",
    "phi_unit_components",
    "phi_oldform",
    "steinberg_classify",
    "phi_steinberg",
    "matrix",
    "mat_mul",
    "mat_inv",
    "random_k1",
]

RepLike = Union[SupercuspidalData, PrincipalSeriesRamified]


@dataclass(frozen=True)
class MatCoefQuery:
    """Diagonal-coset query: the element (a m; 0 1)(1 0; p^i 1).

    `m` may be the exact zero shell; `a` must be invertible.
    """

    a: PAdicShell
    m: PAdicShell
    i: int

    def __post_init__(self):
        if self.a.is_zero:
            raise ValueError("the diagonal entry a must be nonzero")
        if self.a.p != self.m.p:
            raise ValueError("query entries live at different primes")


def _conductor(rep: RepLike) -> int:
    return rep.c


_TABLES: dict = {}


def _table_for(rep: RepLike, i: int, n: int) -> WhittakerTable:
    """Whittaker table of the i-th translate, guaranteed to cover shell n."""
    key = (id(rep), i)
    hit = _TABLES.get(key)
    if hit is not None and hit[0] is rep:
        table = hit[1]
    else:
        if isinstance(rep, PrincipalSeriesRamified):
            table = wi_principal_series(rep, i)
        else:
            table = whittaker_supercuspidal(rep, i)
        _TABLES[key] = (rep, table)
    if isinstance(rep, PrincipalSeriesRamified):
        k, c = rep.k, rep.c
        if i < k:
            lo, hi = 2 * i - c - 2, 2 * i - c + 2
        elif i == k:
            lo, hi = -2, 2 * k + 6
        else:
            lo, hi = -2, 2
        if not lo <= n <= hi:
            skey = (id(rep), i, n)
            shit = _TABLES.get(skey)
            if shit is not None and shit[0] is rep:
                return shit[1]
            single = wi_principal_series(rep, i, valuation_window=(n, n))
            _TABLES[skey] = (rep, single)
            return single
    return table


def _psi_unit_average(m: PAdicShell, nu: MultChar) -> CycloNumber:
    """Average of psi(m*alpha)*nu(alpha) over the unit circle, d*alpha."""
    if m.is_zero or m.valuation >= 0:
        return CycloNumber.one() if nu.is_trivial else CycloNumber.zero()
    if -m.valuation > max(nu.level, 1):
        return CycloNumber.zero()
    return gauss_integral(m, nu.inverse())


def phi_unit_components(rep: RepLike, i: int, va: int, m: PAdicShell) -> dict:
    """Character expansion of a -> Phi((a m; 0 1)(1 0; p^i 1)) on v(a) = va.

    Returns {nu: coefficient}, zeros dropped."""
    table = _table_for(rep, i, va)
    out = {}
    for ch, coeff in table.entries.get(va, {}).items():
        w = _psi_unit_average(m, ch)
        if w.is_zero():
            continue
        val = coeff * w
        if not val.is_zero():
            out[ch] = val
    return out


def phi_from_whittaker(rep: RepLike, q: MatCoefQuery) -> CycloNumber:
    """Exact matrix-coefficient value at (a m; 0 1)(1 0; p^i 1)."""
    c = _conductor(rep)
    if not 0 <= q.i <= c:
        raise ValueError(f"lower-left depth must lie in [0, {c}], got {q.i}")
    p = rep.p
    comps = phi_unit_components(rep, q.i, q.a.valuation, q.m)
    out = CycloNumber.zero()
    for ch, coeff in comps.items():
        u = q.a.unit_mod(p ** max(ch.level, 1))
        out = out + coeff * ch.value(u)
    return out


def _central_at_p(rep: RepLike) -> CycloNumber:
    if isinstance(rep, PrincipalSeriesRamified):
        return rep.mu1.value_at_p * rep.mu2.value_at_p
    return CycloNumber.one()  # mock compact-type data is trivial-center


def phi_oldform(rep: RepLike, n_translate: int, q: MatCoefQuery) -> CycloNumber:
    """Matrix coefficient of the p^{-n}-translated new vector.

    For lower-left depth i >= n this is the new-vector coefficient at
    (a, m p^n, i - n).  For i < n the element factors (exactly) as

        p^{i-n} (a p^{2(n-i)}, a(p^{n-i} - p^{2(n-i)}) + m p^n; 0 1)
                (1 0; 1 1) k

    with k upper-unipotent integral, hence the value is the central
    character at p^{i-n} times the depth-0 coefficient at that argument.
    """
    if n_translate < 0:
        raise ValueError("translate exponent must be >= 0")
    c = _conductor(rep)
    if not 0 <= q.i <= c + n_translate:
        raise ValueError(f"lower-left depth must lie in [0, {c + n_translate}]")
    p = rep.p
    if q.i >= n_translate:
        q2 = MatCoefQuery(q.a, q.m.scale_power(n_translate), q.i - n_translate)
        return phi_from_whittaker(rep, q2)
    d = n_translate - q.i
    prec = max(q.a.precision, c + 2 * d + 4)
    shift = PAdicShell.from_rational(p, Fraction(p**d) - Fraction(p ** (2 * d)), prec)
    t1 = q.a * shift
    t2 = q.m.scale_power(n_translate)
    try:
        m2 = t1 + t2
    except InsufficientPrecision:
        # The two contributions cancel through the whole certified window.
        # Every representative then has v(m2) above the bound below; the
        # depth-0 row lives on a single shell and pairs only against m2
        # of depth exactly c, so past -c the value is zero exactly.
        bound = t1.valuation + min(t1.precision, t2.precision)
        if bound > -c:
            return CycloNumber.zero()
        raise
    a2 = q.a.scale_power(2 * d)
    phi = phi_from_whittaker(rep, MatCoefQuery(a2, m2, 0))
    if phi.is_zero():
        return phi
    return _central_at_p(rep) ** (-d) * phi


# -- special representation ---------------------------------------------------


@dataclass(frozen=True)
class SteinbergRep:
    """Unramified twist of the special representation: determined by the
    unitary value of the twisting character at the uniformizer."""

    p: int
    chi_at_p: CycloNumber

    def __post_init__(self):
        z = self.chi_at_p
        if not isinstance(z, CycloNumber):
            z = CycloNumber.from_rational(z)
            object.__setattr__(self, "chi_at_p", z)
        if z.norm_squared() != 1:
            raise ValueError("the twist value at p must be unitary")


Matrix = tuple  # ((a, b), (c, d)) of PAdicShell


def matrix(p: int, rows, precision: int) -> Matrix:
    """Build a 2x2 shell matrix from rational (or shell) entries."""
    out = []
    for r in range(2):
        row = []
        for cidx in range(2):
            e = rows[r][cidx]
            if not isinstance(e, PAdicShell):
                e = PAdicShell.from_rational(p, Fraction(e), precision)
            row.append(e)
        out.append(tuple(row))
    return tuple(out)


def mat_mul(g: Matrix, h: Matrix) -> Matrix:
    return tuple(
        tuple(g[r][0] * h[0][cidx] + g[r][1] * h[1][cidx] for cidx in range(2))
        for r in range(2)
    )


def mat_inv(g: Matrix) -> Matrix:
    (a, b), (c, d) = g
    det = a * d - b * c
    inv = det.inverse()
    return ((d * inv, (-b) * inv), ((-c) * inv, a * inv))


def _min_valuation(entries) -> int:
    vals = [e.valuation for e in entries if not e.is_zero]
    if not vals:
        raise ValueError("the zero matrix has no coset tag")
    return min(vals)


def steinberg_classify(g: Matrix) -> tuple:
    """Double-coset tag of g modulo center and the depth-one subgroup on
    both sides: one of "1", "w", "s", "ws", "sw", "wsw" with the shell
    index n (0 for the first two).

    After stripping p^(min valuation), the tag is read off the valuation
    of the determinant together with the mod-p pattern: for n = 0 the
    lower-left residue separates "1" from "w"; for n >= 1 the reduction
    has rank one and the tag is fixed by whether the column space is the
    first coordinate line (bottom row vanishing mod p) and whether the
    row space is the second (left column vanishing mod p).
    """
    (a, b), (c, d) = g
    entries = (a, b, c, d)
    vmin = _min_valuation(entries)
    try:
        det = a * d - b * c
    except InsufficientPrecision as exc:
        raise PrecisionTooLow(
            f"determinant not certifiable at working precision: {exc}"
        ) from exc
    if det.is_zero:
        raise ValueError("matrix is singular")
    n = det.valuation - 2 * vmin
    p = a.p
    res = [
        0 if (e.is_zero or e.valuation > vmin) else e.unit_mod(p) for e in entries
    ]
    ra, rb, rc, rd = res
    if n == 0:
        return ("1", 0) if rc == 0 else ("w", 0)
    col_first = rc == 0 and rd == 0
    row_second = ra == 0 and rc == 0
    if col_first and row_second:
        return ("ws", n)
    if col_first:
        return ("wsw", n)
    if row_second:
        return ("s", n)
    return ("sw", n)


def phi_steinberg(rep: SteinbergRep, g: Matrix) -> CycloNumber:
    """Exact matrix-coefficient value via the six-entry coset table,
    including the central-character factor of the stripped scalar."""
    tag, n = steinberg_classify(g)
    p = rep.p
    vmin = _min_valuation((g[0][0], g[0][1], g[1][0], g[1][1]))
    central = (rep.chi_at_p * rep.chi_at_p) ** vmin
    chi_n = rep.chi_at_p**n
    if tag == "1":
        base = CycloNumber.one()
    elif tag == "w":
        base = CycloNumber.from_rational(Fraction(-1, p))
    elif tag == "s" or tag == "wsw":
        base = chi_n * Fraction(1, p**n)
    elif tag == "ws":
        base = chi_n * Fraction(-p, p**n)
    else:  # "sw"
        base = chi_n * Fraction(-1, p ** (n + 1))
    return central * base


def random_k1(p: int, precision: int, seed: int) -> Matrix:
    """Deterministic pseudo-random element of the depth-one congruence
    subgroup (integral, lower-left divisible by p, lower-right 1 mod p),
    carried at the given shell precision."""
    rng = Random(f"k1:{p}:{precision}:{seed}")
    pk = p**precision

    def shell(x):
        return PAdicShell.from_rational(p, x, precision)

    a = shell(p * rng.randrange(pk // p) + rng.randrange(1, p))  # unit
    b = shell(rng.randrange(pk))
    c = shell(p * rng.randrange(pk // p))
    d = shell(1 + p * rng.randrange(pk // p))
    return ((a, b), (c, d))
