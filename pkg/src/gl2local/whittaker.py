"""Whittaker tables for ramified principal-series representations.

A representation is induced from two multiplicative characters of equal
positive level k (conductor exponent c = 2k).  For each translate index
i in [0, c], the value of the i-th translated new vector at a diagonal
argument u p^n reduces to exact character sums over unit shells; this
module evaluates those sums in exact cyclotomic arithmetic and packages
them as `WhittakerTable` objects (shared with the compact-type engine),
plus per-level mass decompositions, an exact total-mass evaluation at
the middle index via linear-recurrence tail summation, a decay check,
and a JSON wire format.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import lcm
from random import Random
from typing import Optional

import numpy as np

from .cyclo import CycloNumber, sqrt_prime, zeta
from .errors import TruncationUnstable, ZeroNormalizer
from .kirillov import WhittakerTable
from .padic import (
    MultChar,
    MultCharExtended,
    PAdicShell,
    all_chars,
    enumerate_chars,
    unit_group,
    gauss_integral,
    char_integral_shifted,
)
from .zetasum import ZetaSum

__all__ = [
    "PrincipalSeriesRamified",
    "WhittakerTable",
    "make_principal_series",
    "random_principal_series",
    "c0_constant",
    "wi_principal_series",
    "decompose_components",
    "total_mass_midlevel",
    "growth_check_midlevel",
    "ComponentDecomposition",
    "GrowthReport",
    "rep_to_json",
    "table_to_json",
    "table_from_json",
]

_ONE = Fraction(1)


@dataclass(frozen=True)
class PrincipalSeriesRamified:
    """Induced-from-the-diagonal data: two unit characters of equal level k
    together with unitary values at the uniformizer; conductor exponent 2k."""

    p: int
    k: int
    mu1: MultCharExtended
    mu2: MultCharExtended
    label: str = ""

    def __post_init__(self):
        if self.p == 2:
            raise ValueError("only odd residue characteristics are supported")
        if self.k < 1:
            raise ValueError("both characters must be ramified (level >= 1)")
        if self.mu1.p != self.p or self.mu2.p != self.p:
            raise ValueError("characters live at a different prime")
        if self.mu1.level != self.k or self.mu2.level != self.k:
            raise ValueError(
                f"need both characters of level exactly {self.k}; "
                f"got {self.mu1.level} and {self.mu2.level}"
            )
        if not self.label:
            t1 = self.mu1.unit_part.reduce().t
            t2 = self.mu2.unit_part.reduce().t
            object.__setattr__(self, "label", f"ps-p{self.p}-k{self.k}-t{t1}.{t2}")

    @property
    def c(self) -> int:
        """Conductor exponent."""
        return 2 * self.k

    @property
    def trivial_central(self) -> bool:
        return self.mu2 == self.mu1.inverse()


def make_principal_series(
    p: int,
    k: int,
    t1: int,
    z1=1,
    t2: Optional[int] = None,
    z2=None,
    label: str = "",
) -> PrincipalSeriesRamified:
    """Build a representation from character exponents at ambient level k.

    With t2/z2 omitted the second character is the inverse of the first,
    so the central character is trivial.
    """
    chi1 = MultChar(p, k, t1)
    mu1 = MultCharExtended(chi1, z1)
    if t2 is None:
        mu2 = mu1.inverse()
        if z2 is not None:
            mu2 = MultCharExtended(mu2.unit_part, z2)
    else:
        mu2 = MultCharExtended(MultChar(p, k, t2), 1 if z2 is None else z2)
    return PrincipalSeriesRamified(p, k, mu1, mu2, label)


def random_principal_series(
    p: int, k: int, seed: int = 0, trivial_central: bool = True
) -> PrincipalSeriesRamified:
    """Deterministic pseudo-random instance: level-k unit characters and
    24th-root uniformizer values drawn from the seed."""
    rng = Random(f"ps-ramified:{p}:{k}:{seed}:{trivial_central}")
    level_k = enumerate_chars(p, k, k)
    t1 = rng.choice(level_k).t
    z1 = zeta(24, rng.randrange(24))
    if trivial_central:
        return make_principal_series(p, k, t1, z1)
    t2 = rng.choice(level_k).t
    z2 = zeta(24, rng.randrange(24))
    return make_principal_series(p, k, t1, z1, t2, z2)


# -- normalizing constant ---------------------------------------------------


@lru_cache(maxsize=None)
def c0_constant(rep: PrincipalSeriesRamified) -> CycloNumber:
    """Value at the new vector's base point: the exact finite sum

        (1/p^k) * sum over units x of (Z/p^k)* of
            mu1(-p^k) * mu2(-x p^-k) * psi(-x p^-k)

    where each unit residue carries additive mass p^-k (the ring of
    integers has volume 1).  Raises ZeroNormalizer when the sum vanishes.
    """
    p, k = rep.p, rep.k
    pk = p**k
    grp = unit_group(p, k)
    phi = grp.order
    chi2 = rep.mu2.unit_part.lift(k)
    M = lcm(pk, phi)
    neg = (-grp.pow_table) % pk
    e_char = (chi2.t * grp.dlog_table[neg]) % phi
    exps = (e_char * (M // phi) + neg * (M // pk)) % M
    acc = ZetaSum.from_exponents(M, exps, np.ones(phi, dtype=np.int64))
    total = acc.to_cyclo() * Fraction(1, pk)
    out = rep.mu1.eval(k, -1) * rep.mu2.value_at_p ** (-k) * total
    if out.is_zero():
        raise ZeroNormalizer("the base-point value of the new vector vanishes")
    return out


# -- shared integral pieces -------------------------------------------------


def _bracket(p: int, d: int, unit: int, char: MultChar) -> CycloNumber:
    """Unit average of (char^-1)(w) psi(unit * p^d * w) d*w.

    For d >= 0 the additive factor is 1 and the average is the indicator
    of the trivial character; for d < 0 it is a Gauss-type sum, zero
    whenever the depth -d exceeds max(level, 1).
    """
    if d >= 0:
        return CycloNumber.one() if char.is_trivial else CycloNumber.zero()
    depth = -d
    if depth > max(char.level, 1):
        return CycloNumber.zero()
    prec = depth
    m = PAdicShell(p, d, unit % p**prec, prec)
    return gauss_integral(m, char)


def _high_shift_avg(rep: PrincipalSeriesRamified, i: int, nu: MultChar) -> CycloNumber:
    """Additive-measure average of chi1^-1(1 + u p^{i-k}) nu(u) over units."""
    k = rep.k
    du_units = _ONE - Fraction(1, rep.p)
    if i == rep.c:
        return CycloNumber(1, {0: du_units}) if nu.is_trivial else CycloNumber.zero()
    chi1_inv = rep.mu1.unit_part.inverse()
    return char_integral_shifted(chi1_inv, nu, i - k, "interior") * du_units


def _low_shift_avg(rep: PrincipalSeriesRamified, i: int, nu: MultChar) -> CycloNumber:
    """Additive-measure average of chi1^-1(u) nu(1 - p^{k-i} u) over units."""
    k = rep.k
    j = k - i
    if nu.level <= j:
        # nu is constant on 1 + p^j O, so the average collapses to the mean
        # of chi1^-1 over the units, which vanishes (chi1 is ramified).
        return CycloNumber.zero()
    chi1_inv = rep.mu1.unit_part.inverse()
    du_units = _ONE - Fraction(1, rep.p)
    sign = rep.mu1.unit_part.value(-1)
    return sign * char_integral_shifted(nu, chi1_inv, j, "interior") * du_units


def _mid_shell_avg(rep: PrincipalSeriesRamified, s: int, nu: MultChar) -> CycloNumber:
    """Additive-measure average over the depth-s part of the lower cell.

    For s < -k this is  z1^{-s} chi1(-1) * (1/p^L) * sum over units x of
    chi1^-1(x) chi1^-1(1 + x^-1 p^{-s-k}) nu(x); at the boundary s = -k
    the shifted factor becomes chi1^-1(1 + x) and the residues with
    x = -1 mod p are excluded.
    """
    p, k = rep.p, rep.k
    chi1 = rep.mu1.unit_part
    L = max(k, nu.level, 1)
    grp = unit_group(p, L)
    grpk = unit_group(p, k)
    phi_L, phi_k = grp.order, grpk.order
    pk = p**k
    e = np.arange(phi_L, dtype=np.int64)
    t1_inv = chi1.inverse().lift(k).t
    nu_t = nu.lift(L).t
    if s == -k:
        args = (1 + grp.pow_table) % pk
        keep = grp.pow_table % p != p - 1
        t_cmb = nu_t
    else:
        d = -s - k
        inv_pow = grp.pow_table[(phi_L - e) % phi_L]
        args = (1 + inv_pow * pow(p, d, pk)) % pk
        keep = np.ones(phi_L, dtype=bool)
        t_cmb = (nu_t - chi1.lift(L).t) % phi_L
    e_shift = (t1_inv * grpk.dlog_table[args[keep]]) % phi_k
    e_cmb = (t_cmb * e[keep]) % phi_L
    M = lcm(phi_k, phi_L)
    exps = (e_shift * (M // phi_k) + e_cmb * (M // phi_L)) % M
    acc = ZetaSum.from_exponents(M, exps, np.ones(int(keep.sum()), dtype=np.int64))
    avg = acc.to_cyclo() * Fraction(1, p**L)
    return rep.mu1.value_at_p ** (-s) * chi1.value(-1) * avg


# -- the table --------------------------------------------------------------


def _entries_low(rep, i, n_range):
    p, k = rep.p, rep.k
    c0inv = c0_constant(rep).inverse()
    rt_inv = sqrt_prime(p).inverse()
    z1, z2 = rep.mu1.value_at_p, rep.mu2.value_at_p
    chi2 = rep.mu2.unit_part
    pref = c0inv * z1**i * rep.mu1.unit_part.value(-1) * Fraction(1, p ** (k - i))
    entries: dict = {}
    for nu in all_chars(p, rep.c - i):
        t_avg = _low_shift_avg(rep, i, nu)
        if t_avg.is_zero():
            continue
        key = nu.reduce()
        for n in n_range:
            br = _bracket(p, n - i, 1, (nu * chi2.inverse()).reduce())
            if br.is_zero():
                continue
            a = pref * z2 ** (n - i) * rt_inv**n * t_avg * br
            if not a.is_zero():
                entries.setdefault(n, {})[key] = a
    return entries


def _entries_high(rep, i, n_range):
    p, k = rep.p, rep.k
    c0inv = c0_constant(rep).inverse()
    rt_inv = sqrt_prime(p).inverse()
    z1, z2 = rep.mu1.value_at_p, rep.mu2.value_at_p
    chi2 = rep.mu2.unit_part
    pref = c0inv * z1**k * rep.mu1.unit_part.value(-1) * chi2.value(-1)
    entries: dict = {}
    for nu in all_chars(p, max(rep.c - i, 1)):
        s_avg = _high_shift_avg(rep, i, nu)
        if s_avg.is_zero():
            continue
        key = nu.reduce()
        for n in n_range:
            br = _bracket(p, n - k, -1, (nu * chi2.inverse()).reduce())
            if br.is_zero():
                continue
            a = pref * z2 ** (n - k) * rt_inv**n * s_avg * br
            if not a.is_zero():
                entries.setdefault(n, {})[key] = a
    return entries


def _entries_mid(rep, n_range):
    p, k = rep.p, rep.k
    c0inv = c0_constant(rep).inverse()
    rt_inv = sqrt_prime(p).inverse()
    z2 = rep.mu2.value_at_p
    chi2 = rep.mu2.unit_part
    pref = c0inv * chi2.value(-1)
    entries: dict = {}
    x_cache: dict = {}
    br_cache: dict = {}
    for nu in all_chars(p, k):
        key = nu.reduce()
        g_char = (nu * chi2.inverse()).reduce()
        for n in n_range:
            s_min = min(-(n + 2 * k + 2), -k - 2)
            total = CycloNumber.zero()
            deepest_nonzero = None
            for s in range(-k, s_min - 1, -1):
                d = n + s
                bk = (g_char, d)
                if bk not in br_cache:
                    br_cache[bk] = _bracket(p, d, -1, g_char)
                br = br_cache[bk]
                if br.is_zero():
                    continue
                xk = (s, key)
                if xk not in x_cache:
                    x_cache[xk] = _mid_shell_avg(rep, s, key)
                xv = x_cache[xk]
                if xv.is_zero():
                    continue
                total = total + z2 ** (n + s) * br * xv
                deepest_nonzero = s
            if deepest_nonzero is not None and deepest_nonzero <= s_min + 1:
                raise TruncationUnstable(
                    f"shells at depth {deepest_nonzero} still contribute at the "
                    f"certification margin v(u) >= {s_min}; widen the cutoff"
                )
            if total.is_zero():
                continue
            a = pref * rt_inv**n * total
            if not a.is_zero():
                entries.setdefault(n, {})[key] = a
    return entries


def wi_principal_series(
    rep: PrincipalSeriesRamified,
    i: int,
    valuation_window: Optional[tuple] = None,
) -> WhittakerTable:
    """Exact diagonal table of the i-th translated new vector.

    Entries map shell valuation n to {unit character: coefficient}, so the
    value at u p^n is the character sum of the n-th row.  The window is an
    inclusive (lo, hi) range of n; the default covers the proven support
    plus a two-shell margin on each side.  For i at the middle index the
    unit integral over the lower cell is truncated at depth n + 2k + 2
    with the two outermost shells required to vanish exactly
    (TruncationUnstable otherwise).
    """
    c = rep.c
    k = rep.k
    if not 0 <= i <= c:
        raise ValueError(f"translate index must lie in [0, {c}], got {i}")
    if valuation_window is None:
        if i < k:
            valuation_window = (2 * i - c - 2, 2 * i - c + 2)
        elif i > k:
            valuation_window = (-2, 2)
        else:
            valuation_window = (-2, 2 * k + 6)
    lo, hi = valuation_window
    n_range = range(lo, hi + 1)
    if i < k:
        entries = _entries_low(rep, i, n_range)
    elif i > k:
        entries = _entries_high(rep, i, n_range)
    else:
        entries = _entries_mid(rep, n_range)
    return WhittakerTable(rep.label, rep.p, i, entries).prune()


# -- reports ----------------------------------------------------------------


@dataclass(frozen=True)
class ComponentDecomposition:
    """Exact squared-mass bookkeeping of a table by (shell, level)."""

    label: str
    p: int
    i: int
    rows: tuple  # (n, level, count, mass CycloNumber)
    shell_totals: tuple  # (n, mass)
    level_totals: tuple  # (level, mass)
    total: CycloNumber

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "kind": "component-decomposition",
            "label": self.label,
            "p": self.p,
            "i": self.i,
            "rows": [
                {
                    "n": n,
                    "level": lev,
                    "count": cnt,
                    "mass": mass.to_json(),
                    "mass_float": float(mass.to_complex().real),
                }
                for n, lev, cnt, mass in self.rows
            ],
            "shell_totals": [
                {"n": n, "mass": m.to_json(), "mass_float": float(m.to_complex().real)}
                for n, m in self.shell_totals
            ],
            "level_totals": [
                {"level": lev, "mass": m.to_json(), "mass_float": float(m.to_complex().real)}
                for lev, m in self.level_totals
            ],
            "total": self.total.to_json(),
            "total_float": float(self.total.to_complex().real),
        }


def decompose_components(table: WhittakerTable) -> ComponentDecomposition:
    """Exact sum of |coefficient|^2 for every (shell valuation, level) cell."""
    rows = []
    shell_totals = []
    level_masses: dict = {}
    total = CycloNumber.zero()
    for n in sorted(table.entries):
        per_level: dict = {}
        for ch, a in table.entries[n].items():
            mass = a * a.conj()
            lev = ch.level
            cur = per_level.get(lev)
            per_level[lev] = (cur[0] + 1, cur[1] + mass) if cur else (1, mass)
        shell_mass = CycloNumber.zero()
        for lev in sorted(per_level):
            cnt, mass = per_level[lev]
            rows.append((n, lev, cnt, mass))
            shell_mass = shell_mass + mass
            level_masses[lev] = level_masses.get(lev, CycloNumber.zero()) + mass
        shell_totals.append((n, shell_mass))
        total = total + shell_mass
    level_totals = tuple((lev, level_masses[lev]) for lev in sorted(level_masses))
    return ComponentDecomposition(
        table.rep, table.p, table.i, tuple(rows), tuple(shell_totals), level_totals, total
    )


# -- exact total mass at the middle index -----------------------------------


def _solve_cyclo_system(a: list, b: list):
    """Gaussian elimination over the cyclotomic field; None when singular."""
    n = len(b)
    rows = [list(a[r]) + [b[r]] for r in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if not rows[r][col].is_zero()), None)
        if piv is None:
            return None
        rows[col], rows[piv] = rows[piv], rows[col]
        inv = rows[col][col].inverse()
        rows[col] = [v * inv for v in rows[col]]
        for r in range(n):
            if r != col and not rows[r][col].is_zero():
                f = rows[r][col]
                rows[r] = [v - f * w for v, w in zip(rows[r], rows[col])]
    return [rows[r][n] for r in range(n)]


def _fit_recurrence(vals: list, max_order: int, certify: int):
    """Smallest-order constant-coefficient linear recurrence satisfied by
    every point of `vals`, with at least `certify` points beyond those used
    to solve for the coefficients.  Returns the coefficient list of
    v[m+r] = sum_j c[j] v[m+j], or None."""
    for r in range(1, max_order + 1):
        if len(vals) < 2 * r + certify:
            return None
        a = [[vals[m + j] for j in range(r)] for m in range(r)]
        b = [vals[m + r] for m in range(r)]
        coeffs = _solve_cyclo_system(a, b)
        if coeffs is None:
            continue
        ok = True
        for m in range(len(vals) - r):
            pred = CycloNumber.zero()
            for j, cj in enumerate(coeffs):
                pred = pred + cj * vals[m + j]
            if pred != vals[m + r]:
                ok = False
                break
        if ok:
            return coeffs
    return None


def _tail_sum(vals: list, coeffs: list) -> CycloNumber:
    """Sum of the sequence continued past `vals` by the recurrence."""
    r = len(coeffs)
    ext = list(vals)
    for _ in range(r):
        nxt = CycloNumber.zero()
        for j, cj in enumerate(coeffs):
            nxt = nxt + cj * ext[len(ext) - r + j]
        ext.append(nxt)
    head = ext[len(vals):]  # s_N .. s_{N+r-1} with N = index after the window
    lhs = CycloNumber.one()
    rhs = CycloNumber.zero()
    partial = CycloNumber.zero()
    for j, cj in enumerate(coeffs):
        lhs = lhs - cj
        rhs = rhs - cj * partial
        partial = partial + head[j]
    rhs = rhs + partial
    if lhs.is_zero():
        raise TruncationUnstable("the mass recurrence has a unit root; no exact tail")
    return rhs * lhs.inverse()


def total_mass_midlevel(rep: PrincipalSeriesRamified, n_hi: Optional[int] = None) -> CycloNumber:
    """Exact total squared mass of the middle-index table over all shells.

    Shell masses for n >= 2k satisfy a constant-coefficient linear
    recurrence (phases of the uniformizer values times 1/p); the window is
    computed exactly, the recurrence is fitted and certified on it, and
    the infinite tail is summed in closed form.  TruncationUnstable when
    no certified recurrence exists.
    """
    k = rep.k
    hi = n_hi if n_hi is not None else 2 * k + 26
    start = 2 * k
    if hi < start + 8:
        raise ValueError(f"window top {hi} too small; need at least {start + 8}")
    table = wi_principal_series(rep, k, (0, hi))
    sig = [table.shell_norm_squared(n) for n in range(hi + 1)]
    window = CycloNumber.zero()
    for s in sig:
        window = window + s
    coeffs = _fit_recurrence(sig[start:], max_order=10, certify=4)
    if coeffs is None:
        raise TruncationUnstable(
            "no certified linear recurrence for the shell masses; widen the window"
        )
    return window + _tail_sum(sig[start:], coeffs)


# -- decay check at the middle index ----------------------------------------


@dataclass(frozen=True)
class GrowthReport:
    """Numeric shell norms against the decay envelope p^{(alpha-1/2) n} * n."""

    label: str
    p: int
    alpha: Fraction
    a_max: int
    rows: tuple  # (n, norm, envelope, ratio)
    constant: float
    argmax_n: int
    passed: bool

    def to_json(self) -> dict:
        return {
            "schema_version": 1,
            "kind": "growth-report",
            "label": self.label,
            "p": self.p,
            "alpha": [self.alpha.numerator, self.alpha.denominator],
            "a_max": self.a_max,
            "rows": [
                {"n": n, "norm": nr, "envelope": env, "ratio": rt}
                for n, nr, env, rt in self.rows
            ],
            "constant": self.constant,
            "argmax_n": self.argmax_n,
            "passed": self.passed,
        }


def growth_check_midlevel(
    rep: PrincipalSeriesRamified, a_max: int, alpha: Fraction = Fraction(7, 64)
) -> GrowthReport:
    """Compare middle-index shell norms with C * p^{(alpha-1/2) n} * max(n,1).

    The fitted constant is the largest ratio over the window; the check
    passes when that maximum is attained away from the window edge and the
    trailing ratios decrease, i.e. the envelope genuinely dominates.
    """
    k, p = rep.k, rep.p
    table = wi_principal_series(rep, k, (0, a_max))
    rows = []
    for n in range(a_max + 1):
        norm = float(table.shell_norm_squared(n).to_complex().real) ** 0.5
        env = float(p) ** (float(alpha - Fraction(1, 2)) * n) * max(n, 1)
        rows.append((n, norm, env, norm / env))
    ratios = [r[3] for r in rows]
    argmax_n = max(range(len(ratios)), key=ratios.__getitem__)
    tail = ratios[-3:]
    passed = argmax_n <= a_max - 3 and all(x > y for x, y in zip(tail, tail[1:]))
    return GrowthReport(
        rep.label, p, alpha, a_max, tuple(rows), max(ratios), argmax_n, passed
    )


# -- wire format -------------------------------------------------------------


def rep_to_json(rep: PrincipalSeriesRamified) -> dict:
    return {
        "family": "ramified-principal-series",
        "p": rep.p,
        "k": rep.k,
        "label": rep.label,
        "trivial_central": rep.trivial_central,
        "char1": {"ambient": rep.k, "exponent": rep.mu1.unit_part.lift(rep.k).t},
        "unif1": rep.mu1.value_at_p.to_json(),
        "char2": {"ambient": rep.k, "exponent": rep.mu2.unit_part.lift(rep.k).t},
        "unif2": rep.mu2.value_at_p.to_json(),
    }


def table_to_json(table: WhittakerTable, rep_meta: Optional[dict] = None) -> dict:
    """Schema: rep descriptor, translate index, and per-shell term lists with
    each coefficient spelled as [exponent, numerator, denominator] rows."""
    entries = []
    for n in sorted(table.entries):
        terms = []
        for ch in sorted(table.entries[n], key=lambda c: (c.level, c.k, c.t)):
            a = table.entries[n][ch]
            terms.append(
                {
                    "char_ambient": ch.k,
                    "char_exponent": ch.t,
                    "coeff_modulus_M": a.modulus,
                    "coeff": [
                        [j, c.numerator, c.denominator]
                        for j, c in sorted(a.coeffs.items())
                    ],
                }
            )
        entries.append({"n": n, "terms": terms})
    return {
        "schema_version": 1,
        "kind": "whittaker-table",
        "label": table.rep,
        "p": table.p,
        "i": table.i,
        "normalization": table.normalization,
        "rep": rep_meta,
        "entries": entries,
    }


def table_from_json(obj: dict) -> WhittakerTable:
    p = int(obj["p"])
    entries: dict = {}
    for row in obj["entries"]:
        comps = {}
        for term in row["terms"]:
            ch = MultChar(p, int(term["char_ambient"]), int(term["char_exponent"]))
            coeff = CycloNumber(
                int(term["coeff_modulus_M"]),
                {int(j): Fraction(int(nu), int(de)) for j, nu, de in term["coeff"]},
            )
            comps[ch.reduce()] = coeff
        entries[int(row["n"])] = comps
    return WhittakerTable(
        obj.get("label", ""), p, int(obj["i"]), entries, obj.get("normalization", "newform-unit")
    )
