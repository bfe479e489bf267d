"""Exact local integrals built from coset-decomposed matrix coefficients.

The central object is the weighted double integral

    I = sum_i A_i * integral( F1*F2*F3((a m; 0 1)(1 0; p^i 1)) |a|^{-1} d*a dm )

where the A_i are the exact coset weights of the upper-triangular-times-
congruence decomposition, d*a gives the units volume 1, and dm gives the
integers volume 1.  On every (i, v(a), v(m))-cell each factor expands as a
finite sum of bilinear unit characters acting on (unit a, unit m), so the
unit averages collapse to exact character-constraint convolutions; every
value is an exact cyclotomic number.  The one unbounded shell sum (the
half-depth coset index of a ramified principal series) is closed by fitting
a certified linear recurrence to the shell values and summing the geometric
tail in closed form.

The module also evaluates the paired Whittaker zeta integral J_p(s) on its
single supporting shell, and packages every bound comparison as a
BoundReport with a window-stability certificate.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Union

from .arith import euler_phi, require_odd_prime
from .cyclo import CycloNumber, zeta
from .errors import (
    HypothesisViolated,
    NonRationalNorm,
    PrecisionTooLow,
    TruncationUnstable,
    WindowUnstable,
)
from .kirillov import SupercuspidalData
from .matcoef import SteinbergRep, _table_for, matrix, phi_steinberg
from .padic import (
    MultCharExtended,
    PAdicShell,
    all_chars,
    gauss_integral,
    trivial_char,
)
from .whittaker import PrincipalSeriesRamified, _fit_recurrence, _tail_sum

Rational = Union[int, Fraction]

__all__ = [
    "IwasawaWeights",
    "BoundReport",
    "iwasawa_weights",
    "NewformSlot",
    "ConjugateSlot",
    "SteinbergSlot",
    "triple_product_Iv",
    "normalized_Iv0",
    "rankin_selberg_Jp",
    "triple_bound_grid",
    "rankin_selberg_grid",
]


# -- coset weights -----------------------------------------------------------


@dataclass(frozen=True)
class IwasawaWeights:
    """Exact masses of the lower-left-depth cosets, indexed 0..c."""

    p: int
    c: int
    weights: tuple

    def total(self) -> Fraction:
        return sum(self.weights, Fraction(0))


def iwasawa_weights(p: int, c: int) -> IwasawaWeights:
    """Exact coset masses: depth 0 gets p/(p+1), depth c gets
    1/((p+1)p^{c-1}), and every intermediate depth i gets (p-1)/((p+1)p^i)."""
    require_odd_prime(p)
    if c < 1:
        raise ValueError(f"coset depth must be at least 1, got {c}")
    ws = [Fraction(p, p + 1)]
    for i in range(1, c):
        ws.append(Fraction(p - 1, (p + 1) * p**i))
    ws.append(Fraction(1, (p + 1) * p ** (c - 1)))
    return IwasawaWeights(p, c, tuple(ws))


# -- report plumbing ---------------------------------------------------------


def _to_complex(z: CycloNumber) -> complex:
    out = 0j
    for j, a in z.coeffs.items():
        out += float(a) * cmath.exp(2j * cmath.pi * j / z.modulus)
    return out


@dataclass(frozen=True)
class BoundReport:
    """One certified comparison |value| <= bound, with its window data."""

    check: str
    p: int
    c: int
    config: str
    value: Optional[CycloNumber]
    norm_squared: object  # Fraction when exact, float otherwise
    exact: bool
    bound: Fraction
    passed: bool
    window: dict
    seed: Optional[int] = None
    diagnostics: dict = field(default_factory=dict, compare=False)

    def to_json(self) -> dict:
        ns = self.norm_squared
        if isinstance(ns, Fraction):
            ns_json = [ns.numerator, ns.denominator]
        else:
            ns_json = float(ns)
        return {
            "check": self.check,
            "p": self.p,
            "c": self.c,
            "config": self.config,
            "value": {"exact": self.exact, "norm_squared": ns_json},
            "bound": [self.bound.numerator, self.bound.denominator],
            "pass": self.passed,
            "window": self.window,
            "seed": self.seed,
        }


def _norm_and_exact(value: CycloNumber):
    try:
        return value.norm_squared(), True
    except NonRationalNorm:
        return abs(_to_complex(value)) ** 2, False


def _certified_sign(z: CycloNumber) -> int:
    """Sign of a real cyclotomic number, certified by escalating the
    working precision until the numeric estimate clears its error bound."""
    if z.is_zero():
        return 0
    if z.is_rational():
        return 1 if z.to_rational() > 0 else -1
    import mpmath

    mass = 1 + float(sum(abs(c) for c in z.coeffs.values()))
    for dps in (40, 80, 160, 320):
        with mpmath.workdps(dps):
            tot = mpmath.mpf(0)
            for j, c in z.coeffs.items():
                ang = 2 * mpmath.pi * j / z.modulus
                tot += (mpmath.mpf(c.numerator) / c.denominator) * mpmath.cos(ang)
            err = mpmath.mpf(10) ** (6 - dps) * mass
            if abs(tot) > err:
                return 1 if tot > 0 else -1
    raise PrecisionTooLow(
        "cannot certify the sign of the bound comparison at 320 digits"
    )


def _compare(value: CycloNumber, bound: Fraction) -> bool:
    """Certified |value| <= bound using exact arithmetic throughout."""
    diff = CycloNumber.from_rational(bound * bound) - value * value.conj()
    return _certified_sign(diff) >= 0


# -- slot providers ----------------------------------------------------------
#
# A slot describes one factor of the integrand on each cell.  The cell at
# coset index i, a-shell v(a) = va and m-shell v(m) = vm carries a dict
#     {(alpha, beta): coefficient}
# meaning  sum coeff * alpha(unit a) * beta(unit m),  with unit characters
# alpha, beta.  Shells with v(m) >= 0 describe the subdivision of the
# integral-m region; `o_ball` is the value on the ball v(m) >= T (with the
# exact point m = 0 included).


def _tt(p: int):
    t = trivial_char(p, 1)
    return (t, t)


_GAUSS: dict = {}


def _gauss0(p: int, t: int, ch) -> CycloNumber:
    """Unit integral of the additive character at depth t against ch,
    cached by the reduced character (it recurs across representations)."""
    key = (p, t, ch)
    val = _GAUSS.get(key)
    if val is None:
        ref = PAdicShell(p, -t, 1, t + 2)
        val = gauss_integral(ref, ch.inverse())
        _GAUSS[key] = val
    return val


RepLike = Union[PrincipalSeriesRamified, SupercuspidalData]


class NewformSlot:
    """New-vector matrix coefficient, optionally translated `translate`
    steps down the diagonal (an old-vector at depth conductor+translate)."""

    def __init__(self, rep: RepLike, translate: int = 0):
        if translate < 0:
            raise ValueError("translate must be nonnegative")
        if isinstance(rep, PrincipalSeriesRamified) and not rep.trivial_central:
            raise HypothesisViolated(
                "slot factors must have trivial central character"
            )
        self.rep = rep
        self.p = rep.p
        self.translate = translate
        self.depth = rep.c + translate

    # depth of the translated slot's own conductor
    @property
    def conductor(self) -> int:
        return self.rep.c

    def describe(self) -> str:
        label = getattr(self.rep, "label", "") or f"level-{self.rep.c}"
        if self.translate:
            return f"old(n={self.translate},{label})"
        return f"new({label})"

    def _j(self, i: int) -> int:
        return min(i, self.depth) - self.translate

    def _row(self, i: int, va: int) -> dict:
        return _table_for(self.rep, self._j(i), va).entries.get(va, {})

    def va_support(self, i: int):
        j = self._j(i)
        if j < 0:
            return ("finite", {2 * j - self.rep.c})
        rep = self.rep
        if isinstance(rep, PrincipalSeriesRamified) and j == rep.k:
            return ("all_nonneg", None)
        if isinstance(rep, PrincipalSeriesRamified):
            probe = 2 * j - rep.c if j < rep.k else 0
        else:
            probe = 0
        table = _table_for(rep, j, probe)
        return ("finite", {n for n, row in table.entries.items() if row})

    def m_depths(self, i: int, va: int):
        if self._j(i) < 0:
            return ("finite", set(), False)
        row = self._row(i, va)
        ts = set()
        o_flag = False
        for ch in row:
            ts.add(max(ch.level, 1) + self.translate)
            if ch.is_trivial:
                o_flag = True
                ts.update(range(1, self.translate + 1))
        return ("finite", ts, o_flag)

    def cell(self, i: int, va: int, vm: int) -> dict:
        if self._j(i) < 0:
            # below the translate depth the value lives on one shifted
            # shell where the unit dependence is not bilinear; partner
            # supports are disjoint from it whenever conductor + 2n <
            # partner level, so pairing always short-circuits first
            if va == 2 * self._j(i) - self.rep.c:
                raise HypothesisViolated(
                    "translated slot evaluated on its shallow shell, where "
                    "the unit dependence has no bilinear character form"
                )
            return {}
        row = self._row(i, va)
        p = self.p
        out: dict = {}
        teff = -vm - self.translate  # depth of the shifted m-argument
        for ch, coeff in row.items():
            if teff <= 0:
                if ch.is_trivial:
                    key = _tt(p)
                    out[key] = out.get(key, CycloNumber.zero()) + coeff
                continue
            if teff != max(ch.level, 1):
                continue
            g0 = _gauss0(p, teff, ch)
            if g0.is_zero():
                continue
            key = (ch, ch.inverse())
            out[key] = out.get(key, CycloNumber.zero()) + coeff * g0
        return {k: v for k, v in out.items() if not v.is_zero()}

    def o_depth(self, i: int, va: int) -> int:
        return 0

    def o_ball(self, i: int, va: int, depth: int) -> dict:
        return self.cell(i, va, max(depth, 0))


class ConjugateSlot:
    """Pointwise complex conjugate of another slot (its pairing partner)."""

    def __init__(self, base):
        self.base = base
        self.p = base.p
        self.depth = base.depth

    def describe(self) -> str:
        return f"conj[{self.base.describe()}]"

    @staticmethod
    def _flip(cellmap: dict) -> dict:
        return {
            (a.inverse(), b.inverse()): v.conj() for (a, b), v in cellmap.items()
        }

    def va_support(self, i: int):
        return self.base.va_support(i)

    def m_depths(self, i: int, va: int):
        return self.base.m_depths(i, va)

    def cell(self, i: int, va: int, vm: int) -> dict:
        return self._flip(self.base.cell(i, va, vm))

    def o_depth(self, i: int, va: int) -> int:
        return self.base.o_depth(i, va)

    def o_ball(self, i: int, va: int, depth: int) -> dict:
        return self._flip(self.base.o_ball(i, va, depth))


class SteinbergSlot:
    """Square-integrable special-representation matrix coefficient with a
    unitary quadratic twist, optionally translated `translate` steps.

    Values are piecewise constant in the cell coordinates; the only unit
    dependence is through the cancellation depth e = v(unit a + unit m)
    on cells where the two summands of the upper-left entry share a
    valuation, and that dependence is expanded into unit characters of
    modulus p^e exactly.
    """

    def __init__(self, rep: SteinbergRep, translate: int = 0):
        if translate < 0:
            raise ValueError("translate must be nonnegative")
        sq = rep.chi_at_p * rep.chi_at_p
        if sq != CycloNumber.one():
            raise HypothesisViolated(
                "slot factors must have trivial central character; the "
                "special-representation twist must square to 1"
            )
        self.rep = rep
        self.p = rep.p
        self.translate = translate
        self.depth = 1 + translate

    def describe(self) -> str:
        sign = "1" if self.rep.chi_at_p == CycloNumber.one() else "-1"
        if self.translate:
            return f"steinberg(chi={sign},n={self.translate})"
        return f"steinberg(chi={sign})"

    def va_support(self, i: int):
        return ("any", None)

    def m_depths(self, i: int, va: int):
        return ("any", None, True)

    def _value(self, i: int, va: int, vm: int, um: Fraction) -> CycloNumber:
        p, n = self.p, self.translate
        a = Fraction(p) ** va
        m = um * Fraction(p) ** vm
        prec = 8 + abs(va) + abs(vm) + i + n
        g = matrix(
            p,
            ((a + m * Fraction(p) ** i, m * Fraction(p) ** n),
             (Fraction(p) ** (i - n), Fraction(1))),
            prec,
        )
        return phi_steinberg(self.rep, g)

    def cell(self, i: int, va: int, vm: int) -> dict:
        p = self.p
        if va != vm + i:
            return {_tt(p): self._value(i, va, vm, Fraction(1))}
        # cancellation channel: split on e = v(unit a + unit m)
        others = min(vm + self.translate, i - self.translate, 0)
        stab = max(0, others - va) + 1
        vals = [
            self._value(i, va, vm, Fraction(p**e - 1) if e else Fraction(1))
            for e in range(stab + 2)
        ]
        if vals[stab] != vals[stab + 1]:
            raise WindowUnstable(
                "coset classification did not stabilize across the "
                "cancellation depth"
            )
        out: dict = {_tt(p): vals[0]}
        for e in range(1, stab + 1):
            delta = vals[e] - vals[e - 1]
            if delta.is_zero():
                continue
            w = Fraction(1, euler_phi(p**e))
            sign_at = (-1) % p**e
            for nu in all_chars(p, e):
                key = (nu, nu.inverse())
                term = delta * nu.value(sign_at) * w
                out[key] = out.get(key, CycloNumber.zero()) + term
        return {k: v for k, v in out.items() if not v.is_zero()}

    def o_depth(self, i: int, va: int) -> int:
        return max(0, va - i) + 2

    def o_ball(self, i: int, va: int, depth: int) -> dict:
        p = self.p
        ball = {_tt(p): self._value(i, va, max(depth, 0), Fraction(0))}
        probe = self.cell(i, va, max(depth, 0))
        if probe != ball:
            raise WindowUnstable(
                "deep-m values did not stabilize at the subdivision depth"
            )
        return ball


# -- the cell pairing --------------------------------------------------------


def _cell_pair(dicts) -> CycloNumber:
    """Average of the product of bilinear character forms over independent
    uniform unit pairs: only triples whose combined characters are trivial
    in both coordinates survive."""
    total = CycloNumber.zero()
    if any(not d for d in dicts):
        return total
    ds = sorted(dicts, key=len)
    d1, d2, d3 = ds
    for (a1, b1), v1 in d1.items():
        for (a2, b2), v2 in d2.items():
            key = ((a1 * a2).inverse(), (b1 * b2).inverse())
            v3 = d3.get(key)
            if v3 is not None:
                total = total + v1 * v2 * v3
    return total


# -- the integrator ----------------------------------------------------------


def _pair_at(slots, i: int, va: int, vm: int) -> CycloNumber:
    """Cell product average, evaluating the partner slots first so that an
    empty partner cell short-circuits before the first slot is touched."""
    d2 = slots[1].cell(i, va, vm)
    if not d2:
        return CycloNumber.zero()
    d3 = slots[2].cell(i, va, vm)
    if not d3:
        return CycloNumber.zero()
    return _cell_pair([slots[0].cell(i, va, vm), d2, d3])


def _va_total(slots, i: int, va: int, t_margin: int) -> CycloNumber:
    """Exact m-integral of the slot product on the a-shell `va`, times the
    |a|^{-1} Haar factor p^{va}."""
    p = slots[0].p
    specs = [s.m_depths(i, va) for s in slots]
    finite = [ts for kind, ts, _ in specs if kind == "finite"]
    if not finite:
        raise ValueError("at least one slot must declare finite shell depths")
    union_ts = set().union(*finite)
    t_hi = (max(union_ts) if union_ts else 0) + t_margin
    total = CycloNumber.zero()
    for t in range(1, t_hi + 1):
        v = _pair_at(slots, i, va, -t)
        if not v.is_zero():
            total = total + v * Fraction((p - 1) * p ** (t - 1))
    if all(o for _, _, o in specs):
        depth = max(s.o_depth(i, va) for s in slots)
        if depth == 0:
            total = total + _cell_pair([s.o_ball(i, va, 0) for s in slots])
        else:
            for tp in range(depth):
                v = _pair_at(slots, i, va, tp)
                if not v.is_zero():
                    total = total + v * Fraction(p - 1, p ** (tp + 1))
            ball = _cell_pair([s.o_ball(i, va, depth) for s in slots])
            total = total + ball * Fraction(1, p**depth)
    haar = Fraction(p**va) if va >= 0 else Fraction(1, p**-va)
    return total * haar


def _mid_k(slots) -> int:
    ks = [
        s.rep.k
        for s in slots
        if isinstance(s, NewformSlot)
        and isinstance(s.rep, PrincipalSeriesRamified)
    ]
    ks += [
        s.base.rep.k
        for s in slots
        if isinstance(s, ConjugateSlot)
        and isinstance(s.base, NewformSlot)
        and isinstance(s.base.rep, PrincipalSeriesRamified)
    ]
    return max(ks) if ks else 1


def _evaluate(slots, va_margin: int, t_margin: int, mid_top: int,
              mid_extra: int = 0):
    """One full pass: exact total, per-coset-index terms, tail bookkeeping."""
    p = slots[0].p
    top = max(s.depth for s in slots)
    weights = iwasawa_weights(p, top).weights
    total = CycloNumber.zero()
    per_index = {}
    tail_indices = []
    for i in range(top + 1):
        kinds = [s.va_support(i) for s in slots]
        finite_sets = [set(v) for kind, v in kinds if kind == "finite"]
        term = CycloNumber.zero()
        if finite_sets:
            union = set().union(*finite_sets)
            if union:
                lo = min(union) - va_margin
                hi = max(union) + va_margin
                for va in range(lo, hi + 1):
                    term = term + _va_total(slots, i, va, t_margin)
        elif any(kind == "all_nonneg" for kind, _ in kinds):
            tail_indices.append(i)
            n_start = max(4, 2 * _mid_k(slots) + 2)
            n_top = max(mid_top, n_start + 29) + mid_extra
            seq = []
            for va in range(-va_margin, n_top + 1):
                seq.append(_va_total(slots, i, va, t_margin))
            for v in seq[: va_margin + n_start]:
                term = term + v
            window = seq[va_margin + n_start:]
            for v in window:
                term = term + v
            if not all(v.is_zero() for v in window):
                coeffs = _fit_recurrence(window, max_order=12, certify=4)
                if coeffs is None:
                    raise WindowUnstable(
                        "no certified linear recurrence closes the unbounded "
                        "shell sum; widen the window"
                    )
                try:
                    term = term + _tail_sum(window, coeffs)
                except TruncationUnstable as exc:
                    raise WindowUnstable(str(exc)) from exc
        else:
            raise ValueError(
                "cannot bound the a-shell range: no slot constrains it"
            )
        scaled = term * weights[i]
        per_index[i] = scaled
        total = total + scaled
    return total, per_index, tail_indices


def _partner_level(slot) -> Optional[int]:
    if isinstance(slot, NewformSlot) and slot.translate == 0:
        return slot.rep.c
    if isinstance(slot, ConjugateSlot):
        return _partner_level(slot.base)
    return None


def _classify_bound(slot1, c: int) -> Fraction:
    """Certified bound for |I| by the type of the first slot."""
    p = slot1.p
    base = Fraction(4, p**c)
    if isinstance(slot1, SteinbergSlot):
        n = slot1.translate
        if n and not 1 + 2 * n < c:
            raise HypothesisViolated(
                f"translated special slot needs 1 + 2n < c; got n={n}, c={c}"
            )
        return base * p ** (2 * n)
    if isinstance(slot1, ConjugateSlot):
        return _classify_bound(slot1.base, c)
    if isinstance(slot1, NewformSlot):
        c1, n = slot1.rep.c, slot1.translate
        if n and not c1 + 2 * n < c:
            raise HypothesisViolated(
                f"translated slot needs conductor + 2n < c; got "
                f"conductor={c1}, n={n}, c={c}"
            )
        if c1 > c:
            raise HypothesisViolated(
                "first slot conductor must not exceed the partner level"
            )
        return base * p**n
    raise HypothesisViolated(f"unsupported first-slot type {type(slot1)!r}")


def triple_product_Iv(
    slot1,
    slot2,
    slot3,
    window: Optional[dict] = None,
    *,
    seed: Optional[int] = None,
) -> BoundReport:
    """Exact trilinear coset integral of three slot factors, with the bound
    comparison dictated by the first slot's type and a window-doubling
    stability certificate.

    `window` accepts {"va_margin", "t_margin", "mid_top"}; margins default
    to two shells beyond the declared supports.  WindowUnstable when
    doubling the window changes the value.
    """
    slots = (slot1, slot2, slot3)
    p = slot1.p
    if any(s.p != p for s in slots):
        raise HypothesisViolated("all slots must share the same prime")
    c2, c3 = _partner_level(slot2), _partner_level(slot3)
    if c2 is None or c3 is None or c2 != c3:
        raise HypothesisViolated(
            "the certified comparisons pair two untranslated new-vector "
            "slots of a common level in the second and third positions"
        )
    c = c2
    bound = _classify_bound(slot1, c)

    w = dict(window or {})
    va_margin = int(w.get("va_margin", 2))
    t_margin = int(w.get("t_margin", 2))
    mid_top = int(w.get("mid_top", 0))
    if va_margin < 1 or t_margin < 1:
        raise ValueError("window margins must be at least 1")

    value, per_index, tails = _evaluate(slots, va_margin, t_margin, mid_top)
    value2, _, _ = _evaluate(
        slots, 2 * va_margin, 2 * t_margin, mid_top, mid_extra=8
    )
    if value != value2:
        raise WindowUnstable(
            "doubling the integration window changed the value"
        )

    norm2, exact = _norm_and_exact(value)
    config = "|".join(s.describe() for s in slots)
    return BoundReport(
        check="triple-product",
        p=p,
        c=c,
        config=config,
        value=value,
        norm_squared=norm2,
        exact=exact,
        bound=bound,
        passed=_compare(value, bound),
        window={
            "va_margin": va_margin,
            "t_margin": t_margin,
            "mid_top": mid_top or None,
            "tail_indices": tails,
            "stable": True,
        },
        seed=seed,
        diagnostics={"per_index": per_index},
    )


# -- normalization -----------------------------------------------------------


def normalized_Iv0(
    iv: BoundReport, local_L_inputs: Optional[dict] = None
) -> BoundReport:
    """Normalized variant: value scaled by adjoint/(zeta2^2 * central).

    Defaults take every ramified factor to be 1 and zeta2 = (1-p^{-2})^{-1},
    so the default scale is (1-p^{-2})^2.  The comparison bound is 10^5/p^c.
    """
    p, c = iv.p, iv.c
    inputs = dict(local_L_inputs or {})
    adjoint = Fraction(inputs.get("adjoint", 1))
    central = Fraction(inputs.get("central", 1))
    zeta2 = Fraction(inputs.get("zeta2", Fraction(p * p, p * p - 1)))
    if central == 0 or zeta2 == 0:
        raise ValueError("normalizing factors must be nonzero")
    scale = adjoint / (zeta2 * zeta2 * central)
    bound = Fraction(10**5, p**c)
    if iv.value is None:
        raise ValueError("the report carries no exact value to normalize")
    value = iv.value * scale
    if isinstance(iv.norm_squared, Fraction):
        norm2 = iv.norm_squared * scale * scale
    else:
        norm2 = iv.norm_squared * float(scale * scale)
    return BoundReport(
        check="triple-product-normalized",
        p=p,
        c=c,
        config=iv.config,
        value=value,
        norm_squared=norm2,
        exact=iv.exact,
        bound=bound,
        passed=_compare(value, bound),
        window=iv.window,
        seed=iv.seed,
        diagnostics={"scale": scale},
    )


# -- paired Whittaker zeta integral ------------------------------------------


def rankin_selberg_Jp(
    rep1: RepLike,
    rep2: Optional[RepLike],
    eis_spec: dict,
    e_p: int,
) -> BoundReport:
    """Exact modulus of the paired Whittaker integral against a depth-i
    induced section.

    eis_spec carries {"i": int, "chi": MultChar | MultCharExtended | None,
    "s": Fraction (real part, must be 1/2), "phase": (M, j) | None}.  The
    second Whittaker factor is built against the opposite additive
    character; passing rep2 = None pairs rep1 with its own conjugate.
    The support is the single shell v(alpha) = 2i - c, so the |alpha|^{s-1}
    factor contributes the exact modulus p^{i-c/2} and a unimodular phase.
    """
    p, c = rep1.p, rep1.c
    if c % 2:
        raise HypothesisViolated(
            "the report schema needs an even level so the modulus is exact"
        )
    conj_pair = rep2 is None
    if not conj_pair:
        if rep2.p != p or rep2.c != c:
            raise HypothesisViolated(
                "both factors must share the prime and the level"
            )
        if isinstance(rep2, PrincipalSeriesRamified) and not rep2.trivial_central:
            raise HypothesisViolated("central characters must be trivial")
    if isinstance(rep1, PrincipalSeriesRamified) and not rep1.trivial_central:
        raise HypothesisViolated("central characters must be trivial")
    if c <= 2 * e_p:
        raise HypothesisViolated(f"need level > 2*e_p; got c={c}, e_p={e_p}")
    i = int(eis_spec["i"])
    if not 0 <= i < e_p:
        raise HypothesisViolated(f"section depth must lie in [0, {e_p}), got {i}")
    s = Fraction(eis_spec.get("s", Fraction(1, 2)))
    if s != Fraction(1, 2):
        raise HypothesisViolated(
            f"the modulus computation sits on the critical line; got Re(s)={s}"
        )
    chi = eis_spec.get("chi")
    if chi is None:
        chi_u, chi_p = trivial_char(p, 1), CycloNumber.one()
    elif isinstance(chi, MultCharExtended):
        chi_u, chi_p = chi.unit_part, chi.value_at_p
    else:
        chi_u, chi_p = chi, CycloNumber.one()
    if chi_u.p != p:
        raise HypothesisViolated("twist character prime mismatch")
    if chi_u.level > min(i, e_p - i):
        raise HypothesisViolated(
            f"twist level {chi_u.level} exceeds min(i, e_p - i) = "
            f"{min(i, e_p - i)}"
        )
    phase = eis_spec.get("phase")

    shell = 2 * i - c
    row1 = dict(_table_for(rep1, i, shell).entries.get(shell, {}))
    if conj_pair:
        row2 = {nu.inverse(): a.conj() for nu, a in row1.items()}
    else:
        row2raw = _table_for(rep2, i, shell).entries.get(shell, {})
        row2 = {}
        for nu, a in row2raw.items():
            sign = nu.value((-1) % p ** max(nu.level, 1))
            row2[nu] = a * sign

    avg = CycloNumber.zero()
    for nu, a in row1.items():
        partner = row2.get((nu * chi_u).inverse())
        if partner is not None:
            avg = avg + a * partner

    # coset weight (p-1)/((p+1)p^i) times the shell modulus p^{i-c/2}
    full_scale = Fraction(p - 1, (p + 1) * p ** (c // 2))
    value = avg * full_scale * chi_p**shell
    if phase is not None:
        value = value * zeta(int(phase[0]), int(phase[1]))

    norm2, exact = _norm_and_exact(value)
    avg_norm2, _ = _norm_and_exact(avg)
    bound = full_scale
    label1 = getattr(rep1, "label", "") or f"level-{c}"
    label2 = "conj" if conj_pair else (getattr(rep2, "label", "") or f"level-{c}")
    config = (
        f"rs({label1}*{label2},i={i},chi=({chi_u.level},{chi_u.t}),"
        f"e_p={e_p})"
    )
    return BoundReport(
        check="rankin-selberg",
        p=p,
        c=c,
        config=config,
        value=value,
        norm_squared=norm2,
        exact=exact,
        bound=bound,
        passed=_compare(value, bound),
        window={"shell": shell},
        seed=None,
        diagnostics={
            "cauchy_schwarz_ratio": float(avg_norm2) ** 0.5,
            "saturated": isinstance(avg_norm2, Fraction) and avg_norm2 == 1,
        },
    )


# -- certification grids -----------------------------------------------------


def triple_bound_grid(
    primes=(3, 5),
    levels=(2, 4),
    seeds=range(1, 21),
    ps_seeds=(1, 2),
    window: Optional[dict] = None,
) -> list:
    """Deterministic sweep of the certified triple-product configurations:
    special and lower-level first slots against same-level partner pairs
    drawn from mock compact-type data (the given seeds) and ramified
    principal series (the given ps_seeds), plus the translated first-slot
    variants wherever their hypotheses hold."""
    from .kirillov import mock_supercuspidal
    from .whittaker import random_principal_series

    reports = []
    for p in primes:
        for c in levels:
            partners = []
            for seed in seeds:
                rep = mock_supercuspidal(p, c, seed)
                partners.append((seed, rep))
            for seed in ps_seeds:
                rep = random_principal_series(p, c // 2, seed)
                partners.append((None, rep))
            slot1s = [SteinbergSlot(SteinbergRep(p, 1))]
            slot1s.append(SteinbergSlot(SteinbergRep(p, -1)))
            if 1 + 2 < c:
                slot1s.append(SteinbergSlot(SteinbergRep(p, 1), translate=1))
            for seed in ps_seeds:
                low = random_principal_series(p, 1, seed)
                if low.c < c:
                    slot1s.append(NewformSlot(low))
                if low.c + 2 < c:
                    slot1s.append(NewformSlot(low, translate=1))
            for first in slot1s:
                for seed, rep in partners:
                    s2 = NewformSlot(rep)
                    reports.append(
                        triple_product_Iv(
                            first, s2, ConjugateSlot(s2), window, seed=seed
                        )
                    )
    reports.sort(key=lambda r: (r.p, r.c, r.config, r.seed or 0))
    return reports


def rankin_selberg_grid(
    primes=(3, 5),
    levels=(4, 6),
    eps=(1, 2),
    seeds=(1, 2, 3),
) -> list:
    """Deterministic sweep of the paired-Whittaker bound over all admissible
    section depths and twist characters at each (prime, level, e_p)."""
    from .kirillov import mock_supercuspidal
    from .whittaker import random_principal_series

    reports = []
    for p in primes:
        for c in levels:
            reps = [mock_supercuspidal(p, c, seed) for seed in seeds]
            reps.append(random_principal_series(p, c // 2, 1))
            for e_p in eps:
                if c <= 2 * e_p:
                    continue
                for i in range(e_p):
                    lv = min(i, e_p - i)
                    chis = [None] + [
                        ch for ch in all_chars(p, max(lv, 1))
                        if 0 < ch.level <= lv
                    ]
                    for rep in reps:
                        for chi in chis:
                            reports.append(
                                rankin_selberg_Jp(
                                    rep, None,
                                    {"i": i, "chi": chi}, e_p,
                                )
                            )
                    if p == 3 and c == 4:
                        # one independently paired check at the small size
                        reports.append(
                            rankin_selberg_Jp(
                                reps[0], reps[1], {"i": 0, "chi": None}, e_p
                            )
                        )
    reports.sort(key=lambda r: (r.p, r.c, r.config))
    return reports
