"""Cusp combinatorics of the Hecke congruence group of level N, the
projective line over Z/N with its right matrix action, divisor-power sums,
and numeric evaluation of the level-1 real-analytic Eisenstein series.

Conventions.  Matrices are 2x2 tuples ((a, b), (c, d)) of integers (exact
Fraction entries appear only in conjugation results).  A cusp of level N is
labeled by a divisor c | N (its denominator) together with a unit d modulo
(c, N/c); the canonical rational representative a/c and the canonical point
[c : d'] on the projective line are derived deterministically from the
label.  gcd(0, N) = N throughout (math.gcd already behaves this way), so
the identity matrix has lower-left class N.
"""

from __future__ import annotations

import cmath
import csv
import io
import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import mpmath

from .arith import divisors, euler_phi, factorize
from .cyclo import CycloNumber
from .errors import LevelMismatch, TruncationInsufficient

__all__ = [
    "Cusp",
    "ScalingMatrix",
    "DivisorLambda",
    "cusps",
    "width",
    "scaling_matrix",
    "stabilizer_generator",
    "gamma_Nc_member",
    "p1_normalize",
    "p1_action",
    "group_index",
    "divisor_count",
    "divisor_lambda",
    "divisor_lambda_geometric",
    "divisor_lambda_cyclotomic",
    "divisor_lambda_cyclotomic_geometric",
    "completed_zeta",
    "scattering_term",
    "kappa",
    "eisenstein_eval",
    "cusp_table_csv",
    "lambda_table_csv",
]

_T = ((1, 1), (0, 1))


def _mat_mul2(g, h):
    (a, b), (c, d) = g
    (e, f), (i, j) = h
    return ((a * e + b * i, a * f + b * j), (c * e + d * i, c * f + d * j))


def _mat_det2(g):
    return g[0][0] * g[1][1] - g[0][1] * g[1][0]


# ---------------------------------------------------------------------------
# cusps
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class Cusp:
    """A cusp of level N: denominator c | N and unit label d mod (c, N/c)."""

    N: int
    c: int
    d: int

    def __post_init__(self):
        if self.N < 1 or self.c < 1 or self.N % self.c:
            raise ValueError(f"denominator {self.c} must divide the level {self.N}")
        m = gcd(self.c, self.N // self.c)
        if m == 1:
            if self.d != 0:
                raise ValueError("label must be 0 when the label modulus is 1")
        elif not (0 <= self.d < m and gcd(self.d, m) == 1):
            raise ValueError(f"label {self.d} is not a unit mod {m}")

    @property
    def label_modulus(self) -> int:
        return gcd(self.c, self.N // self.c)

    def denominator_lift(self) -> int:
        """Smallest lift of the label that is coprime to the denominator."""
        m = self.label_modulus
        d0 = self.d
        while gcd(d0, self.c) != 1:
            d0 += m
        return d0

    def rational(self) -> tuple[int, int]:
        """Canonical reduced representative (a, c) of the cusp a/c."""
        if self.c == 1:
            return (0, 1)
        a = pow(self.denominator_lift(), -1, self.c)
        return (a, self.c)

    def point(self) -> tuple[int, int]:
        """Canonical representative on the projective line over Z/N."""
        return p1_normalize((self.c, self.denominator_lift()), self.N)

    def __str__(self):
        a, c = self.rational()
        return f"{a}/{c}"


def cusps(N: int) -> list[Cusp]:
    """All cusps of level N, ordered by (denominator, label)."""
    if N < 1:
        raise ValueError("level must be positive")
    out = []
    for c in divisors(N):
        m = gcd(c, N // c)
        if m == 1:
            out.append(Cusp(N, c, 0))
        else:
            out.extend(Cusp(N, c, d) for d in range(1, m) if gcd(d, m) == 1)
    return out


def width(cusp: Cusp, q: int) -> int:
    """Translation length of the cusp's stabilizer inside level q."""
    if q < 1 or q % cusp.N:
        raise LevelMismatch(f"cusp level {cusp.N} does not divide {q}")
    c2 = cusp.c * cusp.c
    return math.lcm(q, c2) // c2


def group_index(q: int) -> int:
    """Index of the level-q Hecke congruence group: q * prod (1 + 1/p)."""
    out = q
    for p, _ in factorize(q):
        out = out * (p + 1) // p
    return out


# ---------------------------------------------------------------------------
# scaling matrices
# ---------------------------------------------------------------------------

def _tau_matrix(cusp: Cusp) -> tuple[tuple[int, int], tuple[int, int]]:
    """Determinant-1 integer matrix sending the infinite cusp to a/c.

    Among all completions (a b; c d) of the column (a, c), the pair (b, d)
    is fixed by minimizing (|b|, |d|, b, d) lexicographically.
    """
    a, c = cusp.rational()
    # base solution of a*d - b*c = 1 via the extended Euclid identity
    x, y = _egcd(a, c)  # a*x + c*y == 1
    b0, d0 = -y, x      # family: (b0 + t*a, d0 + t*c)
    if a == 0:
        center = -Fraction(d0, c)
    else:
        center = -Fraction(b0, a)
    cands = []
    for t in (math.floor(center) - 1, math.floor(center), math.ceil(center),
              math.ceil(center) + 1):
        b, d = b0 + t * a, d0 + t * c
        cands.append((abs(b), abs(d), b, d))
    _, _, b, d = min(cands)
    return ((a, b), (c, d))


def _egcd(a: int, b: int) -> tuple[int, int]:
    """(x, y) with a*x + b*y == gcd(a, b)."""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r:
        quot = old_r // r
        old_r, r = r, old_r - quot * r
        old_x, x = x, old_x - quot * x
        old_y, y = y, old_y - quot * y
    return old_x, old_y


@dataclass(frozen=True)
class ScalingMatrix:
    """The pair tau (det 1, sends infinity to the cusp) and sigma = tau * diag(w, 1)."""

    cusp: Cusp
    q: int
    tau: tuple[tuple[int, int], tuple[int, int]]
    width: int

    @property
    def sigma(self) -> tuple[tuple[int, int], tuple[int, int]]:
        (a, b), (c, d) = self.tau
        return ((a * self.width, b), (c * self.width, d))

    def horizontal_form(self, g) -> tuple[tuple[Fraction, Fraction], tuple[Fraction, Fraction]]:
        """Exact conjugate sigma^-1 * g * sigma (Fraction entries)."""
        (a, b), (c, d) = self.sigma
        det = Fraction(a * d - b * c)
        inv = ((Fraction(d) / det, Fraction(-b) / det),
               (Fraction(-c) / det, Fraction(a) / det))
        return _mat_mul2(_mat_mul2(inv, g), self.sigma)


def scaling_matrix(cusp: Cusp, q: int | None = None) -> ScalingMatrix:
    q = cusp.N if q is None else q
    w = width(cusp, q)
    tau = _tau_matrix(cusp)
    return ScalingMatrix(cusp, q, tau, w)


def stabilizer_generator(cusp: Cusp, q: int | None = None):
    """Generator (mod sign) of the cusp's stabilizer inside level q.

    Found by direct scan: the smallest k >= 1 with tau T^k tau^-1 congruent
    to an upper-triangular element at level q.  This is an independent
    computation (matrix products plus one congruence per k), not the width
    formula.
    """
    q = cusp.N if q is None else q
    if q < 1 or q % cusp.N:
        raise LevelMismatch(f"cusp level {cusp.N} does not divide {q}")
    (a, b), (c, d) = _tau_matrix(cusp)
    tau_inv = ((d, -b), (-c, a))
    for k in range(1, q + 1):
        g = _mat_mul2(_mat_mul2(((a, b), (c, d)), ((1, k), (0, 1))), tau_inv)
        if g[1][0] % q == 0:
            return g
    raise RuntimeError("no stabilizer element found below the group level")


# ---------------------------------------------------------------------------
# column classes and the projective line
# ---------------------------------------------------------------------------

def gamma_Nc_member(g, N: int, c: int) -> bool:
    """Is the lower-left entry of g in the gcd class c at level N?"""
    if _mat_det2(g) != 1:
        raise ValueError("determinant-1 integer matrix required")
    return gcd(g[1][0], N) == c


def p1_normalize(point, N: int) -> tuple[int, int]:
    """Canonical representative of [x : y] on the projective line over Z/N."""
    if N < 1:
        raise ValueError("modulus must be positive")
    if N == 1:
        return (0, 0)
    x, y = point[0] % N, point[1] % N
    if gcd(gcd(x, y), N) != 1:
        raise ValueError(f"[{point[0]}:{point[1]}] is not a point at modulus {N}")
    c = gcd(x, N)
    if c == N:  # x == 0: scale the second coordinate to 1
        return (0, 1)
    m = N // c
    u = pow((x // c) % m, -1, m)
    while gcd(u, N) != 1:  # lift the inverse to a unit at the full modulus
        u += m
    y0 = (u * y) % N
    # residual scalings fix the first coordinate: units congruent to 1 mod m
    best = y0
    v = 1 + m
    for _ in range(c - 1):
        if gcd(v, N) == 1:
            t = (v * y0) % N
            if t < best:
                best = t
        v += m
    return (c, best)


def p1_action(point, g, N: int) -> tuple[int, int]:
    """Right action [x:y] . (a b; c d) = [ax + cy : bx + dy], normalized."""
    (a, b), (c, d) = g
    x, y = point
    return p1_normalize((a * x + c * y, b * x + d * y), N)


# ---------------------------------------------------------------------------
# divisor-power sums
# ---------------------------------------------------------------------------

def divisor_count(n: int) -> int:
    out = 1
    for _, v in factorize(n):
        out *= v + 1
    return out


def divisor_lambda(n: int, w) -> complex:
    """Sum of (a/b)^w over ordered factorizations ab = n (numeric)."""
    if n < 1:
        raise ValueError("positive index required")
    w = complex(w)
    total = 0j
    for a in divisors(n):
        total += cmath.exp(w * (math.log(a) - math.log(n // a)))
    return total


def divisor_lambda_geometric(n: int, w) -> complex:
    """Same sum via the per-prime ratio (x^(v+1) - x^-(v+1))/(x - x^-1)."""
    if n < 1:
        raise ValueError("positive index required")
    w = complex(w)
    out = 1 + 0j
    for p, v in factorize(n):
        x = cmath.exp(w * math.log(p))
        if abs(x - 1) < 1e-13 or abs(x + 1) < 1e-13:
            out *= (v + 1) * x**v  # removable singularity of the ratio
        else:
            out *= (x ** (v + 1) - x ** (-(v + 1))) / (x - 1 / x)
    return out


def divisor_lambda_cyclotomic(v: int, x: CycloNumber) -> CycloNumber:
    """Exact prime-power sum: x^(2j - v) over j = 0..v, x a root of unity."""
    if v < 0:
        raise ValueError("nonnegative exponent required")
    xinv = x.inverse()
    total = CycloNumber.zero()
    for j in range(v + 1):
        total = total + x**j * xinv ** (v - j)
    return total


def divisor_lambda_cyclotomic_geometric(v: int, x: CycloNumber) -> CycloNumber:
    """Exact geometric form of the prime-power sum, poles at x = +-1 removed."""
    if v < 0:
        raise ValueError("nonnegative exponent required")
    xinv = x.inverse()
    den = x - xinv
    if den.is_zero():
        return x**v * Fraction(v + 1)
    return (x ** (v + 1) - xinv ** (v + 1)) * den.inverse()


@dataclass(frozen=True)
class DivisorLambda:
    """One row of a coefficient table: index, exponent, value, divisor count."""

    n: int
    w: complex
    value: complex
    tau: int

    @staticmethod
    def compute(n: int, w) -> "DivisorLambda":
        return DivisorLambda(n, complex(w), divisor_lambda(n, w), divisor_count(n))


# ---------------------------------------------------------------------------
# level-1 Eisenstein series
# ---------------------------------------------------------------------------

def completed_zeta(s):
    """pi^(-s/2) Gamma(s/2) zeta(s) at the current mpmath precision."""
    s = mpmath.mpmathify(s)
    return mpmath.pi ** (-s / 2) * mpmath.gamma(s / 2) * mpmath.zeta(s)


def scattering_term(s):
    """Constant-term ratio xi(2s - 1)/xi(2s); s = 0, 1/2, 1 are poles."""
    return completed_zeta(2 * s - 1) / completed_zeta(2 * s)


def kappa(w, y) -> complex:
    """Normalized Bessel factor 2 |y|^(1/2) K_w(2 pi |y|)."""
    ya = abs(y)
    if ya == 0:
        raise ValueError("nonzero argument required")
    return complex(2 * mpmath.sqrt(ya) * mpmath.besselk(w, 2 * mpmath.pi * ya))


def _tail_envelope(n: int, y: float, sigma: float, inv_xi: float) -> float:
    """Crude upper bound for the modulus of the n-th Fourier term.

    Uses |lambda_w(n)| <= tau(n) n^|Re w| <= n^(1 + |Re w|) / sqrt(n) spare,
    and K_w(u) <= sqrt(pi/2u) exp(sigma^2/(2u) - u) for u > 0.
    """
    u = 2 * math.pi * n * y
    kb = math.sqrt(math.pi / (2 * u)) * math.exp(sigma * sigma / (2 * u) - u)
    return 8 * n ** (1 + sigma) * math.sqrt(n * y) * kb * inv_xi


def eisenstein_eval(z, s, M_trunc: int | None = None) -> complex:
    """Level-1 Eisenstein value from its Fourier expansion.

    y^s + (xi(2s-1)/xi(2s)) y^(1-s)
        + (1/xi(2s)) * sum_{n != 0} lambda_{s-1/2}(n) |n|^(-1/2)
                        kappa_{s-1/2}(ny) e(nx),
    summed symmetrically (cosine form).  The truncation point is chosen so
    a certified envelope of the Bessel tail is below 1e-10; an explicit
    M_trunc that cannot meet the envelope raises TruncationInsufficient.
    """
    z, s = complex(z), complex(s)
    x = z.real - math.floor(z.real)  # exact periodicity in the real part
    y = z.imag
    if y < 0.3:
        raise ValueError("Im z >= 0.3 required")
    if abs(s.imag) > 30:
        raise ValueError("|Im s| <= 30 required")
    sigma = abs(s.real - 0.5)
    extra = int(1.5 * abs(s.imag)) + 10
    with mpmath.workdps(15 + extra):
        xi2s = completed_zeta(2 * s)
        inv_xi = float(1 / abs(xi2s))
        tol = 1e-10
        # sum_{j>=0} (1+j)^(1.5+sigma) e^(-2 pi y j), for the tail of the envelope
        geo = sum((1 + j) ** (1.5 + sigma) * math.exp(-2 * math.pi * y * j)
                  for j in range(80))

        def tail_bound(m):
            return _tail_envelope(m + 1, y, sigma, inv_xi) * geo

        if M_trunc is None:
            m = 1
            while m < 500 and tail_bound(m) >= tol:
                m += 1
        else:
            m = int(M_trunc)
        if m < 1 or tail_bound(m) >= tol:
            raise TruncationInsufficient(
                f"tail envelope {tail_bound(max(m, 1)):.3e} at M={m} exceeds {tol}")
        w = s - 0.5
        total = mpmath.mpc(y) ** s + scattering_term(s) * mpmath.mpc(y) ** (1 - s)
        two_pi = 2 * mpmath.pi
        for n in range(1, m + 1):
            lam = divisor_lambda(n, w)
            kap = 2 * mpmath.sqrt(n * y) * mpmath.besselk(w, two_pi * n * y)
            total += lam / math.sqrt(n) * kap * 2 * mpmath.cos(two_pi * n * x) / xi2s
        return complex(total)


# ---------------------------------------------------------------------------
# CSV emitters
# ---------------------------------------------------------------------------

def cusp_table_csv(levels, q: int | None = None) -> str:
    """Rows (N, c, d, width) for every cusp of every listed level."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["N", "c", "d", "width"])
    for N in levels:
        for cusp in cusps(N):
            writer.writerow([N, cusp.c, cusp.d, width(cusp, q or N)])
    return buf.getvalue()


def lambda_table_csv(n_max: int, w) -> str:
    """Rows (n, Re lambda, Im lambda, tau(n)) for n = 1..n_max."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(["n", "re_lambda", "im_lambda", "tau"])
    for n in range(1, n_max + 1):
        row = DivisorLambda.compute(n, w)
        writer.writerow([n, repr(row.value.real), repr(row.value.imag), row.tau])
    return buf.getvalue()
