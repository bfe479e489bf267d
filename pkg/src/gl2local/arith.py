"""Small exact number-theory helpers shared across the package.

Everything here is elementary (trial division scale); inputs in this package
never exceed the cyclotomic modulus cap, so no sieve or factoring machinery
beyond trial division is warranted.
"""

from __future__ import annotations

import math
from functools import lru_cache

from .errors import UnsupportedPrime


@lru_cache(maxsize=None)
def factorize(n: int) -> tuple[tuple[int, int], ...]:
    """Prime factorization of n >= 1 as a sorted tuple of (prime, exponent)."""
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            e = 0
            while n % d == 0:
                n //= d
                e += 1
            out.append((d, e))
        d += 1 if d == 2 else 2
    if n > 1:
        out.append((n, 1))
    return tuple(out)


def euler_phi(n: int) -> int:
    out = 1
    for p, e in factorize(n):
        out *= (p - 1) * p ** (e - 1)
    return out


def radical(n: int) -> int:
    out = 1
    for p, _ in factorize(n):
        out *= p
    return out


def divisors(n: int) -> list[int]:
    """All positive divisors of n, ascending."""
    out = [1]
    for p, e in factorize(n):
        out = [d * p**j for d in out for j in range(e + 1)]
    return sorted(out)


def mobius(n: int) -> int:
    out = 1
    for _, e in factorize(n):
        if e > 1:
            return 0
        out = -out
    return out


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    return factorize(n) == ((n, 1),)


def require_odd_prime(p: int) -> None:
    if p == 2 or not is_prime(p):
        raise UnsupportedPrime(f"p={p}: an odd prime is required")


def valuation(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def crt_pair(r1: int, m1: int, r2: int, m2: int) -> int:
    """x mod m1*m2 with x = r1 mod m1, x = r2 mod m2 (m1, m2 coprime)."""
    inv = pow(m1, -1, m2)
    return (r1 + (r2 - r1) * inv % m2 * m1) % (m1 * m2)


@lru_cache(maxsize=None)
def primitive_root(p: int) -> int:
    """Smallest generator of (Z/p^2)*, hence of (Z/p^k)* for every k >= 1.

    Fixing the generator at the p^2 level keeps discrete logarithms coherent
    across precision levels, which the character-exponent lifting relies on.
    """
    require_odd_prime(p)
    m = p * p
    order = p * (p - 1)
    prime_parts = [q for q, _ in factorize(order)]
    g = 2
    while True:
        if g % p and all(pow(g, order // q, m) != 1 for q in prime_parts):
            return g
        g += 1


def lcm(a: int, b: int) -> int:
    return a // math.gcd(a, b) * b
