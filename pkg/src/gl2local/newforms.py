"""Ingestion of holomorphic newform Fourier coefficients and desk-scale
analytic checks on them.

A record resolves in three stages: the on-disk cache (directory from
NEWFORM_CACHE_DIR), then the packaged fixture files, then an HTTP GET against
an LMFDB-compatible endpoint (base URL from NEWFORM_API_URL).  The raw
response bytes are cached verbatim, so a later offline run replays a
byte-identical record.  Network access is rate-limited to one request per
second with exponential backoff.

Checks provided on a record with weight k and normalized eigenvalues
lambda(n) = a_n / n^((k-1)/2):

* deligne_check   -- |lambda(p)| <= 2 at every prime not dividing the level;
* hecke_check     -- lambda(p^(r+1)) = lambda(p) lambda(p^r) - lambda(p^(r-1))
                     at good primes, and lambda(mn) = lambda(m) lambda(n) on
                     coprime pairs, both within a float tolerance;
* shifted_convolution -- sum of |lambda(n) lambda(n+l)| up to a cutoff,
                     reported against the envelope
                     x * prod_{p <= x} (1 + 2|lambda(p)|/p) / log(e x)^(2-eps)
                     (diagnostic only: the implied constant is unspecified);
* growth_check    -- the q-expansion at the infinite cusp decays like
                     exp(-2 pi y): the ratio |f(x+iy)| exp(2 pi y) is compared
                     with a certified constant derived from the divisor bound,
                     using a truncation whose tail is certified below 1e-10.

Only the expansion at the infinite cusp is ingested; coefficient data at the
other cusps has no public source and is out of scope.
"""

from __future__ import annotations

import cmath
import json
import math
import os
import pathlib
import re
import time
import urllib.error
import urllib.request
from dataclasses import dataclass
from importlib import resources

from .arith import factorize
from .errors import (
    NewformNotFound,
    RangeExceeded,
    SchemaDrift,
    TruncationInsufficient,
)

__all__ = [
    "NewformRecord",
    "DeligneReport",
    "HeckeReport",
    "ShiftedConvolutionReport",
    "GrowthReport",
    "fetch_newform",
    "cache_path",
    "deligne_check",
    "hecke_check",
    "shifted_convolution",
    "growth_check",
    "FIXTURE_LABELS",
]

_DEFAULT_API = "https://www.lmfdb.org/api/mf_newforms"
_LABEL_RE = re.compile(r"^\d+\.\d+\.[a-z]+\.[a-z]+$")
_REQUIRED_FIELDS = ("dim", "label", "level", "traces", "weight")
_RATE_INTERVAL = 1.0
_last_request = 0.0

FIXTURE_LABELS = (
    "1.12.a.a",
    "1.16.a.a",
    "11.2.a.a",
    "14.2.a.a",
    "15.2.a.a",
    "27.2.a.a",
    "32.2.a.a",
)


def _primes_upto(n: int) -> list[int]:
    if n < 2:
        return []
    sieve = [True] * (n + 1)
    sieve[0] = sieve[1] = False
    for i in range(2, int(n ** 0.5) + 1):
        if sieve[i]:
            sieve[i * i:: i] = [False] * len(sieve[i * i:: i])
    return [i for i, flag in enumerate(sieve) if flag]


def _divisor_count(n: int) -> int:
    out = 1
    for _, e in factorize(n):
        out *= e + 1
    return out


@dataclass(frozen=True)
class NewformRecord:
    """Coefficients a_1..a_{n_max} of one holomorphic newform."""

    label: str
    weight: int
    level: int
    dim: int
    coefficients: tuple

    def __post_init__(self):
        if self.weight < 2 or self.weight % 2:
            raise SchemaDrift(f"{self.label}: weight {self.weight} is not an even integer >= 2")
        if self.level < 1:
            raise SchemaDrift(f"{self.label}: level {self.level} is not positive")
        if not self.coefficients or self.coefficients[0] != 1:
            raise SchemaDrift(f"{self.label}: first coefficient is not 1")

    @property
    def n_max(self) -> int:
        return len(self.coefficients)

    def a(self, n: int) -> int | float:
        if not 1 <= n <= self.n_max:
            raise RangeExceeded(
                f"{self.label}: coefficient index {n} outside 1..{self.n_max}")
        return self.coefficients[n - 1]

    def lam(self, n: int) -> float:
        """Normalized eigenvalue a_n / n^((weight-1)/2)."""
        return self.a(n) / n ** ((self.weight - 1) / 2)

    def good_primes(self, bound: int | None = None) -> list[int]:
        top = self.n_max if bound is None else min(bound, self.n_max)
        return [p for p in _primes_upto(top) if self.level % p]


# ---------------------------------------------------------------------------
# record resolution: cache, fixture, network
# ---------------------------------------------------------------------------

def cache_path(label: str) -> pathlib.Path:
    base = os.environ.get("NEWFORM_CACHE_DIR")
    root = pathlib.Path(base) if base else pathlib.Path.home() / ".cache" / "gl2local" / "newforms"
    return root / f"{label}.json"


def _fixture_bytes(label: str) -> bytes | None:
    res = resources.files("gl2local.newforms_fixtures").joinpath(f"{label}.json")
    if res.is_file():
        return res.read_bytes()
    return None


def _http_get(url: str) -> bytes:
    global _last_request
    delay = 1.0
    last_error = None
    for attempt in range(3):
        wait = _RATE_INTERVAL - (time.monotonic() - _last_request)
        if wait > 0:
            time.sleep(wait)
        _last_request = time.monotonic()
        request = urllib.request.Request(url, headers={"User-Agent": "gl2local/0.1"})
        try:
            with urllib.request.urlopen(request, timeout=30) as response:
                return response.read()
        except (urllib.error.URLError, OSError) as exc:
            last_error = exc
            if attempt < 2:
                time.sleep(delay)
                delay *= 2
    raise NewformNotFound(f"endpoint unreachable: {last_error}")


def _parse(raw: bytes, label: str) -> NewformRecord:
    try:
        payload = json.loads(raw.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise SchemaDrift(f"{label}: response is not JSON ({exc})") from exc
    if not isinstance(payload, dict) or not isinstance(payload.get("data"), list):
        raise SchemaDrift(f"{label}: response lacks a 'data' list")
    data = payload["data"]
    if not data:
        raise NewformNotFound(label)
    entry = data[0]
    missing = [f for f in _REQUIRED_FIELDS if f not in entry]
    if missing:
        raise SchemaDrift(f"{label}: response missing fields {missing}")
    if entry["label"] != label:
        raise SchemaDrift(
            f"{label}: response is for label {entry['label']!r}")
    dim = entry["dim"]
    if dim == 1:
        coeffs = tuple(int(a) for a in entry["traces"])
    elif "an_embedded" in entry:
        # first real embedding of the Hecke field, as recorded by the source
        coeffs = tuple(float(a) for a in entry["an_embedded"])
    else:
        raise SchemaDrift(
            f"{label}: dimension {dim} record carries no embedded coefficients")
    return NewformRecord(label=label, weight=int(entry["weight"]),
                         level=int(entry["level"]), dim=int(dim),
                         coefficients=coeffs)


def fetch_newform(label: str) -> NewformRecord:
    """Resolve a newform record: cache first, then fixtures, then network."""
    if not _LABEL_RE.match(label):
        raise NewformNotFound(f"not a newform label: {label!r}")
    path = cache_path(label)
    if path.is_file():
        return _parse(path.read_bytes(), label)
    raw = _fixture_bytes(label)
    if raw is None:
        base = os.environ.get("NEWFORM_API_URL", _DEFAULT_API).rstrip("/")
        url = f"{base}/?label={label}&_format=json"
        raw = _http_get(url)
    record = _parse(raw, label)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(raw)
    return record


# ---------------------------------------------------------------------------
# checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DeligneReport:
    label: str
    max_abs_lambda: float
    worst_prime: int
    primes_checked: int
    tolerance: float
    passed: bool

    def to_json(self) -> dict:
        return {"check": "deligne", "label": self.label,
                "max_abs_lambda": self.max_abs_lambda,
                "worst_prime": self.worst_prime,
                "primes_checked": self.primes_checked,
                "tolerance": self.tolerance, "passed": self.passed}


def deligne_check(record: NewformRecord, tolerance: float = 1e-9) -> DeligneReport:
    """Max of |lambda(p)| over primes p <= n_max not dividing the level."""
    worst_value, worst_prime, count = 0.0, 0, 0
    for p in record.good_primes():
        value = abs(record.lam(p))
        count += 1
        if value > worst_value:
            worst_value, worst_prime = value, p
    return DeligneReport(label=record.label, max_abs_lambda=worst_value,
                         worst_prime=worst_prime, primes_checked=count,
                         tolerance=tolerance,
                         passed=worst_value <= 2 + tolerance)


@dataclass(frozen=True)
class HeckeReport:
    label: str
    max_recursion_defect: float
    max_multiplicativity_defect: float
    relations_checked: int
    tolerance: float
    passed: bool

    def to_json(self) -> dict:
        return {"check": "hecke", "label": self.label,
                "max_recursion_defect": self.max_recursion_defect,
                "max_multiplicativity_defect": self.max_multiplicativity_defect,
                "relations_checked": self.relations_checked,
                "tolerance": self.tolerance, "passed": self.passed}


def hecke_check(record: NewformRecord, tolerance: float = 1e-9) -> HeckeReport:
    """Recursion at good primes and multiplicativity on coprime pairs."""
    n_max = record.n_max
    lam = [0.0] * (n_max + 1)
    for n in range(1, n_max + 1):
        lam[n] = record.lam(n)
    rec_defect = 0.0
    count = 0
    for p in record.good_primes():
        power = p
        prev, cur = 1.0, lam[p]
        while power * p <= n_max:
            nxt = lam[power * p]
            rec_defect = max(rec_defect, abs(nxt - (lam[p] * cur - prev)))
            prev, cur, power = cur, nxt, power * p
            count += 1
    mult_defect = 0.0
    for m in range(2, n_max + 1):
        if m * m > n_max:
            break
        for n in range(m + 1, n_max // m + 1):
            if math.gcd(m, n) == 1:
                mult_defect = max(mult_defect, abs(lam[m * n] - lam[m] * lam[n]))
                count += 1
    return HeckeReport(label=record.label, max_recursion_defect=rec_defect,
                       max_multiplicativity_defect=mult_defect,
                       relations_checked=count, tolerance=tolerance,
                       passed=max(rec_defect, mult_defect) <= tolerance)


@dataclass(frozen=True)
class ShiftedConvolutionReport:
    label: str
    shift: int
    cutoff: int
    total: float
    envelope: float
    ratio: float
    eps: float

    def to_json(self) -> dict:
        return {"check": "shifted-convolution", "label": self.label,
                "shift": self.shift, "cutoff": self.cutoff,
                "total": self.total, "envelope": self.envelope,
                "ratio": self.ratio, "eps": self.eps}


def shifted_convolution(record: NewformRecord, shift: int, cutoff: int,
                        eps: float = 0.0) -> ShiftedConvolutionReport:
    """Sum of |lambda(n) lambda(n + shift)| for n <= cutoff, with the
    comparison envelope.  The ratio is diagnostic: no implied constant is
    attached to the envelope."""
    if shift < 0 or cutoff < 1:
        raise RangeExceeded(f"invalid window: shift {shift}, cutoff {cutoff}")
    if cutoff + shift > record.n_max:
        raise RangeExceeded(
            f"{record.label}: cutoff {cutoff} + shift {shift} exceeds "
            f"n_max {record.n_max}")
    total = 0.0
    for n in range(1, cutoff + 1):
        total += abs(record.lam(n) * record.lam(n + shift))
    envelope = float(cutoff)
    for p in _primes_upto(cutoff):
        envelope *= 1 + 2 * abs(record.lam(p)) / p
    envelope /= math.log(math.e * cutoff) ** (2 - eps)
    return ShiftedConvolutionReport(label=record.label, shift=shift,
                                    cutoff=cutoff, total=total,
                                    envelope=envelope,
                                    ratio=total / envelope, eps=eps)


@dataclass(frozen=True)
class GrowthReport:
    label: str
    samples: tuple
    max_ratio: float
    certified_bound: float
    truncation: int
    passed: bool

    def to_json(self) -> dict:
        return {"check": "growth", "label": self.label,
                "samples": [list(s) for s in self.samples],
                "max_ratio": self.max_ratio,
                "certified_bound": self.certified_bound,
                "truncation": self.truncation, "passed": self.passed}


_DEFAULT_SAMPLES = ((0.0, 0.5), (0.3, 0.8), (0.5, 1.0),
                    (0.25, 1.5), (0.1, 2.5), (0.0, 4.0))


def _ratio_tail(m: int, y: float, weight: float) -> float:
    """Bound on sum_{n > m} n^((weight+1)/2) exp(-2 pi (n-1) y)."""
    growth = (1 + 1 / (m + 1)) ** ((weight + 1) / 2) * math.exp(-2 * math.pi * y)
    if growth >= 1:
        return math.inf
    first = (m + 1) ** ((weight + 1) / 2) * math.exp(-2 * math.pi * m * y)
    return first / (1 - growth)


def evaluate_qexp(record: NewformRecord, x: float, y: float,
                  truncation: int) -> complex:
    """Truncated q-expansion at x + iy; x is reduced mod 1 first."""
    x = x - math.floor(x)
    total = 0j
    for n in range(1, truncation + 1):
        radial = math.exp(-2 * math.pi * n * y)
        if radial == 0.0:
            break
        total += record.a(n) * radial * cmath.exp(2j * math.pi * n * x)
    return total


def growth_check(record: NewformRecord, sample_points=None,
                 tail_tol: float = 1e-10) -> GrowthReport:
    """Exponential decay at the infinite cusp: for each sample x + iy the
    ratio |f(x+iy)| exp(2 pi y) is compared with a certified constant that
    any record obeying the divisor bound |lambda(n)| <= tau(n) must satisfy."""
    pts = tuple(sample_points) if sample_points is not None else _DEFAULT_SAMPLES
    if not pts:
        raise ValueError("at least one sample point is required")
    y_min = min(p[1] for p in pts)
    if y_min < 0.5:
        raise ValueError("sample points must have imaginary part >= 0.5")
    truncation = None
    for m in range(4, record.n_max + 1):
        if _ratio_tail(m, y_min, record.weight) < tail_tol:
            truncation = m
            break
    if truncation is None:
        raise TruncationInsufficient(
            f"{record.label}: tail below {tail_tol} not reachable with "
            f"{record.n_max} coefficients at y = {y_min}")
    bound = _ratio_tail(truncation, y_min, record.weight)
    half = (record.weight - 1) / 2
    for n in range(1, truncation + 1):
        bound += _divisor_count(n) * n ** half * math.exp(-2 * math.pi * (n - 1) * y_min)
    samples = []
    max_ratio = 0.0
    for x, y in pts:
        value = abs(evaluate_qexp(record, x, y, truncation))
        ratio = value * math.exp(2 * math.pi * y)
        samples.append((x, y, ratio))
        max_ratio = max(max_ratio, ratio)
    return GrowthReport(label=record.label, samples=tuple(samples),
                        max_ratio=max_ratio, certified_bound=bound,
                        truncation=truncation, passed=max_ratio <= bound)
