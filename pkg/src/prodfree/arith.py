"""Multiplicative primitives on explicit integers and on factor shapes.

A :class:`FactorShape` stores ``n = prod p**e`` as two parallel arrays, so
numbers such as the 14th power of the product of the first ten million
primes can be handled without ever being materialized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import DomainError, OverflowLimitError, ResourceError
from .primes import PrimeTable, sieve_upto

EXACT_INT_LIMIT = 2**64
# Largest number of primes for which exact phi-ratios are formed.
EXACT_PHI_MAX_PRIMES = 20_000


class FactorShape:
    """Immutable prime -> exponent map; the empty map is 1."""

    __slots__ = ("_primes", "_exps")

    def __init__(self, factors=None, *, primes=None, exps=None):
        if factors is not None:
            if isinstance(factors, dict):
                items = sorted(factors.items())
            else:
                items = sorted((int(p), int(e)) for p, e in factors)
            primes = [p for p, _ in items]
            exps = [e for _, e in items]
        p = np.asarray(primes if primes is not None else [], dtype=np.int64)
        e = np.asarray(exps if exps is not None else [], dtype=np.int64)
        if p.shape != e.shape or p.ndim != 1:
            raise ValueError("primes and exponents must be parallel 1-d arrays")
        if len(p) and (np.any(np.diff(p) <= 0) or p[0] < 2):
            raise ValueError("primes must be distinct, ascending and >= 2")
        if np.any(e < 1):
            raise ValueError("exponents must be >= 1")
        p.setflags(write=False)
        e.setflags(write=False)
        self._primes = p
        self._exps = e

    @classmethod
    def from_int(cls, n: int, table: PrimeTable | None = None) -> "FactorShape":
        return cls(factorize(n, table))

    @classmethod
    def from_primes(cls, primes, exponent: int) -> "FactorShape":
        p = np.asarray(primes, dtype=np.int64)
        return cls(primes=p, exps=np.full(len(p), exponent, dtype=np.int64))

    @property
    def primes(self) -> np.ndarray:
        return self._primes

    @property
    def exponents(self) -> np.ndarray:
        return self._exps

    def items(self):
        return list(zip(self._primes.tolist(), self._exps.tolist()))

    def __len__(self):
        return len(self._primes)

    def __eq__(self, other):
        if not isinstance(other, FactorShape):
            return NotImplemented
        return np.array_equal(self._primes, other._primes) and np.array_equal(self._exps, other._exps)

    def __hash__(self):
        return hash((self._primes.tobytes(), self._exps.tobytes()))

    def __repr__(self):
        if len(self) > 8:
            return f"FactorShape(<{len(self)} primes, Omega={self.big_omega()}>)"
        body = "·".join(f"{p}^{e}" if e > 1 else f"{p}" for p, e in self.items())
        return f"FactorShape({body or '1'})"

    def big_omega(self) -> int:
        return int(self._exps.sum())

    def log10(self) -> float:
        return math.fsum((self._exps * np.log10(self._primes.astype(np.float64))).tolist())

    def value(self, limit: int | None = EXACT_INT_LIMIT) -> int:
        """Materialize n; refuses when log10 suggests it exceeds ``limit``."""
        if limit is not None and self.log10() > math.log10(limit) + 1:
            raise OverflowLimitError(f"{self!r} exceeds the exact-integer limit")
        n = 1
        for p, e in self.items():
            n *= p**e
        if limit is not None and n > limit:
            raise OverflowLimitError(f"{n} exceeds the exact-integer limit {limit}")
        return n

    def divides(self, other: "FactorShape") -> bool:
        theirs = dict(other.items())
        return all(theirs.get(p, 0) >= e for p, e in self.items())

    def to_json(self):
        return [[p, e] for p, e in self.items()]

    @classmethod
    def from_json(cls, data) -> "FactorShape":
        return cls([(p, e) for p, e in data])


def covers(table: PrimeTable, x: int) -> bool:
    """True when ``table`` holds every prime <= x."""
    kind, param = table.provenance
    if kind == "upto":
        return param >= x
    return len(table) > 0 and int(table.primes[-1]) >= x or x < 2


def primes_upto(x: int, table: PrimeTable | None = None) -> np.ndarray:
    if table is not None and covers(table, x):
        return table.upto(x).primes.astype(np.int64)
    return sieve_upto(x).primes.astype(np.int64)


def factorize(n: int, table: PrimeTable | None = None) -> dict:
    """Trial division by primes up to sqrt(n)."""
    if n < 1:
        raise DomainError("n must be >= 1")
    if n >= EXACT_INT_LIMIT:
        raise OverflowLimitError("explicit integers must stay below 2**64")
    out: dict = {}
    root = math.isqrt(n)
    for p in primes_upto(root, table).tolist():
        if p * p > n:
            break
        if n % p == 0:
            e = 0
            while n % p == 0:
                n //= p
                e += 1
            out[p] = e
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def big_omega(n) -> int:
    if isinstance(n, FactorShape):
        return n.big_omega()
    return sum(factorize(int(n)).values())


def radical(n: FactorShape) -> FactorShape:
    return FactorShape(primes=n.primes, exps=np.ones(len(n), dtype=np.int64))


def strip_radical(n: FactorShape) -> FactorShape:
    """n / rad(n)."""
    keep = n.exponents > 1
    return FactorShape(primes=n.primes[keep], exps=n.exponents[keep] - 1)


def pow_shape(n: FactorShape, m: int) -> FactorShape:
    if m < 1:
        raise DomainError("m must be >= 1")
    return FactorShape(primes=n.primes, exps=n.exponents * m)


def lcm_shape(x: int, table: PrimeTable | None = None) -> FactorShape:
    """lcm(1..x): each prime p <= x to the largest power not exceeding x."""
    if x < 1:
        raise DomainError("x must be >= 1")
    ps = primes_upto(x, table).tolist()
    exps = []
    for p in ps:
        e, q = 1, p
        while q * p <= x:
            q *= p
            e += 1
        exps.append(e)
    return FactorShape(primes=ps, exps=exps)


def euler_phi_ratio(n: FactorShape, mode: str = "exact"):
    """phi(n)/n as a Fraction (exact) or an ApproxValue (float)."""
    if mode == "exact":
        if len(n) > EXACT_PHI_MAX_PRIMES:
            raise ResourceError(f"exact phi ratio over {len(n)} primes exceeds the configured size")
        num = den = 1
        for p in n.primes.tolist():
            num *= p - 1
            den *= p
        return Fraction(num, den)
    if mode == "float":
        from .series import phi_ratio_log

        if len(n) == 0:
            from .approx import ApproxValue

            return ApproxValue.exact(1.0)
        return phi_ratio_log(n.primes).exp()
    raise ValueError(f"unknown mode {mode!r}")


def omega_counts(n: FactorShape, j_max: int) -> list[int]:
    """Number of divisors of n with Omega = j, for j = 0..j_max."""
    poly = [1] + [0] * j_max
    for e in n.exponents.tolist():
        new = [0] * (j_max + 1)
        for j in range(j_max + 1):
            if poly[j]:
                for k in range(min(e, j_max - j) + 1):
                    new[j + k] += poly[j]
        poly = new
    return poly


def divisors_with_omega(n: FactorShape, w: "OmegaWindow", cap: int = 10**6) -> list[int]:
    """All divisors d of n with Omega(d) in w, ascending."""
    if w.is_empty():
        return []
    top = w.max()
    counts = omega_counts(n, top)
    total = sum(counts[j] for j in w.values() if j <= top)
    if total > cap:
        raise OverflowLimitError(f"{total} qualifying divisors exceed the cap {cap}")
    out: list[int] = []
    items = n.items()

    def walk(i: int, d: int, om: int):
        if i == len(items):
            if om in w:
                if d >= EXACT_INT_LIMIT:
                    raise OverflowLimitError(f"divisor {d} exceeds the exact-integer range")
                out.append(d)
            return
        p, e = items[i]
        q = 1
        for k in range(min(e, top - om) + 1):
            walk(i + 1, d * q, om + k)
            q *= p

    walk(0, 1, 0)
    out.sort()
    return out


def entropy_q(t: float) -> float:
    """t log t - t + 1."""
    if not t > 0:
        raise DomainError("entropy_q needs t > 0")
    return t * math.log(t) - t + 1.0


@dataclass(frozen=True)
class OmegaWindow:
    """Finite union of inclusive integer intervals of permitted Omega values."""

    intervals: tuple = ()

    def __post_init__(self):
        ivs = sorted((int(a), int(b)) for a, b in self.intervals)
        merged: list[list[int]] = []
        for a, b in ivs:
            if a > b:
                raise ValueError(f"empty interval [{a}, {b}]")
            if a < 1:
                raise ValueError("window bounds must be >= 1")
            if merged and a <= merged[-1][1] + 1:
                merged[-1][1] = max(merged[-1][1], b)
            else:
                merged.append([a, b])
        object.__setattr__(self, "intervals", tuple(tuple(iv) for iv in merged))

    @classmethod
    def of(cls, *values: int) -> "OmegaWindow":
        return cls(tuple((v, v) for v in values))

    @classmethod
    def from_spec(cls, text: str) -> "OmegaWindow":
        """Parse '3-5,11-13' or '2'."""
        ivs = []
        for part in text.split(","):
            part = part.strip()
            if not part:
                continue
            if "-" in part:
                a, b = part.split("-", 1)
                ivs.append((int(a), int(b)))
            else:
                ivs.append((int(part), int(part)))
        return cls(tuple(ivs))

    def __contains__(self, j) -> bool:
        return any(a <= j <= b for a, b in self.intervals)

    def __iter__(self):
        return iter(self.values())

    def values(self) -> list[int]:
        return [j for a, b in self.intervals for j in range(a, b + 1)]

    def is_empty(self) -> bool:
        return not self.intervals

    def min(self) -> int:
        return self.intervals[0][0]

    def max(self) -> int:
        return self.intervals[-1][1]

    def sum_violation(self):
        """A pair (w1, w2) from the window whose sum is in the window, or None."""
        vals = self.values()
        for i, a in enumerate(vals):
            for b in vals[i:]:
                if a + b in self:
                    return (a, b)
        return None

    def to_json(self):
        return [list(iv) for iv in self.intervals]

    def __str__(self):
        return ",".join(f"{a}-{b}" if a != b else f"{a}" for a, b in self.intervals) or "{}"


def resolve_window(lo: float, hi: float, strict: bool = True) -> OmegaWindow:
    """Integer Omega-values between real bounds; may be empty."""
    if not lo < hi:
        raise DomainError(f"need lo < hi, got {lo} >= {hi}")
    if strict:
        a, b = math.floor(lo) + 1, math.ceil(hi) - 1
    else:
        a, b = math.ceil(lo), math.floor(hi)
    a = max(a, 1)
    if a > b:
        return OmegaWindow()
    return OmegaWindow(((a, b),))
