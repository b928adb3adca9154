"""Symmetric functions of prime reciprocals.

Power sums ``sigma_j = sum 1/p**j``, complete homogeneous sums ``S_j`` (the
reciprocal sum over all m built from the primes with Omega(m) = j),
elementary sums ``e_j`` (squarefree m) and exponent-capped sums ``T_j``.
Values are either exact ``Fraction`` objects or :class:`ApproxValue`
floats with certified absolute error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .approx import UNIT_ROUNDOFF, ApproxValue, fsum_bounded
from .errors import ConsistencyError, DomainError, ResourceError
from .primes import PrimeTable

# exact power sums are refused beyond this many primes
EXACT_POWER_SUM_MAX_PRIMES = 20_000
# construct/cli use exact recurrences up to this many primes unless told otherwise
EXACT_RECURRENCE_MAX_PRIMES = 1_000
J_MAX_LIMIT = 64

# phi_ratio_log series: primes below this feed the high powers; the rest is a tail bound
_HEAD_CUT = 1 << 16
_SERIES_TERMS = 60


def prime_array(P) -> np.ndarray:
    if isinstance(P, PrimeTable):
        return P.primes.astype(np.int64)
    return np.asarray(list(P) if not isinstance(P, np.ndarray) else P, dtype=np.int64)


def provenance_of(P) -> dict:
    if isinstance(P, PrimeTable):
        return P.descriptor()
    return {"explicit": len(prime_array(P)), "count": len(prime_array(P))}


def _check_jmax(j_max: int):
    if j_max < 1:
        raise DomainError("j_max must be >= 1")
    if j_max > J_MAX_LIMIT:
        raise DomainError(f"j_max is limited to {J_MAX_LIMIT}")


@dataclass(frozen=True)
class SymSums:
    """Values indexed 0..j_max; index 0 is None for power sums."""

    kind: str
    prime_provenance: dict
    values: tuple = field(default_factory=tuple)

    @property
    def j_max(self) -> int:
        return len(self.values) - 1

    @property
    def exact(self) -> bool:
        return all(isinstance(v, Fraction) for v in self.values[1:])

    def __getitem__(self, j):
        return self.values[j]

    def floats(self) -> list:
        return [None if v is None else (v.value if isinstance(v, ApproxValue) else float(v))
                for v in self.values]

    def to_json(self) -> dict:
        rows = []
        for j, v in enumerate(self.values):
            if v is None:
                continue
            if isinstance(v, ApproxValue):
                rows.append({"j": j, "value": v.value, "abs_error": v.abs_error})
            else:
                q = Fraction(v)
                rows.append({"j": j, "num": str(q.numerator), "den": str(q.denominator)})
        return {"kind": self.kind, "prime_provenance": self.prime_provenance,
                "j_max": self.j_max, "values": rows}


def _exact_power_sum(ps: list[int], j: int) -> Fraction:
    # binary splitting over (numerator, denominator) pairs; denominators are coprime
    terms = [(1, p**j) for p in ps]
    if not terms:
        return Fraction(0)
    while len(terms) > 1:
        nxt = []
        for i in range(0, len(terms) - 1, 2):
            (a, b), (c, d) = terms[i], terms[i + 1]
            nxt.append((a * d + c * b, b * d))
        if len(terms) % 2:
            nxt.append(terms[-1])
        terms = nxt
    num, den = terms[0]
    return Fraction(num, den)


def _float_power_sums(ps: np.ndarray, j_max: int) -> list[ApproxValue]:
    out = []
    if len(ps) == 0:
        return [ApproxValue.exact(0.0) for _ in range(j_max)]
    inv = 1.0 / ps.astype(np.float64)
    t = inv.copy()
    # subnormal terms lose relative accuracy; charge each a full subnormal ulp per step
    floor_err = len(ps) * 2.0 ** -1074
    for j in range(1, j_max + 1):
        # t holds fl(1/p) multiplied j-1 more times: j roundings per term
        rel = j * UNIT_ROUNDOFF / (1 - j * UNIT_ROUNDOFF)
        s = fsum_bounded(t.tolist(), rel)
        out.append(ApproxValue(s.value, s.abs_error + j * floor_err))
        if j < j_max:
            t *= inv
    return out


def power_sums(P, j_max: int, mode: str = "float",
               exact_max_primes: int = EXACT_POWER_SUM_MAX_PRIMES) -> SymSums:
    """sigma_1..sigma_jmax over the primes of P."""
    _check_jmax(j_max)
    ps = prime_array(P)
    if mode == "exact":
        if len(ps) > exact_max_primes:
            raise ResourceError(
                f"exact power sums over {len(ps)} primes exceed the configured {exact_max_primes}")
        plist = ps.tolist()
        vals = [_exact_power_sum(plist, j) for j in range(1, j_max + 1)]
    elif mode == "float":
        vals = _float_power_sums(ps, j_max)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return SymSums("sigma", provenance_of(P), (None, *vals))


def _one_like(v):
    return Fraction(1) if isinstance(v, Fraction) else ApproxValue.exact(1.0)


def _zero_like(v):
    return Fraction(0) if isinstance(v, Fraction) else ApproxValue.exact(0.0)


def _newton(sigma_vals, j_max: int, alternating: bool):
    one = _one_like(sigma_vals[1]) if j_max >= 1 else Fraction(1)
    out = [one]
    for k in range(1, j_max + 1):
        acc = _zero_like(one)
        for j in range(1, k + 1):
            term = sigma_vals[j] * out[k - j]
            if alternating and j % 2 == 0:
                acc = acc - term
            else:
                acc = acc + term
        out.append(acc / k)
    return out


def complete_homogeneous(sigma: SymSums) -> SymSums:
    """S_0 = 1, S_k = (1/k) sum_{j=1..k} sigma_j S_{k-j}."""
    vals = _newton(sigma.values, sigma.j_max, alternating=False)
    return SymSums("complete", sigma.prime_provenance, tuple(vals))


def elementary_symmetric(sigma: SymSums) -> SymSums:
    """e_0 = 1, e_k = (1/k) sum_{j=1..k} (-1)^(j-1) sigma_j e_{k-j}."""
    vals = _newton(sigma.values, sigma.j_max, alternating=True)
    return SymSums("elementary", sigma.prime_provenance, tuple(vals))


def poly_mul(a, b, j_max: int):
    """Product of coefficient lists truncated at degree j_max."""
    zero = _zero_like(a[0])
    out = [zero] * (j_max + 1)
    for i, x in enumerate(a[: j_max + 1]):
        for k, y in enumerate(b[: j_max + 1 - i]):
            out[i + k] = out[i + k] + x * y
    return out


def _caps_array(caps, n: int) -> np.ndarray:
    if np.isscalar(caps):
        arr = np.full(n, int(caps), dtype=np.int64)
    else:
        arr = np.asarray(caps, dtype=np.int64)
        if arr.shape != (n,):
            raise ValueError("caps must be a scalar or align with the primes")
    if n and arr.min() < 1:
        raise DomainError("exponent caps must be >= 1")
    return arr


def _capped_exact(ps: list[int], caps: list[int], j_max: int) -> list[Fraction]:
    poly = [Fraction(1)] + [Fraction(0)] * j_max
    for p, c in zip(ps, caps):
        new = [Fraction(0)] * (j_max + 1)
        pc = Fraction(1, p ** (c + 1))
        for k in range(j_max + 1):
            v = poly[k]
            if k:
                v += new[k - 1] / p
            if c < j_max and k - c - 1 >= 0:
                v -= poly[k - c - 1] * pc
            new[k] = v
        poly = new
    return poly


def _group_factor(ps: np.ndarray, cap: int, j_max: int):
    """Float coefficients of prod_p sum_{e<=cap} (t/p)^e for one cap group."""
    sig = power_sums(ps, j_max, "float")
    if cap == 1:
        return list(elementary_symmetric(sig).values)
    comp = list(complete_homogeneous(sig).values)
    if cap >= j_max:
        return comp
    # prod_p (1 - (t/p)^(cap+1)) = sum_i (-1)^i e_i(y) t^(i(cap+1)),  y_p = p^-(cap+1)
    step = cap + 1
    r_max = j_max // step
    ysig = SymSums("sigma", {}, (None, *[sig[r * step] for r in range(1, r_max + 1)]))
    ey = elementary_symmetric(ysig).values
    corr = [ApproxValue.exact(0.0)] * (j_max + 1)
    for i in range(r_max + 1):
        corr[i * step] = ey[i] if i % 2 == 0 else -ey[i]
    return poly_mul(comp, corr, j_max)


def capped_sums(P, caps, j_max: int, mode: str = "float",
                exact_max_primes: int = EXACT_POWER_SUM_MAX_PRIMES) -> SymSums:
    """T_j = sum of 1/d over d supported on P with exponent of p <= cap(p), Omega(d) = j."""
    _check_jmax(j_max)
    ps = prime_array(P)
    cap_arr = _caps_array(caps, len(ps))
    if mode == "exact":
        if len(ps) > exact_max_primes:
            raise ResourceError(
                f"exact capped sums over {len(ps)} primes exceed the configured {exact_max_primes}")
        vals = _capped_exact(ps.tolist(), cap_arr.tolist(), j_max)
    elif mode == "float":
        eff = np.minimum(cap_arr, j_max)
        vals = [ApproxValue.exact(1.0)] + [ApproxValue.exact(0.0)] * j_max
        for c in np.unique(eff).tolist():
            vals = poly_mul(vals, _group_factor(ps[eff == c], c, j_max), j_max)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    return SymSums("capped", provenance_of(P), tuple(vals))


def euler_product(P, z: float) -> ApproxValue:
    """prod_{p in P} (1 - z/p)^-1 with a certified bound."""
    ps = prime_array(P)
    if not 0 < z < 2:
        raise DomainError("z must lie in (0, 2)")
    if len(ps) == 0:
        return ApproxValue.exact(1.0)
    if z >= ps.min():
        raise DomainError("z must be smaller than every prime")
    x = z / ps.astype(np.float64)
    terms = -np.log1p(-x)
    # rounding of z/p amplified by at most 1/(1-x), plus 1 ulp from log1p
    rel = UNIT_ROUNDOFF / (1 - float(x.max())) + 3 * UNIT_ROUNDOFF
    return fsum_bounded(terms.tolist(), rel).exp()


def _tail_power_sum(cut: int, k: int) -> float:
    """Upper bound for sum_{n >= cut} n^-k (k >= 2)."""
    return float(cut) ** -k * (1.0 + cut / (k - 1.0)) * (1 + 1e-12)


def phi_ratio_log_methods(P, sigma: SymSums | None = None):
    """sum_p log(1 - 1/p) evaluated directly and through the sigma series."""
    ps = prime_array(P)
    if len(ps) == 0:
        raise DomainError("phi_ratio_log needs a nonempty prime set")
    inv = 1.0 / ps.astype(np.float64)
    terms = np.log1p(-inv)
    # rounding in 1/p amplified by <= 1/(1-1/p) <= 2, plus 1 ulp from log1p
    direct = -fsum_bounded((-terms).tolist(), 5 * UNIT_ROUNDOFF)

    if sigma is None or sigma.j_max < 4 or sigma.exact:
        sigma = power_sums(ps, 4, "float")
    full = sigma.j_max
    series = -sigma[1] - sigma[2] / 2
    rest = ApproxValue.exact(0.0)
    for k in range(3, full + 1):
        rest = rest + sigma[k] / k
    head = ps[ps < _HEAD_CUT]
    tail_present = len(head) < len(ps)
    high = _float_power_sums(head, _SERIES_TERMS)
    for k in range(full + 1, _SERIES_TERMS + 1):
        v = high[k - 1]
        if tail_present:
            t = _tail_power_sum(_HEAD_CUT, k)
            v = v + ApproxValue(t / 2, t / 2)
        rest = rest + v / k
    # sigma_k <= 2^(1-k) for k >= 3, so the dropped k > 60 terms sum below 2^(1-60)/60
    trunc = 2.0 ** (1 - _SERIES_TERMS) / _SERIES_TERMS
    rest = rest + ApproxValue(trunc / 2, trunc / 2)
    series = series - rest
    return direct, series


def phi_ratio_log(P, sigma: SymSums | None = None) -> ApproxValue:
    """log(phi(n)/n) for squarefree kernel P; both methods must agree."""
    direct, series = phi_ratio_log_methods(P, sigma)
    if abs(direct.value - series.value) > direct.abs_error + series.abs_error:
        raise ConsistencyError(
            f"direct {direct.value!r} and series {series.value!r} disagree beyond "
            f"{direct.abs_error + series.abs_error:.3e}")
    return direct


def restricted_reciprocal_sum(P, w, caps=None, mode: str = "float", sums: SymSums | None = None):
    """sum_{j in w} S_j (or T_j when caps are given)."""
    if w.is_empty():
        return Fraction(0) if mode == "exact" else ApproxValue.exact(0.0)
    j_max = w.max()
    if sums is None:
        if caps is None:
            sums = complete_homogeneous(power_sums(P, j_max, mode))
        else:
            sums = capped_sums(P, caps, j_max, mode)
    total = _zero_like(sums[0])
    for j in w.values():
        total = total + sums[j]
    return total


def table_rows(sigma: SymSums, complete: SymSums) -> list[tuple]:
    """(j, sigma_j, S_j) rows for j = 1..j_max."""
    fs, fc = sigma.floats(), complete.floats()
    rows = []
    for j in range(1, sigma.j_max + 1):
        if sigma.exact:
            rows.append((j, sigma[j], complete[j]))
        else:
            rows.append((j, fs[j], fc[j]))
    return rows
