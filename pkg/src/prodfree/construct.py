"""Product-free objects built from Omega-windows of divisors.

A window of Omega-values that is sum-free (no two values, repetition
allowed, add up to a third) selects a product-free set of divisors of
n/rad(n); lifting it to the residues whose gcd with n lies in the set gives
a product-free subset of Z/nZ of size phi(n) * sum(1/d).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import series
from .approx import ApproxValue
from .arith import (FactorShape, OmegaWindow, divisors_with_omega, euler_phi_ratio, factorize,
                    lcm_shape, pow_shape, resolve_window, strip_radical)
from .errors import CertificateError, ConsistencyError, DomainError, PreconditionError, ResourceError
from .primes import PrimeTable

EXPLICIT_MODULUS_LIMIT = 10**7
REFERENCE_PRIME_COUNT = 10_000_000
EXAMPLE_WINDOW = OmegaWindow(((3, 5), (11, 13)))
EXAMPLE_EXPONENT = 14
NPRIME_SPLIT = 10**6
NPRIME_REDUCTION = 12
TARGET_BOUNDS = {"N": 0.5004, "Nprime": 0.5003}
MAIN_EXPONENT = 1 - 0.5 * math.e * math.log(2)
ALPHA0 = 1 / MAIN_EXPONENT


@dataclass(frozen=True, eq=False)
class ResidueSet:
    modulus: int
    members: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.members, dtype=bool)
        if self.modulus < 1 or m.shape != (self.modulus,):
            raise ValueError("members must be a boolean vector of length modulus >= 1")
        m.setflags(write=False)
        object.__setattr__(self, "members", m)

    @classmethod
    def from_elements(cls, modulus: int, elements) -> "ResidueSet":
        m = np.zeros(modulus, dtype=bool)
        idx = np.asarray([int(e) % modulus for e in elements], dtype=np.int64)
        m[idx] = True
        return cls(modulus, m)

    def elements(self) -> list[int]:
        return np.flatnonzero(self.members).tolist()

    def __len__(self):
        return int(self.members.sum())

    def __contains__(self, r) -> bool:
        return bool(self.members[int(r) % self.modulus])

    def __eq__(self, other):
        if not isinstance(other, ResidueSet):
            return NotImplemented
        return self.modulus == other.modulus and np.array_equal(self.members, other.members)

    def density(self) -> Fraction:
        return Fraction(len(self), self.modulus)

    def __repr__(self):
        els = self.elements()
        shown = els if len(els) <= 12 else els[:12] + ["..."]
        return f"ResidueSet(mod {self.modulus}, {shown})"

    def to_json(self) -> dict:
        return {"modulus": self.modulus, "size": len(self), "elements": self.elements()}


@dataclass(frozen=True)
class DivisorClassSet:
    modulus_shape: FactorShape
    window: OmegaWindow
    explicit: tuple | None = None
    certificate: dict = field(default_factory=dict)

    def materialize(self, cap: int = 10**6) -> "DivisorClassSet":
        divs = divisors_with_omega(strip_radical(self.modulus_shape), self.window, cap)
        return DivisorClassSet(self.modulus_shape, self.window, tuple(divs), self.certificate)


def divisor_window_set(n: FactorShape, w: OmegaWindow) -> DivisorClassSet:
    """Divisors of n/rad(n) whose Omega lies in a sum-free window."""
    if w.is_empty():
        raise DomainError("window is empty")
    reach = strip_radical(n).big_omega()
    if w.max() > reach:
        raise PreconditionError(
            f"Omega value {w.max()} exceeds Omega(n/rad(n)) = {reach}", witness=w.max())
    bad = w.sum_violation()
    if bad is not None:
        a, b = bad
        raise CertificateError(f"window not sum-free: {a} + {b} = {a + b} lies in it", witness=bad)
    vals = w.values()
    sums = sorted({a + b for i, a in enumerate(vals) for b in vals[i:]})
    return DivisorClassSet(n, w, None, {"kind": "omega-sum-free", "pair_sums": sums})


def lemma_cardinality(divisors, n: int) -> Fraction:
    """phi(n) * sum_{d in D} 1/d."""
    phi = n
    for p in factorize(n):
        phi = phi // p * (p - 1)
    return phi * sum((Fraction(1, d) for d in divisors), Fraction(0))


def lift_to_residues(D, n: int | None = None, limit: int = EXPLICIT_MODULUS_LIMIT) -> ResidueSet:
    """{s in Z/nZ : gcd(s, n) in D}."""
    from .verify import is_product_free_integers

    if isinstance(D, DivisorClassSet):
        if n is None:
            n = D.modulus_shape.value()
        if D.explicit is None:
            D = D.materialize()
        divs = list(D.explicit)
    else:
        divs = sorted({int(d) for d in D})
    if n is None:
        raise ValueError("modulus required for an explicit divisor list")
    if n > limit:
        raise ResourceError(f"modulus {n} exceeds the explicit-modulus limit {limit}")
    fac = factorize(n)
    core = n
    for p in fac:
        core //= p
    for d in divs:
        if d < 1 or core % d:
            raise PreconditionError(f"{d} does not divide n/rad(n) = {core}", witness=d)
    cex = is_product_free_integers(divs)
    if cex is not None:
        raise PreconditionError(f"divisor set is not product-free: {cex}", witness=cex)
    g = np.gcd(np.arange(n, dtype=np.int64), n)
    return ResidueSet(n, np.isin(g, np.asarray(divs, dtype=np.int64)))


def _resolve_mode(n_primes: int, mode: str | None) -> str:
    if mode is not None:
        return mode
    return "exact" if n_primes <= series.EXACT_RECURRENCE_MAX_PRIMES else "float"


def density_of_window_set(n: FactorShape, w: OmegaWindow, P=None, mode: str | None = None):
    """phi(n)/n * sum_{j in w} T_j with caps e_p - 1."""
    mode = _resolve_mode(len(n), mode)
    if P is not None:
        avail = series.prime_array(P)
        missing = ~np.isin(n.primes, avail)
        if missing.any():
            raise PreconditionError("primes of n missing from the table",
                                    witness=int(n.primes[missing][0]))
    if w.is_empty():
        return Fraction(0) if mode == "exact" else ApproxValue.exact(0.0)
    core = strip_radical(n)
    if len(core) == 0:
        total = Fraction(0) if mode == "exact" else ApproxValue.exact(0.0)
    else:
        T = series.capped_sums(core.primes, core.exponents, w.max(), mode)
        total = series.restricted_reciprocal_sum(None, w, sums=T)
    phi = euler_phi_ratio(n, mode)
    return phi * total


@dataclass
class TheoremInstance:
    x: int
    m: int
    n_shape: FactorShape
    lo: float
    hi: float
    window: OmegaWindow
    density: object
    degenerate: bool
    pairs: list = field(default_factory=list)

    def density_float(self) -> float:
        d = self.density
        return d.value if isinstance(d, ApproxValue) else float(d)

    def trend_ratio(self) -> float:
        """(1 - density) * (log x)^(1 - e log 2 / 2); bounded if the main rate holds."""
        return (1 - self.density_float()) * math.log(self.x) ** MAIN_EXPONENT

    def to_json(self) -> dict:
        d = self.density
        dens = d.to_json() if isinstance(d, ApproxValue) else {"num": str(d.numerator),
                                                              "den": str(d.denominator),
                                                              "value": float(d)}
        out = {"x": self.x, "m": self.m, "primes": len(self.n_shape),
               "omega_n": self.n_shape.big_omega(), "lo": self.lo, "hi": self.hi,
               "window": self.window.to_json(), "density": dens, "degenerate": self.degenerate}
        if self.m == 2:
            out["trend_ratio"] = self.trend_ratio()
        else:
            out["pairs"] = self.pairs
        return out


def _instance(x: int, m: int, lo: float, hi: float, P, mode) -> TheoremInstance:
    n = pow_shape(lcm_shape(x, P if isinstance(P, PrimeTable) else None), m)
    w = resolve_window(lo, hi, strict=True)
    mode = _resolve_mode(len(n), mode)
    if w.is_empty():
        zero = Fraction(0) if mode == "exact" else ApproxValue.exact(0.0)
        return TheoremInstance(x, m, n, lo, hi, w, zero, True)
    dens = density_of_window_set(n, w, P, mode)
    return TheoremInstance(x, m, n, lo, hi, w, dens, False)


def theorem_main_instance(x: int, P=None, mode: str | None = None) -> TheoremInstance:
    """n = lcm(1..x)^2 with Omega in (e/4, e/2) * log log x."""
    if x < 3:
        raise DomainError("x must be >= 3")
    ll = math.log(math.log(x))
    return _instance(x, 2, math.e / 4 * ll, math.e / 2 * ll, P, mode)


def kj_pairs(m: int) -> list[tuple[int, int]]:
    return [(k, j) for k in range(2, m) for j in range(1, k) if k + j <= m]


def theorem_general_instance(x: int, m: int, P=None, mode: str | None = None) -> TheoremInstance:
    """n = lcm(1..x)^m with Omega in (1 -+ 1/m) log log x, (k,j)-free for k > j, k + j <= m."""
    if x < 3 or m < 3:
        raise DomainError("need x >= 3 and m >= 3")
    ll = math.log(math.log(x))
    inst = _instance(x, m, (1 - 1 / m) * ll, (1 + 1 / m) * ll, P, mode)
    w = inst.window
    for k, j in kj_pairs(m):
        # k (1 - 1/m) >= j (1 + 1/m)  <=>  (k - j) m >= k + j, then scale by log log x > 0
        real_ok = (k - j) * m >= k + j and ll > 0
        resolved_ok = w.is_empty() or k * w.min() > j * w.max()
        if not (real_ok and resolved_ok):
            raise CertificateError(f"pair ({k},{j}) fails its Omega certificate", witness=(k, j))
        inst.pairs.append({"k": k, "j": j, "real_bound_ok": real_ok, "resolved_ok": resolved_ok})
    return inst


@dataclass
class ExampleReport:
    variant: str
    reproduction: bool
    prime_provenance: dict
    sigma_table: series.SymSums
    s_table: series.SymSums
    phi_ratio: ApproxValue
    window_sum: ApproxValue
    density_bound: ApproxValue
    digits_estimate: float
    t_table: series.SymSums | None = None
    target_bound: float = 0.0

    @property
    def certified_lower(self) -> float:
        return self.density_bound.lower

    @property
    def passes(self) -> bool:
        return self.certified_lower > self.target_bound

    def to_json(self) -> dict:
        out = {
            "variant": self.variant,
            "reproduction": self.reproduction,
            "prime_provenance": self.prime_provenance,
            "window": EXAMPLE_WINDOW.to_json(),
            "sigma": self.sigma_table.to_json(),
            "complete": self.s_table.to_json(),
            "phi_ratio": self.phi_ratio.to_json(),
            "window_sum": self.window_sum.to_json(),
            "density_bound": self.density_bound.to_json(),
            "certified_lower": self.certified_lower,
            "target_bound": self.target_bound,
            "passes": self.passes,
            "digits_estimate": self.digits_estimate,
        }
        if self.t_table is not None:
            out["capped"] = self.t_table.to_json()
        return out


def worked_example(P: PrimeTable, variant: str = "N", j_max: int = 13,
                   sigma: series.SymSums | None = None) -> ExampleReport:
    """Density bound for N = Q^14 (or N' with exponent 2 on primes above 10^6)."""
    if variant not in TARGET_BOUNDS:
        raise ValueError(f"variant must be one of {sorted(TARGET_BOUNDS)}")
    ps = series.prime_array(P)
    if len(ps) == 0:
        raise DomainError("empty prime table")
    reproduction = isinstance(P, PrimeTable) and P.provenance == ("first_n", REFERENCE_PRIME_COUNT)
    if sigma is None:
        sigma = series.power_sums(P, j_max, "float")
    S = series.complete_homogeneous(sigma)
    phi = series.phi_ratio_log(ps, sigma).exp()
    wsum_N = series.restricted_reciprocal_sum(None, EXAMPLE_WINDOW, sums=S)
    dens_N = phi * wsum_N
    logs = np.log10(ps.astype(np.float64))
    digits_N = EXAMPLE_EXPONENT * math.fsum(logs.tolist())
    if variant == "N":
        return ExampleReport("N", reproduction, series.provenance_of(P), sigma, S, phi,
                             wsum_N, dens_N, digits_N, target_bound=TARGET_BOUNDS["N"])

    large = ps > NPRIME_SPLIT
    S_small = series.complete_homogeneous(series.power_sums(ps[~large], j_max, "float"))
    e_large = series.elementary_symmetric(series.power_sums(ps[large], j_max, "float"))
    T_vals = series.poly_mul(list(S_small.values), list(e_large.values), j_max)
    T = series.SymSums("capped", series.provenance_of(P), tuple(T_vals))
    wsum = series.restricted_reciprocal_sum(None, EXAMPLE_WINDOW, sums=T)
    dens = phi * wsum
    if dens.lower > dens_N.upper:
        raise ConsistencyError("N' density bound exceeds the N bound although capping only removes terms")
    digits = digits_N - NPRIME_REDUCTION * math.fsum(logs[large].tolist())
    return ExampleReport("Nprime", reproduction, series.provenance_of(P), sigma, S, phi, wsum,
                         dens, digits, t_table=T, target_bound=TARGET_BOUNDS["Nprime"])


def _is_qnr(u: int, p: int) -> bool:
    return pow(u % p, (p - 1) // 2, p) == p - 1


def qnr_set(p: int, a: int, limit: int = EXPLICIT_MODULUS_LIMIT) -> ResidueSet:
    """p^k * (quadratic nonresidue) mod p^a; for p = 2, 2^k * (3 mod 4) with k <= a - 2."""
    if a < 1:
        raise DomainError("a must be >= 1")
    if factorize(p) != {p: 1}:
        raise DomainError(f"{p} is not prime")
    q = p**a
    if q > limit:
        raise ResourceError(f"modulus {q} exceeds the explicit-modulus limit {limit}")
    members = np.zeros(q, dtype=bool)
    for r in range(1, q):
        k, u = 0, r
        while u % p == 0:
            u //= p
            k += 1
        if p == 2:
            members[r] = k <= a - 2 and u % 4 == 3
        else:
            members[r] = _is_qnr(u, p)
    return ResidueSet(q, members)


@dataclass(frozen=True)
class DeltaBound:
    value: float
    underflow: bool
    inner_exponent: float  # (C/(1-u))^alpha0, so value = exp(-exp(inner_exponent))

    def to_json(self) -> dict:
        return {"value": self.value, "underflow": self.underflow,
                "inner_exponent": self.inner_exponent, "alpha0": ALPHA0}


def delta_lower_bound(u: float, C: float) -> DeltaBound:
    """1 / exp(exp((C/(1-u))^alpha0)), alpha0 = 1/(1 - e log 2 / 2)."""
    if not 0 < u < 1:
        raise DomainError("u must lie in (0, 1)")
    if not C > 0:
        raise DomainError("C must be positive")
    try:
        inner = (C / (1 - u)) ** ALPHA0
    except OverflowError:
        return DeltaBound(0.0, True, math.inf)
    try:
        value = math.exp(-math.exp(inner))
    except OverflowError:
        value = 0.0
    return DeltaBound(value, value == 0.0, inner)
