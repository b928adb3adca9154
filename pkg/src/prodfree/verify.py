"""Independent checkers and exact search for maximum product-free sets."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement

import numpy as np

from .construct import ResidueSet
from .errors import DomainError, PreconditionError, ResourceError

SEARCH_LIMIT = 40
EXHAUSTIVE_LIMIT = 20
KJ_BUDGET = 10**7


@dataclass(frozen=True)
class Counterexample:
    """``prod(left) == prod(right)`` (mod ``modulus`` when given), all factors in the set."""

    kind: str
    left: tuple
    right: tuple
    product: int
    modulus: int | None = None

    def _prod(self, xs):
        v = 1
        for x in xs:
            v *= x
            if self.modulus:
                v %= self.modulus
        return v

    def replay(self, S) -> bool:
        """True when the witness still violates product-freeness of S."""
        members = set(S.elements()) if isinstance(S, ResidueSet) else set(S)
        if not all(x in members for x in self.left + self.right):
            return False
        lp, rp = self._prod(self.left), self._prod(self.right)
        if lp != rp or lp != self.product:
            return False
        if self.kind == "kj-multiset":
            return sorted(self.left) != sorted(self.right)
        return True

    def to_json(self) -> dict:
        return {"kind": self.kind, "left": list(self.left), "right": list(self.right),
                "product": self.product, "modulus": self.modulus}

    def __str__(self):
        lhs = "·".join(map(str, self.left))
        rhs = "·".join(map(str, self.right))
        mod = f" (mod {self.modulus})" if self.modulus else ""
        return f"{lhs} = {rhs}{mod}"


def is_product_free_residues(S: ResidueSet) -> Counterexample | None:
    """Exhaustive over unordered pairs a <= b, a = b allowed."""
    n = S.modulus
    elems = np.flatnonzero(S.members).astype(np.int64)
    for i, a in enumerate(elems.tolist()):
        rest = elems[i:]
        prods = (a * rest) % n
        hit = S.members[prods]
        if hit.any():
            k = int(np.argmax(hit))
            c = int(prods[k])
            return Counterexample("pair-product", (a, int(rest[k])), (c,), c, n)
    return None


def is_product_free_integers(S) -> Counterexample | None:
    vals = sorted({int(s) for s in S})
    if vals and vals[0] < 1:
        raise DomainError("integer sets must contain positive integers")
    members = set(vals)
    top = vals[-1] if vals else 0
    for i, a in enumerate(vals):
        if a * a > top:
            break
        for b in vals[i:]:
            c = a * b
            if c > top:
                break
            if c in members:
                return Counterexample("pair-product", (a, b), (c,), c)
    return None


def _products(elems, size, modulus, budget, used, cap=None):
    """Map product -> one witness tuple for every multiset of the given size."""
    level = {}
    for s in elems:
        v = s % modulus if modulus else s
        level.setdefault(v, (s,))
    for _ in range(size - 1):
        used += len(level) * len(elems)
        if used > budget:
            raise ResourceError(f"(k,j) check exceeds the budget of {budget} product evaluations")
        nxt = {}
        for v, tup in level.items():
            for s in elems:
                w = v * s
                if modulus:
                    w %= modulus
                elif cap is not None and w > cap:
                    continue
                if w not in nxt:
                    nxt[w] = tup + (s,)
        level = nxt
    return level, used


def is_kj_product_free(S, k: int, j: int, modulus: int | None = None,
                       semantics: str = "plain", budget: int = KJ_BUDGET) -> Counterexample | None:
    """No a_1...a_k = b_1...b_j with all letters from S.

    ``multiset`` semantics only counts solutions whose two sides differ as
    multisets; it matters when k == j.
    """
    if isinstance(S, ResidueSet):
        modulus = S.modulus
        elems = S.elements()
    else:
        elems = sorted({int(s) for s in S})
        if modulus is not None:
            elems = sorted({s % modulus for s in elems})
    if not k >= j >= 1:
        raise DomainError("need k >= j >= 1")
    if semantics not in ("plain", "multiset"):
        raise ValueError(f"unknown semantics {semantics!r}")
    if not elems:
        return None
    kind = "kj-product" if semantics == "plain" else "kj-multiset"

    if k == j:
        if semantics == "plain":
            a = elems[0]
            side = (a,) * k
            prod = Counterexample("kj-product", side, side, 0, modulus)._prod(side)
            return Counterexample("kj-product", side, side, prod, modulus)
        total = math.comb(len(elems) + k - 1, k)
        if total > budget:
            raise ResourceError(f"{total} multisets exceed the budget of {budget}")
        seen = {}
        for combo in combinations_with_replacement(elems, k):
            v = 1
            for s in combo:
                v *= s
                if modulus:
                    v %= modulus
            other = seen.setdefault(v, combo)
            if other is not combo:
                return Counterexample(kind, other, combo, v, modulus)
        return None

    small, used = _products(elems, j, modulus, budget, 0)
    cap = None if modulus else max(small)
    big, _ = _products(elems, k, modulus, budget, used, cap)
    common = sorted(set(big) & set(small))
    if common:
        v = common[0]
        return Counterexample(kind, big[v], small[v], v, modulus)
    return None


@dataclass(frozen=True)
class MaxFreeResult:
    modulus: int
    best_set: ResidueSet
    d_value: Fraction
    nodes_explored: int

    def to_json(self) -> dict:
        return {"modulus": self.modulus, "d": f"{self.d_value.numerator}/{self.d_value.denominator}",
                "set": self.best_set.elements(), "size": len(self.best_set),
                "nodes_explored": self.nodes_explored}


def _conflicts(n: int):
    """Candidate residues and, per residue, the (required mask, forbidden residue) rules."""
    cand = list(range(2, n))
    triples = set()
    for a in cand:
        for b in cand:
            c = a * b % n
            if c >= 2:
                triples.add(frozenset((a, b, c)))
    dead = {next(iter(t)) for t in triples if len(t) == 1}  # idempotents
    cand = [v for v in cand if v not in dead]
    rules = {v: [] for v in cand}
    degree = {v: 0 for v in cand}
    for t in triples:
        if t & dead:
            continue
        for v in t:
            degree[v] += 1
            for w in t:
                if w == v:
                    continue
                req = 0
                for u in t - {v, w}:
                    req |= 1 << u
                rules[v].append((req, w))
    return cand, rules, degree


class _Search:
    def __init__(self, n, order, rules):
        self.order = order
        self.rules = rules
        self.nodes = 0
        self.suffix = [0] * (len(order) + 1)
        for i in range(len(order) - 1, -1, -1):
            self.suffix[i] = self.suffix[i + 1] | (1 << order[i])

    def add(self, v, chosen, forb):
        chosen |= 1 << v
        for req, w in self.rules[v]:
            if req & ~chosen == 0:
                forb |= 1 << w
        return chosen, forb

    def best_size(self):
        self.best, self.best_mask = 0, 0

        def dfs(i, chosen, forb, cnt):
            self.nodes += 1
            if cnt > self.best:
                self.best, self.best_mask = cnt, chosen
            if i == len(self.order):
                return
            if cnt + (self.suffix[i] & ~forb).bit_count() <= self.best:
                return
            v = self.order[i]
            if not forb >> v & 1:
                c2, f2 = self.add(v, chosen, forb)
                dfs(i + 1, c2, f2, cnt + 1)
            dfs(i + 1, chosen, forb, cnt)

        dfs(0, 0, 0, 0)
        return self.best

    def first_of_size(self, target):
        """Exclude-first DFS in residue order: the first hit is lexicographically smallest."""

        def dfs(i, chosen, forb, cnt):
            self.nodes += 1
            if cnt == target:
                return chosen
            if i == len(self.order) or cnt + (self.suffix[i] & ~forb).bit_count() < target:
                return None
            v = self.order[i]
            found = dfs(i + 1, chosen, forb, cnt)
            if found is None and not forb >> v & 1:
                c2, f2 = self.add(v, chosen, forb)
                found = dfs(i + 1, c2, f2, cnt + 1)
            return found

        return dfs(0, 0, 0, 0)


def max_product_free(n: int, limit: int = SEARCH_LIMIT) -> MaxFreeResult:
    """Exact D(n) by branch and bound; ties go to the lexicographically smallest vector."""
    if n < 1:
        raise DomainError("n must be >= 1")
    if n > limit:
        raise ResourceError(f"n = {n} exceeds the search limit {limit}")
    cand, rules, degree = _conflicts(n)
    by_degree = sorted(cand, key=lambda v: (-degree[v], v))
    s1 = _Search(n, by_degree, rules)
    opt = s1.best_size()
    s2 = _Search(n, sorted(cand), rules)
    mask = s2.first_of_size(opt) if opt else 0
    elems = [r for r in range(n) if mask >> r & 1]
    best = ResidueSet.from_elements(n, elems)
    return MaxFreeResult(n, best, Fraction(opt, n), s1.nodes + s2.nodes)


def max_product_free_exhaustive(n: int, limit: int = EXHAUSTIVE_LIMIT) -> MaxFreeResult:
    """Plain enumeration of all 2^n subsets (cross-check for small n)."""
    if n < 1:
        raise DomainError("n must be >= 1")
    if n > limit:
        raise ResourceError(f"n = {n} exceeds the exhaustive limit {limit}")
    masks = np.arange(1 << n, dtype=np.int64)
    bad = np.zeros(1 << n, dtype=bool)
    for a in range(n):
        for b in range(a, n):
            c = a * b % n
            need = (1 << a) | (1 << b) | (1 << c)
            bad |= (masks & need) == need
    sizes = np.zeros(1 << n, dtype=np.int64)
    for r in range(n):
        sizes += (masks >> r) & 1
    sizes[bad] = -1
    opt = int(sizes.max())
    winners = np.flatnonzero(sizes == opt).tolist()

    def lex_key(m):
        return [m >> r & 1 for r in range(n)]

    mask = min(winners, key=lex_key)
    elems = [r for r in range(n) if mask >> r & 1]
    return MaxFreeResult(n, ResidueSet.from_elements(n, elems), Fraction(opt, n), 1 << n)


@dataclass(frozen=True)
class UpperBoundReport:
    x: int
    least: int | None
    count: int
    bound: Fraction
    passed: bool
    density: Fraction
    density_limit: Fraction | None

    def to_json(self) -> dict:
        return {"x": self.x, "least": self.least, "count": self.count, "bound": str(self.bound),
                "passed": self.passed, "density": float(self.density),
                "density_limit": None if self.density_limit is None else float(self.density_limit)}


def _members_upto(S, x: int) -> list[int]:
    if isinstance(S, ResidueSet):
        n = S.modulus
        r = np.arange(1, x + 1, dtype=np.int64)
        return (r[S.members[r % n]]).tolist()
    if callable(S):
        return [m for m in range(1, x + 1) if S(m)]
    return sorted(m for m in {int(s) for s in S} if 1 <= m <= x)


def upper_density_bound_check(S, x: int) -> UpperBoundReport:
    """|S(x)| <= x - floor(x/a)/2 for a product-free S with least member a."""
    if x < 1:
        raise DomainError("x must be >= 1")
    elems = _members_upto(S, x)
    cex = is_product_free_integers(elems)
    if cex is not None:
        raise PreconditionError(f"set is not product-free on [1, {x}]: {cex}", witness=cex)
    if not elems:
        return UpperBoundReport(x, None, 0, Fraction(x), True, Fraction(0), None)
    a = elems[0]
    bound = x - Fraction(x // a, 2)
    count = len(elems)
    return UpperBoundReport(x, a, count, bound, count <= bound, Fraction(count, x),
                            1 - Fraction(1, 2 * a))
