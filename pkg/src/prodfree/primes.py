"""Prime tables: segmented sieving, first-n selection and a binary cache."""

from __future__ import annotations

import math
import os
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import FormatError, ResourceError

MAGIC = b"PFPRIMES"
VERSION = 1
TAG_FIRST_N = 0x00
TAG_UPTO = 0x01
HEADER = struct.Struct("<8sBBQQ")

# Default memory budget for one sieve run (bytes).
DEFAULT_BUDGET = 256 * 2**20
SEGMENT_ODDS = 1 << 21
_SMALL = (2, 3, 5, 7, 11)

CACHE_ENV = "PRODFREE_CACHE_DIR"


@dataclass(frozen=True, eq=False)
class PrimeTable:
    """Ascending primes plus how they were selected.

    ``provenance`` is ``("first_n", k)`` or ``("upto", x)``.
    """

    primes: np.ndarray
    provenance: tuple

    def __post_init__(self):
        arr = np.ascontiguousarray(self.primes, dtype=np.uint32)
        arr.setflags(write=False)
        object.__setattr__(self, "primes", arr)
        kind, param = self.provenance
        if kind not in ("first_n", "upto"):
            raise ValueError(f"unknown provenance kind {kind!r}")
        object.__setattr__(self, "provenance", (kind, int(param)))

    def __len__(self):
        return len(self.primes)

    def __iter__(self):
        return iter(self.primes.tolist())

    def __eq__(self, other):
        if not isinstance(other, PrimeTable):
            return NotImplemented
        return self.provenance == other.provenance and np.array_equal(self.primes, other.primes)

    def __repr__(self):
        kind, param = self.provenance
        return f"PrimeTable({kind}={param}, len={len(self)})"

    def descriptor(self) -> dict:
        kind, param = self.provenance
        return {kind: param, "count": len(self)}

    def upto(self, x: int) -> "PrimeTable":
        """Sub-table of primes <= x (x must be covered by this table)."""
        k = int(np.searchsorted(self.primes, x, side="right"))
        return PrimeTable(self.primes[:k], ("upto", x))


def _simple_sieve(limit: int) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    flags[4::2] = False
    for p in range(3, math.isqrt(limit) + 1, 2):
        if flags[p]:
            flags[p * p :: 2 * p] = False
    return np.flatnonzero(flags)


def _estimate_bytes(limit: int) -> int:
    count = 1.26 * limit / math.log(limit) if limit > 2 else 1
    return int(4 * count) + SEGMENT_ODDS * 9


def sieve_upto(limit: int, budget: int = DEFAULT_BUDGET) -> PrimeTable:
    """All primes <= limit via an odd-only segmented sieve."""
    if limit < 0:
        raise ValueError("limit must be >= 0")
    if limit >= 2**32:
        raise ResourceError("primes must fit in 32 bits")
    if _estimate_bytes(limit) > budget:
        raise ResourceError(f"sieving to {limit} exceeds the memory budget of {budget} bytes")
    if limit < 2:
        return PrimeTable(np.zeros(0, dtype=np.uint32), ("upto", limit))

    base = _simple_sieve(math.isqrt(limit))[1:]  # odd base primes
    chunks = [np.array([2], dtype=np.uint32)]
    lo = 3
    while lo <= limit:
        # segment holds odd values lo, lo+2, ..., < hi
        hi = min(lo + 2 * SEGMENT_ODDS, limit + 1)
        size = (hi - lo + 1) // 2
        seg = np.ones(size, dtype=bool)
        for p in base:
            p = int(p)
            sq = p * p
            if sq >= hi:
                break
            if sq >= lo:
                start = sq
            else:
                start = -(-lo // p) * p
                if start % 2 == 0:
                    start += p
            seg[(start - lo) // 2 :: p] = False
        idx = np.flatnonzero(seg)
        chunks.append((lo + 2 * idx).astype(np.uint32))
        lo += 2 * size
    primes = np.concatenate(chunks)
    return PrimeTable(primes[primes <= limit], ("upto", limit))


def nth_prime_upper_bound(n: int) -> int:
    """Rosser-Schoenfeld: p_n < n (ln n + ln ln n) for n >= 6."""
    if n < 6:
        return _SMALL[n - 1] if n >= 1 else 1
    return int(n * (math.log(n) + math.log(math.log(n)))) + 1


def first_n_primes(count: int, budget: int = DEFAULT_BUDGET) -> PrimeTable:
    if count < 0:
        raise ValueError("count must be >= 0")
    if count < 6:
        return PrimeTable(np.array(_SMALL[:count], dtype=np.uint32), ("first_n", count))
    bound = nth_prime_upper_bound(count)
    while True:
        table = sieve_upto(bound, budget)
        if len(table) >= count:
            return PrimeTable(table.primes[:count], ("first_n", count))
        bound *= 2  # unreachable given the bound, kept as a guard


def save_table(t: PrimeTable, path) -> None:
    kind, param = t.provenance
    tag = TAG_FIRST_N if kind == "first_n" else TAG_UPTO
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(HEADER.pack(MAGIC, VERSION, tag, param, len(t)))
        fh.write(t.primes.astype("<u4").tobytes())
    os.replace(tmp, path)


def load_table(path) -> PrimeTable:
    data = Path(path).read_bytes()
    if len(data) < 8:
        raise FormatError("truncated magic", len(data), "magic")
    if data[:8] != MAGIC:
        raise FormatError("bad magic", 0, "magic")
    if len(data) < HEADER.size:
        raise FormatError("truncated header", len(data), "header")
    _, version, tag, param, count = HEADER.unpack_from(data, 0)
    if version != VERSION:
        raise FormatError(f"unsupported version {version}", 8, "version")
    if tag not in (TAG_FIRST_N, TAG_UPTO):
        raise FormatError(f"unknown provenance tag {tag}", 9, "provenance_tag")
    payload = len(data) - HEADER.size
    if payload != 4 * count:
        raise FormatError(
            f"count {count} disagrees with payload of {payload} bytes", 18, "count")
    primes = np.frombuffer(data, dtype="<u4", offset=HEADER.size, count=count)
    if count and np.any(np.diff(primes.astype(np.int64)) <= 0):
        bad = int(np.flatnonzero(np.diff(primes.astype(np.int64)) <= 0)[0]) + 1
        raise FormatError("primes not strictly increasing", HEADER.size + 4 * bad, "primes")
    kind = "first_n" if tag == TAG_FIRST_N else "upto"
    return PrimeTable(primes.astype(np.uint32), (kind, param))


def export_csv(t: PrimeTable, path) -> None:
    with open(path, "w") as fh:
        for p in t.primes.tolist():
            fh.write(f"{p}\n")


def cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    return Path(env) if env else Path.home() / ".cache" / "prodfree"


def cached_first_n(count: int, directory=None, budget: int = DEFAULT_BUDGET) -> PrimeTable:
    """first_n_primes, memoized on disk."""
    directory = Path(directory) if directory is not None else cache_dir()
    path = directory / f"first_n_{count}.bin"
    if path.exists():
        try:
            return load_table(path)
        except FormatError:
            pass
    table = first_n_primes(count, budget)
    directory.mkdir(parents=True, exist_ok=True)
    save_table(table, path)
    return table


def cached_upto(limit: int, directory=None, budget: int = DEFAULT_BUDGET) -> PrimeTable:
    directory = Path(directory) if directory is not None else cache_dir()
    path = directory / f"upto_{limit}.bin"
    if path.exists():
        try:
            return load_table(path)
        except FormatError:
            pass
    table = sieve_upto(limit, budget)
    directory.mkdir(parents=True, exist_ok=True)
    save_table(table, path)
    return table
