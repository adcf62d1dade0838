"""Sieves and counting functions.

Tables are built with vectorized strided updates, one pass per prime, so
construction is O(X log log X). Completed tables are immutable (the value
arrays are marked read-only) and safe to share across workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ResourceError

SIEVE_KINDS = ("omega", "totient", "primes")

# value tables above this bound would need multi-GB arrays; the primes
# table switches to segmented construction instead of giving up
SEGMENT_THRESHOLD = 10**8
VALUE_TABLE_LIMIT = 2 * 10**8
PRIMES_TABLE_LIMIT = 2 * 10**9
SEGMENT_SIZE = 2**22

PHI_REFERENCE_CONSTANT = 1.365  # limiting value of f_X / sqrt(X) for the totient weight


@dataclass(frozen=True)
class SieveTable:
    """Exact per-integer values up to a bound: omega(n), phi(n), or primality."""

    kind: str
    bound: int
    values: np.ndarray

    def __post_init__(self):
        if self.kind not in SIEVE_KINDS:
            raise ConfigError(f"unknown sieve kind {self.kind!r}")
        self.values.setflags(write=False)

    def primes(self) -> np.ndarray:
        """Ascending primes up to the bound (primes kind only)."""
        if self.kind != "primes":
            raise ConfigError("primes() requires a primes-kind table")
        return np.flatnonzero(self.values)


@dataclass(frozen=True)
class CountCheckpoint:
    """Count of representable n <= X together with its reference ratio."""

    bound: int
    count: int
    ratio_to_reference: float | None


def _prime_flags(bound: int) -> np.ndarray:
    flags = np.ones(bound + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, math.isqrt(bound) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return flags


def _segmented_prime_flags(bound: int) -> np.ndarray:
    base = _prime_flags(math.isqrt(bound) + 1)
    base_primes = np.flatnonzero(base)
    flags = np.zeros(bound + 1, dtype=bool)
    flags[: len(base)] = base
    lo = len(base)
    while lo <= bound:
        hi = min(lo + SEGMENT_SIZE, bound + 1)
        seg = np.ones(hi - lo, dtype=bool)
        for p in base_primes:
            p = int(p)
            start = max(p * p, ((lo + p - 1) // p) * p)
            if start >= hi:
                continue
            seg[start - lo :: p] = False
        flags[lo:hi] = seg
        lo = hi
    return flags


def sieve(kind: str, bound: int) -> SieveTable:
    """Build an exact value table for n = 0..bound.

    omega: number of distinct prime divisors (omega(1) = 0).
    totient: Euler phi (phi(1) = 1).
    primes: 0/1 primality flags.
    """
    if kind not in SIEVE_KINDS:
        raise ConfigError(f"unknown sieve kind {kind!r}")
    if bound < 1:
        raise ConfigError("sieve bound must be >= 1")
    if kind == "primes":
        if bound > PRIMES_TABLE_LIMIT:
            raise ResourceError(
                f"primes table up to {bound} exceeds the memory budget; "
                "iterate over segments instead"
            )
        flags = _segmented_prime_flags(bound) if bound > SEGMENT_THRESHOLD else _prime_flags(bound)
        return SieveTable(kind, bound, flags)
    if bound > VALUE_TABLE_LIMIT:
        raise ResourceError(
            f"{kind} table up to {bound} exceeds the memory budget; "
            "use segmented runs over sub-ranges"
        )
    flags = _prime_flags(bound)
    primes = np.flatnonzero(flags)
    if kind == "omega":
        vals = np.zeros(bound + 1, dtype=np.uint8)
        for p in primes:
            vals[p::p] += 1
        return SieveTable(kind, bound, vals)
    vals = np.arange(bound + 1, dtype=np.int64)
    for p in primes:
        vals[p::p] -= vals[p::p] // p
    return SieveTable(kind, bound, vals)


def primes_up_to(bound: int) -> np.ndarray:
    """Ascending array of primes <= bound."""
    if bound < 2:
        return np.zeros(0, dtype=np.int64)
    return np.flatnonzero(_prime_flags(bound)).astype(np.int64)


def primes_in_ap(modulus: int, residue: int, bound: int) -> np.ndarray:
    """Primes p <= bound with p = residue (mod modulus), ascending.

    Requires gcd(residue, modulus) = 1, otherwise the class holds at most
    one prime and the infinitude hypotheses downstream are vacuous.
    modulus=1 (residue 0) yields all primes.
    """
    if modulus < 1:
        raise ConfigError("modulus must be >= 1")
    if bound < 2:
        raise ConfigError("bound must be >= 2")
    residue %= modulus
    if math.gcd(residue, modulus) != 1:
        raise ConfigError(
            f"residue {residue} is not coprime to modulus {modulus}: "
            "the class contains at most one prime"
        )
    ps = primes_up_to(bound)
    if modulus == 1:
        return ps
    return ps[ps % modulus == residue]


def _checkpoint_ladder(bound: int) -> list[int]:
    # powers of ten, then the exact bound
    cps = [10**j for j in range(1, 19) if 10**j < bound]
    cps.append(bound)
    return cps


def representable_count(table: SieveTable, bound: int) -> list[CountCheckpoint]:
    """Count distinct n <= X of the form k * f(k) at log-spaced checkpoints.

    f is the table's weight (omega or totient). Only positive products
    count, so k=1 contributes n=1 for the totient weight and nothing for
    omega. The reference ratio is count/sqrt(X) for totient and
    count * log(log(X))/X for omega.
    """
    if table.kind not in ("omega", "totient"):
        raise ConfigError("representable_count needs an omega or totient table")
    if bound < 1:
        raise ConfigError("bound must be >= 1")
    if table.bound < bound:
        raise ConfigError(f"sieve bound {table.bound} is below the requested bound {bound}")
    n = np.arange(bound + 1, dtype=np.int64)
    products = n * table.values[: bound + 1].astype(np.int64)
    products = products[(products >= 1) & (products <= bound)]
    distinct = np.unique(products)
    out = []
    for cp in _checkpoint_ladder(bound):
        count = int(np.searchsorted(distinct, cp, side="right"))
        if table.kind == "totient":
            ref = count / math.sqrt(cp)
        else:
            ref = count * math.log(math.log(cp)) / cp if cp >= 3 else None
        out.append(CountCheckpoint(cp, count, ref))
    return out
