"""Declarative integer-set families with ascending enumeration and membership.

Every family is an immutable descriptor. `enumerate_up_to` returns the
ascending, deduplicated elements up to a bound as a read-only int64 array;
`contains` agrees with enumeration membership. All families are exact
except PolynomialImage, whose enumeration is the image of a declared
lattice box {1..L}^m (the box is part of the descriptor, so results are
still deterministic and reproducible).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Sequence

import numpy as np

from . import arith
from .errors import ConfigError, ParseError

Rational = Fraction | int

LATTICE_CELL_BUDGET = 10**8


class IntegerSetSpec:
    """Marker base class; concrete families are frozen dataclasses."""

    def _enumerate(self, bound: int) -> np.ndarray:
        raise NotImplementedError

    def _contains(self, n: int) -> bool:
        arr = enumerate_up_to(self, n)
        i = np.searchsorted(arr, n)
        return bool(i < len(arr) and arr[i] == n)


def _as_array(values) -> np.ndarray:
    arr = np.asarray(sorted(set(int(v) for v in values)), dtype=np.int64)
    return arr


@dataclass(frozen=True)
class BlockUnion(IntegerSetSpec):
    """Union over scales of rational blocks: all integers in [a*q^k, b*q^k).

    Segments are (a, b) pairs with 0 < a < b; they may be arbitrary
    sub-intervals and need not tile [1, q).
    """

    q: int
    segments: tuple[tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        if self.q < 2:
            raise ConfigError(f"block union base q={self.q} must be >= 2")
        segs = tuple((Fraction(a), Fraction(b)) for a, b in self.segments)
        object.__setattr__(self, "segments", segs)
        if not segs:
            raise ConfigError("block union needs at least one segment")
        for a, b in segs:
            if not (0 < a < b):
                raise ConfigError(f"segment ({a}, {b}) must satisfy 0 < a < b")

    def _enumerate(self, bound: int) -> np.ndarray:
        out: set[int] = set()
        for a, b in self.segments:
            scale = Fraction(1)
            while True:
                lo = math.ceil(a * scale)
                if lo > bound:
                    break
                hi = math.ceil(b * scale)
                out.update(range(max(1, lo), min(hi, bound + 1)))
                scale *= self.q
        return _as_array(out)

    def _contains(self, n: int) -> bool:
        for a, b in self.segments:
            scale = Fraction(1)
            while a * scale <= n:
                if n < b * scale:
                    return True
                scale *= self.q
        return False


@dataclass(frozen=True)
class PrimesInAP(IntegerSetSpec):
    """Primes in the residue class residue (mod modulus); modulus=1 means all primes."""

    modulus: int
    residue: int

    def __post_init__(self):
        if self.modulus < 1:
            raise ConfigError("modulus must be >= 1")
        object.__setattr__(self, "residue", self.residue % self.modulus)
        if math.gcd(self.residue, self.modulus) != 1:
            raise ConfigError(
                f"gcd({self.residue}, {self.modulus}) != 1: residue class holds at most one prime"
            )

    def _enumerate(self, bound: int) -> np.ndarray:
        if bound < 2:
            return np.zeros(0, dtype=np.int64)
        return arith.primes_in_ap(self.modulus, self.residue, bound)


@dataclass(frozen=True)
class PolynomialImage(IntegerSetSpec):
    """Positive values of an integer polynomial over the lattice box {1..L}^m.

    terms: ((coefficient, exponent-tuple), ...). All exponent tuples share
    the arity m. Enumeration is complete for the declared box only.
    """

    terms: tuple[tuple[int, tuple[int, ...]], ...]
    lattice_bound: int

    def __post_init__(self):
        terms = tuple(
            (int(c), tuple(int(e) for e in exps)) for c, exps in self.terms if int(c) != 0
        )
        terms = tuple(sorted(terms, key=lambda t: t[1]))
        object.__setattr__(self, "terms", terms)
        if not terms:
            raise ConfigError("polynomial must have at least one nonzero term")
        arities = {len(exps) for _, exps in terms}
        if len(arities) != 1:
            raise ConfigError("all terms must share one arity")
        if any(e < 0 for _, exps in terms for e in exps):
            raise ConfigError("exponents must be non-negative")
        if self.lattice_bound < 1:
            raise ConfigError("lattice bound must be >= 1")

    @property
    def arity(self) -> int:
        return len(self.terms[0][1])

    @property
    def total_degree(self) -> int:
        return max(sum(exps) for _, exps in self.terms)

    def leading_coefficient_sum(self) -> int:
        d = self.total_degree
        return sum(c for c, exps in self.terms if sum(exps) == d)

    def diagonal_coefficients(self) -> list[int]:
        """Coefficients of g(n) = f(n, ..., n) by ascending power of n."""
        coeffs = [0] * (self.total_degree + 1)
        for c, exps in self.terms:
            coeffs[sum(exps)] += c
        return coeffs

    def _evaluate_box(self, L: int) -> np.ndarray:
        m = self.arity
        if L**m > LATTICE_CELL_BUDGET:
            raise ConfigError(
                f"lattice box {L}^{m} exceeds {LATTICE_CELL_BUDGET} cells; lower the bound"
            )
        axes = np.meshgrid(*([np.arange(1, L + 1, dtype=np.int64)] * m), indexing="ij")
        # int64 overflow guard: worst-case magnitude of any partial sum
        worst = sum(abs(c) * L ** sum(exps) for c, exps in self.terms)
        if worst >= 2**62:
            return self._evaluate_box_exact(L)
        total = np.zeros(axes[0].shape, dtype=np.int64)
        for c, exps in self.terms:
            term = np.full(axes[0].shape, c, dtype=np.int64)
            for ax, e in zip(axes, exps):
                if e:
                    term *= ax**e
            total += term
        return total.ravel()

    def _evaluate_box_exact(self, L: int) -> np.ndarray:
        from itertools import product as iproduct

        if L**self.arity > 10**6:
            raise ConfigError("lattice box too large for exact big-integer evaluation")
        vals = []
        for point in iproduct(range(1, L + 1), repeat=self.arity):
            v = sum(c * math.prod(x**e for x, e in zip(point, exps)) for c, exps in self.terms)
            vals.append(v)
        return np.asarray(vals, dtype=object)

    def _enumerate(self, bound: int) -> np.ndarray:
        vals = self._evaluate_box(self.lattice_bound)
        kept = [int(v) for v in vals if 1 <= v <= bound]
        if not kept:
            warnings.warn(
                "polynomial image is empty over the declared lattice box "
                f"(L={self.lattice_bound}, bound={bound})",
                stacklevel=2,
            )
        return _as_array(kept)


@dataclass(frozen=True)
class PerfectPowers(IntegerSetSpec):
    """All m^r with integer m >= 2 and exponent r >= min_exponent (default 3)."""

    min_exponent: int = 3

    def __post_init__(self):
        if self.min_exponent < 3:
            raise ConfigError("min_exponent must be >= 3")

    def _enumerate(self, bound: int) -> np.ndarray:
        out: set[int] = set()
        m = 2
        while m**self.min_exponent <= bound:
            v = m**self.min_exponent
            while v <= bound:
                out.add(v)
                v *= m
            m += 1
        return _as_array(out)

    def _contains(self, n: int) -> bool:
        if n < 2**self.min_exponent:
            return False
        for r in range(self.min_exponent, n.bit_length() + 1):
            root = round(n ** (1.0 / r))
            for m in (root - 1, root, root + 1):
                if m >= 2 and m**r == n:
                    return True
        return False


@dataclass(frozen=True)
class WeightedByOmega(IntegerSetSpec):
    """The set of products n * omega(n) (positive values only)."""

    def _enumerate(self, bound: int) -> np.ndarray:
        table = arith.sieve("omega", bound)
        n = np.arange(bound + 1, dtype=np.int64)
        prod = n * table.values.astype(np.int64)
        return np.unique(prod[(prod >= 1) & (prod <= bound)])


@dataclass(frozen=True)
class WeightedByTotient(IntegerSetSpec):
    """The set of products n * phi(n)."""

    def _enumerate(self, bound: int) -> np.ndarray:
        table = arith.sieve("totient", bound)
        n = np.arange(bound + 1, dtype=np.int64)
        prod = n * table.values
        return np.unique(prod[(prod >= 1) & (prod <= bound)])


@dataclass(frozen=True)
class TwoThreePowers(IntegerSetSpec):
    """Powers of two and of three with exponent at least 2."""

    def _enumerate(self, bound: int) -> np.ndarray:
        out = set()
        for base in (2, 3):
            v = base * base
            while v <= bound:
                out.add(v)
                v *= base
        return _as_array(out)

    def _contains(self, n: int) -> bool:
        for base in (2, 3):
            if n >= base * base:
                v = n
                while v % base == 0:
                    v //= base
                if v == 1:
                    return True
        return False


@dataclass(frozen=True)
class Explicit(IntegerSetSpec):
    """A literal ascending list of positive integers."""

    elements: tuple[int, ...]

    def __post_init__(self):
        elems = tuple(int(v) for v in self.elements)
        object.__setattr__(self, "elements", elems)
        for i, v in enumerate(elems):
            if v < 1:
                raise ConfigError(f"element {v} is not a positive integer")
            if i and v <= elems[i - 1]:
                raise ConfigError(f"elements must be strictly ascending at position {i + 1}")

    @staticmethod
    def from_file(path: str | Path) -> "Explicit":
        """Parse one positive integer per line, strictly ascending.

        Blank lines are skipped; duplicates and order violations are
        rejected with the offending line number.
        """
        elems: list[int] = []
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                text = line.strip()
                if not text:
                    continue
                try:
                    v = int(text)
                except ValueError:
                    raise ParseError(f"not an integer: {text!r}", line=lineno) from None
                if v < 1:
                    raise ParseError(f"not a positive integer: {v}", line=lineno)
                if elems and v == elems[-1]:
                    raise ParseError(f"duplicate element {v}", line=lineno)
                if elems and v < elems[-1]:
                    raise ParseError(f"element {v} breaks ascending order", line=lineno)
                elems.append(v)
        return Explicit(tuple(elems))

    def _enumerate(self, bound: int) -> np.ndarray:
        arr = np.asarray(self.elements, dtype=np.int64)
        return arr[arr <= bound]

    def _contains(self, n: int) -> bool:
        i = np.searchsorted(np.asarray(self.elements, dtype=np.int64), n)
        return bool(i < len(self.elements) and self.elements[i] == n)


@lru_cache(maxsize=128)
def _enumerate_cached(spec: IntegerSetSpec, bound: int) -> np.ndarray:
    arr = spec._enumerate(bound)
    arr.setflags(write=False)
    return arr


def enumerate_up_to(spec: IntegerSetSpec, bound: int) -> np.ndarray:
    """Ascending deduplicated elements of the family that are <= bound."""
    if not isinstance(spec, IntegerSetSpec):
        raise ConfigError(f"not an integer set spec: {spec!r}")
    if bound < 1:
        raise ConfigError("bound must be >= 1")
    return _enumerate_cached(spec, int(bound))


def contains(spec: IntegerSetSpec, n: int) -> bool:
    """Exact membership (lattice-box semantics for PolynomialImage)."""
    if n < 1:
        raise ConfigError("membership is defined for positive integers")
    return spec._contains(int(n))


def diagonal_sequence(spec: PolynomialImage, count: int) -> list[int]:
    """Positive values of g(n) = f(n, ..., n) for n = 1, 2, ... in order.

    Requires a positive sum of top-degree coefficients, which makes g
    eventually strictly increasing with consecutive ratios tending to 1.
    """
    if not isinstance(spec, PolynomialImage):
        raise ConfigError("diagonal_sequence needs a PolynomialImage spec")
    if count < 1:
        raise ConfigError("count must be >= 1")
    lead = spec.leading_coefficient_sum()
    if lead <= 0:
        raise ConfigError(
            f"sum of top-degree coefficients is {lead}; the collapsed polynomial "
            "does not grow, so the denseness route through it does not apply"
        )
    coeffs = spec.diagonal_coefficients()
    # past the Cauchy root bound g is positive and increasing
    bound = 1 + max(abs(c) for c in coeffs) // max(lead, 1)
    out: list[int] = []
    n = 1
    limit = max(10 * (count + bound), 10**6)
    while len(out) < count and n <= limit:
        g = sum(c * n**i for i, c in enumerate(coeffs))
        if g > 0:
            out.append(g)
        n += 1
    if len(out) < count:
        raise ConfigError("no positive diagonal values found within the search limit")
    return out


def _parse_rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"not a rational number: {text!r}") from None


def parse_set_spec(text: str) -> IntegerSetSpec:
    """Parse the compact spec strings used by the CLI and config files.

    Forms: nat | primes | squares | powers[:r0] | twothree | nomega |
    ntotient | primesap:M:A | blockunion:Q:a-b[,a-b...] |
    polyimage:L:c*e1.e2[;...] | explicit:v1,v2,... | explicit:@file
    """
    text = text.strip()
    head, _, rest = text.partition(":")
    head = head.lower()
    if head == "nat":
        return BlockUnion(2, ((Fraction(1), Fraction(2)),))
    if head == "primes":
        return PrimesInAP(1, 0)
    if head == "squares":
        return PolynomialImage(((1, (2,)),), lattice_bound=10**6)
    if head == "twothree":
        return TwoThreePowers()
    if head == "nomega":
        return WeightedByOmega()
    if head == "ntotient":
        return WeightedByTotient()
    if head == "powers":
        return PerfectPowers(int(rest) if rest else 3)
    if head == "primesap":
        parts = rest.split(":")
        if len(parts) != 2:
            raise ParseError(f"primesap needs modulus:residue, got {text!r}")
        return PrimesInAP(int(parts[0]), int(parts[1]))
    if head == "blockunion":
        parts = rest.split(":")
        if len(parts) != 2:
            raise ParseError(f"blockunion needs q:segments, got {text!r}")
        segs = []
        for chunk in parts[1].split(","):
            lo, _, hi = chunk.partition("-")
            if not hi:
                raise ParseError(f"segment {chunk!r} needs the form a-b")
            segs.append((_parse_rational(lo), _parse_rational(hi)))
        return BlockUnion(int(parts[0]), tuple(segs))
    if head == "polyimage":
        parts = rest.split(":", 1)
        if len(parts) != 2:
            raise ParseError(f"polyimage needs L:terms, got {text!r}")
        terms = []
        for chunk in parts[1].split(";"):
            coeff_text, _, exp_text = chunk.partition("*")
            if not exp_text:
                raise ParseError(f"term {chunk!r} needs the form c*e1.e2")
            exps = tuple(int(e) for e in exp_text.split("."))
            terms.append((int(coeff_text), exps))
        return PolynomialImage(tuple(terms), lattice_bound=int(parts[0]))
    if head == "explicit":
        if rest.startswith("@"):
            return Explicit.from_file(rest[1:])
        return Explicit(tuple(int(v) for v in rest.split(",") if v.strip()))
    raise ParseError(f"unknown set spec {text!r}")
