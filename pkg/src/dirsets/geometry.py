"""Points on the non-negative unit-norm octant and the maps acting on them.

A direction is a unit-norm tuple with non-negative coordinates. Rational
directions arising from integer tuples are normalized exactly elsewhere
(see engine.PrimitiveDirection); this module works in floats and provides
the normalization map, index-subset projections, permutation actions, the
metric used by coverage diagnostics, and deterministic probe-point
generation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError, DomainError

UNIT_NORM_TOL = 1e-12

NORM_KINDS = ("euclidean", "l1")


def _norm(coords: Sequence[float], norm_kind: str) -> float:
    if norm_kind == "euclidean":
        return math.sqrt(math.fsum(c * c for c in coords))
    if norm_kind == "l1":
        return math.fsum(abs(c) for c in coords)
    raise ConfigError(f"unknown norm kind {norm_kind!r}")


@dataclass(frozen=True)
class DirectionPoint:
    """A point of the unit octant: k coordinates in [0,1] with unit norm."""

    coords: tuple[float, ...]
    norm_kind: str = "euclidean"

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(float(c) for c in self.coords))
        k = len(self.coords)
        if k < 2:
            raise DomainError(f"direction points need k >= 2 coordinates, got {k}")
        if self.norm_kind not in NORM_KINDS:
            raise ConfigError(f"unknown norm kind {self.norm_kind!r}")
        for c in self.coords:
            if not (-UNIT_NORM_TOL <= c <= 1.0 + UNIT_NORM_TOL):
                raise DomainError(f"coordinate {c} outside [0, 1]")
        if all(c <= 0.0 for c in self.coords):
            raise DomainError("at least one coordinate must be positive")
        n = _norm(self.coords, self.norm_kind)
        if abs(n - 1.0) > UNIT_NORM_TOL:
            raise DomainError(f"norm {n} deviates from 1 by more than {UNIT_NORM_TOL}")

    @property
    def dim(self) -> int:
        return len(self.coords)

    def array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=np.float64)


@dataclass(frozen=True)
class IndexSubset:
    """A non-empty subset of coordinate indices {1, ..., k} (1-based)."""

    indices: frozenset[int]
    dim: int

    def __post_init__(self):
        object.__setattr__(self, "indices", frozenset(int(i) for i in self.indices))
        if not self.indices:
            raise DomainError("index subset must be non-empty")
        if any(i < 1 or i > self.dim for i in self.indices):
            raise DomainError(f"indices {sorted(self.indices)} out of range 1..{self.dim}")

    def meets(self, x: DirectionPoint) -> bool:
        """True when x has a nonzero coordinate at some index of the subset."""
        return any(x.coords[i - 1] != 0.0 for i in self.indices)


@dataclass(frozen=True)
class Permutation:
    """A bijection on {1, ..., k}, stored as the image tuple (pi(1), ..., pi(k))."""

    images: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "images", tuple(int(i) for i in self.images))
        k = len(self.images)
        if sorted(self.images) != list(range(1, k + 1)):
            raise DomainError(f"images {self.images} are not a bijection on 1..{k}")

    @property
    def dim(self) -> int:
        return len(self.images)

    def inverse(self) -> "Permutation":
        inv = [0] * self.dim
        for i, img in enumerate(self.images, start=1):
            inv[img - 1] = i
        return Permutation(tuple(inv))

    @staticmethod
    def identity(k: int) -> "Permutation":
        return Permutation(tuple(range(1, k + 1)))


@dataclass(frozen=True)
class OpenBox:
    """Per-coordinate open intervals (a_i, b_i) with 0 <= a_i < b_i."""

    intervals: tuple[tuple[float, float], ...]

    def __post_init__(self):
        ivs = tuple((float(a), float(b)) for a, b in self.intervals)
        object.__setattr__(self, "intervals", ivs)
        for a, b in ivs:
            if a < 0 or not a < b:
                raise DomainError(f"interval ({a}, {b}) is not a valid open interval in [0, inf)")

    @property
    def dim(self) -> int:
        return len(self.intervals)

    def contains(self, coords: Sequence[float]) -> bool:
        """Strict interior membership, coordinate by coordinate."""
        if len(coords) != self.dim:
            raise DomainError("dimension mismatch between box and point")
        return all(a < c < b for c, (a, b) in zip(coords, self.intervals))

    def center(self) -> tuple[float, ...]:
        return tuple((a + b) / 2.0 for a, b in self.intervals)


def rho(x: Sequence[float | int], norm_kind: str = "euclidean") -> DirectionPoint:
    """Normalize a non-negative tuple onto the unit octant.

    Integer tuples are first divided by their gcd, which makes the map
    exactly scale-invariant on integer inputs: rho(c*x) == rho(x) bit for
    bit, for any positive integer c.
    """
    vals = list(x)
    if len(vals) < 2:
        raise DomainError("need k >= 2 coordinates")
    if any(v < 0 for v in vals):
        raise DomainError(f"negative coordinate in {vals}")
    if all(v == 0 for v in vals):
        raise DomainError("cannot normalize the zero vector")
    if all(isinstance(v, (int, np.integer)) for v in vals):
        g = math.gcd(*(int(v) for v in vals))
        vals = [int(v) // g for v in vals]
    n = _norm(vals, norm_kind)
    return DirectionPoint(tuple(v / n for v in vals), norm_kind)


def rho_projection(x: DirectionPoint, subset: IndexSubset) -> DirectionPoint:
    """Zero the coordinates outside the subset and renormalize.

    The subset must meet x, otherwise the projection would land on the
    zero vector. Projecting onto the full index set (or any subset that
    zeroes nothing) returns the input unchanged, so the operation is
    exactly idempotent.
    """
    if subset.dim != x.dim:
        raise DomainError("dimension mismatch between point and index subset")
    if not subset.meets(x):
        raise DomainError(f"index subset {sorted(subset.indices)} does not meet the point")
    kept = [c if (i + 1) in subset.indices else 0.0 for i, c in enumerate(x.coords)]
    if all(a == b for a, b in zip(kept, x.coords)):
        return x
    n = _norm(kept, x.norm_kind)
    return DirectionPoint(tuple(c / n for c in kept), x.norm_kind)


def permute(x: DirectionPoint, p: Permutation) -> DirectionPoint:
    """Rearrange coordinates: output coordinate i is input coordinate p(i)."""
    if p.dim != x.dim:
        raise DomainError("dimension mismatch between point and permutation")
    return DirectionPoint(tuple(x.coords[img - 1] for img in p.images), x.norm_kind)


def distance(x: DirectionPoint, y: DirectionPoint) -> float:
    """Euclidean distance between coordinate tuples (any norm kind, but matching)."""
    if x.dim != y.dim:
        raise DomainError("dimension mismatch")
    if x.norm_kind != y.norm_kind:
        raise DomainError("norm kind mismatch")
    return math.sqrt(math.fsum((a - b) ** 2 for a, b in zip(x.coords, y.coords)))


def _simplex_lattice(k: int, resolution: int) -> Iterable[tuple[int, ...]]:
    # compositions of `resolution` into k non-negative parts
    for cuts in combinations_with_replacement(range(resolution + 1), k - 1):
        prev = 0
        parts = []
        for c in cuts:
            parts.append(c - prev)
            prev = c
        parts.append(resolution - prev)
        yield tuple(parts)


def probe_grid(
    k: int,
    resolution: int,
    scheme: str = "grid",
    seed: int | None = None,
) -> list[DirectionPoint]:
    """Deterministic probe points spread over the unit octant.

    grid scheme: for k=2, uniformly spaced angles over the quarter circle;
    for k>=3, every lattice point of the simplex {sum n_i = resolution}
    normalized to unit euclidean norm, with exact duplicates removed.
    random scheme: `resolution` points from folded standard normals,
    normalized; requires a seed and is reproducible for a fixed seed.
    """
    if k < 2:
        raise ConfigError("k must be >= 2")
    if resolution < 2:
        raise ConfigError("resolution must be >= 2")
    if scheme == "grid":
        if k == 2:
            step = (math.pi / 2) / (resolution - 1)
            out = []
            for j in range(resolution):
                theta = j * step
                out.append(DirectionPoint((math.cos(theta), math.sin(theta))))
            return out
        seen: dict[tuple[float, ...], DirectionPoint] = {}
        for parts in _simplex_lattice(k, resolution):
            g = math.gcd(*parts)
            parts = tuple(v // g for v in parts)
            n = math.sqrt(sum(v * v for v in parts))
            coords = tuple(v / n for v in parts)
            if coords not in seen:
                seen[coords] = DirectionPoint(coords)
        return [seen[c] for c in sorted(seen)]
    if scheme == "random":
        if seed is None:
            raise ConfigError("random probe scheme requires a seed")
        rng = np.random.default_rng(seed)
        raw = np.abs(rng.standard_normal((resolution, k)))
        raw /= np.linalg.norm(raw, axis=1, keepdims=True)
        return [DirectionPoint(tuple(row)) for row in raw]
    raise ConfigError(f"unknown probe scheme {scheme!r}")


def probe_array(probes: Sequence[DirectionPoint]) -> np.ndarray:
    """Stack probe coordinates into an (n, k) float array."""
    if not probes:
        raise ConfigError("empty probe list")
    return np.asarray([p.coords for p in probes], dtype=np.float64)
