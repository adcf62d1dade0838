"""Finite truncations of direction sets: enumeration, exact dedup, witnesses.

A direction arising from an integer tuple is represented exactly by the
tuple divided by its gcd (a primitive tuple). Two integer tuples have the
same normalized image precisely when their primitive tuples coincide, so
set semantics over primitive tuples are exact and independent of floats.

Truncations enumerate the product of the per-coordinate element lists up
to a bound. Small products are materialized as a lexicographically sorted
array of primitive tuples; large exhaustive products stay in streaming
form and are consumed block-wise by the diagnostics (coverage and
accumulation do not need the deduplicated set to be held in memory).
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import geometry, intsets
from .errors import ConfigError, DomainError, ResourceError
from .geometry import DirectionPoint, OpenBox

DEFAULT_TUPLE_BUDGET = 10**8
DEFAULT_MATERIALIZE_BUDGET = 2 * 10**7
ORACLE_TUPLE_BUDGET = 10**6
DEFAULT_BLOCK_SIZE = 2 * 10**6
MAX_SAMPLE_COUNT = 5 * 10**7


@dataclass(frozen=True)
class PrimitiveDirection:
    """Canonical integer representative of a rational direction (gcd = 1)."""

    coords: tuple[int, ...]

    def __post_init__(self):
        coords = tuple(int(c) for c in self.coords)
        object.__setattr__(self, "coords", coords)
        if len(coords) < 2:
            raise DomainError("need k >= 2 coordinates")
        if any(c < 0 for c in coords):
            raise DomainError("coordinates must be non-negative")
        if all(c == 0 for c in coords):
            raise DomainError("the zero tuple has no direction")
        if math.gcd(*coords) != 1:
            raise DomainError(f"{coords} is not primitive; use PrimitiveDirection.reduce")

    @staticmethod
    def reduce(values) -> "PrimitiveDirection":
        vals = tuple(int(v) for v in values)
        if all(v == 0 for v in vals):
            raise DomainError("the zero tuple has no direction")
        g = math.gcd(*vals)
        return PrimitiveDirection(tuple(v // g for v in vals))

    @property
    def dim(self) -> int:
        return len(self.coords)

    def as_point(self, norm_kind: str = "euclidean") -> DirectionPoint:
        return geometry.rho(self.coords, norm_kind)


def _pairwise_distinct_mask(rows: np.ndarray) -> np.ndarray:
    mask = np.ones(len(rows), dtype=bool)
    k = rows.shape[1]
    for i in range(k):
        for j in range(i + 1, k):
            mask &= rows[:, i] != rows[:, j]
    return mask


def _reduce_rows(rows: np.ndarray) -> np.ndarray:
    g = np.gcd.reduce(rows, axis=1)
    return rows // g[:, None]


class Truncation:
    """All directions of tuples drawn from the element lists, up to a bound.

    Build through :func:`build_truncation`. `materialized` truncations hold
    the deduplicated primitive tuples in lexicographic order; streaming
    truncations re-enumerate on demand through `block_ranges` and
    `reduced_block`.
    """

    def __init__(self, specs, bound, distinct, mode, element_lists, array, seed=None, sample_count=None):
        self.specs = tuple(specs)
        self.bound = int(bound)
        self.distinct = bool(distinct)
        self.mode = mode
        self.seed = seed
        self.sample_count = sample_count
        self.element_lists = tuple(element_lists)
        self._array = array
        self._floats: np.ndarray | None = None
        self.shape = tuple(len(e) for e in self.element_lists)
        self.tuple_count = math.prod(self.shape)

    @property
    def dim(self) -> int:
        return len(self.element_lists)

    @property
    def materialized(self) -> bool:
        return self._array is not None

    @property
    def point_count(self) -> int:
        if not self.materialized:
            raise ResourceError("streaming truncation: the deduplicated size is not held")
        return len(self._array)

    def point_array(self) -> np.ndarray:
        """Deduplicated primitive tuples, lexicographically sorted, (N, k)."""
        if not self.materialized:
            raise ResourceError(
                f"truncation of {self.tuple_count} tuples is in streaming form; "
                "use sampled mode or raise the materialize budget to hold its points"
            )
        return self._array

    def point_set(self) -> frozenset[PrimitiveDirection]:
        return frozenset(PrimitiveDirection(tuple(row)) for row in self.point_array().tolist())

    def float_points(self) -> np.ndarray:
        """Unit-normalized float images of the deduplicated points, (N, k)."""
        if self._floats is None:
            arr = self.point_array().astype(np.float64)
            self._floats = arr / np.linalg.norm(arr, axis=1)[:, None]
            self._floats.setflags(write=False)
        return self._floats

    def block_ranges(self, block_size: int = DEFAULT_BLOCK_SIZE) -> list[tuple[int, int]]:
        """Index ranges that partition the enumeration for block consumers."""
        total = self.point_count if self.materialized else self.tuple_count
        return [(s, min(s + block_size, total)) for s in range(0, total, block_size)]

    def reduced_block(self, start: int, stop: int) -> np.ndarray:
        """Primitive tuples for one index range; admissible tuples only.

        Streaming blocks are not deduplicated across ranges (consumers that
        need set semantics must materialize). Thread-safe and deterministic.
        """
        if self.materialized:
            return self._array[start:stop]
        idx = np.arange(start, stop, dtype=np.int64)
        multi = np.unravel_index(idx, self.shape)
        rows = np.stack(
            [self.element_lists[i][multi[i]] for i in range(self.dim)], axis=1
        )
        if self.distinct:
            rows = rows[_pairwise_distinct_mask(rows)]
        if len(rows) == 0:
            return rows
        return _reduce_rows(rows)

    def export_text(self) -> str:
        """Stable text form: one primitive tuple per line, lexicographic order."""
        rows = self.point_array()
        return "".join(" ".join(str(v) for v in row) + "\n" for row in rows.tolist())


def _element_lists(specs, bound) -> list[np.ndarray]:
    lists = []
    for spec in specs:
        elems = intsets.enumerate_up_to(spec, bound)
        if len(elems) == 0:
            raise ConfigError(f"spec {spec!r} has no elements up to {bound}")
        lists.append(elems)
    return lists


def build_truncation(
    specs,
    bound: int,
    distinct: bool = False,
    mode: str = "exhaustive",
    seed: int | None = None,
    sample_count: int | None = None,
    tuple_budget: int = DEFAULT_TUPLE_BUDGET,
    materialize_budget: int = DEFAULT_MATERIALIZE_BUDGET,
) -> Truncation:
    """Enumerate and deduplicate the direction set truncation.

    Exhaustive mode covers every admissible tuple of the product space;
    products beyond `materialize_budget` tuples are kept in streaming form
    and products beyond `tuple_budget` are refused. Sampled mode draws
    `sample_count` tuples uniformly with replacement from the product
    space, deterministically for a fixed seed.
    """
    specs = tuple(specs)
    k = len(specs)
    if k < 2:
        raise ConfigError("need k >= 2 coordinate sets")
    if bound < 1:
        raise ConfigError("bound must be >= 1")
    lists = _element_lists(specs, bound)
    sizes = [len(e) for e in lists]
    if distinct and len(set(specs)) == 1 and any(s < k for s in sizes):
        warnings.warn(
            f"distinct truncation with only {min(sizes)} elements up to {bound} "
            f"(k={k}): the projection-closure hypothesis needs at least k elements",
            stacklevel=2,
        )
    total = math.prod(sizes)
    if mode == "exhaustive":
        if total > tuple_budget:
            raise ResourceError(
                f"exhaustive enumeration of {total} tuples exceeds the budget "
                f"{tuple_budget}; use sampled mode or raise the budget"
            )
        trunc = Truncation(specs, bound, distinct, "exhaustive", lists, array=None)
        if total <= materialize_budget:
            blocks = [trunc.reduced_block(s, e) for s, e in trunc.block_ranges()]
            rows = np.concatenate(blocks) if blocks else np.zeros((0, k), dtype=np.int64)
            if len(rows) == 0:
                raise ConfigError("no admissible tuples (distinct filter removed everything)")
            trunc._array = np.unique(rows, axis=0)
        return trunc
    if mode == "sampled":
        if seed is None:
            raise ConfigError("sampled mode requires a seed")
        if not sample_count or sample_count < 1:
            raise ConfigError("sampled mode requires a positive sample count")
        if sample_count > MAX_SAMPLE_COUNT:
            raise ResourceError(f"sample count {sample_count} exceeds {MAX_SAMPLE_COUNT}")
        rng = np.random.default_rng(seed)
        cols = [lst[rng.integers(0, len(lst), size=sample_count)] for lst in lists]
        rows = np.stack(cols, axis=1)
        if distinct:
            rows = rows[_pairwise_distinct_mask(rows)]
        if len(rows) == 0:
            raise ConfigError("no admissible tuples were sampled")
        rows = _reduce_rows(rows)
        array = np.unique(rows, axis=0)
        return Truncation(
            specs, bound, distinct, "sampled", lists, array, seed=seed, sample_count=sample_count
        )
    raise ConfigError(f"unknown enumeration mode {mode!r}")


def oracle_truncation(specs, bound: int, distinct: bool = False) -> frozenset[PrimitiveDirection]:
    """Reference enumeration: nested loops and exact integer gcd reduction.

    Deliberately naive; used as ground truth against build_truncation.
    """
    specs = tuple(specs)
    if len(specs) < 2:
        raise ConfigError("need k >= 2 coordinate sets")
    lists = [e.tolist() for e in _element_lists(specs, bound)]
    total = math.prod(len(e) for e in lists)
    if total > ORACLE_TUPLE_BUDGET:
        raise ResourceError(f"oracle refuses {total} tuples (budget {ORACLE_TUPLE_BUDGET})")
    out = set()
    for tup in itertools.product(*lists):
        if distinct and len(set(tup)) != len(tup):
            continue
        g = math.gcd(*tup)
        out.add(tuple(v // g for v in tup))
    return frozenset(PrimitiveDirection(t) for t in out)


@dataclass(frozen=True)
class WitnessResult:
    """Outcome of a witness search; not-found is a value, not an error."""

    found: bool
    witness: tuple[int, ...] | None
    scales_tried: tuple[int, ...]
    combos_checked: int


def _box_meets_octant(box: OpenBox) -> bool:
    k = box.dim
    widths = [b - a for a, b in box.intervals]
    min_width = min(widths)
    if k == 2:
        step = max(min_width / 4.0, 1.6e-6)
        thetas = np.arange(0.0, math.pi / 2 + step, step)
        pts = np.stack([np.cos(thetas), np.sin(thetas)], axis=1)
    else:
        res = int(min(max(math.ceil(4.0 / min_width), 16), 192))
        pts = np.asarray(
            [p.coords for p in geometry.probe_grid(k, res, "grid")], dtype=np.float64
        )
    lo = np.asarray([a for a, _ in box.intervals])
    hi = np.asarray([b for _, b in box.intervals])
    return bool(np.any(np.all((pts > lo) & (pts < hi), axis=1)))


def _window_candidates(elems: np.ndarray, lo: float, hi: float, cap: int = 4) -> list[int]:
    i = int(np.searchsorted(elems, lo, side="right"))
    j = int(np.searchsorted(elems, hi, side="left"))
    size = j - i
    if size <= 0:
        return []
    if size <= cap:
        return [int(v) for v in elems[i:j]]
    picks = np.unique(np.linspace(i, j - 1, cap).round().astype(np.int64))
    return [int(elems[p]) for p in picks]


def _bracket_candidates(elems: np.ndarray, target: float) -> list[int]:
    j = int(np.searchsorted(elems, target))
    out = []
    if j >= 1:
        out.append(int(elems[j - 1]))
    if j < len(elems):
        out.append(int(elems[j]))
    return sorted(set(out))


def witness_in_box(specs, box: OpenBox, search_bound: int) -> WitnessResult:
    """Search for a tuple whose direction lies strictly inside the box.

    For a doubling ladder of scales u, first try elements inside the
    scaled windows (a_i*u, b_i*u) coordinate-wise, then fall back to the
    elements bracketing u * box-center. Every candidate tuple is verified
    by exact gcd reduction followed by the strict interior test, so a
    returned witness always satisfies the contract. Sets with direction
    gaps legitimately exhaust the ladder and report not-found.
    """
    specs = tuple(specs)
    if len(specs) != box.dim:
        raise ConfigError("box dimension must match the number of coordinate sets")
    if search_bound < 1:
        raise ConfigError("search bound must be >= 1")
    if not _box_meets_octant(box):
        raise DomainError("box does not meet the unit octant sphere")
    lists = _element_lists(specs, search_bound)
    center = box.center()
    scales = []
    u = 1
    while u <= search_bound:
        scales.append(u)
        u *= 2
    combos_checked = 0
    for u in scales:
        stages = []
        windows = [
            _window_candidates(lists[i], a * u, b * u)
            for i, (a, b) in enumerate(box.intervals)
        ]
        if all(windows):
            stages.append(windows)
        brackets = [_bracket_candidates(lists[i], center[i] * u) for i in range(len(lists))]
        if all(brackets):
            stages.append(brackets)
        for stage in stages:
            for combo in itertools.product(*stage):
                combos_checked += 1
                g = math.gcd(*combo)
                reduced = tuple(v // g for v in combo)
                norm = math.sqrt(math.fsum(float(v) * float(v) for v in reduced))
                if box.contains(tuple(v / norm for v in reduced)):
                    return WitnessResult(True, tuple(combo), tuple(scales[: scales.index(u) + 1]), combos_checked)
    return WitnessResult(False, None, tuple(scales), combos_checked)
