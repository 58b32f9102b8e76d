"""Data model for block designs and their nestings.

Conventions used throughout the package:

  * Points are dense integer ids.  A design on v points uses ids 0..v-1
    ("old" points); a nesting may extend the universe to w >= v points,
    and ids v..w-1 are "new".  Display labels such as "∞_1" are metadata
    carried by the universe; all arithmetic happens on ids.
  * Blocks are strictly increasing tuples of point ids.  The block list
    of a design is a multiset: repeated blocks are legitimate and are
    never deduplicated.
  * A nesting assigns one extra point phi(A) to each block A, by block
    index.  The augmented blocks A ∪ {phi(A)} are what get verified.
  * Cyclic constructions are described by a BaseBlockSystem: base blocks
    over Z_m whose residue entries are developed by +1 mod m, possibly
    together with fixed points (not developed) and families of indexed
    new points whose index is either fixed or developed mod m.

Everything here is immutable after construction and safe to share
between threads.  Validation at construction is structural only (ranges,
sortedness, partitions of index sets); combinatorial properties such as
pair balance are the verify module's business, so that deliberately
broken inputs can still be built and then rejected with a witness.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence, Union

import numpy as np

__all__ = [
    "NestingError",
    "DesignParams",
    "PointUniverse",
    "as_block",
    "Design",
    "ResolutionClass",
    "Resolution",
    "Nesting",
    "PairCountTable",
    "pair_counts",
    "augment",
    "NewPoint",
    "BaseBlock",
    "BaseBlockSystem",
    "develop",
]


class NestingError(Exception):
    """Domain error with a stable machine-readable code.

    The ``code`` strings are part of the package contract (tests and the
    CLI match on them); ``payload`` carries structured context such as
    offending block indices.
    """

    def __init__(self, code: str, message: str, payload: object = None):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.payload = payload


@dataclass(frozen=True)
class DesignParams:
    """Declared parameters (v, k, lambda) of a design.

    Integrality of the replication number r and block count b is
    computed, never assumed: `admissible()` reports it, and the integer
    accessors raise INFEASIBLE_PARAMS when the rationals are not whole.
    """

    v: int
    k: int
    lam: int

    def __post_init__(self) -> None:
        if self.v < 1:
            raise ValueError("v must be a positive integer")
        if self.k < 2:
            raise ValueError("k must be at least 2")
        if self.lam < 1:
            raise ValueError("lambda must be at least 1")

    @property
    def r_exact(self) -> Fraction:
        return Fraction(self.lam * (self.v - 1), self.k - 1)

    @property
    def b_exact(self) -> Fraction:
        return Fraction(self.lam * self.v * (self.v - 1), self.k * (self.k - 1))

    def admissible(self) -> bool:
        """True when both r and b are integers (necessary for a BIBD)."""
        return self.r_exact.denominator == 1 and self.b_exact.denominator == 1

    @property
    def r(self) -> int:
        if self.r_exact.denominator != 1:
            raise NestingError(
                "INFEASIBLE_PARAMS",
                f"replication number {self.r_exact} is not an integer for {self}",
            )
        return int(self.r_exact)

    @property
    def b(self) -> int:
        if self.b_exact.denominator != 1:
            raise NestingError(
                "INFEASIBLE_PARAMS",
                f"block count {self.b_exact} is not an integer for {self}",
            )
        return int(self.b_exact)


@dataclass(frozen=True)
class PointUniverse:
    """Point ids 0..size-1; ids below old_count form the base set X."""

    old_count: int
    size: int
    labels: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        if not (0 <= self.old_count <= self.size):
            raise ValueError("need 0 <= old_count <= size")
        if self.labels is not None:
            if len(self.labels) != self.size:
                raise ValueError("labels must cover every point id")
            if len(set(self.labels)) != self.size:
                raise ValueError("labels must be distinct")

    def label(self, point: int) -> str:
        if self.labels is not None:
            return self.labels[point]
        return str(point)

    def all_labels(self) -> tuple[str, ...]:
        if self.labels is not None:
            return self.labels
        return tuple(str(i) for i in range(self.size))

    def is_new(self, point: int) -> bool:
        return point >= self.old_count


def as_block(points: Iterable[int]) -> tuple[int, ...]:
    """Normalize an iterable of point ids into a block tuple.

    Blocks are strictly increasing; a repeated point is a hard error
    because no design here allows a point twice inside one block.
    """
    block = tuple(sorted(points))
    for a, b in itertools.pairwise(block):
        if a == b:
            raise ValueError(f"repeated point {a} inside a block")
    return block


def _screen_blocks(
    blocks: tuple[tuple[int, ...], ...], k: int, v: int
) -> np.ndarray | None:
    """Bulk screen of block shape, range, and sortedness.

    Returns the validated (b, k) array so callers can keep it, or None
    both for malformed input and for lists too small to be worth an
    array round trip; callers then fall back to the per-block scan,
    which produces a precise error message (or passes).
    """
    if len(blocks) < 64:
        return None
    try:
        arr = np.asarray(blocks, dtype=np.int64)
    except (ValueError, TypeError):
        return None
    if arr.ndim != 2 or arr.shape[1] != k or k == 0:
        return None
    if arr.min() < 0 or arr.max() >= v:
        return None
    if k >= 2 and not (arr[:, 1:] > arr[:, :-1]).all():
        return None
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ResolutionClass:
    """One (holey) parallel class: block indices, plus its hole group.

    ``hole is None`` means a full class (partitions every point);
    otherwise ``hole`` is an index into the design's group list and the
    class is expected to partition the points outside that group.
    """

    blocks: tuple[int, ...]
    hole: int | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "blocks", tuple(sorted(self.blocks)))


@dataclass(frozen=True)
class Resolution:
    classes: tuple[ResolutionClass, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "classes", tuple(self.classes))

    def block_indices(self) -> Iterator[int]:
        for cls in self.classes:
            yield from cls.blocks


@dataclass(frozen=True)
class Design:
    """A block design: declared params, universe, block multiset.

    ``groups`` (for group-divisible designs) must partition the old
    points when present.  ``resolution`` classes must partition the
    block index set.  Whether those structures satisfy their
    combinatorial definitions is checked by the verify module, not here.
    """

    params: DesignParams
    universe: PointUniverse
    blocks: tuple[tuple[int, ...], ...]
    groups: tuple[tuple[int, ...], ...] | None = None
    resolution: Resolution | None = None
    _blocks_arr: np.ndarray | None = field(
        default=None, init=False, repr=False, compare=False
    )

    def __post_init__(self) -> None:
        if self.universe.old_count != self.params.v:
            raise ValueError("universe old_count must equal params.v")
        object.__setattr__(self, "blocks", tuple(tuple(b) for b in self.blocks))
        arr = _screen_blocks(self.blocks, self.params.k, self.params.v)
        if arr is None:
            # slow scan, only reached for small or malformed inputs,
            # where a per-block error message is worth the loop
            for block in self.blocks:
                if len(block) != self.params.k:
                    raise ValueError(f"block {block} does not have size k={self.params.k}")
                if any(not (0 <= x < self.params.v) for x in block):
                    raise ValueError(f"block {block} uses a point outside 0..v-1")
                if any(a >= b for a, b in itertools.pairwise(block)):
                    raise ValueError(f"block {block} is not strictly increasing")
        object.__setattr__(self, "_blocks_arr", arr)
        if self.groups is not None:
            groups = tuple(tuple(sorted(g)) for g in self.groups)
            object.__setattr__(self, "groups", groups)
            seen = sorted(x for g in groups for x in g)
            if seen != list(range(self.params.v)):
                raise ValueError("groups must partition the old points")
        if self.resolution is not None:
            used = sorted(self.resolution.block_indices())
            if used != list(range(len(self.blocks))):
                raise ValueError("resolution classes must partition the block indices")
            if self.resolution.classes and self.groups is None:
                if any(c.hole is not None for c in self.resolution.classes):
                    raise ValueError("holey classes need groups to point into")
            if self.groups is not None:
                for cls in self.resolution.classes:
                    if cls.hole is not None and not (0 <= cls.hole < len(self.groups)):
                        raise ValueError(f"class hole {cls.hole} is not a group index")

    @property
    def v(self) -> int:
        return self.params.v

    @property
    def k(self) -> int:
        return self.params.k

    @property
    def lam(self) -> int:
        return self.params.lam

    def blocks_array(self) -> np.ndarray:
        """Blocks as a read-only (b, k) int array, built once and cached.

        Verification touches every block several times; sharing one
        array keeps that linear instead of re-converting per check.
        """
        if self._blocks_arr is None:
            arr = np.asarray(self.blocks, dtype=np.int64)
            if arr.ndim != 2:
                arr = arr.reshape(len(self.blocks), self.params.k)
            arr.setflags(write=False)
            object.__setattr__(self, "_blocks_arr", arr)
        assert self._blocks_arr is not None
        return self._blocks_arr

    def group_of(self) -> dict[int, int] | None:
        """Map point id -> group index, or None for ungrouped designs."""
        if self.groups is None:
            return None
        out: dict[int, int] = {}
        for gi, g in enumerate(self.groups):
            for x in g:
                out[x] = gi
        return out


@dataclass(frozen=True)
class Nesting:
    """Per-block nested points over an extended universe.

    ``assignment[i]`` is phi of the i-th block of the accompanying
    design.  The universe records w = size and which ids are new.
    """

    universe: PointUniverse
    assignment: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "assignment", tuple(self.assignment))
        for p in self.assignment:
            if not (0 <= p < self.universe.size):
                raise ValueError(f"nested point {p} outside the universe")

    @property
    def w(self) -> int:
        return self.universe.size

    @property
    def v(self) -> int:
        return self.universe.old_count


def _pair_index(w: int, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Condensed index of unordered pairs (x < y) over w points."""
    return x * (2 * w - x - 1) // 2 + (y - x - 1)


@dataclass(frozen=True, eq=False)
class PairCountTable:
    """Symmetric pair-multiplicity table, stored condensed in numpy.

    Entry {x,y} with x != y counts the blocks containing both points.
    The diagonal does not exist: querying get(x, x) is a caller bug.
    """

    w: int
    counts: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        expect = self.w * (self.w - 1) // 2
        if self.counts.shape != (expect,):
            raise ValueError("counts array has the wrong length")
        self.counts.setflags(write=False)

    def get(self, x: int, y: int) -> int:
        if x == y:
            raise ValueError("pair table has no diagonal")
        if x > y:
            x, y = y, x
        return int(self.counts[x * (2 * self.w - x - 1) // 2 + (y - x - 1)])

    def total(self) -> int:
        return int(self.counts.sum())

    def max_count(self) -> int:
        return int(self.counts.max()) if self.counts.size else 0

    def items(self) -> Iterator[tuple[int, int, int]]:
        """Yield (x, y, count) for every nonzero pair, in lex order."""
        (idx,) = np.nonzero(self.counts)
        if idx.size == 0:
            return
        row_starts = np.array(
            [x * (2 * self.w - x - 1) // 2 for x in range(self.w)], dtype=np.int64
        )
        for flat in idx:
            x = int(np.searchsorted(row_starts, flat, side="right")) - 1
            y = int(flat - row_starts[x]) + x + 1
            yield x, y, int(self.counts[flat])

    def permuted(self, perm: Iterable[int]) -> "PairCountTable":
        """Table after relabeling point i -> perm[i]."""
        p = np.asarray(tuple(perm), dtype=np.int64)
        if sorted(p.tolist()) != list(range(self.w)):
            raise ValueError("perm must be a permutation of 0..w-1")
        out = np.zeros_like(self.counts)
        xs, ys = np.triu_indices(self.w, k=1)
        px, py = p[xs], p[ys]
        lo, hi = np.minimum(px, py), np.maximum(px, py)
        out[_pair_index(self.w, lo, hi)] = self.counts[_pair_index(self.w, xs, ys)]
        table = PairCountTable(self.w, out)
        return table

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PairCountTable):
            return NotImplemented
        return self.w == other.w and bool(np.array_equal(self.counts, other.counts))


def pair_counts(blocks: Iterable[tuple[int, ...]], w: int) -> PairCountTable:
    """Count, for every unordered point pair, the blocks containing it.

    Block multiplicity counts: two identical blocks contribute 2 to each
    of their pairs.
    """
    flat = np.zeros(w * (w - 1) // 2, dtype=np.int64)
    if isinstance(blocks, np.ndarray):
        block_seq: Sequence = blocks if blocks.ndim == 2 else ()
    elif isinstance(blocks, (tuple, list)):
        block_seq = blocks
    else:
        block_seq = tuple(blocks)
    groups: list[np.ndarray]
    try:
        # uniform sizes (the usual case): skip the grouping pass
        whole = np.asarray(block_seq, dtype=np.int64)
        groups = [whole] if whole.ndim == 2 else []
    except (ValueError, TypeError):
        groups = []
    if not groups and block_seq:
        by_size: dict[int, list[tuple[int, ...]]] = {}
        for block in block_seq:
            by_size.setdefault(len(block), []).append(block)
        groups = [np.asarray(g, dtype=np.int64) for g in by_size.values()]
    for arr in groups:
        if arr.size and (arr.min() < 0 or arr.max() >= w):
            raise ValueError("block point id outside the universe")
        idx = [
            _pair_index(w, arr[:, i], arr[:, j])
            for i, j in itertools.combinations(range(arr.shape[1]), 2)
        ]
        if idx:
            # bincount over the concatenated indices beats np.add.at by
            # an order of magnitude on designs with tens of thousands of
            # blocks, and the index arrays are small enough to stack
            flat += np.bincount(np.concatenate(idx), minlength=flat.size)
    return PairCountTable(w, flat)


def augment(design: Design, nesting: Nesting) -> Design:
    """The design of augmented blocks A ∪ {phi(A)}.

    Raises NESTED_POINT_INSIDE_BLOCK (with all offending block indices)
    when any phi(A) lies inside its own block, since the augmented block
    would then not have k+1 distinct points.  Groups are carried over
    only for minimal nestings (w = v); a resolution never survives
    augmentation because the augmented blocks no longer partition
    anything.
    """
    if len(nesting.assignment) != len(design.blocks):
        raise ValueError("nesting must assign a point to every block")
    if nesting.universe.old_count != design.v:
        raise ValueError("nesting universe disagrees with the design about v")
    w = nesting.w
    if design.blocks:
        arr = design.blocks_array()
        phi = np.asarray(nesting.assignment, dtype=np.int64)
        offending = np.nonzero((arr == phi[:, None]).any(axis=1))[0].tolist()
        if offending:
            raise NestingError(
                "NESTED_POINT_INSIDE_BLOCK",
                f"nested point falls inside its block at indices {offending}",
                payload=offending,
            )
        aug = np.concatenate([arr, phi[:, None]], axis=1)
        aug.sort(axis=1)
        # rows are distinct-entry by the check above, so no as_block pass
        aug_blocks = tuple(tuple(row) for row in aug.tolist())
    else:
        aug_blocks = ()
    params = DesignParams(w, design.k + 1, design.lam + 1)
    universe = PointUniverse(w, w, nesting.universe.labels)
    groups = design.groups if w == design.v else None
    return Design(params, universe, aug_blocks, groups=groups)


# --- cyclic development ----------------------------------------------------


@dataclass(frozen=True)
class NewPoint:
    """Entry denoting an indexed new point, e.g. ∞_3.

    With develop_index=False the index is fixed (every shift of the base
    block meets the same new point).  With develop_index=True the index
    itself is developed mod m, so the orbit sweeps through m distinct
    new points of the family.
    """

    family: str
    index: int
    develop_index: bool = False

    def realized(self, shift: int, modulus: int) -> tuple[str, int]:
        if self.develop_index:
            return self.family, (self.index + shift) % modulus
        return self.family, self.index


Entry = Union[int, str, NewPoint]


@dataclass(frozen=True)
class BaseBlock:
    """One base block: k block entries, optional nested entry, orbit.

    ``orbit_length=None`` means the full orbit of length m.  A short
    orbit must be declared explicitly; develop() checks that the
    declared length actually closes the orbit and refuses silently
    truncated inputs.
    """

    entries: tuple[Entry, ...]
    nest: Entry | None = None
    orbit_length: int | None = None


@dataclass(frozen=True)
class BaseBlockSystem:
    """Base blocks over Z_modulus plus declared fixed labels.

    Fixed labels are points that the development leaves alone.  They
    must be declared either old (part of the base point set X, as in
    Z_5 ∪ {∞}) or new (outside X).  Undeclared labels are an error at
    development time, not silently created.
    """

    modulus: int
    bases: tuple[BaseBlock, ...]
    fixed_old: tuple[str, ...] = ()
    fixed_new: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        if self.modulus < 1:
            raise ValueError("modulus must be positive")
        overlap = set(self.fixed_old) & set(self.fixed_new)
        if overlap:
            raise ValueError(f"labels declared both old and new: {sorted(overlap)}")

    @property
    def v(self) -> int:
        return self.modulus + len(self.fixed_old)


def _orbit_lengths(system: BaseBlockSystem) -> list[int]:
    m = system.modulus
    out = []
    for base in system.bases:
        length = base.orbit_length if base.orbit_length is not None else m
        if length < 1 or m % length != 0:
            raise NestingError(
                "SHORT_ORBIT_DOES_NOT_CLOSE",
                f"declared orbit length {length} does not divide modulus {m}",
            )
        out.append(length)
    return out


def _develop_residue_orbit(
    base: BaseBlock, m: int, blocks: list[tuple[int, ...]], nests: list[int] | None
) -> None:
    """Full orbit of an all-residue base block, in one array sweep.

    Matches the per-shift realize/as_block path exactly (same errors,
    same block order); kept separate because the generic path is too
    slow for pair designs, which develop v-1 full orbits.
    """
    entries = base.entries + ((base.nest,) if nests is not None else ())
    for e in entries:
        if not (0 <= e < m):  # type: ignore[operator]
            raise NestingError(
                "RESIDUE_OUT_OF_RANGE",
                f"residue {e} outside 0..{m - 1}",
            )
    shifts = np.arange(m, dtype=np.int64)
    arr = (np.asarray(base.entries, dtype=np.int64)[None, :] + shifts[:, None]) % m
    arr.sort(axis=1)
    # duplicates mod m are shift invariant, so checking one row settles all
    row = arr[0].tolist()
    for a, b in itertools.pairwise(row):
        if a == b:
            raise ValueError(f"repeated point {a} inside a block")
    blocks.extend(tuple(r) for r in arr.tolist())
    if nests is not None:
        nests.extend(((base.nest + shifts) % m).tolist())  # type: ignore[operator]


def develop(system: BaseBlockSystem) -> tuple[Design, Nesting | None]:
    """Develop base blocks mod m into a design and (optionally) a nesting.

    Residue entries are shifted by +s; fixed labels stay put; NewPoint
    entries realize per their index rule.  New points receive ids >= v
    in order of first appearance.  Either every base block carries a
    nested entry (a nesting is returned) or none does (None).

    The declared lambda of the resulting design is the largest old-pair
    multiplicity of the developed blocks — harmless because every
    consumer re-derives properties from the raw blocks.
    """
    m = system.modulus
    v = system.v
    fixed_ids = {label: m + i for i, label in enumerate(system.fixed_old)}
    fixed_new_set = set(system.fixed_new)
    lengths = _orbit_lengths(system)

    nest_flags = {base.nest is not None for base in system.bases}
    if len(nest_flags) > 1:
        raise ValueError("either all base blocks are nested or none is")
    nested = bool(system.bases) and system.bases[0].nest is not None

    new_ids: dict[object, int] = {}
    new_labels: list[str] = []

    def realize(entry: Entry, shift: int) -> int:
        if isinstance(entry, bool):
            raise ValueError("bool is not a point entry")
        if isinstance(entry, int):
            if not (0 <= entry < m):
                raise NestingError(
                    "RESIDUE_OUT_OF_RANGE",
                    f"residue {entry} outside 0..{m - 1}",
                )
            return (entry + shift) % m
        if isinstance(entry, str):
            if entry in fixed_ids:
                return fixed_ids[entry]
            if entry in fixed_new_set:
                key = ("fixed-new", entry)
                if key not in new_ids:
                    new_ids[key] = v + len(new_ids)
                    new_labels.append(entry)
                return new_ids[key]
            raise NestingError(
                "UNDECLARED_FIXED_LABEL",
                f"label {entry!r} is neither a declared old nor new fixed point",
            )
        if isinstance(entry, NewPoint):
            family, index = entry.realized(shift, m)
            key = ("family", family, index)
            if key not in new_ids:
                new_ids[key] = v + len(new_ids)
                new_labels.append(f"{family}{index}")
            return new_ids[key]
        raise TypeError(f"unsupported base block entry {entry!r}")

    blocks: list[tuple[int, ...]] = []
    nests: list[int] = []
    for base, length in zip(system.bases, lengths):
        if length == m and all(type(e) is int for e in base.entries):
            # vectorized sweep: pair families develop tens of thousands
            # of blocks per design and per-entry realize() dominates.
            # Residue entries never mint new point ids, so realizing a
            # non-residue nest per shift keeps id order identical.
            if nested and type(base.nest) is not int:
                _develop_residue_orbit(base, m, blocks, None)
                nests.extend(realize(base.nest, s) for s in range(m))
            else:
                _develop_residue_orbit(base, m, blocks, nests if nested else None)
            continue
        first: tuple[tuple[int, ...], int | None] | None = None
        for shift in range(length):
            ids = as_block(realize(e, shift) for e in base.entries)
            nest_id = realize(base.nest, shift) if nested else None
            if shift == 0:
                first = (ids, nest_id)
            blocks.append(ids)
            if nested:
                nests.append(nest_id)  # type: ignore[arg-type]
        if length < m:
            closing_ids = as_block(realize(e, length) for e in base.entries)
            closing_nest = realize(base.nest, length) if nested else None
            if (closing_ids, closing_nest) != first:
                raise NestingError(
                    "SHORT_ORBIT_DOES_NOT_CLOSE",
                    f"base {base.entries} declared orbit {length} but shift "
                    f"{length} produces a different augmented block",
                )

    k = len(system.bases[0].entries) if system.bases else 2
    if any(len(base.entries) != k for base in system.bases):
        raise ValueError("all base blocks must share one block size")

    w = v + len(new_ids)
    labels = tuple(str(i) for i in range(m)) + tuple(system.fixed_old) + tuple(new_labels)
    old_pairs = pair_counts(blocks, v) if blocks else None
    lam = max(old_pairs.max_count(), 1) if old_pairs is not None else 1
    design = Design(
        DesignParams(v, k, lam),
        PointUniverse(v, v, labels[:v]),
        tuple(blocks),
    )
    if not system.bases:
        return design, Nesting(PointUniverse(v, v, labels[:v]), ())
    if not nested:
        return design, None
    nesting = Nesting(PointUniverse(v, w, labels), tuple(nests))
    return design, nesting
