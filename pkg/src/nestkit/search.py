"""Exact search for nestings, and exhaustion certificates.

find_min_nesting runs a bounded backtracking search over nested-point
assignments, trying each universe size w from v upward.  The state per
partial assignment is the remaining capacity of every point pair (the
augmented design may use a pair at most lambda+1 times, and for group
divisible designs within-group pairs not at all), plus, in strong mode,
the set of pairs already spent as nested pairs.  Three standard devices
keep the tree small:

  * most-constrained-block ordering, recomputed at every depth;
  * capacity pruning (a block with no legal nest fails immediately);
  * new-point interchangeability: unused fresh points are equivalent,
    so a block may only take the lowest-indexed unused one.

All decisions are tried in ascending point order and blocks tie-break
by index, so the search is deterministic.  Multi-threaded runs split
the first decision level across workers and accept the solution of the
lowest root candidate that has one (tie-broken, defensively, by the
canonical serialization), which is exactly what the single-threaded
loop returns; thread count changes wall time, never output.

Exhaustion is a result, not an error: Exhausted(w_cap) states that no
nesting of the requested kind exists for any w <= w_cap.  Callers rely
on that being monotone in w_cap.

certify_632_strong_bound settles the one small case the bound formulas
get wrong: it enumerates every (6,3,2) design up to isomorphism
(finding exactly one), checks that no two of its blocks are disjoint,
exhausts the strong search at w <= 10, and issues a certificate for
the floor of 11.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from nestkit.core import (
    BaseBlock,
    BaseBlockSystem,
    Design,
    DesignParams,
    Nesting,
    NestingError,
    PointUniverse,
    develop,
    pair_counts,
)
from nestkit.verify import (
    Certificate,
    Check,
    verify_nested_gdd,
    verify_strong_nesting,
    verify_weak_nesting,
)

__all__ = [
    "Exhausted",
    "find_min_nesting",
    "nest_cyclic_base",
    "no_disjoint_blocks",
    "certify_632_strong_bound",
    "certified_632_floor",
]

MODES = ("WEAK", "STRONG", "MINIMAL")


@dataclass(frozen=True)
class Exhausted:
    """No nesting of the requested kind exists with w <= w_cap."""

    w_cap: int


def _pair_idx(w: int, x: int, y: int) -> int:
    if x > y:
        x, y = y, x
    return x * (2 * w - x - 1) // 2 + (y - x - 1)


class _State:
    """Mutable search state at a fixed universe size w."""

    def __init__(self, design: Design, mode: str, w: int, symmetry_breaking: bool):
        self.blocks = design.blocks
        self.v = design.v
        self.w = w
        self.mode = mode
        self.sb = symmetry_breaking
        lam = design.lam
        cap = np.full(w * (w - 1) // 2, lam + 1, dtype=np.int64)
        base = pair_counts(design.blocks, design.v)
        for x, y, c in base.items():
            cap[_pair_idx(w, x, y)] -= c
        if design.groups is not None:
            # nested points may not recreate within-group pairs
            for g in design.groups:
                for x, y in itertools.combinations(g, 2):
                    cap[_pair_idx(w, x, y)] = 0
        self.cap = cap
        self.feasible = bool((cap >= 0).all())
        self.nested_used = np.zeros(w * (w - 1) // 2, dtype=bool)
        self.assignment: list[int | None] = [None] * len(self.blocks)
        self.unassigned = set(range(len(self.blocks)))
        self.new_used = 0

    def candidates(self, bi: int) -> list[int]:
        block = self.blocks[bi]
        new_limit = self.v + self.new_used  # may use one fresh point beyond those seen
        out = []
        for p in range(self.w):
            if p in block:
                continue
            if self.sb and p > new_limit:
                break
            ok = True
            for x in block:
                pi = _pair_idx(self.w, x, p)
                if self.cap[pi] < 1 or (self.mode == "STRONG" and self.nested_used[pi]):
                    ok = False
                    break
            if ok:
                out.append(p)
        return out

    def mrv(self) -> tuple[int, list[int]] | None:
        best: tuple[int, list[int]] | None = None
        for bi in sorted(self.unassigned):
            cands = self.candidates(bi)
            if best is None or len(cands) < len(best[1]):
                best = (bi, cands)
                if not cands:
                    break
        return best

    def assign(self, bi: int, p: int) -> None:
        self.assignment[bi] = p
        self.unassigned.discard(bi)
        for x in self.blocks[bi]:
            pi = _pair_idx(self.w, x, p)
            self.cap[pi] -= 1
            if self.mode == "STRONG":
                self.nested_used[pi] = True
        if p >= self.v + self.new_used:
            self.new_used += 1

    def unassign(self, bi: int, p: int) -> None:
        self.assignment[bi] = None
        self.unassigned.add(bi)
        for x in self.blocks[bi]:
            pi = _pair_idx(self.w, x, p)
            self.cap[pi] += 1
            if self.mode == "STRONG":
                self.nested_used[pi] = False
        if p >= self.v:
            # under symmetry breaking the used fresh points stay a
            # contiguous prefix, so the highest one still assigned
            # determines the count
            highest = max(
                (q for q in self.assignment if q is not None and q >= self.v),
                default=self.v - 1,
            )
            self.new_used = highest - self.v + 1

    def dfs(self) -> tuple[int, ...] | None:
        if not self.unassigned:
            return tuple(self.assignment)  # type: ignore[arg-type]
        pick = self.mrv()
        assert pick is not None
        bi, cands = pick
        for p in cands:
            self.assign(bi, p)
            sol = self.dfs()
            if sol is not None:
                return sol
            self.unassign(bi, p)
        return None


def _nesting_from_assignment(design: Design, w: int, assignment: tuple[int, ...]) -> Nesting:
    labels = None
    if design.universe.labels is not None:
        labels = tuple(design.universe.labels[: design.v]) + tuple(
            f"n{i}" for i in range(w - design.v)
        )
    return Nesting(PointUniverse(design.v, w, labels), assignment)


def _canonical_key(design: Design, nesting: Nesting) -> bytes:
    from nestkit.formats import canonicalize, dumps_bytes, nesting_to_dict

    _, canon = canonicalize(design, nesting)
    assert canon is not None
    return dumps_bytes(nesting_to_dict(canon))


def _search_at_w(
    design: Design, mode: str, w: int, threads: int, symmetry_breaking: bool
) -> tuple[int, ...] | None:
    root = _State(design, mode, w, symmetry_breaking)
    if not root.feasible:
        return None
    if not root.unassigned:
        return ()
    pick = root.mrv()
    assert pick is not None
    bi, cands = pick
    if threads <= 1 or len(cands) <= 1:
        for p in cands:
            root.assign(bi, p)
            sol = root.dfs()
            if sol is not None:
                return sol
            root.unassign(bi, p)
        return None

    from concurrent.futures import ThreadPoolExecutor

    def run(p: int) -> tuple[int, ...] | None:
        st = _State(design, mode, w, symmetry_breaking)
        st.assign(bi, p)
        return st.dfs()

    with ThreadPoolExecutor(max_workers=threads) as pool:
        results = list(pool.map(run, cands))
    found = [
        (i, sol) for i, sol in enumerate(results) if sol is not None
    ]
    if not found:
        return None
    # lowest root candidate wins, matching the sequential scan; the
    # canonical-bytes key is a defensive final tie-break layer
    found.sort(
        key=lambda t: (
            t[0],
            _canonical_key(design, _nesting_from_assignment(design, w, t[1])),
        )
    )
    return found[0][1]


def find_min_nesting(
    design: Design,
    mode: str,
    w_cap: int,
    threads: int = 1,
    symmetry_breaking: bool = True,
) -> Nesting | Exhausted:
    """Smallest-w nesting of ``design`` in ``mode``, or Exhausted.

    MINIMAL restricts the universe to w = v (a minimal nesting is
    automatically strong, so the weak constraint set suffices there).
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    v = design.v
    sizes = range(v, w_cap + 1) if mode != "MINIMAL" else ([v] if w_cap >= v else [])
    for w in sizes:
        sol = _search_at_w(design, "STRONG" if mode == "STRONG" else "WEAK", w, threads, symmetry_breaking)
        if sol is not None:
            nesting = _nesting_from_assignment(design, w, sol)
            if design.groups is not None:
                cert = verify_nested_gdd(design, nesting, strong=mode == "STRONG")
            else:
                verifier = verify_strong_nesting if mode == "STRONG" else verify_weak_nesting
                cert = verifier(design, nesting)
            if not cert.ok:
                raise NestingError(
                    "CONTRACT_VIOLATION",
                    f"search produced a nesting that fails verification: {cert.first_failure()}",
                )
            return nesting
    return Exhausted(w_cap)


# --------------------------------------------- exact-cover internal nesting


def nest_exact_internal(design: Design) -> Nesting | None:
    """Internal nesting whose nested pairs tile the free pair slots.

    When every pair has exactly one unit of augmented capacity left (as
    for any BIBD, and for the cross pairs of any GDD) and the number of
    block-member slots b*k equals the number of such pairs, an internal
    nesting is forced to use every free pair exactly once.  That makes
    the problem an exact cover: pick one nest per block so the pairs
    {x, nest(A)}, x in A, partition the free pairs.  For k=3, lambda=1
    GDDs the counting identity 3b = cross pairs always holds, and for a
    BIBD it holds exactly when the nesting would be perfect.

    Solved with Algorithm X on columns = blocks + free pairs.  Returns
    None when the counting identity fails or no cover exists.
    """
    v = design.v
    lam = design.lam
    counts = pair_counts(design.blocks, v)
    group_of = design.group_of()

    free: dict[tuple[int, int], int] = {}
    for x in range(v):
        for y in range(x + 1, v):
            within = group_of is not None and group_of[x] == group_of[y]
            cap = (0 if within else lam + 1) - counts.get(x, y)
            if cap < 0:
                return None
            if cap > 0:
                if cap > 1:
                    return None  # slack pair, cover cannot be exact
                free[(x, y)] = len(free)

    if len(design.blocks) * design.k != len(free):
        return None

    nblocks = len(design.blocks)
    rows: list[tuple[int, int, tuple[int, ...]]] = []  # (block, nest, columns)
    for bi, block in enumerate(design.blocks):
        members = set(block)
        for p in range(v):
            if p in members:
                continue
            cols = []
            ok = True
            for x in block:
                key = (x, p) if x < p else (p, x)
                if key not in free:
                    ok = False
                    break
                cols.append(nblocks + free[key])
            if ok:
                rows.append((bi, p, (bi, *sorted(cols))))

    col_rows: dict[int, set[int]] = {c: set() for c in range(nblocks + len(free))}
    for ri, (_, _, cols) in enumerate(rows):
        for c in cols:
            col_rows[c].add(ri)

    solution: list[int] = []

    def cover(ri: int) -> list[tuple[int, set[int]]]:
        removed = []
        for c in rows[ri][2]:
            removed.append((c, col_rows.pop(c)))
        for c, members in removed:
            for other in members:
                if other == ri:
                    continue
                for oc in rows[other][2]:
                    if oc in col_rows:
                        col_rows[oc].discard(other)
        return removed

    def uncover(removed: list[tuple[int, set[int]]]) -> None:
        for c, members in reversed(removed):
            col_rows[c] = members
            for other in members:
                for oc in rows[other][2]:
                    if oc in col_rows:
                        col_rows[oc].add(other)

    def solve() -> bool:
        if not col_rows:
            return True
        col = min(col_rows, key=lambda c: (len(col_rows[c]), c))
        if not col_rows[col]:
            return False
        for ri in sorted(col_rows[col]):
            solution.append(ri)
            removed = cover(ri)
            if solve():
                return True
            uncover(removed)
            solution.pop()
        return False

    if not solve():
        return None

    assignment = [-1] * nblocks
    for ri in solution:
        bi, p, _ = rows[ri]
        assignment[bi] = p
    labels = design.universe.labels
    universe = PointUniverse(v, v, labels[:v] if labels is not None else None)
    nesting = Nesting(universe, tuple(assignment))

    if design.groups is not None:
        cert = verify_nested_gdd(design, nesting, strong=True)
    else:
        cert = verify_strong_nesting(design, nesting)
    if not cert.ok:
        raise NestingError(
            "CONTRACT_VIOLATION",
            f"exact cover produced a nesting that fails verification: {cert.first_failure()}",
        )
    return nesting


# ------------------------------------------------------ cyclic offset search


def _difference_class(v: int, d: int) -> int:
    d %= v
    return min(d, v - d)


def nest_cyclic_base(system: BaseBlockSystem, mode: str = "MINIMAL") -> BaseBlockSystem | None:
    """Equivariant nesting of a cyclic system: one offset per base block.

    For full orbits the nested point of the block at shift s is o + s,
    so the augmented orbit covers the difference classes of o, o-a, ...
    once per class; a backtracking exact cover picks offsets whose
    classes partition all difference classes.  Short orbits cannot
    carry a developing offset (it would not close), so each one takes a
    fresh fixed point instead.  Returns the nested system, or None when
    the difference conditions are unsatisfiable, as they are for every
    v = 3 (mod 6) triple system at w = v.

    The caller gets full verification for free: the result re-develops
    through the same machinery as any other base block system.
    """
    if system.fixed_old:
        raise ValueError("offset search expects a purely cyclic system")
    v = system.modulus
    full = [b for b in system.bases if b.orbit_length in (None, v)]
    short = [b for b in system.bases if b.orbit_length not in (None, v)]

    if v % 2 == 0:
        raise ValueError("cyclic systems here have odd modulus")
    all_classes = set(range(1, v // 2 + 1))

    choices: list[list[tuple[int, frozenset[int]]]] = []
    for base in full:
        opts = []
        pts = [e for e in base.entries if isinstance(e, int)]
        if len(pts) != len(base.entries):
            raise ValueError("offset search expects residue-only base blocks")
        for o in range(v):
            if o in pts:
                continue
            classes = frozenset(_difference_class(v, o - x) for x in pts)
            if len(classes) != len(pts):
                continue  # a repeated class inside one orbit always overshoots
            opts.append((o, classes))
        choices.append(opts)

    # offsets must cover every class once, except classes whose pairs
    # the short orbits exhaust among themselves (those get fresh nests
    # instead, adding nothing to any old-pair class)
    uncovered = set(all_classes)
    for base in short:
        pts = [e for e in base.entries if isinstance(e, int)]
        for x, y in itertools.combinations(pts, 2):
            uncovered.discard(_difference_class(v, x - y))

    picked: list[int | None] = [None] * len(full)

    def cover(i: int, remaining: set[int]) -> bool:
        if i == len(full):
            return not remaining
        for o, classes in choices[i]:
            if classes <= remaining:
                picked[i] = o
                if cover(i + 1, remaining - classes):
                    return True
                picked[i] = None
        return False

    if not cover(0, uncovered):
        return None

    nested_bases: list[BaseBlock] = []
    fresh = 0
    it = iter(picked)
    for base in system.bases:
        if base.orbit_length in (None, v):
            nested_bases.append(BaseBlock(base.entries, nest=next(it), orbit_length=base.orbit_length))
        else:
            label = f"∞s{fresh}"
            fresh += 1
            nested_bases.append(BaseBlock(base.entries, nest=label, orbit_length=base.orbit_length))
    fixed_new = tuple(f"∞s{i}" for i in range(fresh))
    nested = BaseBlockSystem(
        modulus=v, bases=tuple(nested_bases), fixed_old=(), fixed_new=fixed_new
    )

    design, nesting = develop(nested)
    assert nesting is not None
    if mode == "MINIMAL" and nesting.w != design.v:
        return None  # short orbits forced fresh points, so w > v
    verifier = verify_strong_nesting if mode in ("STRONG", "MINIMAL") else verify_weak_nesting
    cert = verifier(design, nesting)
    if not cert.ok:
        raise NestingError(
            "CONTRACT_VIOLATION",
            f"offset search produced a nesting that fails verification: {cert.first_failure()}",
        )
    return nested


# --------------------------------------------------- the (6,3,2) certificate


def no_disjoint_blocks(design: Design) -> bool:
    return all(
        set(a) & set(b)
        for a, b in itertools.combinations(design.blocks, 2)
    )


def _enumerate_632() -> list[tuple[tuple[int, ...], ...]]:
    """All (6,3,2) designs as sorted block multisets, up to isomorphism."""
    triples = list(itertools.combinations(range(6), 3))
    pair_cap = {p: 2 for p in itertools.combinations(range(6), 2)}
    deg = dict.fromkeys(range(6), 0)
    solutions: list[tuple[tuple[int, ...], ...]] = []
    chosen: list[tuple[int, ...]] = []

    def dfs(start: int) -> None:
        if len(chosen) == 10:
            solutions.append(tuple(chosen))
            return
        for idx in range(start, len(triples)):
            t = triples[idx]
            if any(deg[x] >= 5 for x in t):
                continue
            prs = list(itertools.combinations(t, 2))
            if any(pair_cap[p] == 0 for p in prs):
                continue
            for p in prs:
                pair_cap[p] -= 1
            for x in t:
                deg[x] += 1
            chosen.append(t)
            dfs(idx)  # same index again: repeated blocks are designs too
            chosen.pop()
            for p in prs:
                pair_cap[p] += 1
            for x in t:
                deg[x] -= 1

    dfs(0)

    canon: set[tuple[tuple[int, ...], ...]] = set()
    reps = []
    for sol in solutions:
        best = min(
            tuple(sorted(tuple(sorted(perm[x] for x in b)) for b in sol))
            for perm in itertools.permutations(range(6))
        )
        if best not in canon:
            canon.add(best)
            reps.append(best)
    return reps


@lru_cache(maxsize=1)
def certify_632_strong_bound() -> Certificate:
    """Exhaustive certificate that strong nestings of (6,3,2) need w >= 11."""
    reps = _enumerate_632()
    checks = [
        Check(
            "unique-design-up-to-isomorphism",
            len(reps) == 1,
            witness={"iso_classes": len(reps)},
        )
    ]
    if len(reps) != 1:
        raise NestingError(
            "CONTRACT_VIOLATION",
            f"expected exactly one (6,3,2) design up to isomorphism, found {len(reps)}",
        )
    design = Design(
        DesignParams(6, 3, 2), PointUniverse(6, 6), reps[0]
    )
    nd = no_disjoint_blocks(design)
    checks.append(Check("no-disjoint-blocks", nd))
    result = find_min_nesting(design, "STRONG", w_cap=10)
    exhausted = isinstance(result, Exhausted)
    checks.append(
        Check(
            "strong-exhausted-to-cap",
            exhausted,
            witness={"w_cap": 10}
            if exhausted
            else {"unexpected_nesting_w": result.w},
        )
    )
    if not (nd and exhausted):
        raise NestingError(
            "CONTRACT_VIOLATION",
            "the (6,3,2) strong floor of 11 was contradicted by recomputation",
        )
    return Certificate(
        kind="lower-bound",
        ok=True,
        checks=tuple(checks),
        params=(6, 3, 2),
        bound={"mode": "STRONG", "lower": 11, "source": "exhaustive search"},
        notes=(
            "every strong nesting of the unique (6,3,2) design needs at "
            "least 11 points; the formulas stop at 9",
        ),
    )


def certified_632_floor() -> int:
    return int(certify_632_strong_bound().bound["lower"])
