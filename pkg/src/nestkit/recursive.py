"""Recursive constructions of nested (v,3,2)-BIBDs for all feasible v.

A (v,3,2)-BIBD exists for v = 0 or 1 (mod 3).  Outside a short list of
hand-built small cases, nested designs are assembled here from group
divisible ingredients by one common scheme:

  1. take an internally nested 3-GDD (its nesting reuses base points and
     the augmented blocks cover every cross-group pair twice),
  2. add a second, resolvable 3-GDD on the same groups and nest each
     (holey) parallel class at a fresh point, at most three classes per
     point for a weak nesting and exactly one for a strong one,
  3. replace every group by a small nested BIBD on the group plus a few
     new points, some shared between groups and some reused from step 2
     when the reuse creates no repeated pair.

Group pairs then carry multiplicity 2 from the fills, cross pairs carry
1 + 1 from the two GDDs, and the count of new points gives the w values
proved optimal or near-optimal by the bounds module.

Ingredients are obtained through a small provider with three tiers:
packaged fixtures (verified classical objects under data/ingredients),
deterministic search (cyclic difference methods plus exact cover), and
user-supplied files from the NESTKIT_INGREDIENT_PATH directory.  Every
ingredient is re-verified on load no matter where it came from, and the
certificates of pipeline outputs record the content hash of every
ingredient consumed.

Larger ingredients are manufactured from smaller ones by weighting: a
4-GDD master with every point blown up into `weight` points carries a
copy of a filler object on each expanded block.  With a nested 3-GDD
filler this yields a nested 3-GDD (`wfc_weight`); with a 3-frame filler
it yields a 3-frame whose holey classes, one per master point, are the
unions of the filler classes holed at that point (`frame_construction`).
"""

from __future__ import annotations

import itertools
import json
import os
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

from nestkit.core import (
    Design,
    DesignParams,
    Nesting,
    NestingError,
    PointUniverse,
    Resolution,
    ResolutionClass,
    as_block,
    develop,
    pair_counts,
)
from nestkit.direct import cyclic_sts, fixture, nest_cyclic_orbits
from nestkit.formats import design_from_dict, nesting_from_dict, subject_hashes
from nestkit.search import nest_cyclic_base, nest_exact_internal
from nestkit.verify import (
    Certificate,
    verify_bibd,
    verify_gdd,
    verify_nested_gdd,
    verify_resolution,
    verify_strong_nesting,
    verify_weak_nesting,
)
from nestkit.bounds import check_optimal

__all__ = [
    "IngredientRequest",
    "Ingredient",
    "provide",
    "packaged_ingredients",
    "clear_search_memo",
    "resolvable_from_kts",
    "wfc_weight",
    "frame_construction",
    "ClassAssignment",
    "assign_classes",
    "PipelineResult",
    "construct_nested",
    "construct_cyclic_1mod6",
]

INGREDIENT_KINDS = (
    "KTS",
    "NESTED_GDD",
    "RESOLVABLE_GDD",
    "FRAME",
    "MASTER_GDD",
    "NESTED_BIBD",
    "HANANI_TS",
)

ENV_INGREDIENT_PATH = "NESTKIT_INGREDIENT_PATH"


# ------------------------------------------------------------ ingredients


@dataclass(frozen=True)
class IngredientRequest:
    """What a pipeline needs: a kind plus its defining parameters.

    ``signature`` pins the object exactly (group type and block size for
    divisible designs, v for triple systems).  ``prefer`` orders the
    tiers to try; a tier with no recipe for the kind just passes.
    """

    kind: str
    signature: dict
    prefer: tuple[str, ...] = ("FIXTURE", "SEARCH", "FILE")

    def __post_init__(self) -> None:
        if self.kind not in INGREDIENT_KINDS:
            raise ValueError(f"unknown ingredient kind {self.kind!r}")
        object.__setattr__(self, "signature", dict(self.signature))


@dataclass(frozen=True)
class Ingredient:
    name: str
    kind: str
    signature: dict
    design: Design
    nesting: Nesting | None
    source: str  # FIXTURE, SEARCH, or FILE

    def hashes(self) -> dict:
        return subject_hashes(self.design, self.nesting)

    def note(self) -> str:
        hashes = self.hashes()
        tail = " nesting sha256:" + hashes["nesting"] if "nesting" in hashes else ""
        return (
            f"ingredient {self.name} [{self.kind}] via {self.source}, "
            f"design sha256:{hashes['design']}{tail}"
        )


def gdd_type(design: Design) -> tuple[int, ...]:
    if design.groups is None:
        raise ValueError("design has no groups")
    return tuple(sorted(len(g) for g in design.groups))


def _norm_signature(sig: dict) -> tuple:
    items = []
    for key in sorted(sig):
        val = sig[key]
        if isinstance(val, (list, tuple)):
            val = tuple(sorted(val))
        items.append((key, val))
    return tuple(items)


def _signature_of(kind: str, design: Design, nesting: Nesting | None, declared: dict) -> dict:
    """Recompute a loaded ingredient's signature from its actual content."""
    if kind in ("KTS", "HANANI_TS"):
        return {"v": design.v}
    if kind in ("NESTED_GDD", "RESOLVABLE_GDD", "FRAME", "MASTER_GDD"):
        return {"k": design.k, "lam": design.lam, "type": list(gdd_type(design))}
    if kind == "NESTED_BIBD":
        mode = str(declared.get("mode", "WEAK")).upper()
        return {"v": design.v, "k": design.k, "lam": design.lam, "mode": mode}
    raise ValueError(kind)


def _demand(cert: Certificate, what: str) -> None:
    if not cert.ok:
        fail = cert.first_failure()
        raise NestingError(
            "CONTRACT_VIOLATION",
            f"{what}: check {fail.name!r} failed",
            payload=fail.witness,
        )


def _verify_ingredient(kind: str, design: Design, nesting: Nesting | None, mode: str | None = None) -> None:
    """Re-check a candidate ingredient; accepting unverified input is a bug."""
    if kind in ("KTS", "HANANI_TS"):
        if design.lam != 1:
            raise NestingError("CONTRACT_VIOLATION", f"{kind} must have lambda 1")
        _demand(verify_bibd(design), kind)
        if design.resolution is None:
            raise NestingError("CONTRACT_VIOLATION", f"{kind} needs a resolution")
        if kind == "KTS":
            check = verify_resolution(design)
            if not check.ok:
                raise NestingError("CONTRACT_VIOLATION", "KTS resolution invalid", payload=check.witness)
        else:
            # Near-resolvable: every class consists of pairwise disjoint
            # blocks; class sizes are free (near classes plus one short one).
            for ci, cls in enumerate(design.resolution.classes):
                seen: set[int] = set()
                for bi in cls.blocks:
                    for x in design.blocks[bi]:
                        if x in seen:
                            raise NestingError(
                                "CONTRACT_VIOLATION",
                                f"class {ci} repeats point {x}; classes must be partial parallel",
                            )
                        seen.add(x)
    elif kind in ("RESOLVABLE_GDD", "FRAME"):
        _demand(verify_gdd(design), kind)
        if design.resolution is None:
            raise NestingError("CONTRACT_VIOLATION", f"{kind} needs a resolution")
        check = verify_resolution(design)
        if not check.ok:
            raise NestingError("CONTRACT_VIOLATION", f"{kind} resolution invalid", payload=check.witness)
        holey = [cls.hole is not None for cls in design.resolution.classes]
        if kind == "FRAME" and not all(holey):
            raise NestingError("CONTRACT_VIOLATION", "a frame's classes must all be holey")
        if kind == "RESOLVABLE_GDD" and any(holey):
            raise NestingError("CONTRACT_VIOLATION", "a resolvable GDD's classes must all be full")
    elif kind == "MASTER_GDD":
        _demand(verify_gdd(design), kind)
    elif kind == "NESTED_GDD":
        _demand(verify_gdd(design), kind)
        if nesting is None or nesting.w != design.v:
            raise NestingError(
                "CONTRACT_VIOLATION",
                "a nested GDD ingredient carries an internal nesting (w == v)",
            )
        _demand(verify_nested_gdd(design, nesting, strong=True), kind)
    elif kind == "NESTED_BIBD":
        _demand(verify_bibd(design), kind)
        if nesting is None:
            raise NestingError("CONTRACT_VIOLATION", "NESTED_BIBD needs a nesting")
        want = (mode or "WEAK").upper()
        if want == "MINIMAL" and nesting.w != design.v:
            raise NestingError("CONTRACT_VIOLATION", "minimal nesting must have w == v")
        cert = (
            verify_weak_nesting(design, nesting)
            if want == "WEAK"
            else verify_strong_nesting(design, nesting)
        )
        _demand(cert, kind)
    else:
        raise ValueError(kind)


def _ingredient_from_payload(payload: dict, source: str) -> Ingredient:
    for key in ("name", "kind", "signature", "design"):
        if key not in payload:
            raise NestingError("MALFORMED_FILE", f"ingredient file lacks {key!r}")
    kind = payload["kind"]
    if kind not in INGREDIENT_KINDS:
        raise NestingError("MALFORMED_FILE", f"unknown ingredient kind {kind!r}")
    design = design_from_dict(payload["design"])
    nesting = nesting_from_dict(payload["nesting"]) if payload.get("nesting") else None
    declared = dict(payload["signature"])
    mode = declared.get("mode")
    _verify_ingredient(kind, design, nesting, mode=mode)
    actual = _signature_of(kind, design, nesting, declared)
    if _norm_signature(actual) != _norm_signature(declared):
        raise NestingError(
            "MALFORMED_FILE",
            f"ingredient {payload['name']!r} declares {declared} but contains {actual}",
        )
    return Ingredient(payload["name"], kind, actual, design, nesting, source)


def _packaged_ingredients() -> dict[tuple, Ingredient]:
    from importlib import resources

    out: dict[tuple, Ingredient] = {}
    root = resources.files("nestkit").joinpath("data/ingredients")
    for entry in sorted(root.iterdir(), key=lambda p: p.name):
        if not entry.name.endswith(".json"):
            continue
        payload = json.loads(entry.read_text(encoding="utf-8"))
        ing = _ingredient_from_payload(payload, "FIXTURE")
        out[(ing.kind, _norm_signature(ing.signature))] = ing
    return out


_PACKAGED_CACHE: dict[tuple, Ingredient] | None = None

# Small nested BIBDs served straight from the worked-example catalog.
_BIBD_FIXTURES = {
    (4, "WEAK"): "E4",
    (6, "WEAK"): "E6",
    (7, "WEAK"): "E7",
    (9, "WEAK"): "E9",
    (10, "WEAK"): "E10",
    (12, "WEAK"): "E12",
    (4, "STRONG"): "E4strong",
    (6, "STRONG"): "strongE6",
    (7, "STRONG"): "E7strong",
    (9, "STRONG"): "E9strong",
    (10, "STRONG"): "E10strong",
    (12, "STRONG"): "E12strong",
}


def _fixture_tier(request: IngredientRequest) -> Ingredient | None:
    global _PACKAGED_CACHE
    if request.kind == "NESTED_BIBD":
        sig = request.signature
        if (sig.get("k"), sig.get("lam")) != (3, 2):
            return None
        name = _BIBD_FIXTURES.get((sig.get("v"), str(sig.get("mode", "")).upper()))
        if name is None:
            return None
        rec = fixture(name)
        return Ingredient(name, "NESTED_BIBD", dict(sig), rec.design, rec.nesting, "FIXTURE")
    if _PACKAGED_CACHE is None:
        _PACKAGED_CACHE = _packaged_ingredients()
    return _PACKAGED_CACHE.get((request.kind, _norm_signature(request.signature)))


def _file_tier(request: IngredientRequest) -> Ingredient | None:
    raw = os.environ.get(ENV_INGREDIENT_PATH)
    if not raw:
        return None
    want = _norm_signature(request.signature)
    for part in raw.split(os.pathsep):
        base = Path(part)
        if not base.is_dir():
            continue
        for path in sorted(base.glob("*.json")):
            try:
                payload = json.loads(path.read_text(encoding="utf-8"))
            except (OSError, ValueError) as exc:
                raise NestingError("MALFORMED_FILE", f"cannot read {path}: {exc}") from exc
            if payload.get("kind") != request.kind:
                continue
            declared = payload.get("signature", {})
            if _norm_signature(declared) != want:
                continue
            return _ingredient_from_payload(payload, "FILE")
    return None


def packaged_ingredients() -> tuple[Ingredient, ...]:
    """Every ingredient fixture shipped in the package, verified on load."""
    global _PACKAGED_CACHE
    if _PACKAGED_CACHE is None:
        _PACKAGED_CACHE = _packaged_ingredients()
    return tuple(_PACKAGED_CACHE[key] for key in sorted(_PACKAGED_CACHE))


_SEARCH_MEMO: dict[tuple, Ingredient] = {}


def clear_search_memo() -> None:
    _SEARCH_MEMO.clear()


def _search_tier(request: IngredientRequest, seconds: float) -> Ingredient | None:
    key = (request.kind, _norm_signature(request.signature))
    if key in _SEARCH_MEMO:
        return _SEARCH_MEMO[key]
    sig = request.signature
    found: Ingredient | None = None
    if request.kind == "NESTED_GDD" and sig.get("k") == 3 and sig.get("lam") == 1:
        found = _search_nested_gdd(tuple(sorted(sig["type"])))
    elif request.kind == "RESOLVABLE_GDD" and sig.get("k") == 3 and sig.get("lam") == 1:
        found = _search_resolvable_gdd(tuple(sorted(sig["type"])), seconds)
    elif request.kind == "NESTED_BIBD":
        if (sig.get("k"), sig.get("lam")) == (3, 1) and str(sig.get("mode", "")).upper() == "MINIMAL":
            found = _search_perfect_sts(sig["v"])
    elif request.kind == "HANANI_TS":
        found = _search_hanani_ts(sig["v"], seconds)
    if found is not None:
        _SEARCH_MEMO[key] = found
    return found


def provide(request: IngredientRequest, search_seconds: float = 60.0) -> Ingredient:
    """Fetch an ingredient through the preference chain, verified.

    Raises MISSING_INGREDIENT naming the kind, the signature, and the
    tiers that were tried, so callers can report exactly what a user
    would have to supply (via NESTKIT_INGREDIENT_PATH) to proceed.
    """
    tried = []
    for tier in request.prefer:
        if tier == "FIXTURE":
            found = _fixture_tier(request)
        elif tier == "SEARCH":
            found = _search_tier(request, search_seconds)
        elif tier == "FILE":
            found = _file_tier(request)
        else:
            raise ValueError(f"unknown tier {tier!r}")
        if found is not None:
            return found
        tried.append(tier)
    raise NestingError(
        "MISSING_INGREDIENT",
        f"no {request.kind} with signature {request.signature} "
        f"(tried {', '.join(tried)}; supply a file via ${ENV_INGREDIENT_PATH})",
        payload={"kind": request.kind, "signature": request.signature, "tried": tried},
    )


# ------------------------------------------ cyclic search for GDD ingredients


def _folded(d: int, m: int) -> int:
    d %= m
    return min(d, m - d)


def _cross_difference_pool(g: int, u: int) -> list[int] | None:
    """Folded differences of Z_{gu} that join distinct residue classes mod u.

    Returns None when full-orbit difference methods cannot apply: the
    half difference gu/2 (whose orbit is short) would have to be used,
    or the pool size is not a multiple of three.
    """
    m = g * u
    pool = [d for d in range(1, m // 2 + 1) if d % u != 0]
    if m % 2 == 0 and (m // 2) % u != 0:
        return None
    if len(pool) % 3 != 0:
        return None
    return pool


def _triple_partitions(pool: list[int], m: int):
    """All partitions of the pool into triples (a,b,c), a+b=c or a+b+c=m.

    Such a triple is exactly one whose three difference classes admit a
    common base block {0, a, a+b}; yielded in lexicographic order.
    """
    pool = sorted(pool)

    def rec(remaining: tuple[int, ...]):
        if not remaining:
            yield ()
            return
        a = remaining[0]
        rest = remaining[1:]
        for i, b in enumerate(rest):
            for c in rest[i + 1 :]:
                if a + b == c or a + b + c == m:
                    nxt = tuple(x for x in rest if x != b and x != c)
                    for tail in rec(nxt):
                        yield ((a, b, c),) + tail

    yield from rec(tuple(pool))


def _realizations(triple: tuple[int, int, int], m: int) -> list[tuple[int, int, int]]:
    """Base blocks through 0 whose folded differences are the given triple.

    Distinct translates of one orbit are the same realization; blocks
    are deduplicated by their minimal translate containing 0.
    """
    want = tuple(sorted(triple))
    out: set[tuple[int, int, int]] = set()
    for x, y in itertools.permutations(triple, 2):
        block = (0, x % m, (x + y) % m)
        if len(set(block)) != 3:
            continue
        diffs = tuple(sorted(_folded(p - q, m) for p, q in itertools.combinations(block, 2)))
        if diffs != want:
            continue
        rep = min(
            tuple(sorted((e - shift) % m for e in block))
            for shift in block
        )
        out.add(rep)
    return sorted(out)


def _develop_bases(bases: tuple[tuple[int, int, int], ...], m: int) -> list[tuple[int, ...]]:
    return [
        as_block((e + s) % m for e in base) for base in bases for s in range(m)
    ]


def _cyclic_gdd_candidates(g: int, u: int):
    """Yield (bases, blocks) of cyclic 3-GDDs of type g^u, groups mod u."""
    m = g * u
    pool = _cross_difference_pool(g, u)
    if pool is None:
        return
    for part in _triple_partitions(pool, m):
        options = [_realizations(tr, m) for tr in part]
        if any(not opt for opt in options):
            continue
        for bases in itertools.product(*options):
            yield bases, _develop_bases(bases, m)


def _residue_groups(m: int, u: int) -> tuple[tuple[int, ...], ...]:
    return tuple(tuple(range(i, m, u)) for i in range(u))


def _gdd_design(blocks: list[tuple[int, ...]], g: int, u: int,
                resolution: Resolution | None = None) -> Design:
    m = g * u
    return Design(
        DesignParams(m, 3, 1),
        PointUniverse(m, m),
        tuple(blocks),
        groups=_residue_groups(m, u),
        resolution=resolution,
    )


def _search_nested_gdd(gtype: tuple[int, ...]) -> Ingredient | None:
    """Internally nested 3-GDD of uniform type g^u by cyclic development.

    Candidate block sets come from difference-triple partitions; the
    internal nesting, when one exists, is an exact cover of the free
    cross pairs and is found by Algorithm X.
    """
    if len(set(gtype)) != 1:
        return None
    g, u = gtype[0], len(gtype)
    for bases, blocks in _cyclic_gdd_candidates(g, u):
        design = _gdd_design(blocks, g, u)
        if not verify_gdd(design).ok:
            continue
        nesting = nest_exact_internal(design)
        if nesting is None:
            continue
        name = f"nested_gdd_{g}x{u}"
        sig = {"k": 3, "lam": 1, "type": list(gtype)}
        return Ingredient(name, "NESTED_GDD", sig, design, nesting, "SEARCH")
    return None


# Exact cover by dict-of-sets Algorithm X; deterministic and budgeted.


class _Budget(Exception):
    pass


def _algox(cols: dict, rows: dict, solution: list, state: dict):
    if not cols:
        return list(solution)
    state["nodes"] += 1
    if state["nodes"] > state["max_nodes"] or time.monotonic() > state["deadline"]:
        raise _Budget
    col = min(cols, key=lambda c: (len(cols[c]), c))
    for row in sorted(cols[col]):
        solution.append(row)
        removed = _select(cols, rows, row)
        result = _algox(cols, rows, solution, state)
        _deselect(cols, rows, row, removed)
        if result is not None:
            return result
        solution.pop()
    return None


def _select(cols: dict, rows: dict, row) -> list:
    removed = []
    for c in rows[row]:
        for other in cols[c]:
            for c2 in rows[other]:
                if c2 != c:
                    cols[c2].discard(other)
        removed.append((c, cols.pop(c)))
    return removed


def _deselect(cols: dict, rows: dict, row, removed: list) -> None:
    for c, members in reversed(removed):
        cols[c] = members
        for other in members:
            for c2 in rows[other]:
                if c2 != c:
                    cols[c2].add(other)


def _resolve_into_classes(
    blocks: list[tuple[int, ...]], m: int, n_classes: int,
    deadline: float, max_nodes: int = 400_000,
) -> list[list[int]] | None:
    """Partition developed blocks into parallel classes of Z_m, or None.

    Exact cover: a row places block b into class c; columns demand that
    every block lands in one class and every class covers every point
    once.  Block 0 is pinned to class 0, which kills the class-renaming
    symmetry.
    """
    rows: dict = {}
    for bi, block in enumerate(blocks):
        for ci in range(n_classes):
            if bi == 0 and ci != 0:
                continue
            rows[(bi, ci)] = [("B", bi)] + [("P", ci, p) for p in block]
    cols: dict = {}
    for row, cs in rows.items():
        for c in cs:
            cols.setdefault(c, set()).add(row)
    state = {"nodes": 0, "max_nodes": max_nodes, "deadline": deadline}
    try:
        solution = _algox(cols, rows, [], state)
    except _Budget:
        return None
    if solution is None:
        return None
    classes: list[list[int]] = [[] for _ in range(n_classes)]
    for bi, ci in solution:
        classes[ci].append(bi)
    return [sorted(cls) for cls in classes]


def _class_sum_screen(bases, m: int) -> bool:
    """Necessary condition for resolvability of a cyclic 3-GDD, 3 | m.

    Every class partitions Z_m, so its block sums add to m(m-1)/2; block
    sums are constant mod 3 along an orbit.  When all orbits share one
    sum residue the class total is forced and usually wrong; mixed
    residues can always be combined.
    """
    target = (m * (m - 1) // 2) % 3
    sums = {sum(base) % 3 for base in bases}
    if len(sums) > 1:
        return True
    return ((m // 3) * next(iter(sums))) % 3 == target


def _search_resolvable_gdd(gtype: tuple[int, ...], seconds: float) -> Ingredient | None:
    """Resolvable 3-GDD of type g^u: derive from a Kirkman system, else
    develop cyclic candidates and resolve them by exact cover."""
    if len(set(gtype)) != 1:
        return None
    g, u = gtype[0], len(gtype)
    name = f"resolvable_gdd_{g}x{u}"
    sig = {"k": 3, "lam": 1, "type": list(gtype)}

    if g == 3:
        # Dropping one parallel class of a Kirkman system and calling its
        # triples the groups leaves a resolvable GDD of type 3^u.
        try:
            kts = provide(IngredientRequest("KTS", {"v": 3 * u}, prefer=("FIXTURE", "FILE")))
        except NestingError:
            kts = None
        if kts is not None:
            design = resolvable_from_kts(kts.design)
            return Ingredient(name, "RESOLVABLE_GDD", sig, design, None, "SEARCH")

    m = g * u
    if m % 3 != 0:
        return None
    n_classes_blocks = m // 3
    deadline = time.monotonic() + seconds
    candidates = [
        (bases, blocks)
        for bases, blocks in _cyclic_gdd_candidates(g, u)
        if _class_sum_screen(bases, m) and len(blocks) % n_classes_blocks == 0
    ]
    # Iterative deepening on the exact-cover node budget.  A hopeless block
    # set can soak up an enormous search tree, so give every candidate a
    # cheap first look before anyone gets an expensive one; the instances
    # that do resolve tend to resolve within a few tens of thousands of
    # nodes.
    for max_nodes in (25_000, 400_000):
        for bases, blocks in candidates:
            if time.monotonic() > deadline:
                return None
            n_classes = len(blocks) // n_classes_blocks
            classes = _resolve_into_classes(blocks, m, n_classes, deadline, max_nodes=max_nodes)
            if classes is None:
                continue
            # Reorder blocks class by class so the resolution reads off cleanly.
            ordered: list[tuple[int, ...]] = []
            res_classes = []
            for cls in classes:
                start = len(ordered)
                ordered.extend(blocks[bi] for bi in cls)
                res_classes.append(ResolutionClass(blocks=tuple(range(start, len(ordered)))))
            design = _gdd_design(ordered, g, u, resolution=Resolution(tuple(res_classes)))
            if not verify_gdd(design).ok or not verify_resolution(design).ok:
                continue
            return Ingredient(name, "RESOLVABLE_GDD", sig, design, None, "SEARCH")
    return None


def _search_perfect_sts(v: int) -> Ingredient | None:
    """A Steiner triple system with a minimal nesting (hence perfect).

    Cyclic systems first: nest base blocks by a translate so augmented
    differences work out; if no translate pattern exists, fall back to
    exact cover over the developed blocks.
    """
    try:
        system = cyclic_sts(v)
    except NestingError:
        return None
    sig = {"v": v, "k": 3, "lam": 1, "mode": "MINIMAL"}
    nested_system = nest_cyclic_base(system, mode="MINIMAL")
    if nested_system is not None:
        design, nesting = develop(nested_system)
        return Ingredient(f"perfect_sts_{v}", "NESTED_BIBD", sig, design, nesting, "SEARCH")
    design, _ = develop(system)
    nesting = nest_exact_internal(design)
    if nesting is None:
        return None
    return Ingredient(f"perfect_sts_{v}", "NESTED_BIBD", sig, design, nesting, "SEARCH")


def _hanani_base_class(m: int, deadline: float) -> list[tuple[int, int, int]] | None:
    """One near class, missing point 0, whose +1 translates tile the rest.

    Points: first copy of Z_m is 0..m-1, second copy is m..2m-1, and 2m
    is a fixed point; m must be odd and divisible by 3.  The class has
    to consume every folded within-copy difference exactly once (minus
    m/3 in the first copy, which the short orbit of {0, m/3, 2m/3} will
    eat), every cross difference exactly once, and one fixed-point
    block {2m, x, y'} straddling the copies; that bookkeeping is
    precisely what makes the m translates partition the remaining
    blocks with pairwise distinct holes.  Depth-first search over the
    lowest uncovered point.
    """
    t = m // 3
    half = (m - 1) // 2
    inf = 2 * m
    calls = [0]

    def fold(d: int) -> int:
        d %= m
        return min(d, m - d)

    def dfs(covered, a00, a11, amx, blocks) -> bool:
        calls[0] += 1
        if calls[0] % 4096 == 0 and time.monotonic() > deadline:
            raise _Budget
        p = next((q for q in range(1, 2 * m) if q not in covered), None)
        if p is None:
            return True
        if p < m:
            a = p
            for b in range(a + 1, m):
                if b in covered:
                    continue
                f1 = fold(b - a)
                if f1 not in a00:
                    continue
                # both remaining partners in the first copy
                for c in range(b + 1, m):
                    if c in covered:
                        continue
                    f2, f3 = fold(c - b), fold(c - a)
                    if len({f1, f2, f3}) == 3 and f2 in a00 and f3 in a00:
                        a00.difference_update((f1, f2, f3))
                        covered.update((a, b, c))
                        blocks.append((a, b, c))
                        if dfs(covered, a00, a11, amx, blocks):
                            return True
                        blocks.pop()
                        covered.difference_update((a, b, c))
                        a00.update((f1, f2, f3))
                # one partner in each copy
                for c in range(m):
                    if (m + c) in covered:
                        continue
                    d1, d2 = (c - a) % m, (c - b) % m
                    if d1 != d2 and d1 in amx and d2 in amx:
                        a00.discard(f1)
                        amx.difference_update((d1, d2))
                        covered.update((a, b, m + c))
                        blocks.append((a, b, m + c))
                        if dfs(covered, a00, a11, amx, blocks):
                            return True
                        blocks.pop()
                        covered.difference_update((a, b, m + c))
                        amx.update((d1, d2))
                        a00.add(f1)
            # both partners in the second copy
            for b in range(m):
                if (m + b) in covered:
                    continue
                for c in range(b + 1, m):
                    if (m + c) in covered:
                        continue
                    f1 = fold(c - b)
                    if f1 not in a11:
                        continue
                    d1, d2 = (b - a) % m, (c - a) % m
                    if d1 != d2 and d1 in amx and d2 in amx:
                        a11.discard(f1)
                        amx.difference_update((d1, d2))
                        covered.update((a, m + b, m + c))
                        blocks.append((a, m + b, m + c))
                        if dfs(covered, a00, a11, amx, blocks):
                            return True
                        blocks.pop()
                        covered.difference_update((a, m + b, m + c))
                        amx.update((d1, d2))
                        a11.add(f1)
            return False
        # only second-copy points remain
        a = p - m
        for b in range(a + 1, m):
            if (m + b) in covered:
                continue
            f1 = fold(b - a)
            if f1 not in a11:
                continue
            for c in range(b + 1, m):
                if (m + c) in covered:
                    continue
                f2, f3 = fold(c - b), fold(c - a)
                if len({f1, f2, f3}) == 3 and f2 in a11 and f3 in a11:
                    a11.difference_update((f1, f2, f3))
                    covered.update((p, m + b, m + c))
                    blocks.append((p, m + b, m + c))
                    if dfs(covered, a00, a11, amx, blocks):
                        return True
                    blocks.pop()
                    covered.difference_update((p, m + b, m + c))
                    a11.update((f1, f2, f3))
        return False

    for x in range(1, m):
        for y in range(m):
            a00 = set(range(1, half + 1)) - {t}
            a11 = set(range(1, half + 1))
            amx = set(range(m)) - {(y - x) % m}
            covered = {0, x, m + y, inf}
            blocks = [(x, m + y, inf)]
            try:
                if dfs(covered, a00, a11, amx, blocks):
                    return blocks
            except _Budget:
                return None
    return None


def _search_hanani_ts(v: int, seconds: float) -> Ingredient | None:
    """A triple system split into near-parallel classes plus a short class.

    The attempt is 2-rotational: two copies of Z_m (m = (v-1)/2, odd)
    plus one fixed point, a base near class missing 0 developed by the
    +1 rotation, and the short class the orbit of {0, m/3, 2m/3} in the
    first copy.  A point-count argument forces the near-class holes to
    be exactly the short class's points, which the rotation gives for
    free.  Even m defeats the difference bookkeeping (the half
    difference would be covered twice), so those v are left to files.
    """
    t, m = (v - 1) // 6, (v - 1) // 2
    if v % 6 != 1 or t < 3 or m % 2 == 0:
        return None
    base = _hanani_base_class(m, time.monotonic() + seconds)
    if base is None:
        return None

    def shift(p: int, c: int) -> int:
        if p == 2 * m:
            return p
        offset = 0 if p < m else m
        return offset + ((p - offset + c) % m)

    ordered: list[tuple[int, ...]] = []
    res_classes = []
    for c in range(m):
        start = len(ordered)
        ordered.extend(as_block(tuple(shift(p, c) for p in blk)) for blk in base)
        res_classes.append(ResolutionClass(blocks=tuple(range(start, len(ordered)))))
    start = len(ordered)
    ordered.extend((j, t + j, 2 * t + j) for j in range(t))
    res_classes.append(ResolutionClass(blocks=tuple(range(start, len(ordered)))))
    design = Design(
        DesignParams(v, 3, 1),
        PointUniverse(v, v),
        tuple(ordered),
        resolution=Resolution(tuple(res_classes)),
    )
    _verify_ingredient("HANANI_TS", design, None)
    return Ingredient(f"hanani_ts_{v}", "HANANI_TS", {"v": v}, design, None, "SEARCH")


# ----------------------------------------------------- derived ingredients


def resolvable_from_kts(kts: Design) -> Design:
    """Turn a Kirkman system into a resolvable 3-GDD of type 3^u.

    The first parallel class becomes the group set; the remaining
    classes stay as the resolution.  Cross pairs keep multiplicity one
    and group pairs lived only in the removed class.
    """
    if kts.resolution is None:
        raise ValueError("need a resolved triple system")
    classes = kts.resolution.classes
    groups = tuple(kts.blocks[bi] for bi in classes[0].blocks)
    ordered: list[tuple[int, ...]] = []
    res_classes = []
    for cls in classes[1:]:
        start = len(ordered)
        ordered.extend(kts.blocks[bi] for bi in cls.blocks)
        res_classes.append(ResolutionClass(blocks=tuple(range(start, len(ordered)))))
    return Design(
        DesignParams(kts.v, 3, 1),
        PointUniverse(kts.v, kts.v),
        tuple(ordered),
        groups=groups,
        resolution=Resolution(tuple(res_classes)),
    )


def relabel_onto(design: Design, nesting: Nesting | None,
                 target_groups: tuple[tuple[int, ...], ...]) -> tuple[Design, Nesting | None]:
    """Permute points so the design's groups become target_groups.

    Groups are matched in order of (size, smallest member) on both
    sides; inside a matched pair, sorted order maps to sorted order.
    Only internal nestings (w == v) relabel alongside.
    """
    if design.groups is None:
        raise ValueError("relabel_onto needs a grouped design")
    src = sorted(design.groups, key=lambda grp: (len(grp), grp))
    tgt = sorted(target_groups, key=lambda grp: (len(grp), grp))
    if [len(grp) for grp in src] != [len(grp) for grp in tgt]:
        raise ValueError("group types disagree; cannot relabel")
    perm: dict[int, int] = {}
    for s_grp, t_grp in zip(src, tgt):
        for a, b in zip(sorted(s_grp), sorted(t_grp)):
            perm[a] = b
    blocks = tuple(as_block(perm[x] for x in b) for b in design.blocks)
    out = Design(
        design.params,
        PointUniverse(design.v, design.v),
        blocks,
        groups=tuple(tuple(sorted(grp)) for grp in target_groups),
        resolution=design.resolution,
    )
    if nesting is None:
        return out, None
    if nesting.w != design.v:
        raise ValueError("only internal nestings can be relabelled")
    new_assignment = tuple(perm[p] for p in nesting.assignment)
    return out, Nesting(PointUniverse(design.v, design.v), new_assignment)


# ------------------------------------------------------- weighting lemmas


def _expand_maps(master: Design, weight: int, filler_groups: tuple[tuple[int, ...], ...]):
    """Per-master-block point maps: filler point -> expanded master point.

    Filler groups, in order of smallest member, correspond to block
    positions; a master point p expands to the ids p*weight .. p*weight+weight-1.
    """
    order = sorted(range(len(filler_groups)), key=lambda gi: min(filler_groups[gi]))
    position_points = [tuple(sorted(filler_groups[gi])) for gi in order]
    if any(len(pts) != weight for pts in position_points):
        raise ValueError(f"filler group type must be {weight}^{len(filler_groups)}")

    def mapping_for(master_block: tuple[int, ...]) -> dict[int, int]:
        out: dict[int, int] = {}
        for pos, mp in enumerate(master_block):
            for j, fp in enumerate(position_points[pos]):
                out[fp] = mp * weight + j
        return out

    return mapping_for


def _expanded_groups(master: Design, weight: int) -> tuple[tuple[int, ...], ...]:
    assert master.groups is not None
    return tuple(
        tuple(sorted(p * weight + j for p in grp for j in range(weight)))
        for grp in master.groups
    )


def wfc_weight(master: Design, weight: int, filler: Design,
               filler_nesting: Nesting) -> tuple[Design, Nesting]:
    """Blow up a GDD master by a constant weight with nested GDD fillers.

    Each master block of size k carries a copy of an internally nested
    3-GDD of type weight^k on its expanded points; copies on different
    blocks overlap in at most one expanded group, where the filler has
    no pairs at all.  The union is an internally nested 3-GDD whose type
    multiplies every master group size by the weight.
    """
    if master.groups is None or filler.groups is None:
        raise ValueError("weighting needs grouped master and filler")
    if len(filler.groups) != master.k:
        raise ValueError("filler group count must equal the master block size")
    if filler_nesting.w != filler.v:
        raise ValueError("the filler nesting must be internal")
    mapping_for = _expand_maps(master, weight, filler.groups)
    blocks: list[tuple[int, ...]] = []
    nests: list[int] = []
    for mb in master.blocks:
        mapping = mapping_for(mb)
        for fi, fb in enumerate(filler.blocks):
            blocks.append(as_block(mapping[x] for x in fb))
            nests.append(mapping[filler_nesting.assignment[fi]])
    v_new = master.v * weight
    design = Design(
        DesignParams(v_new, filler.k, filler.lam),
        PointUniverse(v_new, v_new),
        tuple(blocks),
        groups=_expanded_groups(master, weight),
    )
    nesting = Nesting(PointUniverse(v_new, v_new), tuple(nests))
    return design, nesting


def frame_construction(master: Design, weight: int, filler: Design) -> Design:
    """Blow up a GDD master by a constant weight with frame fillers.

    The filler is a 3-frame of type weight^k.  The holey classes of the
    output are indexed by master points: the class for p is the union,
    over master blocks through p, of the filler class holed at p's
    position, and its hole is p's expanded group.  A master group G thus
    receives |G| * weight/2 classes, the right frame census.
    """
    if master.groups is None or filler.groups is None:
        raise ValueError("weighting needs grouped master and filler")
    if len(filler.groups) != master.k:
        raise ValueError("filler group count must equal the master block size")
    if filler.resolution is None:
        raise ValueError("the filler must carry its holey classes")
    mapping_for = _expand_maps(master, weight, filler.groups)

    # filler classes by the position of their hole group
    order = sorted(range(len(filler.groups)), key=lambda gi: min(filler.groups[gi]))
    position_of_group = {gi: pos for pos, gi in enumerate(order)}
    classes_by_position: dict[int, list[ResolutionClass]] = {}
    for cls in filler.resolution.classes:
        if cls.hole is None:
            raise ValueError("the filler must carry its holey classes")
        classes_by_position.setdefault(position_of_group[cls.hole], []).append(cls)

    blocks: list[tuple[int, ...]] = []
    point_classes: dict[int, list[int]] = {p: [] for p in range(master.v)}
    for mb in master.blocks:
        mapping = mapping_for(mb)
        base = len(blocks)
        blocks.extend(as_block(mapping[x] for x in fb) for fb in filler.blocks)
        for pos, mp in enumerate(mb):
            for cls in classes_by_position.get(pos, ()):
                point_classes[mp].extend(base + bi for bi in cls.blocks)

    group_of_master = master.group_of()
    assert group_of_master is not None
    res_classes = []
    for gi in range(len(master.groups)):
        for p in sorted(master.groups[gi]):
            if point_classes[p]:
                res_classes.append(
                    ResolutionClass(blocks=tuple(point_classes[p]), hole=gi)
                )
    v_new = master.v * weight
    return Design(
        DesignParams(v_new, filler.k, filler.lam),
        PointUniverse(v_new, v_new),
        tuple(blocks),
        groups=_expanded_groups(master, weight),
        resolution=Resolution(tuple(res_classes)),
    )


# ------------------------------------------------- class-point attachment


@dataclass(frozen=True)
class ClassAssignment:
    """Which new point nests each (holey) parallel class.

    ``chunks[j]`` lists the class indices nested at the j-th new point.
    Classes are taken hole-major; within a run of classes whose holes
    have one size, points are dealt round-robin so each receives at most
    ``cap`` classes.  ``hole_points`` maps a group index to the new
    points all of whose classes are holed at that group; only such
    points may later be reused inside that group's fill.
    """

    cap: int
    chunks: tuple[tuple[int, ...], ...]
    hole_points: dict[int, tuple[int, ...]] = field(default_factory=dict)

    @property
    def count(self) -> int:
        return len(self.chunks)


def assign_classes(design: Design, cap: int) -> ClassAssignment:
    if design.resolution is None:
        raise ValueError("assign_classes needs a resolved design")
    if cap < 1:
        raise ValueError("cap must be at least 1")
    classes = design.resolution.classes
    hole_size = [
        len(design.groups[cls.hole]) if cls.hole is not None and design.groups else 0
        for cls in classes
    ]
    order = sorted(range(len(classes)), key=lambda ci: (hole_size[ci], ci))

    chunks: list[list[int]] = []
    start = 0
    while start < len(order):
        end = start
        while end < len(order) and hole_size[order[end]] == hole_size[order[start]]:
            end += 1
        section = order[start:end]
        n_points = -(-len(section) // cap)
        first = len(chunks)
        chunks.extend([] for _ in range(n_points))
        for j, ci in enumerate(section):
            chunks[first + j % n_points].append(ci)
        start = end

    hole_points: dict[int, list[int]] = {}
    for j, chunk in enumerate(chunks):
        holes = {classes[ci].hole for ci in chunk}
        if len(holes) == 1 and None not in holes:
            (hole,) = holes
            hole_points.setdefault(hole, []).append(j)
    return ClassAssignment(
        cap=cap,
        chunks=tuple(tuple(c) for c in chunks),
        hole_points={h: tuple(pts) for h, pts in hole_points.items()},
    )


# ---------------------------------------------------------- the pipelines


@dataclass(frozen=True)
class PipelineResult:
    design: Design
    nesting: Nesting
    certificate: Certificate
    ingredients: tuple[Ingredient, ...]

    @property
    def w(self) -> int:
        return self.nesting.w


class _Builder:
    """Accumulates blocks, nested points, and new-point labels."""

    def __init__(self, v: int):
        self.v = v
        self.blocks: list[tuple[int, ...]] = []
        self.assignment: list[int] = []
        self.new_labels: list[str] = []

    def new_point(self, label: str) -> int:
        self.new_labels.append(label)
        return self.v + len(self.new_labels) - 1

    def add(self, block, nest: int) -> None:
        self.blocks.append(as_block(block))
        self.assignment.append(nest)

    def extend_internal(self, blocks, assignment) -> None:
        for block, nest in zip(blocks, assignment):
            self.add(block, nest)

    def augmented_pairs(self):
        w = self.v + len(self.new_labels)
        return pair_counts(
            [as_block(b + (n,)) for b, n in zip(self.blocks, self.assignment)], w
        )

    def finish(self, lam: int = 2) -> tuple[Design, Nesting]:
        w = self.v + len(self.new_labels)
        labels = tuple(str(i) for i in range(self.v)) + tuple(self.new_labels)
        design = Design(
            DesignParams(self.v, 3, lam),
            PointUniverse(self.v, self.v, labels[: self.v]),
            tuple(self.blocks),
        )
        nesting = Nesting(PointUniverse(self.v, w, labels), tuple(self.assignment))
        return design, nesting


def _attach_classes(builder: _Builder, gdd: Design, assignment: ClassAssignment,
                    label: str = "∞") -> list[int]:
    """Nest every class of the resolvable/frame ingredient at its new point."""
    points = [builder.new_point(f"{label}{j + 1}") for j in range(assignment.count)]
    for j, chunk in enumerate(assignment.chunks):
        for ci in chunk:
            for bi in gdd.resolution.classes[ci].blocks:
                builder.add(gdd.blocks[bi], points[j])
    return points


def _fill_with_fixture(builder: _Builder, name: str, group: tuple[int, ...],
                       new_targets: list[int], reuse_guard: set[int] | None = None,
                       strong: bool = False) -> None:
    """Copy a nested small BIBD onto a group, mapping its new points.

    ``new_targets`` receive the fixture's new points in order; targets
    already used elsewhere must be listed in ``reuse_guard`` so the pair
    discipline is checked before the blocks go in: a reused point must
    never have met any fill point (strong), or must have pair slack left
    (weak, checked against lambda + 1 = 3).
    """
    rec = fixture(name)
    fd, fn = rec.design, rec.nesting
    if len(group) != fd.v:
        raise ValueError(f"fixture {name} fills groups of size {fd.v}, got {len(group)}")
    if len(new_targets) != fn.w - fd.v:
        raise ValueError(f"fixture {name} needs {fn.w - fd.v} new points")
    mapping = {i: p for i, p in enumerate(sorted(group))}
    mapping.update({fd.v + j: t for j, t in enumerate(new_targets)})

    if reuse_guard:
        existing = builder.augmented_pairs()
        planned: dict[tuple[int, int], int] = {}
        for fi, fb in enumerate(fd.blocks):
            nest = mapping[fn.assignment[fi]]
            if nest not in reuse_guard:
                continue
            for x in fb:
                key = tuple(sorted((mapping[x], nest)))
                planned[key] = planned.get(key, 0) + 1
        for (a, b), count in planned.items():
            have = existing.get(a, b)
            limit = 0 if strong else 3 - count
            if have > limit:
                raise NestingError(
                    "ILLEGAL_REUSE",
                    f"reusing point {b} inside this group repeats a pair",
                    payload={"point": b, "pair": [a, b], "existing": int(have)},
                )

    for fi, fb in enumerate(fd.blocks):
        builder.add((mapping[x] for x in fb), mapping[fn.assignment[fi]])


def _unsupported(v: int, mode: str, reason: str) -> NestingError:
    return NestingError(
        "UNSUPPORTED_CASE",
        f"no construction for v={v} {mode.lower()}: {reason}",
        payload={"v": v, "mode": mode, "reason": reason},
    )


def _finish(builder: _Builder, mode: str, ingredients: list[Ingredient],
            expected_w: int, extra_notes: tuple[str, ...] = ()) -> PipelineResult:
    design, nesting = builder.finish()
    if nesting.w != expected_w:
        raise NestingError(
            "CONTRACT_VIOLATION",
            f"pipeline produced w={nesting.w}, expected {expected_w}",
        )
    verify = verify_strong_nesting if mode == "STRONG" else verify_weak_nesting
    cert = verify(design, nesting)
    _demand(cert, f"pipeline output ({design.v},3,2) {mode.lower()}")
    cert = check_optimal(cert, mode)
    notes = tuple(ing.note() for ing in ingredients) + extra_notes
    cert = replace(cert, notes=cert.notes + notes)
    return PipelineResult(design, nesting, cert, tuple(ingredients))


def _request_gdd_pair(v: int, group_size: int, mode: str,
                      search_seconds: float) -> tuple[Design, Nesting, Design, list[Ingredient]]:
    """The nested GDD plus resolvable GDD on shared groups, relabelled."""
    u = v // group_size
    gtype = [group_size] * u
    rgdd_ing = provide(
        IngredientRequest("RESOLVABLE_GDD", {"k": 3, "lam": 1, "type": gtype}),
        search_seconds,
    )
    ngdd_ing = provide(
        IngredientRequest("NESTED_GDD", {"k": 3, "lam": 1, "type": gtype}),
        search_seconds,
    )
    rgdd = rgdd_ing.design
    ngdd, nnest = relabel_onto(ngdd_ing.design, ngdd_ing.nesting, rgdd.groups)
    assert nnest is not None
    return ngdd, nnest, rgdd, [ngdd_ing, rgdd_ing]


def _pipeline_3mod6(v: int, mode: str, search_seconds: float) -> PipelineResult:
    """v = 6t+3, t >= 2: Kirkman classes over an internally nested GDD.

    One Kirkman class becomes the groups, the rest are nested at new
    points (three classes each weak, one each strong); each group triple
    enters twice more as a block, nested at one shared point (weak) or
    two (strong)."""
    t = (v - 3) // 6
    kts_ing = provide(IngredientRequest("KTS", {"v": v}), search_seconds)
    rgdd = resolvable_from_kts(kts_ing.design)
    gtype = [3] * (2 * t + 1)
    ngdd_ing = provide(
        IngredientRequest("NESTED_GDD", {"k": 3, "lam": 1, "type": gtype}),
        search_seconds,
    )
    ngdd, nnest = relabel_onto(ngdd_ing.design, ngdd_ing.nesting, rgdd.groups)
    builder = _Builder(v)
    builder.extend_internal(ngdd.blocks, nnest.assignment)
    _attach_classes(builder, rgdd, assign_classes(rgdd, cap=3 if mode == "WEAK" else 1))
    shared = [builder.new_point("α1")]
    if mode == "STRONG":
        shared.append(builder.new_point("α2"))
    for grp in rgdd.groups:
        builder.add(grp, shared[0])
        builder.add(grp, shared[-1])
    expected = v + (t + 1 if mode == "WEAK" else 3 * t + 2)
    return _finish(builder, mode, [ngdd_ing, kts_ing], expected)


def _pipeline_0mod6(v: int, mode: str, search_seconds: float) -> PipelineResult:
    """v = 6t, t >= 4, t != 6: two GDDs of type 6^t plus size-6 fills."""
    t = v // 6
    ngdd, nnest, rgdd, ingredients = _request_gdd_pair(v, 6, mode, search_seconds)
    builder = _Builder(v)
    builder.extend_internal(ngdd.blocks, nnest.assignment)
    _attach_classes(builder, rgdd, assign_classes(rgdd, cap=3 if mode == "WEAK" else 1))
    if mode == "WEAK":
        shared = [builder.new_point("α1")]
        for grp in rgdd.groups:
            _fill_with_fixture(builder, "E6", grp, shared)
        expected = 7 * t
    else:
        shared = [builder.new_point(f"α{i + 1}") for i in range(5)]
        for grp in rgdd.groups:
            _fill_with_fixture(builder, "strongE6", grp, shared)
        expected = 9 * t + 2
    return _finish(builder, mode, ingredients, expected)


def _pipeline_0mod12_strong(v: int, search_seconds: float) -> PipelineResult:
    """v = 12t, t >= 4: weight a 4-GDD of type 6^t by two, fill with the
    strongly nested twelve-point example; w = 18t meets the bound."""
    t = v // 12
    master_ing = provide(
        IngredientRequest("MASTER_GDD", {"k": 4, "lam": 1, "type": [6] * t}),
        search_seconds,
    )
    filler_ing = provide(
        IngredientRequest("NESTED_GDD", {"k": 3, "lam": 1, "type": [2, 2, 2, 2]}),
        search_seconds,
    )
    ngdd, nnest = wfc_weight(master_ing.design, 2, filler_ing.design, filler_ing.nesting)
    _demand(verify_nested_gdd(ngdd, nnest, strong=True), "weighted nested GDD")
    rgdd_ing = provide(
        IngredientRequest("RESOLVABLE_GDD", {"k": 3, "lam": 1, "type": [12] * t}),
        search_seconds,
    )
    rgdd = rgdd_ing.design
    ngdd, nnest = relabel_onto(ngdd, nnest, rgdd.groups)
    builder = _Builder(v)
    builder.extend_internal(ngdd.blocks, nnest.assignment)
    _attach_classes(builder, rgdd, assign_classes(rgdd, cap=1))
    shared = [builder.new_point(f"α{i + 1}") for i in range(6)]
    for grp in rgdd.groups:
        _fill_with_fixture(builder, "E12strong", grp, shared)
    return _finish(builder, "STRONG", [master_ing, filler_ing, rgdd_ing], 18 * t)


def _frame_pipeline(v: int, mode: str, master_type: list[int],
                    search_seconds: float) -> PipelineResult:
    """Common core of the v = 4 and 10 (mod 12) cases.

    A 4-GDD master of the given type, weighted by two, yields both a
    3-frame and a nested 3-GDD on the same groups.  Holey classes are
    nested at new points; group fills use the four-point example on
    small groups and the ten-point example on a size-10 group, reusing
    exactly the points whose classes are holed at the group being
    filled."""
    master_ing = provide(
        IngredientRequest("MASTER_GDD", {"k": 4, "lam": 1, "type": master_type}),
        search_seconds,
    )
    frame_filler_ing = provide(
        IngredientRequest("FRAME", {"k": 3, "lam": 1, "type": [2, 2, 2, 2]}),
        search_seconds,
    )
    ngdd_filler_ing = provide(
        IngredientRequest("NESTED_GDD", {"k": 3, "lam": 1, "type": [2, 2, 2, 2]}),
        search_seconds,
    )
    frame = frame_construction(master_ing.design, 2, frame_filler_ing.design)
    _demand(verify_gdd(frame), "weighted frame")
    check = verify_resolution(frame)
    if not check.ok:
        raise NestingError("CONTRACT_VIOLATION", "weighted frame classes invalid", payload=check.witness)
    ngdd, nnest = wfc_weight(master_ing.design, 2, ngdd_filler_ing.design, ngdd_filler_ing.nesting)
    _demand(verify_nested_gdd(ngdd, nnest, strong=True), "weighted nested GDD")
    if ngdd.groups != frame.groups:
        raise NestingError("CONTRACT_VIOLATION", "frame and nested GDD disagree on groups")

    builder = _Builder(v)
    builder.extend_internal(ngdd.blocks, nnest.assignment)
    assignment = assign_classes(frame, cap=3 if mode == "WEAK" else 1)
    class_points = _attach_classes(builder, frame, assignment)
    shared = builder.new_point("α1")
    strong = mode == "STRONG"
    for gi, grp in enumerate(frame.groups):
        own = [class_points[j] for j in assignment.hole_points.get(gi, ())]
        if len(grp) == 4:
            targets = own + [shared] if strong else [shared]
            name = "E4strong" if strong else "E4"
        elif len(grp) == 10:
            targets = own + [shared] if strong else own
            name = "E10strong" if strong else "E10"
        else:
            raise NestingError("CONTRACT_VIOLATION", f"unexpected group size {len(grp)}")
        _fill_with_fixture(builder, name, grp, targets,
                           reuse_guard=set(own) if own and name != "E4" else None,
                           strong=strong)
    ingredients = [master_ing, frame_filler_ing, ngdd_filler_ing]
    # both modes and both group shapes add the class points plus one shared
    expected = v + assignment.count + 1
    return _finish(builder, mode, ingredients, expected)


def _pipeline_1mod6_weak(v: int, search_seconds: float) -> PipelineResult:
    return construct_cyclic_1mod6(v, search_seconds=search_seconds)


def construct_cyclic_1mod6(v: int, search_seconds: float = 60.0) -> PipelineResult:
    """v = 1 (mod 6): two copies of one triple system on Z_v.

    The first copy carries a minimal (hence perfect) nesting, found by
    translate patterns on the base blocks or exact cover; the second
    nests every full orbit at its own new point, landing exactly on the
    weak cap of three once the copies are joined.  w = (7v-1)/6.
    """
    if v % 6 != 1:
        raise _unsupported(v, "WEAK", "the two-copy cyclic route needs v = 1 (mod 6)")
    notes: tuple[str, ...] = ()
    perfect = _search_perfect_sts(v)
    if perfect is None:
        notes += (
            f"cyclic translate nesting and exact cover both exhausted for v={v}; "
            "falling back to a file-supplied minimal nested triple system",
        )
        perfect = provide(
            IngredientRequest(
                "NESTED_BIBD",
                {"v": v, "k": 3, "lam": 1, "mode": "MINIMAL"},
                prefer=("FILE",),
            ),
            search_seconds,
        )
    system = cyclic_sts(v)
    design2, _ = develop(system)
    orbit_nesting = nest_cyclic_orbits(system)

    builder = _Builder(v)
    builder.extend_internal(perfect.design.blocks, perfect.nesting.assignment)
    orbit_points = [
        builder.new_point(f"∞{i + 1}") for i in range(orbit_nesting.w - v)
    ]
    for bi, block in enumerate(design2.blocks):
        builder.add(block, orbit_points[orbit_nesting.assignment[bi] - v])
    return _finish(builder, "WEAK", [perfect], (7 * v - 1) // 6, extra_notes=notes)


def _pipeline_1mod6_strong(v: int, search_seconds: float) -> PipelineResult:
    """v = 1 (mod 6), v >= 19: a perfectly nested triple system joined
    with a Hanani system whose near classes take one new point each."""
    hanani_ing = provide(IngredientRequest("HANANI_TS", {"v": v}), search_seconds)
    perfect = _search_perfect_sts(v)
    if perfect is None:
        perfect = provide(
            IngredientRequest(
                "NESTED_BIBD",
                {"v": v, "k": 3, "lam": 1, "mode": "MINIMAL"},
                prefer=("FILE",),
            ),
            search_seconds,
        )
    hanani = hanani_ing.design
    n_classes = len(hanani.resolution.classes)
    if n_classes != (v + 1) // 2:
        raise NestingError(
            "CONTRACT_VIOLATION",
            f"a Hanani system on {v} points has {(v + 1) // 2} partial classes, got {n_classes}",
        )
    builder = _Builder(v)
    builder.extend_internal(perfect.design.blocks, perfect.nesting.assignment)
    for ci, cls in enumerate(hanani.resolution.classes):
        point = builder.new_point(f"∞{ci + 1}")
        for bi in cls.blocks:
            builder.add(hanani.blocks[bi], point)
    return _finish(builder, "STRONG", [perfect, hanani_ing], (3 * v + 1) // 2)


def _fixture_result(name: str, mode: str) -> PipelineResult:
    rec = fixture(name)
    verify = verify_strong_nesting if mode == "STRONG" else verify_weak_nesting
    cert = verify(rec.design, rec.nesting)
    _demand(cert, f"fixture {name}")
    cert = check_optimal(cert, mode)
    cert = replace(cert, notes=cert.notes + (f"fixture {name} from the packaged catalog",))
    ing = Ingredient(name, "NESTED_BIBD",
                     {"v": rec.design.v, "k": 3, "lam": 2, "mode": rec.mode},
                     rec.design, rec.nesting, "FIXTURE")
    return PipelineResult(rec.design, rec.nesting, cert, (ing,))


_FIXTURE_CASES = {
    ("WEAK", 4): "E4", ("WEAK", 6): "E6", ("WEAK", 9): "E9",
    ("WEAK", 10): "E10", ("WEAK", 12): "E12",
    ("STRONG", 4): "E4strong", ("STRONG", 6): "strongE6",
    ("STRONG", 7): "E7strong", ("STRONG", 9): "E9strong",
    ("STRONG", 10): "E10strong", ("STRONG", 12): "E12strong",
}


def construct_nested(v: int, mode: str, search_seconds: float = 60.0) -> PipelineResult:
    """Build a nested (v,3,2)-BIBD with the smallest w these routes give.

    Raises INFEASIBLE_PARAMS when no (v,3,2)-BIBD exists, UNSUPPORTED_CASE
    for the residue corners no known construction covers, and
    MISSING_INGREDIENT when a route exists but something must be supplied
    by file.  The result's certificate reports the bound and whether the
    produced w meets it.
    """
    mode = mode.upper()
    if mode == "MINIMAL":
        raise _unsupported(
            v, mode, "minimal nestings need k >= 2*lambda + 1, impossible at (3,2)"
        )
    if mode not in ("WEAK", "STRONG"):
        raise ValueError("mode must be WEAK or STRONG")
    if v < 3 or v % 3 == 2:
        raise NestingError(
            "INFEASIBLE_PARAMS",
            f"a (v,3,2)-BIBD needs v = 0 or 1 (mod 3) and v >= 3, got {v}",
        )
    if v == 3:
        # The unique (3,3,2)-BIBD is two copies of one block; any nest
        # point repeats a pair immediately, and the weak cap fails too.
        raise _unsupported(v, mode, "both blocks equal {0,1,2}; no nesting exists")

    name = _FIXTURE_CASES.get((mode, v))
    if name is not None:
        return _fixture_result(name, mode)

    if mode == "WEAK":
        if v % 6 == 1:
            return _pipeline_1mod6_weak(v, search_seconds)
        if v % 6 == 3:
            return _pipeline_3mod6(v, mode, search_seconds)
        if v % 6 == 0:
            t = v // 6
            if t in (3, 6):
                raise _unsupported(v, mode, "no resolvable or nested GDD of type 6^t at t = 3, 6")
            return _pipeline_0mod6(v, mode, search_seconds)
        if v % 12 == 4:
            if v == 16:
                raise _unsupported(v, mode, "the frame route needs v >= 28")
            return _frame_pipeline(v, mode, [2] * (3 * (v - 4) // 12 + 1), search_seconds)
        if v % 12 == 10:
            if v == 22:
                raise _unsupported(v, mode, "the frame route needs v >= 34")
            t = (v - 10) // 12
            return _frame_pipeline(v, mode, [2] * (3 * t) + [5], search_seconds)
    else:
        if v == 13:
            raise _unsupported(v, mode, "whether w = 20 is attainable at v = 13 is open")
        if v % 6 == 1:
            return _pipeline_1mod6_strong(v, search_seconds)
        if v % 6 == 3:
            return _pipeline_3mod6(v, mode, search_seconds)
        if v % 6 == 0:
            t = v // 6
            if t in (3, 6):
                raise _unsupported(v, mode, "no resolvable or nested GDD of type 6^t at t = 3, 6")
            if v % 12 == 0 and v // 12 >= 4:
                return _pipeline_0mod12_strong(v, search_seconds)
            return _pipeline_0mod6(v, mode, search_seconds)
        if v % 12 == 4:
            if v == 16:
                raise _unsupported(v, mode, "the frame route needs v >= 28")
            return _frame_pipeline(v, mode, [2] * (3 * (v - 4) // 12 + 1), search_seconds)
        if v % 12 == 10:
            if v == 22:
                raise _unsupported(v, mode, "the frame route needs v >= 34")
            t = (v - 10) // 12
            return _frame_pipeline(v, mode, [2] * (3 * t) + [5], search_seconds)
    raise _unsupported(v, mode, "no route matched")  # pragma: no cover
