"""Build, verify, and freeze the packaged recursion ingredients.

The recursive constructions consume a small stock of classical objects:
two Kirkman triple systems, an internally nested group divisible design,
a frame, and a block-size-4 master GDD.  Each one is rebuilt here from
first principles (affine/projective geometry, difference methods, exact
cover), pushed through the verifier, and serialized under
src/nestkit/data/ingredients/.  Rerunning the script is deterministic:
byte-identical files come out every time.

Run from the repository root:

    python3 scripts/find_ingredients.py
"""

from __future__ import annotations

import itertools
import sys
from pathlib import Path

SRC = Path(__file__).resolve().parent.parent / "src"
sys.path.insert(0, str(SRC))

from nestkit.core import (
    Design,
    DesignParams,
    PointUniverse,
    Resolution,
    ResolutionClass,
    as_block,
    develop,
    BaseBlock,
    BaseBlockSystem,
)
from nestkit.formats import design_to_dict, nesting_to_dict, save_json
from nestkit.search import nest_exact_internal
from nestkit.verify import verify_bibd, verify_gdd, verify_nested_gdd, verify_resolution

OUT_DIR = SRC / "nestkit" / "data" / "ingredients"


def kirkman_9() -> Design:
    """The Kirkman triple system on 9 points: lines of AG(2,3).

    Points are pairs over Z_3, numbered 3*row + col.  The twelve lines
    fall into four parallel classes (one per slope, plus the verticals).
    """
    def pt(r: int, c: int) -> int:
        return 3 * r + c

    classes = []
    blocks: list[tuple[int, ...]] = []
    # verticals x = c, then slopes m = 0, 1, 2 (lines y = m*x + b)
    for cls_lines in (
        [[pt(r, c) for r in range(3)] for c in range(3)],
        *(
            [[pt((m * x + b) % 3, x) for x in range(3)] for b in range(3)]
            for m in range(3)
        ),
    ):
        start = len(blocks)
        blocks.extend(as_block(line) for line in cls_lines)
        classes.append(ResolutionClass(blocks=tuple(range(start, len(blocks)))))
    return Design(
        params=DesignParams(v=9, k=3, lam=1),
        universe=PointUniverse(old_count=9, size=9),
        blocks=tuple(blocks),
        resolution=Resolution(tuple(classes)),
    )


def kirkman_15() -> Design:
    """The Kirkman triple system on 15 points from PG(3,2).

    Points are the nonzero vectors of F_2^4 (ids 0..14 are the integers
    1..15).  Lines are the triples {x, y, x^y}.  A resolution is a
    partition of the 35 lines into 7 spreads; spreads are enumerated by
    depth-first search and the partition is found by exact cover with a
    deterministic branching order.
    """
    lines = sorted(
        as_block((x - 1, y - 1, (x ^ y) - 1))
        for x, y in itertools.combinations(range(1, 16), 2)
        if x ^ y > y
    )
    line_ids = {line: i for i, line in enumerate(lines)}

    # A spread is a set of 5 pairwise disjoint lines covering all 15 points.
    spreads: list[tuple[int, ...]] = []

    def grow(chosen: list[int], covered: int) -> None:
        if len(chosen) == 5:
            spreads.append(tuple(chosen))
            return
        # branch on the lowest uncovered point to keep the search canonical
        low = next(p for p in range(15) if not covered & (1 << p))
        for li in range(chosen[-1] + 1 if chosen else 0, len(lines)):
            line = lines[li]
            if low not in line:
                continue
            mask = sum(1 << p for p in line)
            if covered & mask:
                continue
            chosen.append(li)
            grow(chosen, covered | mask)
            chosen.pop()

    grow([], 0)

    # Exact cover: pick 7 spreads that together use every line once.
    by_line: dict[int, list[int]] = {i: [] for i in range(len(lines))}
    for si, spread in enumerate(spreads):
        for li in spread:
            by_line[li].append(si)

    def cover(used_lines: set[int], picked: list[int]) -> list[int] | None:
        if len(picked) == 7:
            return picked
        target = min(
            (li for li in range(len(lines)) if li not in used_lines),
            key=lambda li: sum(
                1
                for si in by_line[li]
                if not used_lines.intersection(spreads[si])
            ),
        )
        for si in by_line[target]:
            if used_lines.intersection(spreads[si]):
                continue
            picked.append(si)
            result = cover(used_lines | set(spreads[si]), picked)
            if result is not None:
                return result
            picked.pop()
        return None

    picked = cover(set(), [])
    assert picked is not None, "PG(3,2) is resolvable; the cover search is broken"

    blocks: list[tuple[int, ...]] = []
    classes = []
    for si in picked:
        start = len(blocks)
        blocks.extend(lines[li] for li in sorted(spreads[si]))
        classes.append(ResolutionClass(blocks=tuple(range(start, len(blocks)))))
    assert len(blocks) == 35 and len({line_ids[b] for b in blocks}) == 35
    return Design(
        params=DesignParams(v=15, k=3, lam=1),
        universe=PointUniverse(old_count=15, size=15),
        blocks=tuple(blocks),
        resolution=Resolution(tuple(classes)),
    )


def gdd_mod(modulus: int, n_groups: int, bases: list[tuple[int, ...]],
            k: int) -> Design:
    """Develop base blocks mod `modulus` into a GDD grouped by residue."""
    system = BaseBlockSystem(
        modulus=modulus,
        bases=tuple(BaseBlock(entries=base) for base in bases),
    )
    design, _ = develop(system)
    groups = tuple(
        tuple(range(i, modulus, n_groups)) for i in range(n_groups)
    )
    return Design(
        params=DesignParams(v=modulus, k=k, lam=1),
        universe=design.universe,
        blocks=design.blocks,
        groups=groups,
    )


def nested_gdd_2x4() -> tuple[Design, object]:
    """Internally nested 3-GDD of type 2^4: develop {0,1,3} mod 8.

    The nesting is the unique-up-to-symmetry exact cover of the free
    cross pairs; augmented blocks form a 4-GDD of type 2^4 with every
    cross pair covered twice.
    """
    design = gdd_mod(8, 4, [(0, 1, 3)], k=3)
    nesting = nest_exact_internal(design)
    assert nesting is not None, "the nested 3-GDD of type 2^4 exists"
    return design, nesting


def frame_2x4() -> Design:
    """The 3-frame of type 2^4: develop {0,1,3} mod 8, holey classes by shift.

    The class with hole {i, i+4} consists of the translates by i+2 and
    i+6; each class partitions the six points off its hole.
    """
    base = (0, 1, 3)
    blocks: list[tuple[int, ...]] = []
    classes = []
    for g in range(4):
        start = len(blocks)
        for shift in (g + 2, g + 6):
            blocks.append(as_block((x + shift) % 8 for x in base))
        classes.append(
            ResolutionClass(blocks=tuple(range(start, len(blocks))), hole=g)
        )
    return Design(
        params=DesignParams(v=8, k=3, lam=1),
        universe=PointUniverse(old_count=8, size=8),
        blocks=tuple(blocks),
        groups=tuple((i, i + 4) for i in range(4)),
        resolution=Resolution(tuple(classes)),
    )


def master_gdd_2x7() -> Design:
    """The 4-GDD of type 2^7: develop {0,1,4,6} mod 14, groups {i, i+7}.

    The six differences of the base block are 1..6 mod 7 once each, so
    cross pairs are covered exactly once and no block meets a group twice.
    """
    return gdd_mod(14, 7, [(0, 1, 4, 6)], k=4)


def demand(cert, what: str) -> None:
    if not cert.ok:
        fail = cert.first_failure()
        raise SystemExit(f"{what}: {fail.name} failed: {fail.witness}")


def main() -> None:
    OUT_DIR.mkdir(parents=True, exist_ok=True)
    records = []

    kts9 = kirkman_9()
    demand(verify_bibd(kts9), "kts_9 bibd")
    res = verify_resolution(kts9)
    assert res.ok, res.witness
    records.append(("kts_9", "KTS", {"v": 9}, kts9, None))

    kts15 = kirkman_15()
    demand(verify_bibd(kts15), "kts_15 bibd")
    res = verify_resolution(kts15)
    assert res.ok, res.witness
    records.append(("kts_15", "KTS", {"v": 15}, kts15, None))

    ngdd, nesting = nested_gdd_2x4()
    demand(verify_gdd(ngdd), "nested_gdd_2x4 gdd")
    demand(verify_nested_gdd(ngdd, nesting, strong=True), "nested_gdd_2x4 nesting")
    records.append(
        ("nested_gdd_2x4", "NESTED_GDD", {"k": 3, "lam": 1, "type": [2, 2, 2, 2]},
         ngdd, nesting)
    )

    frame = frame_2x4()
    demand(verify_gdd(frame), "frame_2x4 gdd")
    res = verify_resolution(frame)
    assert res.ok, res.witness
    records.append(
        ("frame_2x4", "FRAME", {"k": 3, "lam": 1, "type": [2, 2, 2, 2]}, frame, None)
    )

    master = master_gdd_2x7()
    demand(verify_gdd(master), "master_gdd_2x7 gdd")
    records.append(
        ("master_gdd_2x7", "MASTER_GDD",
         {"k": 4, "lam": 1, "type": [2, 2, 2, 2, 2, 2, 2]}, master, None)
    )

    for name, kind, signature, design, nesting in records:
        payload = {
            "name": name,
            "kind": kind,
            "signature": signature,
            "design": design_to_dict(design),
            "nesting": nesting_to_dict(nesting) if nesting is not None else None,
        }
        path = OUT_DIR / f"{name}.json"
        save_json(payload, path)
        print(f"wrote {path.relative_to(SRC.parent)}")


if __name__ == "__main__":
    main()
