#!/usr/bin/env python3
"""Build the named example nestings and freeze them as data files.

Each fixture is constructed from its defining description (base blocks
to develop, or an explicit block table), machine-verified in its
claimed mode at its claimed w, and only then written to
src/nestkit/data/fixtures/<name>.json.  Rerunning is idempotent byte
for byte.  A fixture that fails verification aborts the run with the
failing check, so a transcription slip cannot reach the data files.
"""

from __future__ import annotations

import sys
from dataclasses import replace
from pathlib import Path

from nestkit.core import (
    BaseBlock,
    BaseBlockSystem,
    Design,
    DesignParams,
    Nesting,
    NewPoint,
    PointUniverse,
    as_block,
    develop,
)
from nestkit.formats import design_to_dict, nesting_to_dict, save_json
from nestkit.verify import verify_strong_nesting, verify_weak_nesting

OUT = Path(__file__).resolve().parents[1] / "src" / "nestkit" / "data" / "fixtures"


def from_system(system):
    design, nesting = develop(system)
    assert nesting is not None
    return design, nesting


def explicit(v, k, lam, w, labels, rows):
    """rows: (block..., nest) tuples, already 0-indexed."""
    blocks = tuple(as_block(row[:-1]) for row in rows)
    universe = PointUniverse(v, w, tuple(labels))
    design = Design(DesignParams(v, k, lam), PointUniverse(v, v, tuple(labels[:v])), blocks)
    nesting = Nesting(universe, tuple(row[-1] for row in rows))
    return design, nesting


def e1():
    return from_system(
        BaseBlockSystem(
            modulus=5,
            bases=(BaseBlock((0, 1), nest="∞"), BaseBlock((0, 2), nest=3)),
            fixed_new=("∞",),
        )
    )


def e2():
    return from_system(
        BaseBlockSystem(
            modulus=9,
            bases=(
                BaseBlock((0, 1), nest="∞1"),
                BaseBlock((0, 2), nest="∞2"),
                BaseBlock((0, 3), nest=4),
                BaseBlock((0, 4), nest=6),
            ),
            fixed_new=("∞1", "∞2"),
        )
    )


def e3():
    return from_system(
        BaseBlockSystem(
            modulus=13,
            bases=(
                BaseBlock((0, 1), nest="∞1"),
                BaseBlock((0, 5), nest="∞2"),
                BaseBlock((0, 6), nest="∞3"),
                BaseBlock((0, 2), nest=6),
                BaseBlock((0, 3), nest=5),
                BaseBlock((0, 4), nest=1),
            ),
            fixed_new=("∞1", "∞2", "∞3"),
        )
    )


def e4():
    rows = [(0, 1, 2, 4), (0, 1, 3, 4), (0, 2, 3, 4), (1, 2, 3, 4)]
    return explicit(4, 3, 2, 5, ["1", "2", "3", "4", "∞1"], rows)


def e4strong():
    rows = [(0, 1, 2, 3), (0, 1, 3, 4), (0, 2, 3, 5), (1, 2, 3, 6)]
    return explicit(4, 3, 2, 7, ["1", "2", "3", "4", "∞1", "∞2", "∞3"], rows)


def e6():
    return from_system(
        BaseBlockSystem(
            modulus=5,
            bases=(
                BaseBlock((0, 1, 3), nest="∞1"),
                BaseBlock(("∞", 0, 1), nest=2),
            ),
            fixed_old=("∞",),
            fixed_new=("∞1",),
        )
    )


def e7():
    return from_system(
        BaseBlockSystem(
            modulus=7,
            bases=(BaseBlock((1, 2, 4), nest=0), BaseBlock((1, 2, 4), nest="∞")),
            fixed_new=("∞",),
        )
    )


def e7strong():
    # first six rows are (∞, s, s+3) nesting s+1; the orbit repeats each
    # point set twice with different nests, which is legal at lambda=2
    labels = ["0", "1", "2", "3", "4", "5", "∞", "A", "B", "C", "D"]
    A, B, C, D = 7, 8, 9, 10
    rows = [(6, s, (s + 3) % 6, (s + 1) % 6) for s in range(6)]
    rows += [
        (0, 2, 4, D),
        (1, 3, 5, D),
        (0, 1, 2, A),
        (1, 2, 3, B),
        (2, 3, 4, C),
        (3, 4, 5, A),
        (4, 5, 0, B),
        (5, 0, 1, C),
    ]
    return explicit(7, 3, 2, 11, labels, rows)


AG_ROWS = [(0, 1, 2), (3, 4, 5), (6, 7, 8)]
AG_COLS = [(0, 3, 6), (1, 4, 7), (2, 5, 8)]
AG_DIAG = [(0, 4, 8), (1, 5, 6), (2, 3, 7)]
AG_ANTI = [(0, 5, 7), (1, 3, 8), (2, 4, 6)]


def e9():
    labels = [str(i + 1) for i in range(9)] + ["∞1", "∞2"]
    rows = []
    for (block, nest) in zip(AG_ROWS, (3, 6, 0)):
        rows.append((*block, nest))
    for block in AG_COLS + AG_DIAG + AG_ANTI:
        rows.append((*block, 9))
    for (block, nest) in zip(AG_ROWS, (4, 7, 1)):
        rows.append((*block, nest))
    for block in AG_COLS + AG_DIAG + AG_ANTI:
        rows.append((*block, 10))
    return explicit(9, 3, 2, 11, labels, rows)


def e9strong():
    labels = [str(i + 1) for i in range(9)] + [f"∞{i}" for i in range(1, 6)]
    rows = []
    for (block, nest) in zip(AG_ROWS, (3, 6, 0)):
        rows.append((*block, nest))
    for (block, nest) in zip(AG_DIAG, (1, 7, 4)):
        rows.append((*block, nest))
    for (block, nest) in zip(AG_ANTI, (2, 5, 8)):
        rows.append((*block, nest))
    fresh = iter(range(9, 14))
    for cls in [AG_COLS, AG_ROWS, AG_COLS, AG_DIAG, AG_ANTI]:
        p = next(fresh)
        for block in cls:
            rows.append((*block, p))
    return explicit(9, 3, 2, 14, labels, rows)


def e10():
    labels = [str(i) for i in range(7)] + ["∞1", "∞2", "∞3", "A", "B"]
    A, B = 10, 11
    rows = [tuple(sorted(((1 + s) % 7, (2 + s) % 7, (4 + s) % 7))) + (s,) for s in range(7)]
    rows += [(7, 8, 9, 0), (7, 8, 9, 6)]
    rows += [
        (7, 0, 1, B), (8, 0, 2, B), (9, 0, 3, A),
        (7, 1, 2, 8), (8, 1, 3, A), (9, 1, 4, 7),
        (7, 2, 3, A), (8, 2, 4, 9), (9, 2, 5, B),
        (7, 3, 4, B), (8, 3, 5, B), (9, 3, 6, B),
        (7, 4, 5, A), (8, 4, 6, A), (9, 4, 0, B),
        (7, 5, 6, B), (8, 5, 0, A), (9, 5, 1, A),
        (7, 6, 0, A), (8, 6, 1, B), (9, 6, 2, A),
    ]
    return explicit(10, 3, 2, 12, labels, rows)


def e10strong():
    labels = [str(i) for i in range(7)] + ["∞1", "∞2", "∞3", "A", "B", "C", "D", "E", "F"]
    A, B, C, D, E, F = 10, 11, 12, 13, 14, 15
    rows = [tuple(sorted(((1 + s) % 7, (2 + s) % 7, (4 + s) % 7))) + (s,) for s in range(7)]
    rows += [(7, 8, 9, 1), (7, 8, 9, 4)]
    rows += [
        (7, 0, 1, A), (8, 0, 2, F), (9, 0, 3, 7),
        (7, 1, 2, B), (8, 1, 3, E), (9, 1, 4, F),
        (7, 2, 3, C), (8, 2, 4, A), (9, 2, 5, D),
        (7, 3, 4, D), (8, 3, 5, B), (9, 3, 6, A),
        (7, 4, 5, E), (8, 4, 6, C), (9, 4, 0, B),
        (7, 5, 6, F), (8, 5, 0, 9), (9, 5, 1, C),
        (7, 6, 0, 8), (8, 6, 1, D), (9, 6, 2, E),
    ]
    return explicit(10, 3, 2, 16, labels, rows)


def e12():
    return from_system(
        BaseBlockSystem(
            modulus=11,
            bases=(
                BaseBlock((0, 1, 3), nest="∞1"),
                BaseBlock((0, 1, 4), nest="∞2"),
                BaseBlock((0, 2, 6), nest=5),
                BaseBlock(("∞", 0, 5), nest=9),
            ),
            fixed_old=("∞",),
            fixed_new=("∞1", "∞2"),
        )
    )


E12STRONG_ROWS_1IDX = [
    (1, 2, 3, 4), (1, 2, 4, 5), (1, 3, 4, 8), (2, 3, 4, 6),
    (5, 6, 7, 11), (5, 6, 8, 10), (5, 7, 8, 6), (6, 7, 8, 12),
    (9, 10, 11, 3), (9, 10, 12, 4), (9, 11, 12, 10), (10, 11, 12, 2),
    (1, 5, 9, 12), (2, 6, 10, 1), (3, 7, 11, 1), (4, 8, 12, 11),
    (1, 6, 11, 9), (2, 7, 12, 3), (3, 8, 9, 5), (4, 5, 10, 7),
    (1, 6, 12, 13), (2, 5, 11, 13), (3, 8, 10, 13), (4, 7, 9, 13),
    (1, 7, 10, 14), (2, 8, 9, 14), (3, 5, 12, 14), (4, 6, 11, 14),
    (1, 8, 11, 15), (2, 7, 12, 15), (3, 6, 9, 15), (4, 5, 10, 15),
    (1, 7, 10, 16), (2, 6, 9, 16), (3, 5, 12, 16), (4, 8, 11, 16),
    (1, 8, 12, 17), (2, 5, 11, 17), (3, 6, 10, 17), (4, 7, 9, 17),
    (1, 5, 9, 18), (2, 8, 10, 18), (3, 7, 11, 18), (4, 6, 12, 18),
]


def e12strong():
    labels = [str(i + 1) for i in range(12)] + [f"∞{i}" for i in range(1, 7)]
    rows = [tuple(x - 1 for x in row) for row in E12STRONG_ROWS_1IDX]
    return explicit(12, 3, 2, 18, labels, rows)


def strong_e6():
    return from_system(
        BaseBlockSystem(
            modulus=5,
            bases=(
                BaseBlock((0, 1, 3), nest=NewPoint("∞_", 0, develop_index=True)),
                BaseBlock(("∞", 0, 1), nest=2),
            ),
            fixed_old=("∞",),
        )
    )


FIXTURES = {
    "E1": (e1, "WEAK", 6),
    "E2": (e2, "WEAK", 11),
    "E3": (e3, "WEAK", 16),
    "E4": (e4, "WEAK", 5),
    "E4strong": (e4strong, "STRONG", 7),
    "E6": (e6, "WEAK", 7),
    "E7": (e7, "WEAK", 8),
    "E7strong": (e7strong, "STRONG", 11),
    "E9": (e9, "WEAK", 11),
    "E9strong": (e9strong, "STRONG", 14),
    "E10": (e10, "WEAK", 12),
    "E10strong": (e10strong, "STRONG", 16),
    "E12": (e12, "WEAK", 14),
    "E12strong": (e12strong, "STRONG", 18),
    "strongE6": (strong_e6, "STRONG", 11),
}


def main() -> int:
    OUT.mkdir(parents=True, exist_ok=True)
    failures = 0
    for name, (builder, mode, w) in sorted(FIXTURES.items()):
        design, nesting = builder()
        # store the design in the full labelled universe of its nesting so a
        # fixture's two halves agree on labels and size
        design = replace(design, universe=nesting.universe)
        verifier = verify_strong_nesting if mode == "STRONG" else verify_weak_nesting
        cert = verifier(design, nesting)
        if not cert.ok:
            print(f"{name}: FAILED {cert.first_failure()}")
            failures += 1
            continue
        if nesting.w != w:
            print(f"{name}: w={nesting.w}, expected {w}")
            failures += 1
            continue
        payload = {
            "name": name,
            "mode": mode,
            "w": w,
            "design": design_to_dict(design),
            "nesting": nesting_to_dict(nesting),
        }
        path = save_json(payload, OUT / f"{name}.json")
        print(f"{name}: ok ({mode}, w={w}) -> {path.relative_to(OUT.parents[3])}")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
