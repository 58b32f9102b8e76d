"""Direct constructions: explicit families built from base blocks.

Four cyclic families produce weak nestings of the unique (v,2,1)
design (the complete graph) for every v >= 4, one family per residue
of v mod 4, each meeting the weak lower bound ceil((5v-1)/4) exactly.
The base blocks pair each difference class with either a fresh point
or a carefully chosen old point so that every augmented pair lands on
the lambda+1 = 2 cap without overshooting.

For v = 4t+1 the weak family upgrades to a strong nesting: the blocks
that were nested at indexed fresh points (the even difference classes)
are re-nested through a proper edge colouring of the graph those
blocks form.  A colour class is a matching, so no two blocks sharing a
point nest the same fresh point, which is exactly the strong
condition.  The graph is 2t-regular on an odd number of vertices, so
it has no perfect matching and genuinely needs 2t+1 colours; the total
is w = v + 2t + 1 = 6t + 2.

Cyclic Steiner triple systems come from difference triples: a
partition of {1..(v-1)/2} (minus v/3 when 3 | v) into triples {a,b,c}
with a+b = c or a+b+c = v.  A short backtracking search finds the
partition; closed-form Skolem sequences would also work but buy
nothing at these sizes.  v = 9 admits no such partition and is the one
genuinely missing case among v = 1, 3 (mod 6).

Named example nestings that appear as test subjects throughout the
package live as data files; fixture() loads and re-validates nothing,
returning them as stored (their certificates are regenerated by tests
and the CLI, never trusted from disk).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from nestkit.core import (
    BaseBlock,
    BaseBlockSystem,
    Design,
    DesignParams,
    Nesting,
    NestingError,
    NewPoint,
    PointUniverse,
    as_block,
    develop,
)
from nestkit.edge_colouring import colours_used, edge_colour, is_proper_edge_colouring

__all__ = [
    "pairs_weak_system",
    "weak_nest_pairs",
    "strong_nest_pairs_1mod4",
    "cyclic_sts",
    "difference_triples",
    "nest_cyclic_orbits",
    "orbit_lengths",
    "FIXTURE_NAMES",
    "FixtureRecord",
    "fixture",
]


# ------------------------------------------------------------ pair nestings


def pairs_weak_system(v: int) -> BaseBlockSystem:
    """Base blocks for a weak nesting of the pairs on v points."""
    if v < 4:
        raise NestingError("V_TOO_SMALL", f"pair nesting families start at v=4, got {v}")
    t, res = divmod(v, 4)
    inf = lambda j: NewPoint("∞_", j)  # noqa: E731
    bases: list[BaseBlock] = []
    if res == 1:
        for j in range(1, t + 1):
            bases.append(BaseBlock((0, 2 * j), nest=inf(j)))
        for j in range(t):
            bases.append(BaseBlock((0, 2 * j + 1), nest=2 * t - 2 * j))
        return BaseBlockSystem(modulus=v, bases=tuple(bases))
    if res == 3:
        for j in range(1, t + 1):
            bases.append(BaseBlock((0, 2 * j), nest=inf(j)))
        bases.append(BaseBlock((0, 1), nest=inf(t + 1)))
        for j in range(1, t + 1):
            bases.append(BaseBlock((0, 2 * j + 1), nest=2 * t + 2 - 2 * j))
        return BaseBlockSystem(modulus=v, bases=tuple(bases))
    if res == 0:
        # v = 4t on Z_{4t-1} plus a fixed point
        for j in range(1, t + 1):
            bases.append(BaseBlock((0, 2 * j), nest=inf(j)))
        bases.append(BaseBlock(("∞", 0), nest=2 * t - 1))
        for j in range(1, t):
            bases.append(BaseBlock((0, 2 * j - 1), nest=t + j - 1))
        return BaseBlockSystem(modulus=v - 1, bases=tuple(bases), fixed_old=("∞",))
    # v = 4t+2 on Z_{4t+1} plus a fixed point
    for j in range(1, t + 2):
        bases.append(BaseBlock((0, 2 * j), nest=inf(j)))
    bases.append(BaseBlock(("∞", 0), nest=2 * t - 1))
    for j in range(1, t):
        bases.append(BaseBlock((0, 2 * j - 1), nest=t + j - 1))
    return BaseBlockSystem(modulus=v - 1, bases=tuple(bases), fixed_old=("∞",))


def weak_nest_pairs(v: int) -> tuple[Design, Nesting]:
    design, nesting = develop(pairs_weak_system(v))
    assert nesting is not None
    return design, nesting


def strong_nest_pairs_1mod4(v: int) -> tuple[Design, Nesting]:
    """Strong nesting of the pairs on v = 4t+1 points with w = 6t+2."""
    if v < 5:
        raise NestingError("V_TOO_SMALL", f"strong pair family starts at v=5, got {v}")
    if v % 4 != 1:
        raise NestingError(
            "UNSUPPORTED_CASE", f"strong pair family needs v = 1 (mod 4), got {v}"
        )
    t = v // 4
    blocks: list[tuple[int, ...]] = []
    nests: list[int | None] = []
    # even difference classes, to be re-nested through the colouring
    even_edges = []
    for j in range(1, t + 1):
        for s in range(v):
            e = as_block((s, (s + 2 * j) % v))
            blocks.append(e)
            nests.append(None)
            even_edges.append(e)
    # odd difference classes keep their old-point nests from the weak family
    for j in range(t):
        for s in range(v):
            blocks.append(as_block((s, (s + 2 * j + 1) % v)))
            nests.append((s + 2 * t - 2 * j) % v)

    colouring = edge_colour(v, even_edges)
    if not is_proper_edge_colouring(v, even_edges, colouring):
        raise AssertionError("edge colouring failed its independent recheck")
    n_colours = colours_used(colouring)
    if n_colours > 2 * t + 1:
        raise AssertionError(f"colouring used {n_colours} > 2t+1 colours")
    colour_id = {c: v + i for i, c in enumerate(sorted(set(colouring.values())))}

    assignment = tuple(
        colour_id[colouring[b]] if nest is None else nest
        for b, nest in zip(blocks, nests)
    )
    w = v + n_colours
    labels = tuple(str(i) for i in range(v)) + tuple(f"c{i}" for i in range(n_colours))
    design = Design(
        DesignParams(v, 2, 1),
        PointUniverse(v, v, labels[:v]),
        tuple(blocks),
    )
    return design, Nesting(PointUniverse(v, w, labels), assignment)


# ------------------------------------------------------- cyclic STS systems


def difference_triples(v: int) -> tuple[tuple[int, int, int], ...] | None:
    """Partition the difference classes of Z_v into Steiner triples.

    Returns triples (a, b, c) with a+b = c or a+b+c = v covering each
    usable difference class exactly once, or None if no partition
    exists (v = 9 is the notable refusal).
    """
    half = (v - 1) // 2
    pool = set(range(1, half + 1))
    if v % 3 == 0:
        pool.discard(v // 3)
    out: list[tuple[int, int, int]] = []

    def extend() -> bool:
        if not pool:
            return True
        a = min(pool)
        pool.discard(a)
        for b in sorted(pool):
            for c in ((a + b), (v - a - b)):
                if c != b and c in pool:
                    pool.discard(b)
                    pool.discard(c)
                    out.append((a, b, c))
                    if extend():
                        return True
                    out.pop()
                    pool.add(b)
                    pool.add(c)
        pool.add(a)
        return False

    if extend():
        return tuple(out)
    return None


def cyclic_sts(v: int) -> BaseBlockSystem:
    """Base blocks of a cyclic Steiner triple system on Z_v."""
    if v % 6 not in (1, 3):
        raise NestingError(
            "NO_CYCLIC_STS", f"triple systems need v = 1 or 3 (mod 6), got {v}"
        )
    triples = difference_triples(v)
    if triples is None:
        raise NestingError("NO_CYCLIC_STS", f"no difference-triple partition for v={v}")
    bases = [BaseBlock((0, a, (a + b) % v)) for a, b, _ in triples]
    if v % 6 == 3:
        third = v // 3
        bases.append(BaseBlock((0, third, 2 * third), orbit_length=third))
    return BaseBlockSystem(modulus=v, bases=tuple(bases))


def orbit_lengths(system: BaseBlockSystem) -> tuple[int, ...]:
    return tuple(
        b.orbit_length if b.orbit_length is not None else system.modulus
        for b in system.bases
    )


def nest_cyclic_orbits(system: BaseBlockSystem) -> Nesting:
    """Nest every block of each orbit at one fresh point per orbit.

    On its own this exceeds the weak cap for a single triple system (a
    point lies in three blocks of a full orbit); the construction using
    it always pairs the result with a second, differently nested copy
    at lambda = 2, where the cap is 3.
    """
    design, _ = develop(
        BaseBlockSystem(
            modulus=system.modulus,
            bases=tuple(BaseBlock(b.entries, nest=None, orbit_length=b.orbit_length) for b in system.bases),
            fixed_old=system.fixed_old,
            fixed_new=system.fixed_new,
        )
    )
    v = design.v
    lengths = orbit_lengths(system)
    assignment: list[int] = []
    for i, length in enumerate(lengths):
        assignment.extend([v + i] * length)
    old_labels = design.universe.labels or tuple(str(i) for i in range(v))
    labels = tuple(old_labels) + tuple(f"∞_{i}" for i in range(len(lengths)))
    universe = PointUniverse(v, v + len(lengths), labels)
    return Nesting(universe, tuple(assignment))


# ----------------------------------------------------------------- fixtures

FIXTURE_NAMES = (
    "E1",
    "E2",
    "E3",
    "E4",
    "E4strong",
    "E6",
    "E7",
    "E7strong",
    "E9",
    "E9strong",
    "E10",
    "E10strong",
    "E12",
    "E12strong",
    "strongE6",
)


@dataclass(frozen=True)
class FixtureRecord:
    name: str
    mode: str  # WEAK or STRONG, the strongest claim the fixture makes
    w: int
    design: Design
    nesting: Nesting


def fixture(name: str) -> FixtureRecord:
    if name not in FIXTURE_NAMES:
        raise NestingError(
            "UNKNOWN_FIXTURE",
            f"no fixture named {name!r}; known: {', '.join(FIXTURE_NAMES)}",
        )
    # import here: formats imports verify, which this module does not need
    from nestkit.formats import design_from_dict, nesting_from_dict

    path = resources.files("nestkit").joinpath(f"data/fixtures/{name}.json")
    data = json.loads(path.read_text(encoding="utf-8"))
    return FixtureRecord(
        name=data["name"],
        mode=data["mode"],
        w=data["w"],
        design=design_from_dict(data["design"]),
        nesting=nesting_from_dict(data["nesting"]),
    )
