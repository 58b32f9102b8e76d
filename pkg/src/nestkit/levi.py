"""Incidence graphs and harmonious colourings.

The Levi graph of a design is the bipartite graph whose vertices are the
points on one side and the blocks on the other, with an edge for every
incidence x in A.  A vertex colouring of it is *harmonious* when it is
proper and no unordered pair of colours sits on two different edges.

Strong nestings and harmonious colourings are two views of the same
object.  Colour every point with itself and every block with its nested
point: properness is exactly the rule that a block never nests one of
its own members, and the at-most-once rule on colour pairs is exactly
distinctness of the nested pairs {x, nest(A)}.  Conversely a harmonious
colouring forces all point colours to be distinct (two points sharing a
colour would repeat a colour pair through any block containing both), so
after renaming colours it hands back a strong nesting.

A harmonious colouring is *exact* when every one of the C(w,2) colour
pairs is used, necessarily once.  Since the graph has one edge per
incidence, exactness pins the edge count to C(w,2), which for a minimal
strong nesting of a BIBD happens precisely when the nesting is perfect.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import Design, Nesting, NestingError, PointUniverse
from .verify import Certificate, Check, verify_strong_nesting


@dataclass(frozen=True)
class LeviGraph:
    """Point vertices 0..v-1, block vertex v+i for block index i."""

    v: int
    block_count: int
    edges: tuple[tuple[int, int], ...]  # (point, v + block_index), design order

    @property
    def vertex_count(self) -> int:
        return self.v + self.block_count


@dataclass(frozen=True)
class HarmoniousColouring:
    """One colour id per vertex of a Levi graph; w = palette actually used."""

    point_colours: tuple[int, ...]
    block_colours: tuple[int, ...]
    w: int

    def __post_init__(self) -> None:
        used = set(self.point_colours) | set(self.block_colours)
        if any(c < 0 for c in used):
            raise NestingError("CONTRACT_VIOLATION", "colour ids must be non-negative")
        if self.w != len(used):
            raise NestingError(
                "CONTRACT_VIOLATION",
                f"palette size {self.w} does not match {len(used)} colours used",
            )


def levi_graph(design: Design) -> LeviGraph:
    v = design.v
    edges = []
    for bi, block in enumerate(design.blocks):
        for x in block:
            edges.append((x, v + bi))
    return LeviGraph(v=v, block_count=len(design.blocks), edges=tuple(edges))


def verify_harmonious(graph: LeviGraph, colouring: HarmoniousColouring) -> Certificate:
    """Proper on every edge, and each colour pair on at most one edge."""
    checks = []

    sized = len(colouring.point_colours) == graph.v and len(
        colouring.block_colours
    ) == graph.block_count
    witness = None
    if not sized:
        witness = {
            "points": [len(colouring.point_colours), graph.v],
            "blocks": [len(colouring.block_colours), graph.block_count],
        }
    checks.append(Check("vertices-all-coloured", sized, witness))

    proper = sized
    pairs_once = sized
    if sized:
        colour_of = list(colouring.point_colours) + list(colouring.block_colours)
        seen: dict[tuple[int, int], tuple[int, int]] = {}
        for edge in graph.edges:
            x, a = edge
            cx, ca = colour_of[x], colour_of[a]
            if cx == ca:
                proper = False
                checks.append(
                    Check("proper-on-every-edge", False, {"edge": [x, a - graph.v]})
                )
                break
            key = (min(cx, ca), max(cx, ca))
            if key in seen and pairs_once:
                pairs_once = False
                first = seen[key]
                checks.append(
                    Check(
                        "colour-pairs-at-most-once",
                        False,
                        {
                            "pair": list(key),
                            "edges": [
                                [first[0], first[1] - graph.v],
                                [x, a - graph.v],
                            ],
                        },
                    )
                )
            seen.setdefault(key, edge)
        if proper:
            checks.append(Check("proper-on-every-edge", True))
        if pairs_once:
            checks.append(Check("colour-pairs-at-most-once", True))

    ok = sized and proper and pairs_once
    return Certificate(kind="harmonious-colouring", ok=ok, checks=tuple(checks), w=colouring.w)


def nesting_to_colouring(design: Design, nesting: Nesting) -> HarmoniousColouring:
    """Colour points by themselves and blocks by their nested point."""
    cert = verify_strong_nesting(design, nesting)
    if not cert.ok:
        failed = cert.first_failure()
        raise NestingError(
            "NOT_STRONG",
            f"nesting is not strong, failed check {failed.name!r}",
            payload=failed.as_dict(),
        )
    point_colours = tuple(range(design.v))
    block_colours = tuple(nesting.assignment)
    w = len(set(point_colours) | set(block_colours))
    colouring = HarmoniousColouring(point_colours, block_colours, w)
    recheck = verify_harmonious(levi_graph(design), colouring)
    if not recheck.ok:
        raise NestingError(
            "CONTRACT_VIOLATION",
            "strong nesting produced a non-harmonious colouring",
            payload=recheck.first_failure().as_dict(),
        )
    return colouring


def colouring_to_nesting(design: Design, colouring: HarmoniousColouring) -> Nesting:
    """Rename colours so points get their own ids, then read off block nests.

    Point colours are all distinct in a harmonious colouring of a design
    with every point pair covered, so the renaming sends point x's colour
    to x; the leftover block-only colours become the fresh ids v, v+1, ...
    in increasing colour order.
    """
    graph = levi_graph(design)
    cert = verify_harmonious(graph, colouring)
    if not cert.ok:
        failed = cert.first_failure()
        raise NestingError(
            "NOT_HARMONIOUS",
            f"colouring failed check {failed.name!r}",
            payload=failed.as_dict(),
        )

    rename: dict[int, int] = {}
    for x, c in enumerate(colouring.point_colours):
        if c in rename:
            raise NestingError(
                "NOT_HARMONIOUS",
                "two points share a colour",
                payload={"points": [rename[c], x], "colour": c},
            )
        rename[c] = x

    extras = sorted(set(colouring.block_colours) - set(colouring.point_colours))
    for offset, c in enumerate(extras):
        rename[c] = design.v + offset

    w = design.v + len(extras)
    if w == design.universe.size:
        universe = design.universe
    else:
        labels = None
        if design.universe.labels is not None:
            labels = design.universe.labels[: design.v] + tuple(
                f"n{i}" for i in range(design.v, w)
            )
        universe = PointUniverse(design.v, w, labels)
    nesting = Nesting(universe, tuple(rename[c] for c in colouring.block_colours))

    recheck = verify_strong_nesting(design, nesting)
    if not recheck.ok:
        raise NestingError(
            "CONTRACT_VIOLATION",
            "harmonious colouring produced a non-strong nesting",
            payload=recheck.first_failure().as_dict(),
        )
    return nesting


def is_exact_colouring(design: Design, colouring: HarmoniousColouring) -> bool:
    """True when every one of the C(w,2) colour pairs sits on an edge.

    Harmonious already means no pair repeats, so exactness reduces to the
    edge count hitting C(w,2) with no pair missing.
    """
    graph = levi_graph(design)
    if not verify_harmonious(graph, colouring).ok:
        return False
    colour_of = list(colouring.point_colours) + list(colouring.block_colours)
    used = {
        (min(colour_of[x], colour_of[a]), max(colour_of[x], colour_of[a]))
        for x, a in graph.edges
    }
    return len(used) == colouring.w * (colouring.w - 1) // 2


def colouring_to_dict(colouring: HarmoniousColouring) -> dict:
    return {
        "point_colours": list(colouring.point_colours),
        "block_colours": list(colouring.block_colours),
        "w": colouring.w,
    }


def colouring_from_dict(payload: object) -> HarmoniousColouring:
    if not isinstance(payload, dict):
        raise NestingError("MALFORMED_FILE", "colouring payload must be an object")
    try:
        return HarmoniousColouring(
            point_colours=tuple(int(c) for c in payload["point_colours"]),
            block_colours=tuple(int(c) for c in payload["block_colours"]),
            w=int(payload["w"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise NestingError("MALFORMED_FILE", f"bad colouring payload: {exc}") from exc
