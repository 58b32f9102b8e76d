"""Small designs shared across test modules, built inline.

Everything here is constructed from first principles (affine plane of
order 3, the unique (7,3,1) difference set, the four triples on four
points) so tests never depend on the package's own generators for their
expected values.
"""

from nestkit.core import (
    Design,
    DesignParams,
    Nesting,
    PointUniverse,
    Resolution,
    ResolutionClass,
)

# affine plane AG(2,3) on points 3*row + col, as four parallel classes
AG23_CLASSES = (
    ((0, 1, 2), (3, 4, 5), (6, 7, 8)),
    ((0, 3, 6), (1, 4, 7), (2, 5, 8)),
    ((0, 4, 8), (2, 3, 7), (1, 5, 6)),
    ((0, 5, 7), (1, 3, 8), (2, 4, 6)),
)


def ag23(with_resolution=True):
    blocks = tuple(b for cls in AG23_CLASSES for b in cls)
    resolution = None
    if with_resolution:
        resolution = Resolution(
            tuple(
                ResolutionClass(blocks=tuple(range(3 * i, 3 * i + 3)))
                for i in range(4)
            )
        )
    return Design(
        params=DesignParams(9, 3, 1),
        universe=PointUniverse(9, 9),
        blocks=blocks,
        resolution=resolution,
    )


def sts7():
    blocks = tuple(
        tuple(sorted(((0 + s) % 7, (1 + s) % 7, (3 + s) % 7))) for s in range(7)
    )
    return Design(
        params=DesignParams(7, 3, 1),
        universe=PointUniverse(7, 7),
        blocks=blocks,
    )


def sts7_perfect_nesting():
    # {s, s+1, s+3} is {1,2,4} shifted by s-1, and {1,2,4} nests 0, so
    # the block at shift s nests s-1; augmented blocks cover every
    # difference class exactly twice
    d = sts7()
    assignment = []
    for b in d.blocks:
        s = next(x for x in range(7) if {(x) % 7, (x + 1) % 7, (x + 3) % 7} == set(b))
        assignment.append((s + 6) % 7)
    return d, Nesting(universe=PointUniverse(7, 7), assignment=tuple(assignment))


def design_432():
    labels = ("1", "2", "3", "4", "∞1", "∞2", "∞3")
    return Design(
        params=DesignParams(4, 3, 2),
        universe=PointUniverse(4, 7, labels=labels),
        blocks=((0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)),
    )


def e4_weak_nesting():
    # every block nests the same fresh point; weak but not strong
    d = design_432()
    u = PointUniverse(4, 5, labels=("1", "2", "3", "4", "∞1"))
    return d, Nesting(universe=u, assignment=(4, 4, 4, 4))


def e4_strong_nesting():
    d = design_432()
    u = d.universe
    # blocks (0,1,2),(0,1,3),(0,2,3),(1,2,3) nest 3, ∞1, ∞2, ∞3
    return d, Nesting(universe=u, assignment=(3, 4, 5, 6))
