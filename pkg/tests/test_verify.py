"""Verifier behaviour on known-good and deliberately broken inputs."""

import itertools

import pytest

from nestkit.core import (
    BaseBlock,
    BaseBlockSystem,
    Design,
    DesignParams,
    Nesting,
    PointUniverse,
    Resolution,
    ResolutionClass,
    as_block,
    develop,
)
from nestkit.verify import (
    classify,
    verify_bibd,
    verify_gdd,
    verify_partial,
    verify_resolution,
    verify_strong_nesting,
    verify_weak_nesting,
)

AG23_CLASSES = [
    [(0, 1, 2), (3, 4, 5), (6, 7, 8)],
    [(0, 3, 6), (1, 4, 7), (2, 5, 8)],
    [(0, 4, 8), (1, 5, 6), (2, 3, 7)],
    [(0, 5, 7), (1, 3, 8), (2, 4, 6)],
]


def ag23():
    blocks = tuple(b for cls in AG23_CLASSES for b in cls)
    res = Resolution(
        tuple(
            ResolutionClass(tuple(range(3 * i, 3 * i + 3))) for i in range(4)
        )
    )
    return Design(DesignParams(9, 3, 1), PointUniverse(9, 9), blocks, resolution=res)


def frame_2_4():
    """3-frame of type 2^4: develop {0,1,3} mod 8, groups {i, i+4}."""
    blocks = tuple(as_block({s, (s + 1) % 8, (s + 3) % 8}) for s in range(8))
    groups = tuple((i, i + 4) for i in range(4))
    classes = (
        ResolutionClass((2, 6), hole=0),
        ResolutionClass((3, 7), hole=1),
        ResolutionClass((0, 4), hole=2),
        ResolutionClass((1, 5), hole=3),
    )
    return Design(
        DesignParams(8, 3, 1),
        PointUniverse(8, 8),
        blocks,
        groups=groups,
        resolution=Resolution(classes),
    )


def design_432():
    blocks = tuple(as_block(b) for b in itertools.combinations(range(4), 3))
    labels = ("1", "2", "3", "4")
    return Design(DesignParams(4, 3, 2), PointUniverse(4, 4, labels), blocks)


def e4_nesting():
    labels = ("1", "2", "3", "4", "∞1")
    return Nesting(PointUniverse(4, 5, labels), (4, 4, 4, 4))


def e4strong_nesting():
    labels = ("1", "2", "3", "4", "∞1", "∞2", "∞3")
    return Nesting(PointUniverse(4, 7, labels), (3, 4, 5, 6))


def test_verify_bibd_on_sts7():
    design, _ = develop(BaseBlockSystem(modulus=7, bases=(BaseBlock((0, 1, 3)),)))
    cert = verify_bibd(design)
    assert cert.ok and cert.kind == "bibd"


def test_verify_bibd_ag23():
    assert verify_bibd(ag23()).ok


def test_verify_bibd_catches_block_swap():
    base = ag23()
    blocks = base.blocks[:-1] + (base.blocks[0],)
    broken = Design(base.params, base.universe, blocks)
    cert = verify_bibd(broken)
    assert not cert.ok
    bad = cert.check("pair-balance")
    assert not bad.ok and "pair" in bad.witness


def test_verify_bibd_infeasible_params():
    design = Design(DesignParams(8, 3, 1), PointUniverse(8, 8), ())
    cert = verify_bibd(design)
    assert not cert.ok
    assert not cert.check("params-admissible").ok


def test_verify_partial_caps():
    design = design_432()
    from nestkit.core import augment

    aug = augment(design, e4_nesting())
    assert verify_partial(aug.blocks, 5, 3).ok
    under = verify_partial(aug.blocks, 5, 2)
    assert not under.ok and under.witness["count"] == 3
    # a BIBD passes with cap = lambda
    assert verify_partial(design.blocks, 4, 2).ok


def test_verify_gdd_from_kts9():
    base = ag23()
    groups = AG23_CLASSES[0]
    blocks = tuple(b for cls in AG23_CLASSES[1:] for b in cls)
    gdd = Design(
        DesignParams(9, 3, 1), PointUniverse(9, 9), blocks, groups=tuple(groups)
    )
    assert verify_gdd(gdd).ok
    # keeping the group blocks in the design breaks within-group purity
    broken = Design(
        DesignParams(9, 3, 1), PointUniverse(9, 9), base.blocks, groups=tuple(groups)
    )
    cert = verify_gdd(broken)
    assert not cert.ok


def test_verify_gdd_single_group_fails():
    blocks = ((0, 1, 2),)
    design = Design(
        DesignParams(3, 3, 1), PointUniverse(3, 3), blocks, groups=((0, 1, 2),)
    )
    cert = verify_gdd(design)
    assert not cert.ok
    assert not cert.check("block-meets-group-at-most-once").ok


def test_verify_resolution_ag23():
    assert verify_resolution(ag23()).ok


def test_verify_resolution_frame_census():
    assert verify_resolution(frame_2_4()).ok


def test_verify_resolution_detects_moved_block():
    base = ag23()
    classes = (
        ResolutionClass((0, 1, 3)),
        ResolutionClass((2, 4, 5)),
        ResolutionClass((6, 7, 8)),
        ResolutionClass((9, 10, 11)),
    )
    moved = Design(
        base.params, base.universe, base.blocks, resolution=Resolution(classes)
    )
    check = verify_resolution(moved)
    assert not check.ok and check.witness["reason"] == "not a partition"


def test_verify_resolution_bad_frame_census():
    frame = frame_2_4()
    # reassign one class's hole: partitions break, or census does
    classes = tuple(
        ResolutionClass(c.blocks, hole=0) for c in frame.resolution.classes
    )
    rebuilt = Design(
        frame.params,
        frame.universe,
        frame.blocks,
        groups=frame.groups,
        resolution=Resolution(classes),
    )
    assert not verify_resolution(rebuilt).ok


def test_weak_nesting_e4():
    cert = verify_weak_nesting(design_432(), e4_nesting())
    assert cert.ok and cert.w == 5


def test_weak_nesting_rejects_inside_point():
    design = design_432()
    nesting = Nesting(PointUniverse(4, 5), (1, 1, 1, 1))
    cert = verify_weak_nesting(design, nesting)
    assert not cert.ok
    assert not cert.check("nested-point-outside-block").ok


def test_strong_nesting_e4strong():
    cert = verify_strong_nesting(design_432(), e4strong_nesting())
    assert cert.ok and cert.w == 7


def test_strong_nesting_e4_fails_with_witness():
    cert = verify_strong_nesting(design_432(), e4_nesting())
    assert not cert.ok
    bad = cert.check("nested-pairs-distinct")
    assert bad.witness["pair"] == [0, 4]
    assert bad.witness["labels"] == ["1", "∞1"]


def test_classify_perfect_nested_sts7():
    design, _ = develop(BaseBlockSystem(modulus=7, bases=(BaseBlock((1, 2, 4)),)))
    nesting = Nesting(PointUniverse(7, 7), tuple(range(7)))
    cert = classify(design, nesting)
    assert cert.ok
    assert cert.classification == ("WEAK", "STRONG", "MINIMAL", "PERFECT")


def test_classify_e4strong_weak_strong_only():
    cert = classify(design_432(), e4strong_nesting())
    assert cert.ok
    assert cert.classification == ("WEAK", "STRONG")


def test_classify_e4_weak_only():
    cert = classify(design_432(), e4_nesting())
    assert cert.ok
    assert cert.classification == ("WEAK",)


def test_classify_rejects_non_nesting():
    design = design_432()
    nesting = Nesting(PointUniverse(4, 4), (3, 0, 1, 0))  # pair caps blown
    cert = classify(design, nesting)
    assert not cert.ok
    assert "WEAK" not in cert.classification
