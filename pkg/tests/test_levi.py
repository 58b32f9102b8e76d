import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import design_432, e4_strong_nesting, e4_weak_nesting, sts7, sts7_perfect_nesting
from nestkit.core import Design, DesignParams, NestingError, PointUniverse
from nestkit.direct import FIXTURE_NAMES, fixture
from nestkit.levi import (
    HarmoniousColouring,
    colouring_from_dict,
    colouring_to_dict,
    colouring_to_nesting,
    is_exact_colouring,
    levi_graph,
    nesting_to_colouring,
    verify_harmonious,
)
from nestkit.verify import classify


def strong_fixtures():
    return [fixture(name) for name in FIXTURE_NAMES if fixture(name).mode == "STRONG"]


def test_levi_graph_shapes():
    g7 = levi_graph(sts7())
    assert g7.vertex_count == 14
    assert len(g7.edges) == 21

    g432 = levi_graph(design_432())
    assert g432.vertex_count == 8
    assert len(g432.edges) == 12

    empty = Design(
        params=DesignParams(5, 3, 1),
        universe=PointUniverse(5, 5),
        blocks=(),
    )
    g = levi_graph(empty)
    assert g.vertex_count == 5 and g.edges == ()


def test_perfect_sts7_colouring_is_exact():
    d = sts7()
    colouring = nesting_to_colouring(d, sts7_perfect_nesting()[1])
    assert colouring.w == 7
    assert verify_harmonious(levi_graph(d), colouring).ok
    assert is_exact_colouring(d, colouring)


def test_e4strong_colouring_has_seven_colours_but_is_not_exact():
    d = design_432()
    colouring = nesting_to_colouring(d, e4_strong_nesting()[1])
    assert colouring.w == 7
    # 12 edges cannot cover all 21 colour pairs
    assert not is_exact_colouring(d, colouring)


def test_weak_nesting_is_rejected():
    with pytest.raises(NestingError) as info:
        nesting_to_colouring(design_432(), e4_weak_nesting()[1])
    assert info.value.code == "NOT_STRONG"


def test_round_trip_is_identity_on_every_strong_fixture():
    for fx in strong_fixtures():
        colouring = nesting_to_colouring(fx.design, fx.nesting)
        assert colouring.w == fx.w == fx.nesting.w
        back = colouring_to_nesting(fx.design, colouring)
        assert back == fx.nesting


def test_exactness_coincides_with_perfect_on_fixtures():
    for fx in strong_fixtures():
        colouring = nesting_to_colouring(fx.design, fx.nesting)
        perfect = "PERFECT" in classify(fx.design, fx.nesting).classification
        assert is_exact_colouring(fx.design, colouring) == perfect
    d = sts7()
    n = sts7_perfect_nesting()[1]
    assert "PERFECT" in classify(d, n).classification
    assert is_exact_colouring(d, nesting_to_colouring(d, n))


def test_two_points_sharing_a_colour_fail():
    d = design_432()
    base = nesting_to_colouring(d, e4_strong_nesting()[1])
    clash = HarmoniousColouring(
        point_colours=(0, 0, 2, 3),
        block_colours=base.block_colours,
        w=6,
    )
    with pytest.raises(NestingError) as info:
        colouring_to_nesting(d, clash)
    assert info.value.code == "NOT_HARMONIOUS"
    # points 0 and 1 share a block, so the clash shows up as a repeated
    # colour pair on two edges
    assert info.value.payload["name"] == "colour-pairs-at-most-once"


def test_improper_colouring_fails():
    d = design_432()
    block_colours = list(e4_strong_nesting()[1].assignment)
    block_colours[0] = d.blocks[0][0]  # colour a block with one of its members
    bad = HarmoniousColouring((0, 1, 2, 3), tuple(block_colours), w=7)
    cert = verify_harmonious(levi_graph(d), bad)
    assert not cert.ok
    assert cert.first_failure().name == "proper-on-every-edge"


def test_canonical_renaming_of_shifted_palette():
    d = design_432()
    shifted = HarmoniousColouring(
        point_colours=(10, 11, 12, 13),
        block_colours=(13, 14, 15, 16),
        w=7,
    )
    nesting = colouring_to_nesting(d, shifted)
    assert nesting == e4_strong_nesting()[1]


def test_palette_size_must_match():
    with pytest.raises(NestingError):
        HarmoniousColouring((0, 1), (2,), w=5)


def test_colouring_serialization_round_trip():
    colouring = nesting_to_colouring(design_432(), e4_strong_nesting()[1])
    assert colouring_from_dict(colouring_to_dict(colouring)) == colouring
    with pytest.raises(NestingError) as info:
        colouring_from_dict([1, 2, 3])
    assert info.value.code == "MALFORMED_FILE"


def test_at_least_v_colours():
    for fx in strong_fixtures():
        colouring = nesting_to_colouring(fx.design, fx.nesting)
        assert colouring.w >= fx.design.v


@settings(max_examples=60, deadline=None)
@given(st.permutations(list(range(7))))
def test_palette_bijections_wash_out(perm):
    # relabelling colours never changes harmoniousness, and the canonical
    # renaming recovers a strong nesting of the same size
    d = design_432()
    base = nesting_to_colouring(d, e4_strong_nesting()[1])
    moved = HarmoniousColouring(
        point_colours=tuple(perm[c] for c in base.point_colours),
        block_colours=tuple(perm[c] for c in base.block_colours),
        w=base.w,
    )
    nesting = colouring_to_nesting(d, moved)
    assert nesting.w == base.w
