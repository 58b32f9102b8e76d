"""Core model: development, pair counting, augmentation."""

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

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
    augment,
    develop,
    pair_counts,
)


def brute_pair_count(blocks, x, y):
    return sum(1 for b in blocks if x in b and y in b)


def test_params_arithmetic():
    p = DesignParams(7, 3, 1)
    assert p.r == 3 and p.b == 7 and p.admissible()
    p = DesignParams(6, 3, 2)
    assert p.r == 5 and p.b == 10
    bad = DesignParams(8, 3, 1)  # r = 7/2
    assert not bad.admissible()
    with pytest.raises(NestingError) as err:
        _ = bad.r
    assert err.value.code == "INFEASIBLE_PARAMS"


def test_as_block_sorts_and_rejects_repeats():
    assert as_block([3, 1, 2]) == (1, 2, 3)
    with pytest.raises(ValueError):
        as_block([1, 1, 2])


def test_develop_pair_family_mod_5():
    # two base blocks (0,1 | ∞) and (0,2 | 3) developed mod 5
    system = BaseBlockSystem(
        modulus=5,
        bases=(
            BaseBlock((0, 1), nest="∞"),
            BaseBlock((0, 2), nest=3),
        ),
        fixed_new=("∞",),
    )
    design, nesting = develop(system)
    assert design.v == 5 and design.k == 2
    assert len(design.blocks) == 10
    assert nesting is not None and nesting.w == 6
    # underlying design is the (5,2,1)-BIBD: every pair exactly once
    for x, y in itertools.combinations(range(5), 2):
        assert brute_pair_count(design.blocks, x, y) == 1
    # the fixed new point nests exactly the five blocks of the first orbit
    assert nesting.assignment.count(5) == 5
    assert nesting.universe.label(5) == "∞"
    # second orbit nests develop with the shift
    assert nesting.assignment[5:] == tuple((3 + s) % 5 for s in range(5))


def test_develop_empty_system():
    design, nesting = develop(BaseBlockSystem(modulus=7, bases=()))
    assert design.v == 7 and design.blocks == ()
    assert nesting is not None and nesting.assignment == ()
    assert nesting.w == 7


def test_develop_indexed_new_points_mod_5():
    # (0,1,3 | ∞_0) with the subscript developed mod 5, plus (∞,0,1 | 2)
    system = BaseBlockSystem(
        modulus=5,
        bases=(
            BaseBlock((0, 1, 3), nest=NewPoint("∞_", 0, develop_index=True)),
            BaseBlock(("∞", 0, 1), nest=2),
        ),
        fixed_old=("∞",),
    )
    design, nesting = develop(system)
    assert design.v == 6
    assert len(design.blocks) == 10
    assert nesting is not None and nesting.w == 11  # 6 old + 5 new
    labels = [nesting.universe.label(i) for i in range(6, 11)]
    assert labels == ["∞_0", "∞_1", "∞_2", "∞_3", "∞_4"]
    # new ids appear in first-appearance order: orbit 1 shift s nests ∞_s
    assert nesting.assignment[:5] == (6, 7, 8, 9, 10)


def test_develop_short_orbit():
    system = BaseBlockSystem(
        modulus=9,
        bases=(BaseBlock((0, 3, 6), orbit_length=3),),
    )
    design, nesting = develop(system)
    assert nesting is None
    assert design.blocks == ((0, 3, 6), (1, 4, 7), (2, 5, 8))


def test_develop_short_orbit_must_close():
    bad = BaseBlockSystem(
        modulus=9,
        bases=(BaseBlock((0, 1, 3), orbit_length=3),),
    )
    with pytest.raises(NestingError) as err:
        develop(bad)
    assert err.value.code == "SHORT_ORBIT_DOES_NOT_CLOSE"
    nondivisor = BaseBlockSystem(
        modulus=9,
        bases=(BaseBlock((0, 1, 3), orbit_length=4),),
    )
    with pytest.raises(NestingError) as err:
        develop(nondivisor)
    assert err.value.code == "SHORT_ORBIT_DOES_NOT_CLOSE"


def test_develop_error_codes():
    with pytest.raises(NestingError) as err:
        develop(BaseBlockSystem(modulus=5, bases=(BaseBlock((0, 7), nest=1),)))
    assert err.value.code == "RESIDUE_OUT_OF_RANGE"
    with pytest.raises(NestingError) as err:
        develop(BaseBlockSystem(modulus=5, bases=(BaseBlock((0, "∞"), nest=1),)))
    assert err.value.code == "UNDECLARED_FIXED_LABEL"


def test_pair_counts_cyclic_sts7():
    design, _ = develop(BaseBlockSystem(modulus=7, bases=(BaseBlock((1, 2, 4)),)))
    table = pair_counts(design.blocks, 7)
    for x, y in itertools.combinations(range(7), 2):
        assert table.get(x, y) == 1
    assert table.total() == 21


def test_pair_counts_trivial_cases():
    assert pair_counts([], 6).max_count() == 0
    # all pairs of a 5-set as blocks: each pair counted once
    blocks = [as_block(p) for p in itertools.combinations(range(5), 2)]
    table = pair_counts(blocks, 5)
    assert all(c == 1 for _, _, c in table.items())
    assert len(list(table.items())) == 10


def test_pair_counts_multiset():
    table = pair_counts([(0, 1, 2), (0, 1, 2)], 3)
    assert table.get(0, 1) == table.get(0, 2) == table.get(1, 2) == 2


def _design_432():
    blocks = tuple(as_block(b) for b in itertools.combinations(range(4), 3))
    return Design(DesignParams(4, 3, 2), PointUniverse(4, 4), blocks)


def test_augment_single_new_point():
    design = _design_432()
    nesting = Nesting(PointUniverse(4, 5, ("1", "2", "3", "4", "∞1")), (4, 4, 4, 4))
    aug = augment(design, nesting)
    assert aug.params == DesignParams(5, 4, 3)
    assert aug.blocks == ((0, 1, 2, 4), (0, 1, 3, 4), (0, 2, 3, 4), (1, 2, 3, 4))


def test_augment_three_new_points():
    design = _design_432()
    nesting = Nesting(PointUniverse(4, 7), (3, 4, 5, 6))
    aug = augment(design, nesting)
    assert aug.v == 7
    assert aug.blocks[0] == (0, 1, 2, 3)
    assert len(aug.blocks) == len(design.blocks)


def test_augment_rejects_nested_point_inside_block():
    design = _design_432()
    nesting = Nesting(PointUniverse(4, 5), (0, 0, 0, 0))
    with pytest.raises(NestingError) as err:
        augment(design, nesting)
    assert err.value.code == "NESTED_POINT_INSIDE_BLOCK"
    assert err.value.payload == [0, 1, 2]  # block (1,2,3) does not contain 0


def test_design_structural_validation():
    with pytest.raises(ValueError):
        Design(DesignParams(4, 3, 2), PointUniverse(4, 4), ((0, 1),))
    with pytest.raises(ValueError):
        Design(DesignParams(4, 3, 2), PointUniverse(4, 4), ((0, 1, 4),))
    # groups must partition the points
    with pytest.raises(ValueError):
        Design(
            DesignParams(4, 2, 1),
            PointUniverse(4, 4),
            ((0, 1),),
            groups=((0, 1), (1, 2, 3)),
        )


blocks_strategy = st.lists(
    st.lists(st.integers(min_value=0, max_value=14), min_size=2, max_size=5, unique=True),
    max_size=25,
)


@settings(max_examples=200, deadline=None)
@given(blocks=blocks_strategy, seed=st.integers(min_value=0, max_value=2**31))
def test_pair_counts_permutation_invariance(blocks, seed):
    w = 15
    blocks = [as_block(b) for b in blocks]
    rng = np.random.default_rng(seed)
    perm = rng.permutation(w)
    relabeled = [as_block(int(perm[x]) for x in b) for b in blocks]
    direct = pair_counts(relabeled, w)
    via_table = pair_counts(blocks, w).permuted(int(p) for p in perm)
    assert direct == via_table
    assert direct.total() == sum(len(b) * (len(b) - 1) // 2 for b in blocks)


@settings(max_examples=100, deadline=None)
@given(blocks=blocks_strategy)
def test_pair_count_items_match_gets(blocks):
    blocks = [as_block(b) for b in blocks]
    table = pair_counts(blocks, 15)
    for x, y, c in table.items():
        assert c == table.get(x, y) == brute_pair_count(blocks, x, y)
